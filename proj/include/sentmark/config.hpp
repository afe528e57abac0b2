#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace sentmark {

// Full watermark hyperparameter record shared by generation and detection.
struct WatermarkConfig {
  std::uint64_t key = 42;        // secret; derives hyperplanes and masks
  int d = 3;                     // LSH dimension (2^d semantic regions)
  double gamma = 0.25;           // valid region ratio
  double margin = 0.02;          // rejection margin m
  std::uint64_t prime = 2147483647;  // mask seed multiplier
  int n_max = 100;               // rejection sampling cap
  double delta_bias = 2.0;       // KGW green-list logit bias
  double temperature = 1.0;      // sampling temperature
  int h = 768;                   // embedding dimension

  void validate() const;  // throws std::invalid_argument with the bad field
};

enum class AttackMode { kVanilla, kBigram };

struct AttackConfig {
  double delta = 0.10;  // similarity drop ratio bound
  AttackMode mode = AttackMode::kBigram;
  int k = 25;  // paraphrase candidates per sentence
  double strength = 0.3;
  std::uint64_t seed = 1;
  // Treat candidates as unordered and sort by similarity (descending) before
  // selection; models paraphrasers that return unranked samples.
  bool sort_by_similarity = false;

  void validate() const;
};

// Everything a CLI run needs beyond the two records above.
struct RunConfig {
  WatermarkConfig watermark;
  AttackConfig attack;
  int feature_dim = 4096;
  std::uint64_t embedder_seed = 1234;
  std::string embedder_model;    // optional SSEM1 path; empty = derived
  std::string generator_corpus;  // text file for the n-gram generator
  std::uint64_t run_seed = 7;
  double contrastive_delta = 0.8;  // delta_cl
  int sem_ent_clusters = 8;

  void validate() const;
};

// Plain `key = value` file, one pair per line, '#' comments. Unknown keys
// are rejected so typos fail loudly.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::map<std::string, std::string>& kv);

// Canonical serialization (sorted key=value lines) of everything that
// affects outputs; the digest goes into run manifests. The watermark key is
// folded into the digest but never written out in clear anywhere else.
std::string canonical_config(const RunConfig& config);
std::string config_hash(const RunConfig& config);

std::string attack_mode_name(AttackMode mode);
AttackMode attack_mode_from_name(const std::string& name);

}  // namespace sentmark
