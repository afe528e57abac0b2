#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sentmark/config.hpp"
#include "sentmark/embedding.hpp"
#include "sentmark/lsh.hpp"

namespace sentmark {

// One-proportion z-score for valid-sentence counts:
// (valid - gamma*total) / sqrt(gamma*(1-gamma)*total). total must be >= 1.
double z_semantic(int valid, int total, double gamma);

// Same test over green-token counts.
double z_kgw(int green, int total, double gamma);

struct ValidityCount {
  int valid = 0;
  int total = 0;
  std::vector<bool> per_sentence;  // validity of each scored sentence
};

// Recompute the masking chain over a document. Each scored sentence is
// tested against the partition seeded by its predecessor's signature. With a
// prompt, the prompt's last sentence seeds sentence 1 and every sentence is
// scored; without one, sentence 1 only seeds sentence 2.
//
// Throws std::invalid_argument ("too short to score") when nothing is
// scoreable.
ValidityCount count_valid_sentences(const std::string& text,
                                    const Embedder& embedder,
                                    const LshHyperplanes& planes,
                                    std::uint64_t prime, double gamma,
                                    const std::optional<std::string>& prompt);

ValidityCount count_valid_sentences(const std::string& text,
                                    const Embedder& embedder,
                                    const WatermarkConfig& cfg,
                                    const std::optional<std::string>& prompt);

// Green-token count for the token-level baseline, mirroring the sentence
// chain: each token is tested against the greenlist seeded by its
// predecessor. Tokens absent from the model vocabulary are skipped.
ValidityCount count_green_tokens(const std::string& text,
                                 const class TokenModel& model,
                                 const WatermarkConfig& cfg,
                                 const std::optional<std::string>& prompt);

// Smallest threshold on the 0.00, 0.01, ..., 6.00 grid whose empirical
// false-positive rate (fraction of scores strictly above it) is <= r.
// Saturates at 6.0 when no grid point qualifies (saturated flag set).
// Requires at least 20 scores.
double calibrate_threshold(const std::vector<double>& human_scores, double r,
                           bool* saturated = nullptr);

struct ScoreSet {
  std::vector<double> positives;  // machine-generated z-scores
  std::vector<double> negatives;  // human z-scores
};

// Exact Mann-Whitney AUC: P(pos > neg) + 0.5 P(pos = neg).
double auc(const ScoreSet& scores);

// True-positive rate at the threshold calibrated for false-positive rate r.
double tp_at_fpr(const ScoreSet& scores, double r);

// Shannon entropy (natural log) of the token-trigram distribution over all
// texts. Throws when the texts contain no trigram.
double ent3(const std::vector<std::string>& texts);

// Fraction of (original, paraphrase) pairs whose LSH signatures match.
double lsh_consistency(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const Embedder& embedder, const LshHyperplanes& planes);

// Entropy of k-means cluster assignment frequencies over the texts'
// embeddings (k-means++ seeding, 50 Lloyd iterations, fixed seed).
double sem_ent(const std::vector<std::string>& texts, const Embedder& embedder,
               int k, std::uint64_t seed = 0);

struct DetectionReport {
  std::string doc_id;
  int valid = 0;      // S_V (or N_G for the token test)
  int total = 0;      // S_T (or N_T)
  double z = 0.0;
  double threshold = 0.0;
  bool verdict = false;  // z > threshold
  std::vector<bool> per_sentence_valid;
};

DetectionReport make_report(const std::string& doc_id,
                            const ValidityCount& count, double gamma,
                            double threshold);

}  // namespace sentmark
