#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sentmark/config.hpp"
#include "sentmark/embedding.hpp"
#include "sentmark/prng.hpp"

namespace sentmark {

// One segmented sentence: nonempty body ending in exactly one delimiter from
// {, . ? !}.
struct Sentence {
  std::string text;
  int index = 0;

  bool operator==(const Sentence& other) const = default;
};

bool is_delimiter_char(char c);
bool is_delimiter_token(const std::string& token);

// Split after every delimiter, trim whitespace, drop empty or
// delimiter-only segments, and append '.' to a trailing segment that lacks a
// delimiter. Empty input gives an empty list.
std::vector<Sentence> segment_sentences(const std::string& text);

// Sentence-level generator contract. Implementations must be deterministic
// given the RNG state and must return sentences satisfying the Sentence
// invariants.
class SentenceGenerator {
 public:
  virtual ~SentenceGenerator() = default;
  virtual Sentence next_sentence(const std::vector<Sentence>& context,
                                 SplitMix64& rng) = 0;
};

// Token-level access for the KGW baseline: full-vocabulary logits
// conditioned on a token-id history.
class TokenModel {
 public:
  virtual ~TokenModel() = default;
  virtual int vocab_size() const = 0;
  virtual Vec next_logits(const std::vector<int>& history) const = 0;
  virtual const std::string& token_text(int id) const = 0;
  virtual int token_id(const std::string& token) const = 0;  // -1 when OOV
};

// Reference generator: an order-3 token n-gram model with interpolated
// backoff (trigram/bigram/unigram) and temperature sampling. Sentences are
// sampled token-by-token until a delimiter token lands, capped at 64 body
// tokens (then '.' is appended).
class NgramModel final : public SentenceGenerator, public TokenModel {
 public:
  explicit NgramModel(const std::string& corpus_text,
                      double temperature = 1.0);
  static NgramModel from_file(const std::string& path,
                              double temperature = 1.0);

  Sentence next_sentence(const std::vector<Sentence>& context,
                         SplitMix64& rng) override;

  int vocab_size() const override { return static_cast<int>(vocab_.size()); }
  Vec next_logits(const std::vector<int>& history) const override;
  const std::string& token_text(int id) const override { return vocab_[id]; }
  int token_id(const std::string& token) const override;

  // Prompt text to in-vocabulary id history (OOV tokens dropped).
  std::vector<int> encode(const std::string& text) const;
  std::string decode(const std::vector<int>& tokens) const;

  double temperature() const { return temperature_; }

 private:
  int sample(const std::vector<int>& history, SplitMix64& rng) const;

  std::vector<std::string> vocab_;
  std::map<std::string, int> token_ids_;
  std::vector<double> unigram_;  // probabilities
  std::map<std::pair<int, int>, std::map<int, int>> trigram_;
  std::map<int, std::map<int, int>> bigram_;
  std::map<std::pair<int, int>, int> trigram_totals_;
  std::map<int, int> bigram_totals_;
  double temperature_;
};

// Sample an index from softmax(logits / temperature) using one uniform draw.
int sample_categorical(const Vec& logits, double temperature, SplitMix64& rng);

// Bookkeeping for one watermarked generation run.
struct GenerationTrace {
  std::vector<Sentence> sentences;
  std::vector<int> tries_per_sentence;
  // Region validity of each accepted sentence; false only on maxout
  // fallbacks that landed in a blocked region.
  std::vector<bool> accepted_valid;
  int maxout_hits = 0;

  std::string text() const;  // sentences joined with single spaces
};

// Sentence-level semantic watermark: for each step, mask the signature space
// seeded by the previous sentence's signature, then rejection-sample
// candidates until one lands in a valid region with the margin satisfied, or
// n_max tries pass (the last sample is then accepted as-is).
GenerationTrace semantic_generate(SentenceGenerator& generator,
                                  const Embedder& embedder,
                                  const WatermarkConfig& cfg,
                                  const std::string& prompt,
                                  int num_sentences, SplitMix64& rng);

// Token ids of the green list for one step: seed =
// mask_seed(prev_token_id * prime XOR key), Fisher-Yates over the
// vocabulary, first round-half-up(gamma * vocab_size) ids, sorted.
std::vector<int> kgw_greenlist(int prev_token_id, double gamma, int vocab_size,
                               std::uint64_t key,
                               std::uint64_t prime = 2147483647ULL);

// Adds delta_bias to each green token's logit, in place.
void kgw_bias(Vec& logits, const std::vector<int>& green, double delta_bias);

// Token-level baseline: autoregressive sampling at cfg.temperature with the
// per-step green-list bias keyed to the previous token. The first step is
// unbiased when the encoded prompt is empty.
std::vector<int> kgw_generate(const TokenModel& model,
                              const WatermarkConfig& cfg,
                              const std::string& prompt, int num_tokens,
                              SplitMix64& rng);

}  // namespace sentmark
