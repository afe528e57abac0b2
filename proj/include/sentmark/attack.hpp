#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sentmark/config.hpp"
#include "sentmark/embedding.hpp"
#include "sentmark/generation.hpp"

namespace sentmark {

// Multiset intersection size of the adjacent-token-pair lists of x and s
// (repeated bigrams count multiply). Sides with fewer than two tokens
// contribute zero bigrams.
int bigram_overlap(const Sentence& x, const Sentence& s);
int bigram_count(const Sentence& s);

// Paraphrase candidates for one sentence, in beam order (index 0 = first
// beam).
struct CandidateSet {
  Sentence original;
  std::vector<Sentence> candidates;
  std::optional<std::vector<double>> similarities;  // cached sim(cand, orig)
};

// Sentence-pair similarity in [-1, 1]; stands in for a neural scorer.
using SimilarityFn =
    std::function<double(const std::string&, const std::string&)>;

// Cosine of the embedder's vectors.
SimilarityFn embedding_similarity(const Embedder& embedder);

// Among candidates x with sim(s'_1, s) - sim(x, s) <= delta * sim(s'_1, s),
// return the one with the smallest bigram overlap against the original
// (ties to the lowest beam index). When sort_by_similarity is set the
// candidates are first reordered by similarity descending, modelling
// paraphrasers that return unranked samples. Falls back to the first beam if
// the feasible set is empty (possible only with a negative first-beam
// similarity).
Sentence select_bigram_attack(const CandidateSet& candidates,
                              const SimilarityFn& similarity, double delta,
                              bool sort_by_similarity = false);

// Word -> synonyms table, plain-text TSV (word TAB syn TAB syn ...).
class SynonymTable {
 public:
  static SynonymTable builtin();
  static SynonymTable load_tsv(const std::string& path);

  const std::vector<std::string>* lookup(const std::string& word) const;
  std::size_t size() const { return table_.size(); }
  void save_tsv(const std::string& path) const;

 private:
  std::map<std::string, std::vector<std::string>> table_;
};

class Paraphraser {
 public:
  virtual ~Paraphraser() = default;
  // k candidates in quality order.
  virtual CandidateSet paraphrase(const Sentence& sentence, int k) = 0;
};

// Deterministic seed-driven perturbation paraphraser: synonym substitution,
// function-word insertion/deletion, and local non-adjacent reordering, with
// per-candidate intensity strength*(j+1)/k rising along the beam. The final
// delimiter is never touched. strength 0 reproduces the input in every beam.
class PerturbationParaphraser final : public Paraphraser {
 public:
  PerturbationParaphraser(SynonymTable table, double strength,
                          std::uint64_t seed);

  CandidateSet paraphrase(const Sentence& sentence, int k) override;

 private:
  SynonymTable table_;
  double strength_;
  std::uint64_t seed_;
};

// Paraphrase a document sentence-by-sentence. Vanilla mode takes the first
// beam; bigram mode applies select_bigram_attack. Sentences are rejoined
// with single spaces.
std::string attack_document(const std::string& doc, const AttackConfig& cfg,
                            Paraphraser& paraphraser,
                            const SimilarityFn& similarity);

}  // namespace sentmark
