#pragma once

// Shared fixtures for the test suites: a synthetic corpus builder, a
// uniform-direction stub embedder, and a free-running random sentence
// generator.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "sentmark/embedding.hpp"
#include "sentmark/generation.hpp"
#include "sentmark/prng.hpp"

namespace sentmark::testing {

inline const std::vector<std::string>& test_vocab() {
  static const std::vector<std::string> vocab = {
      // nouns
      "man", "woman", "dog", "cat", "house", "city", "river", "road", "tree",
      "bird", "child", "friend", "team", "plan", "idea", "story", "book",
      "paper", "letter", "garden", "market", "morning", "evening", "rain",
      "snow", "wind", "fire", "food", "bread", "coffee", "music", "song",
      "door", "window", "wall", "table", "chair", "boat", "car", "train",
      "field", "hill", "forest", "village", "town",
      // verbs
      "walked", "ran", "moved", "looked", "watched", "found", "made", "built",
      "wrote", "read", "spoke", "said", "told", "asked", "answered", "opened",
      "closed", "started", "finished", "helped", "carried", "brought", "took",
      "gave", "kept", "left", "stayed", "turned", "crossed", "followed",
      "reached", "visited", "waited", "worked", "played", "sang", "slept",
      "dreamed",
      // adjectives
      "big", "small", "old", "new", "young", "quick", "slow", "happy", "sad",
      "quiet", "loud", "bright", "dark", "warm", "cold", "long", "short",
      "strong", "weak", "clean", "busy", "calm", "deep", "wide", "narrow",
      "empty", "full", "fresh",
      // function words
      "the", "a", "an", "and", "with", "near", "under", "over", "through",
      "then", "still", "very", "quite", "was", "were", "had", "there"};
  return vocab;
}

// Word-salad corpus with moderate entropy; one long string of sentences.
inline std::string make_corpus(std::uint64_t seed, int sentences,
                               int min_words = 5, int max_words = 10) {
  const auto& vocab = test_vocab();
  SplitMix64 rng(seed);
  std::string out;
  for (int s = 0; s < sentences; ++s) {
    const int words =
        min_words + static_cast<int>(rng.next_below(max_words - min_words + 1));
    for (int w = 0; w < words; ++w) {
      if (!out.empty()) out.push_back(' ');
      out += vocab[rng.next_below(vocab.size())];
    }
    const std::uint64_t roll = rng.next_below(20);
    if (roll < 14) {
      out.push_back('.');
    } else if (roll < 17) {
      out.push_back(',');
    } else if (roll < 19) {
      out.push_back('?');
    } else {
      out.push_back('!');
    }
  }
  return out;
}

// Deterministic per-text embedding drawn uniformly on the unit sphere;
// exercises the geometry of the pipeline without any text structure.
class RandomUnitEmbedder final : public Embedder {
 public:
  explicit RandomUnitEmbedder(int dim, std::uint64_t salt = 0)
      : dim_(dim), salt_(salt) {}

  Vec embed(const std::string& text) const override {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw std::invalid_argument("empty sentence");
    }
    GaussianStream gauss(mix64(hash_bytes(text) ^ salt_));
    Vec v(dim_);
    double sq = 0.0;
    for (double& x : v) {
      x = gauss.next();
      sq += x * x;
    }
    const double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
    return v;
  }

  int dim() const override { return dim_; }

 private:
  int dim_;
  std::uint64_t salt_;
};

// Emits fresh random-token sentences; no corpus, no context dependence.
class RandomSentenceGenerator final : public SentenceGenerator {
 public:
  explicit RandomSentenceGenerator(int words = 6) : words_(words) {}

  Sentence next_sentence(const std::vector<Sentence>& context,
                         SplitMix64& rng) override {
    std::string text;
    for (int w = 0; w < words_; ++w) {
      if (!text.empty()) text.push_back(' ');
      const int len = 3 + static_cast<int>(rng.next_below(5));
      for (int i = 0; i < len; ++i) {
        text.push_back(static_cast<char>('a' + rng.next_below(26)));
      }
    }
    text.push_back('.');
    return {std::move(text), static_cast<int>(context.size())};
  }

 private:
  int words_;
};

}  // namespace sentmark::testing
