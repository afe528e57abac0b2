#include "sentmark/detection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "sentmark/generation.hpp"
#include "sentmark/partition.hpp"
#include "sentmark/prng.hpp"
#include "sentmark/tokenize.hpp"

namespace sentmark {

namespace {

double z_proportion(int hits, int total, double gamma, const char* what) {
  if (total < 1) {
    throw std::invalid_argument(std::string(what) + ": total must be >= 1");
  }
  if (gamma <= 0.0 || gamma >= 1.0) {
    throw std::invalid_argument(std::string(what) + ": gamma must be in (0, 1)");
  }
  if (hits < 0 || hits > total) {
    throw std::invalid_argument(std::string(what) + ": count out of range");
  }
  return (hits - gamma * total) / std::sqrt(gamma * (1.0 - gamma) * total);
}

}  // namespace

double z_semantic(int valid, int total, double gamma) {
  return z_proportion(valid, total, gamma, "z_semantic");
}

double z_kgw(int green, int total, double gamma) {
  return z_proportion(green, total, gamma, "z_kgw");
}

ValidityCount count_valid_sentences(const std::string& text,
                                    const Embedder& embedder,
                                    const LshHyperplanes& planes,
                                    std::uint64_t prime, double gamma,
                                    const std::optional<std::string>& prompt) {
  const std::vector<Sentence> sentences = segment_sentences(text);
  std::optional<Sentence> seed_sentence;
  if (prompt) {
    const std::vector<Sentence> prompt_sentences = segment_sentences(*prompt);
    if (prompt_sentences.empty()) {
      throw std::invalid_argument("count_valid_sentences: empty prompt");
    }
    seed_sentence = prompt_sentences.back();
  }
  const std::size_t min_needed = seed_sentence ? 1 : 2;
  if (sentences.size() < min_needed) {
    throw std::invalid_argument("too short to score");
  }

  ValidityCount result;
  Signature prev_sig;
  std::size_t start;
  if (seed_sentence) {
    prev_sig = signature_of(embedder.embed(seed_sentence->text), planes);
    start = 0;
  } else {
    prev_sig = signature_of(embedder.embed(sentences[0].text), planes);
    start = 1;
  }
  for (std::size_t t = start; t < sentences.size(); ++t) {
    const RegionPartition part =
        mask_regions(prev_sig, prime, gamma, planes.d());
    const Signature sig = signature_of(embedder.embed(sentences[t].text), planes);
    const bool ok = is_valid(sig, part);
    result.per_sentence.push_back(ok);
    result.valid += ok ? 1 : 0;
    result.total += 1;
    prev_sig = sig;
  }
  return result;
}

ValidityCount count_valid_sentences(const std::string& text,
                                    const Embedder& embedder,
                                    const WatermarkConfig& cfg,
                                    const std::optional<std::string>& prompt) {
  const LshHyperplanes planes(cfg.key, cfg.d, cfg.h);
  return count_valid_sentences(text, embedder, planes, cfg.prime, cfg.gamma,
                               prompt);
}

ValidityCount count_green_tokens(const std::string& text,
                                 const TokenModel& model,
                                 const WatermarkConfig& cfg,
                                 const std::optional<std::string>& prompt) {
  auto encode = [&model](const std::string& s) {
    std::vector<int> ids;
    for (const std::string& tok : tokenize(s)) {
      const int id = model.token_id(tok);
      if (id >= 0) ids.push_back(id);
    }
    return ids;
  };
  const std::vector<int> tokens = encode(text);
  int prev = -1;
  std::size_t start = 0;
  if (prompt) {
    const std::vector<int> prompt_tokens = encode(*prompt);
    if (!prompt_tokens.empty()) prev = prompt_tokens.back();
  }
  if (prev < 0) {
    if (tokens.size() < 2) throw std::invalid_argument("too short to score");
    prev = tokens[0];
    start = 1;
  } else if (tokens.empty()) {
    throw std::invalid_argument("too short to score");
  }

  ValidityCount result;
  for (std::size_t t = start; t < tokens.size(); ++t) {
    const std::vector<int> green = kgw_greenlist(
        prev, cfg.gamma, model.vocab_size(), cfg.key, cfg.prime);
    const bool ok = std::binary_search(green.begin(), green.end(), tokens[t]);
    result.per_sentence.push_back(ok);
    result.valid += ok ? 1 : 0;
    result.total += 1;
    prev = tokens[t];
  }
  return result;
}

double calibrate_threshold(const std::vector<double>& human_scores, double r,
                           bool* saturated) {
  if (human_scores.size() < 20) {
    throw std::invalid_argument(
        "calibrate_threshold: need at least 20 human scores");
  }
  if (r <= 0.0 || r >= 1.0) {
    throw std::invalid_argument("calibrate_threshold: r must be in (0, 1)");
  }
  if (saturated) *saturated = false;
  const double n = static_cast<double>(human_scores.size());
  for (int k = 0; k <= 600; ++k) {
    const double t = k * 0.01;
    int above = 0;
    for (double s : human_scores) {
      if (s > t) ++above;
    }
    if (above / n <= r) return t;
  }
  if (saturated) *saturated = true;
  return 6.0;
}

double auc(const ScoreSet& scores) {
  if (scores.positives.empty() || scores.negatives.empty()) {
    throw std::invalid_argument("auc: both score classes must be nonempty");
  }
  // Midrank formulation of the Mann-Whitney statistic; exact with ties.
  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> all;
  all.reserve(scores.positives.size() + scores.negatives.size());
  for (double s : scores.positives) all.push_back({s, true});
  for (double s : scores.negatives) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Entry& a, const Entry& b) { return a.score < b.score; });

  const double np = static_cast<double>(scores.positives.size());
  const double nn = static_cast<double>(scores.negatives.size());
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    // midrank of the tie group [i, j), 1-based ranks
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].positive) rank_sum_pos += midrank;
    }
    i = j;
  }
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

double tp_at_fpr(const ScoreSet& scores, double r) {
  if (scores.positives.empty() || scores.negatives.empty()) {
    throw std::invalid_argument("tp_at_fpr: both score classes must be nonempty");
  }
  const double threshold = calibrate_threshold(scores.negatives, r);
  int hits = 0;
  for (double s : scores.positives) {
    if (s > threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(scores.positives.size());
}

double ent3(const std::vector<std::string>& texts) {
  std::map<std::string, int> counts;
  long long total = 0;
  for (const std::string& text : texts) {
    const std::vector<std::string> tokens = tokenize(text);
    for (std::size_t i = 0; i + 3 <= tokens.size(); ++i) {
      counts[tokens[i] + "\x1f" + tokens[i + 1] + "\x1f" + tokens[i + 2]] += 1;
      ++total;
    }
  }
  if (total == 0) {
    throw std::invalid_argument("ent3: no trigrams in input");
  }
  double entropy = 0.0;
  for (const auto& [gram, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    entropy -= p * std::log(p);
  }
  return entropy;
}

double lsh_consistency(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const Embedder& embedder, const LshHyperplanes& planes) {
  if (pairs.empty()) {
    throw std::invalid_argument("lsh_consistency: no pairs");
  }
  int same = 0;
  for (const auto& [original, paraphrase] : pairs) {
    const Signature a = signature_of(embedder.embed(original), planes);
    const Signature b = signature_of(embedder.embed(paraphrase), planes);
    if (a == b) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(pairs.size());
}

double sem_ent(const std::vector<std::string>& texts, const Embedder& embedder,
               int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("sem_ent: k must be >= 2");
  if (texts.size() < static_cast<std::size_t>(k)) {
    throw std::invalid_argument("sem_ent: fewer texts than clusters");
  }
  const std::size_t n = texts.size();
  std::vector<Vec> points(n);
  for (std::size_t i = 0; i < n; ++i) points[i] = embedder.embed(texts[i]);

  auto sq_dist = [](const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      s += d * d;
    }
    return s;
  };

  // k-means++ seeding on the documented PRNG.
  SplitMix64 rng(mix64(seed ^ 0x5E9E57ULL));
  std::vector<Vec> centers;
  centers.push_back(points[rng.next_below(n)]);
  std::vector<double> d2(n);
  while (centers.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = sq_dist(points[i], centers[0]);
      for (std::size_t c = 1; c < centers.size(); ++c) {
        best = std::min(best, sq_dist(points[i], centers[c]));
      }
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      centers.push_back(points[rng.next_below(n)]);
      continue;
    }
    const double u = rng.next_double() * total;
    double acc = 0.0;
    std::size_t pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      acc += d2[i];
      if (u < acc) {
        pick = i;
        break;
      }
    }
    centers.push_back(points[pick]);
  }

  std::vector<int> assign(n, 0);
  for (int iter = 0; iter < 50; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(points[i], centers[0]);
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(points[i], centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    std::vector<Vec> sums(k, Vec(points[0].size(), 0.0));
    std::vector<int> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < points[i].size(); ++d) {
        sums[assign[i]][d] += points[i][d];
      }
      sizes[assign[i]] += 1;
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;  // empty cluster keeps its center
      for (double& v : sums[c]) v /= sizes[c];
      centers[c] = std::move(sums[c]);
    }
    if (!changed && iter > 0) break;
  }

  std::vector<int> freq(k, 0);
  for (int a : assign) freq[a] += 1;
  double entropy = 0.0;
  for (int c = 0; c < k; ++c) {
    if (freq[c] == 0) continue;
    const double p = static_cast<double>(freq[c]) / static_cast<double>(n);
    entropy -= p * std::log(p);
  }
  return entropy;
}

DetectionReport make_report(const std::string& doc_id,
                            const ValidityCount& count, double gamma,
                            double threshold) {
  DetectionReport report;
  report.doc_id = doc_id;
  report.valid = count.valid;
  report.total = count.total;
  report.z = z_semantic(count.valid, count.total, gamma);
  report.threshold = threshold;
  report.verdict = report.z > threshold;
  report.per_sentence_valid = count.per_sentence;
  return report;
}

}  // namespace sentmark
