#include "doctest.h"
#include "helpers.hpp"
#include "sentmark/detection.hpp"
#include "sentmark/generation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

using namespace sentmark;
using namespace sentmark::testing;

TEST_CASE("z-scores match the hand-evaluated formula") {
  CHECK(z_semantic(5, 20, 0.25) == doctest::Approx(0.0));
  CHECK(z_semantic(15, 20, 0.25) == doctest::Approx(5.1640).epsilon(1e-4));
  CHECK(z_semantic(50, 50, 0.25) == doctest::Approx(12.2474).epsilon(1e-4));
  CHECK(z_kgw(50, 200, 0.25) == doctest::Approx(0.0));
  CHECK(z_kgw(100, 200, 0.25) == doctest::Approx(8.1650).epsilon(1e-4));
  CHECK(z_kgw(0, 16, 0.25) == doctest::Approx(-2.3094).epsilon(1e-4));
}

TEST_CASE("z rejects an empty document and bad gamma") {
  CHECK_THROWS_AS(z_semantic(0, 0, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(z_semantic(1, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(z_semantic(3, 2, 0.25), std::invalid_argument);
}

TEST_CASE("z increases strictly in the valid count") {
  for (int sv = 1; sv <= 30; ++sv) {
    CHECK(z_semantic(sv, 30, 0.25) > z_semantic(sv - 1, 30, 0.25));
  }
}

TEST_CASE("self-generated text scores valid everywhere given the prompt") {
  WatermarkConfig cfg;
  cfg.h = 64;
  cfg.n_max = 500;  // headroom so the margin never forces a maxout
  RandomUnitEmbedder embedder(64);
  RandomSentenceGenerator generator;
  SplitMix64 rng(3);
  const std::string prompt = "the starting sentence.";
  const GenerationTrace trace =
      semantic_generate(generator, embedder, cfg, prompt, 30, rng);
  REQUIRE(trace.maxout_hits == 0);

  const ValidityCount count =
      count_valid_sentences(trace.text(), embedder, cfg, prompt);
  CHECK(count.total == 30);
  CHECK(count.valid == 30);

  // Round trip: recomputed validity equals the recorded trace.
  for (std::size_t i = 0; i < count.per_sentence.size(); ++i) {
    CHECK(count.per_sentence[i] == trace.accepted_valid[i]);
  }
}

TEST_CASE("without a prompt the first sentence seeds but is not scored") {
  WatermarkConfig cfg;
  cfg.h = 32;
  RandomUnitEmbedder embedder(32);
  const std::string doc = "alpha beta. gamma delta. epsilon zeta.";
  const ValidityCount count =
      count_valid_sentences(doc, embedder, cfg, std::nullopt);
  CHECK(count.total == 2);  // three sentences, first unscored
}

TEST_CASE("too-short documents raise a domain error") {
  WatermarkConfig cfg;
  cfg.h = 32;
  RandomUnitEmbedder embedder(32);
  CHECK_THROWS_WITH_AS(
      count_valid_sentences("only one sentence.", embedder, cfg, std::nullopt),
      "too short to score", std::invalid_argument);
  CHECK_THROWS_AS(count_valid_sentences("", embedder, cfg,
                                        std::optional<std::string>("p.")),
                  std::invalid_argument);
  // with a prompt one sentence is scoreable
  const ValidityCount count = count_valid_sentences(
      "only one sentence.", embedder, cfg, std::optional<std::string>("p q."));
  CHECK(count.total == 1);
}

TEST_CASE("deleting one sentence flips at most its successor") {
  WatermarkConfig cfg;
  cfg.h = 64;
  RandomUnitEmbedder embedder(64);
  RandomSentenceGenerator generator;
  SplitMix64 rng(7);
  const std::string prompt = "seed sentence here.";
  const GenerationTrace trace =
      semantic_generate(generator, embedder, cfg, prompt, 20, rng);

  const std::vector<Sentence> sentences = segment_sentences(trace.text());
  REQUIRE(sentences.size() == 20);
  const int drop = 10;
  std::string mutated;
  for (int i = 0; i < 20; ++i) {
    if (i == drop) continue;
    if (!mutated.empty()) mutated.push_back(' ');
    mutated += sentences[i].text;
  }
  const ValidityCount original =
      count_valid_sentences(trace.text(), embedder, cfg, prompt);
  const ValidityCount after =
      count_valid_sentences(mutated, embedder, cfg, prompt);
  REQUIRE(after.total == 19);
  // Scored sentences before the deletion are untouched; the one right after
  // the gap is the only one whose mask can change.
  for (int i = 0; i < drop; ++i) {
    CHECK(after.per_sentence[i] == original.per_sentence[i]);
  }
  for (int i = drop + 1; i < 19; ++i) {
    CHECK(after.per_sentence[i] == original.per_sentence[i + 1]);
  }
}

TEST_CASE("unwatermarked text is valid at roughly the gamma rate") {
  WatermarkConfig cfg;
  cfg.h = 64;
  RandomUnitEmbedder embedder(64);
  RandomSentenceGenerator generator;
  double ratio_sum = 0.0;
  const int docs = 200;
  for (int d = 0; d < docs; ++d) {
    SplitMix64 rng(5000 + d);
    std::vector<Sentence> context = {{"prompt sentence.", 0}};
    std::string text;
    for (int t = 0; t < 41; ++t) {
      const Sentence s = generator.next_sentence(context, rng);
      if (!text.empty()) text.push_back(' ');
      text += s.text;
    }
    const ValidityCount count =
        count_valid_sentences(text, embedder, cfg, std::nullopt);
    REQUIRE(count.total == 40);
    ratio_sum += count.valid / static_cast<double>(count.total);
  }
  CHECK(std::fabs(ratio_sum / docs - 0.25) < 0.02);
}

TEST_CASE("green-token counting mirrors the generation chain") {
  NgramModel model(make_corpus(21, 300));
  WatermarkConfig cfg;
  cfg.delta_bias = 4.0;
  SplitMix64 rng(11);
  const std::string prompt = "the town was quiet.";
  const std::vector<int> tokens = kgw_generate(model, cfg, prompt, 120, rng);
  const std::string text = model.decode(tokens);

  const ValidityCount with_prompt =
      count_green_tokens(text, model, cfg, prompt);
  CHECK(with_prompt.total >= 100);  // delimiters retokenize identically
  const double rate = with_prompt.valid / static_cast<double>(with_prompt.total);
  CHECK(rate > 0.5);  // strongly biased generation

  const ValidityCount no_prompt =
      count_green_tokens(text, model, cfg, std::nullopt);
  CHECK(no_prompt.total == with_prompt.total - 1);
}

TEST_CASE("calibration returns the smallest qualifying grid point") {
  // 95 scores at 0.5 and 5 at 3.0: FPR(0.50) counts strictly greater scores,
  // so 0.50 is the first grid point at or under r = 0.05 (brute-force scan
  // oracle below agrees).
  std::vector<double> human(95, 0.5);
  human.insert(human.end(), 5, 3.0);
  const double threshold = calibrate_threshold(human, 0.05);

  double expected = 6.0;
  for (int k = 0; k <= 600; ++k) {
    const double t = k * 0.01;
    const double fpr =
        std::count_if(human.begin(), human.end(),
                      [t](double s) { return s > t; }) /
        static_cast<double>(human.size());
    if (fpr <= 0.05) {
      expected = t;
      break;
    }
  }
  CHECK(threshold == doctest::Approx(expected));
  CHECK(threshold == doctest::Approx(0.50));
}

TEST_CASE("calibration contract at the returned threshold") {
  SplitMix64 rng(13);
  std::vector<double> human;
  GaussianStream gauss(99);
  for (int i = 0; i < 1000; ++i) human.push_back(gauss.next());
  for (double r : {0.01, 0.05}) {
    const double t = calibrate_threshold(human, r);
    auto fpr = [&human](double thr) {
      return std::count_if(human.begin(), human.end(),
                           [thr](double s) { return s > thr; }) /
             static_cast<double>(human.size());
    };
    CHECK(fpr(t) <= r);
    if (t > 0.0) CHECK(fpr(t - 0.01) > r);
  }
}

TEST_CASE("all-nonpositive scores calibrate to zero") {
  std::vector<double> human(50, -0.2);
  human[0] = 0.0;
  CHECK(calibrate_threshold(human, 0.01) == doctest::Approx(0.0));
}

TEST_CASE("calibration saturates at 6.0 with a warning flag") {
  std::vector<double> human(30, 10.0);  // nothing on the grid reaches r
  bool saturated = false;
  CHECK(calibrate_threshold(human, 0.05, &saturated) == doctest::Approx(6.0));
  CHECK(saturated);
}

TEST_CASE("calibration needs at least 20 scores") {
  CHECK_THROWS_AS(calibrate_threshold(std::vector<double>(19, 0.0), 0.05),
                  std::invalid_argument);
}

TEST_CASE("auc basics") {
  CHECK(auc({{5.0, 6.0}, {1.0, 2.0}}) == doctest::Approx(1.0));
  CHECK(auc({{1.0, 1.0}, {1.0, 1.0}}) == doctest::Approx(0.5));
  CHECK(auc({{2.0, 3.0}, {1.0, 2.0}}) == doctest::Approx(0.875));
  CHECK_THROWS_AS(auc({{}, {1.0}}), std::invalid_argument);
}

TEST_CASE("auc is invariant under strictly increasing transforms") {
  SplitMix64 rng(17);
  ScoreSet scores;
  for (int i = 0; i < 200; ++i) {
    scores.positives.push_back(rng.next_double() * 4.0 + 0.5);
    scores.negatives.push_back(rng.next_double() * 4.0);
  }
  const double base = auc(scores);
  ScoreSet mapped;
  auto f = [](double x) { return std::exp(0.7 * x) + 3.0; };
  for (double s : scores.positives) mapped.positives.push_back(f(s));
  for (double s : scores.negatives) mapped.negatives.push_back(f(s));
  CHECK(auc(mapped) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("tp at fpr") {
  ScoreSet separated{{5.0, 5.5, 6.0, 4.5}, std::vector<double>(40, 0.3)};
  CHECK(tp_at_fpr(separated, 0.01) == doctest::Approx(1.0));
  CHECK(tp_at_fpr(separated, 0.05) == doctest::Approx(1.0));
}

TEST_CASE("tp at fpr approximates r when the classes coincide") {
  GaussianStream gauss(31);
  ScoreSet scores;
  for (int i = 0; i < 10000; ++i) scores.positives.push_back(gauss.next());
  for (int i = 0; i < 10000; ++i) scores.negatives.push_back(gauss.next());
  CHECK(std::fabs(tp_at_fpr(scores, 0.05) - 0.05) < 0.02);
  CHECK(std::fabs(tp_at_fpr(scores, 0.01) - 0.01) < 0.02);
}

TEST_CASE("trigram entropy") {
  CHECK(ent3({"a b c a b c a b c a b"}) ==
        doctest::Approx(std::log(3.0)));  // abc, bca, cab equally frequent
  CHECK(ent3({"a b c d"}) == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  CHECK(ent3({"x y z"}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(ent3({"a b"}), std::invalid_argument);
  // n equally frequent trigrams across texts
  CHECK(ent3({"a a a", "b b b", "c c c", "d d d"}) ==
        doctest::Approx(std::log(4.0)));
}

TEST_CASE("lsh consistency counts matching signatures") {
  WatermarkConfig cfg;
  cfg.h = 32;
  RandomUnitEmbedder embedder(32);
  const LshHyperplanes planes(cfg.key, cfg.d, cfg.h);
  std::vector<std::pair<std::string, std::string>> identical = {
      {"one sentence.", "one sentence."}, {"two sentence.", "two sentence."}};
  CHECK(lsh_consistency(identical, embedder, planes) == doctest::Approx(1.0));
  CHECK_THROWS_AS(lsh_consistency({}, embedder, planes),
                  std::invalid_argument);
}

TEST_CASE("consistency decreases with perturbation magnitude") {
  // Embeddings jittered by gaussian noise of growing size; consistency must
  // be non-increasing across the three levels.
  const int dim = 64;
  const LshHyperplanes planes(5, 3, dim);
  SplitMix64 rng(41);
  std::vector<Vec> bases;
  for (int i = 0; i < 400; ++i) {
    GaussianStream gauss(rng.next());
    Vec v(dim);
    double sq = 0.0;
    for (double& x : v) {
      x = gauss.next();
      sq += x * x;
    }
    for (double& x : v) x /= std::sqrt(sq);
    bases.push_back(std::move(v));
  }
  auto consistency_at = [&](double noise) {
    int same = 0;
    SplitMix64 jitter_rng(1234);
    for (const Vec& v : bases) {
      GaussianStream gauss(jitter_rng.next());
      Vec w = v;
      double sq = 0.0;
      for (double& x : w) {
        x += noise * gauss.next();
        sq += x * x;
      }
      for (double& x : w) x /= std::sqrt(sq);
      if (signature_of(v, planes) == signature_of(w, planes)) ++same;
    }
    return same / static_cast<double>(bases.size());
  };
  const double c1 = consistency_at(0.02);
  const double c2 = consistency_at(0.10);
  const double c3 = consistency_at(0.40);
  CHECK(c1 >= c2);
  CHECK(c2 >= c3);
  CHECK(c1 > c3);  // strict across the full range
}

TEST_CASE("sem-ent on identical texts is zero") {
  RandomUnitEmbedder embedder(16);
  const std::vector<std::string> texts(8, "same sentence every time.");
  CHECK(sem_ent(texts, embedder, 2) == doctest::Approx(0.0));
}

TEST_CASE("sem-ent recovers ln k on separated clusters") {
  // Axis-aligned cluster embeddings, two texts per cluster.
  const int k = 4;
  class AxisEmbedder final : public Embedder {
   public:
    Vec embed(const std::string& text) const override {
      Vec v(8, 0.0);
      const int cluster = text[0] - 'a';
      v[cluster] = 1.0;
      v[7] = 0.01 * (text[1] - '0');  // tiny within-cluster spread
      double sq = 0.0;
      for (double x : v) sq += x * x;
      for (double& x : v) x /= std::sqrt(sq);
      return v;
    }
    int dim() const override { return 8; }
  } embedder;
  std::vector<std::string> texts;
  for (int c = 0; c < k; ++c) {
    texts.push_back(std::string(1, static_cast<char>('a' + c)) + "1");
    texts.push_back(std::string(1, static_cast<char>('a' + c)) + "2");
  }
  CHECK(sem_ent(texts, embedder, k) == doctest::Approx(std::log(k)).epsilon(1e-9));
}

TEST_CASE("sem-ent rejects fewer texts than clusters") {
  RandomUnitEmbedder embedder(8);
  CHECK_THROWS_AS(sem_ent({"a.", "b."}, embedder, 3), std::invalid_argument);
}

TEST_CASE("reports carry the verdict rule z > threshold") {
  ValidityCount count;
  count.valid = 15;
  count.total = 20;
  count.per_sentence = std::vector<bool>(20, true);
  const DetectionReport hit = make_report("doc-1", count, 0.25, 4.0);
  CHECK(hit.z == doctest::Approx(5.1640).epsilon(1e-4));
  CHECK(hit.verdict);
  const DetectionReport miss = make_report("doc-1", count, 0.25, 5.1641);
  CHECK(!miss.verdict);
}
