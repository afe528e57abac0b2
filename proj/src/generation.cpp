#include "sentmark/generation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sentmark/lsh.hpp"
#include "sentmark/partition.hpp"
#include "sentmark/tokenize.hpp"

namespace sentmark {

bool is_delimiter_char(char c) {
  return c == ',' || c == '.' || c == '?' || c == '!';
}

bool is_delimiter_token(const std::string& token) {
  return token.size() == 1 && is_delimiter_char(token[0]);
}

std::vector<Sentence> segment_sentences(const std::string& text) {
  std::vector<Sentence> sentences;
  std::string current;
  auto flush = [&](bool add_period) {
    // trim
    std::size_t b = current.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
      current.clear();
      return;
    }
    std::size_t e = current.find_last_not_of(" \t\r\n");
    std::string seg = current.substr(b, e - b + 1);
    current.clear();
    // delimiter-only segments carry no content
    bool all_delims = true;
    for (char c : seg) {
      if (!is_delimiter_char(c)) {
        all_delims = false;
        break;
      }
    }
    if (all_delims) return;
    if (add_period) seg.push_back('.');
    sentences.push_back({std::move(seg), static_cast<int>(sentences.size())});
  };

  for (char c : text) {
    current.push_back(c);
    if (is_delimiter_char(c)) flush(false);
  }
  flush(true);  // trailing segment without a delimiter
  return sentences;
}

// ---------------------------------------------------------------------------
// NgramModel

NgramModel::NgramModel(const std::string& corpus_text, double temperature)
    : temperature_(temperature) {
  if (temperature <= 0.0) {
    throw std::invalid_argument("NgramModel: temperature must be positive");
  }
  const std::vector<std::string> tokens = tokenize(corpus_text);
  if (tokens.empty()) {
    throw std::invalid_argument("NgramModel: empty corpus");
  }
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const std::string& tok : tokens) {
    auto [it, inserted] =
        token_ids_.try_emplace(tok, static_cast<int>(vocab_.size()));
    if (inserted) vocab_.push_back(tok);
    ids.push_back(it->second);
  }

  std::vector<int> counts(vocab_.size(), 0);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    counts[ids[i]] += 1;
    if (i + 1 < ids.size()) {
      bigram_[ids[i]][ids[i + 1]] += 1;
      bigram_totals_[ids[i]] += 1;
    }
    if (i + 2 < ids.size()) {
      trigram_[{ids[i], ids[i + 1]}][ids[i + 2]] += 1;
      trigram_totals_[{ids[i], ids[i + 1]}] += 1;
    }
  }
  unigram_.resize(vocab_.size());
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    unigram_[i] = static_cast<double>(counts[i]) /
                  static_cast<double>(ids.size());
  }
}

NgramModel NgramModel::from_file(const std::string& path, double temperature) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return NgramModel(buf.str(), temperature);
}

int NgramModel::token_id(const std::string& token) const {
  auto it = token_ids_.find(token);
  return it == token_ids_.end() ? -1 : it->second;
}

std::vector<int> NgramModel::encode(const std::string& text) const {
  std::vector<int> ids;
  for (const std::string& tok : tokenize(text)) {
    const int id = token_id(tok);
    if (id >= 0) ids.push_back(id);
  }
  return ids;
}

std::string NgramModel::decode(const std::vector<int>& tokens) const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (int id : tokens) out.push_back(vocab_[id]);
  return detokenize(out);
}

Vec NgramModel::next_logits(const std::vector<int>& history) const {
  const int n = vocab_size();
  Vec probs(n, 0.0);
  const int prev1 = history.empty() ? -1 : history.back();
  const int prev2 = history.size() < 2 ? -1 : history[history.size() - 2];

  const auto* tri = (prev2 >= 0 && prev1 >= 0)
                        ? [&]() -> const std::map<int, int>* {
    auto it = trigram_.find({prev2, prev1});
    return it == trigram_.end() ? nullptr : &it->second;
  }()
                        : nullptr;
  const auto* bi = prev1 >= 0 ? [&]() -> const std::map<int, int>* {
    auto it = bigram_.find(prev1);
    return it == bigram_.end() ? nullptr : &it->second;
  }()
                              : nullptr;

  // Interpolated backoff; weights shift down when higher orders are unseen
  // so the mixture always sums to one.
  double w3 = 0.0, w2 = 0.0, w1 = 1.0;
  if (tri && bi) {
    w3 = 0.6;
    w2 = 0.3;
    w1 = 0.1;
  } else if (bi) {
    w2 = 0.75;
    w1 = 0.25;
  }
  for (int i = 0; i < n; ++i) probs[i] = w1 * unigram_[i];
  if (bi && w2 > 0.0) {
    const double total = static_cast<double>(bigram_totals_.at(prev1));
    for (const auto& [id, c] : *bi) probs[id] += w2 * c / total;
  }
  if (tri && w3 > 0.0) {
    const double total =
        static_cast<double>(trigram_totals_.at({prev2, prev1}));
    for (const auto& [id, c] : *tri) probs[id] += w3 * c / total;
  }

  Vec logits(n);
  for (int i = 0; i < n; ++i) logits[i] = std::log(probs[i]);
  return logits;
}

int NgramModel::sample(const std::vector<int>& history,
                       SplitMix64& rng) const {
  return sample_categorical(next_logits(history), temperature_, rng);
}

Sentence NgramModel::next_sentence(const std::vector<Sentence>& context,
                                   SplitMix64& rng) {
  std::vector<int> history;
  for (const Sentence& s : context) {
    for (int id : encode(s.text)) history.push_back(id);
  }

  constexpr int kMaxBodyTokens = 64;
  constexpr int kMaxAttempts = 256;
  std::vector<std::string> body;
  int body_count = 0;
  for (int attempt = 0; attempt < kMaxAttempts && body_count < kMaxBodyTokens;
       ++attempt) {
    const int id = sample(history, rng);
    const std::string& tok = vocab_[id];
    if (is_delimiter_token(tok)) {
      if (body.empty()) continue;  // a sentence needs a nonempty body
      body.push_back(tok);
      history.push_back(id);
      return {detokenize(body), static_cast<int>(context.size())};
    }
    body.push_back(tok);
    history.push_back(id);
    ++body_count;
  }
  if (body.empty()) {
    // Pathological corpus (delimiters only); emit the most frequent
    // non-delimiter token so the Sentence invariant holds.
    int best = -1;
    for (int i = 0; i < vocab_size(); ++i) {
      if (is_delimiter_token(vocab_[i])) continue;
      if (best < 0 || unigram_[i] > unigram_[best]) best = i;
    }
    if (best < 0) throw std::runtime_error("NgramModel: no body tokens in vocabulary");
    body.push_back(vocab_[best]);
  }
  std::string text = detokenize(body);
  text.push_back('.');
  return {std::move(text), static_cast<int>(context.size())};
}

int sample_categorical(const Vec& logits, double temperature, SplitMix64& rng) {
  if (logits.empty()) {
    throw std::invalid_argument("sample_categorical: empty logits");
  }
  if (temperature <= 0.0) {
    throw std::invalid_argument("sample_categorical: temperature must be positive");
  }
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  Vec weights(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    weights[i] = std::exp((logits[i] - max_logit) / temperature);
    total += weights[i];
  }
  const double u = rng.next_double() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;  // u == total edge
}

// ---------------------------------------------------------------------------
// Semantic watermark

std::string GenerationTrace::text() const {
  std::string out;
  for (const Sentence& s : sentences) {
    if (!out.empty()) out.push_back(' ');
    out += s.text;
  }
  return out;
}

GenerationTrace semantic_generate(SentenceGenerator& generator,
                                  const Embedder& embedder,
                                  const WatermarkConfig& cfg,
                                  const std::string& prompt,
                                  int num_sentences, SplitMix64& rng) {
  cfg.validate();
  GenerationTrace trace;
  if (num_sentences <= 0) return trace;

  std::vector<Sentence> context = segment_sentences(prompt);
  if (context.empty()) {
    throw std::invalid_argument("semantic_generate: prompt has no sentences");
  }
  const LshHyperplanes planes(cfg.key, cfg.d, cfg.h);

  Signature prev_sig = signature_of(embedder.embed(context.back().text), planes);
  for (int t = 0; t < num_sentences; ++t) {
    const RegionPartition part =
        mask_regions(prev_sig, cfg.prime, cfg.gamma, cfg.d);

    Sentence accepted;
    Signature accepted_sig;
    bool region_ok = false;
    bool satisfied = false;
    int tries = 0;
    while (tries < cfg.n_max) {
      ++tries;
      Sentence candidate = generator.next_sentence(context, rng);
      const Vec v = embedder.embed(candidate.text);
      const Signature sig = signature_of(v, planes);
      region_ok = is_valid(sig, part);
      satisfied = region_ok && margin_satisfied(v, planes, cfg.margin);
      accepted = std::move(candidate);
      accepted_sig = sig;
      if (satisfied) break;
    }
    if (!satisfied) ++trace.maxout_hits;

    accepted.index = t;
    trace.tries_per_sentence.push_back(tries);
    trace.accepted_valid.push_back(region_ok);
    context.push_back(accepted);
    trace.sentences.push_back(std::move(accepted));
    prev_sig = std::move(accepted_sig);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// KGW baseline

std::vector<int> kgw_greenlist(int prev_token_id, double gamma, int vocab_size,
                               std::uint64_t key, std::uint64_t prime) {
  if (vocab_size < 2) {
    throw std::invalid_argument("kgw_greenlist: vocab_size must be >= 2");
  }
  if (gamma <= 0.0 || gamma >= 1.0) {
    throw std::invalid_argument("kgw_greenlist: gamma must be in (0, 1)");
  }
  const std::uint64_t seed =
      mask_seed(static_cast<std::uint64_t>(prev_token_id) * prime ^ key);
  const std::vector<std::uint32_t> order =
      shuffled_indices(static_cast<std::uint32_t>(vocab_size), seed);
  const int n_green = round_half_up(gamma * vocab_size);
  std::vector<int> green(order.begin(), order.begin() + n_green);
  std::sort(green.begin(), green.end());
  return green;
}

void kgw_bias(Vec& logits, const std::vector<int>& green, double delta_bias) {
  for (int id : green) {
    if (id < 0 || static_cast<std::size_t>(id) >= logits.size()) {
      throw std::invalid_argument("kgw_bias: green id out of range");
    }
    logits[id] += delta_bias;
  }
}

std::vector<int> kgw_generate(const TokenModel& model,
                              const WatermarkConfig& cfg,
                              const std::string& prompt, int num_tokens,
                              SplitMix64& rng) {
  if (num_tokens < 1) {
    throw std::invalid_argument("kgw_generate: num_tokens must be >= 1");
  }
  std::vector<int> history;
  for (const std::string& tok : tokenize(prompt)) {
    const int id = model.token_id(tok);
    if (id >= 0) history.push_back(id);
  }
  const std::size_t prompt_len = history.size();

  for (int t = 0; t < num_tokens; ++t) {
    Vec logits = model.next_logits(history);
    if (!history.empty()) {
      const std::vector<int> green = kgw_greenlist(
          history.back(), cfg.gamma, model.vocab_size(), cfg.key, cfg.prime);
      kgw_bias(logits, green, cfg.delta_bias);
    }
    history.push_back(sample_categorical(logits, cfg.temperature, rng));
  }
  return {history.begin() + prompt_len, history.end()};
}

}  // namespace sentmark
