#include "sentmark/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sentmark/prng.hpp"

namespace sentmark {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw std::invalid_argument("config: " + field + " " + why);
}

}  // namespace

void WatermarkConfig::validate() const {
  if (d < 1 || d > 24) bad("d", "must be in [1, 24]");
  if (h < 2) bad("h", "must be >= 2");
  if (gamma <= 0.0 || gamma >= 1.0) bad("gamma", "must be in (0, 1)");
  if (gamma * std::pow(2.0, d) < 1.0) bad("gamma", "leaves an empty valid set");
  if (margin < 0.0) bad("margin", "must be >= 0");
  if (prime == 0) bad("prime", "must be nonzero");
  if (n_max < 1) bad("n_max", "must be >= 1");
  if (temperature <= 0.0) bad("temperature", "must be positive");
}

void AttackConfig::validate() const {
  if (delta < 0.0 || delta > 1.0) bad("attack_delta", "must be in [0, 1]");
  if (k < 1) bad("attack_k", "must be >= 1");
  if (strength < 0.0 || strength > 1.0) bad("attack_strength", "must be in [0, 1]");
}

void RunConfig::validate() const {
  watermark.validate();
  attack.validate();
  if (feature_dim < 1) bad("feature_dim", "must be >= 1");
  if (contrastive_delta <= 0.0) bad("contrastive_delta", "must be positive");
  if (sem_ent_clusters < 2) bad("sem_ent_clusters", "must be >= 2");
}

std::string attack_mode_name(AttackMode mode) {
  return mode == AttackMode::kVanilla ? "vanilla" : "bigram";
}

AttackMode attack_mode_from_name(const std::string& name) {
  if (name == "vanilla") return AttackMode::kVanilla;
  if (name == "bigram") return AttackMode::kBigram;
  bad("attack_mode", "must be vanilla or bigram");
}

RunConfig parse_config(const std::map<std::string, std::string>& kv) {
  RunConfig cfg;
  const std::set<std::string> known = {
      "key",          "d",           "gamma",         "margin",
      "prime",        "n_max",       "delta_bias",    "temperature",
      "h",            "feature_dim", "embedder_seed", "embedder_model",
      "generator_corpus", "run_seed", "contrastive_delta", "sem_ent_clusters",
      "attack_delta", "attack_mode", "attack_k",      "attack_strength",
      "attack_seed",  "attack_sort_by_similarity"};
  for (const auto& [k, v] : kv) {
    if (!known.contains(k)) bad(k, "is not a recognized key");
  }

  auto get = [&kv](const std::string& k) -> const std::string* {
    auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto as_u64 = [](const std::string& k, const std::string& v) {
    try {
      return static_cast<std::uint64_t>(std::stoull(v));
    } catch (const std::exception&) {
      bad(k, "is not an unsigned integer: " + v);
    }
  };
  auto as_int = [](const std::string& k, const std::string& v) {
    try {
      return std::stoi(v);
    } catch (const std::exception&) {
      bad(k, "is not an integer: " + v);
    }
  };
  auto as_double = [](const std::string& k, const std::string& v) {
    try {
      return std::stod(v);
    } catch (const std::exception&) {
      bad(k, "is not a number: " + v);
    }
  };
  auto as_bool = [](const std::string& k, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad(k, "is not a boolean: " + v);
  };

  if (auto* v = get("key")) cfg.watermark.key = as_u64("key", *v);
  if (auto* v = get("d")) cfg.watermark.d = as_int("d", *v);
  if (auto* v = get("gamma")) cfg.watermark.gamma = as_double("gamma", *v);
  if (auto* v = get("margin")) cfg.watermark.margin = as_double("margin", *v);
  if (auto* v = get("prime")) cfg.watermark.prime = as_u64("prime", *v);
  if (auto* v = get("n_max")) cfg.watermark.n_max = as_int("n_max", *v);
  if (auto* v = get("delta_bias"))
    cfg.watermark.delta_bias = as_double("delta_bias", *v);
  if (auto* v = get("temperature"))
    cfg.watermark.temperature = as_double("temperature", *v);
  if (auto* v = get("h")) cfg.watermark.h = as_int("h", *v);
  if (auto* v = get("feature_dim")) cfg.feature_dim = as_int("feature_dim", *v);
  if (auto* v = get("embedder_seed"))
    cfg.embedder_seed = as_u64("embedder_seed", *v);
  if (auto* v = get("embedder_model")) cfg.embedder_model = *v;
  if (auto* v = get("generator_corpus")) cfg.generator_corpus = *v;
  if (auto* v = get("run_seed")) cfg.run_seed = as_u64("run_seed", *v);
  if (auto* v = get("contrastive_delta"))
    cfg.contrastive_delta = as_double("contrastive_delta", *v);
  if (auto* v = get("sem_ent_clusters"))
    cfg.sem_ent_clusters = as_int("sem_ent_clusters", *v);
  if (auto* v = get("attack_delta"))
    cfg.attack.delta = as_double("attack_delta", *v);
  if (auto* v = get("attack_mode"))
    cfg.attack.mode = attack_mode_from_name(*v);
  if (auto* v = get("attack_k")) cfg.attack.k = as_int("attack_k", *v);
  if (auto* v = get("attack_strength"))
    cfg.attack.strength = as_double("attack_strength", *v);
  if (auto* v = get("attack_seed")) cfg.attack.seed = as_u64("attack_seed", *v);
  if (auto* v = get("attack_sort_by_similarity"))
    cfg.attack.sort_by_similarity = as_bool("attack_sort_by_similarity", *v);

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not `key = value`: " + t);
    }
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return parse_config(kv);
}

std::string canonical_config(const RunConfig& config) {
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "attack_delta=" << num(config.attack.delta) << "\n"
      << "attack_k=" << config.attack.k << "\n"
      << "attack_mode=" << attack_mode_name(config.attack.mode) << "\n"
      << "attack_seed=" << config.attack.seed << "\n"
      << "attack_sort_by_similarity=" << (config.attack.sort_by_similarity ? "true" : "false") << "\n"
      << "attack_strength=" << num(config.attack.strength) << "\n"
      << "contrastive_delta=" << num(config.contrastive_delta) << "\n"
      << "d=" << config.watermark.d << "\n"
      << "delta_bias=" << num(config.watermark.delta_bias) << "\n"
      << "embedder_model=" << config.embedder_model << "\n"
      << "embedder_seed=" << config.embedder_seed << "\n"
      << "feature_dim=" << config.feature_dim << "\n"
      << "gamma=" << num(config.watermark.gamma) << "\n"
      << "generator_corpus=" << config.generator_corpus << "\n"
      << "h=" << config.watermark.h << "\n"
      << "key=" << config.watermark.key << "\n"
      << "margin=" << num(config.watermark.margin) << "\n"
      << "n_max=" << config.watermark.n_max << "\n"
      << "prime=" << config.watermark.prime << "\n"
      << "run_seed=" << config.run_seed << "\n"
      << "sem_ent_clusters=" << config.sem_ent_clusters << "\n"
      << "temperature=" << num(config.watermark.temperature) << "\n";
  return out.str();
}

std::string config_hash(const RunConfig& config) {
  const std::uint64_t h = hash_bytes(canonical_config(config));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sentmark
