#pragma once

#include <string>

namespace sentmark::cli {

// Exit codes shared by all subcommands.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kIoError = 3;

struct GenerateArgs {
  std::string config_path;
  std::string prompts_path;
  std::string out_path;
  std::string mode = "semantic";  // semantic | kgw | none
  int sentences = 20;
  int tokens = 200;  // kgw mode length
  int jobs = 1;
};

struct DetectArgs {
  std::string config_path;
  std::string docs_path;
  std::string report_dir;
  std::string mode = "semantic";  // semantic | kgw
  std::string prompt_field;       // JSONL field holding the prompt; empty = none
  std::string human_scores;       // path; enables FPR calibration
  double fpr = 0.05;
  double threshold = 4.0;  // used when no human scores are given
  int jobs = 1;
};

struct AttackArgs {
  std::string config_path;
  std::string docs_path;
  std::string out_path;
  std::string mode;      // empty = config value
  std::string synonyms;  // optional TSV override
  int jobs = 1;
};

struct EvaluateArgs {
  std::string config_path;
  std::string pos_scores;
  std::string neg_scores;
  std::string texts_path;  // optional JSONL for Ent-3 / Sem-Ent
  std::string pairs_path;  // optional JSONL originals/paraphrases
  std::string out_csv;
  double ppl = -1.0;  // precomputed perplexity passthrough; <0 = absent
  bool sem_ent = false;
};

struct CalibrateArgs {
  std::string human_scores;
  std::string out_path;
  double fpr = 0.05;
};

struct TrainArgs {
  std::string config_path;
  std::string triplets_path;
  std::string out_model;
  double learning_rate = 0.1;
  int epochs = 10;
  int batch_size = 8;
  std::uint64_t seed = 1;
};

int cmd_generate(const GenerateArgs& args);
int cmd_detect(const DetectArgs& args);
int cmd_attack(const AttackArgs& args);
int cmd_evaluate(const EvaluateArgs& args);
int cmd_calibrate(const CalibrateArgs& args);
int cmd_train_embedder(const TrainArgs& args);

// --config flag value, else $SENTMARK_CONFIG; throws std::invalid_argument
// when neither is set.
std::string resolve_config_path(const std::string& flag_value);

}  // namespace sentmark::cli
