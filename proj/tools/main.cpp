#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "sentmark/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sentence-level semantic watermarking toolkit"};
  app.require_subcommand(1);

  namespace cli = sentmark::cli;

  cli::GenerateArgs gen;
  CLI::App* generate = app.add_subcommand(
      "generate", "generate documents from prompts (watermarked or plain)");
  generate->add_option("--config,-c", gen.config_path,
                       "config file (or $SENTMARK_CONFIG)");
  generate->add_option("--prompts", gen.prompts_path, "prompts JSONL")
      ->required();
  generate->add_option("--out,-o", gen.out_path, "output JSONL")->required();
  generate->add_option("--mode", gen.mode, "semantic | kgw | none")
      ->default_val("semantic");
  generate->add_option("--sentences,-T", gen.sentences,
                       "sentences per document (semantic/none)");
  generate->add_option("--tokens", gen.tokens, "tokens per document (kgw)");
  generate->add_option("--jobs,-j", gen.jobs, "worker threads");

  cli::DetectArgs det;
  CLI::App* detect =
      app.add_subcommand("detect", "score documents for the watermark");
  detect->add_option("--config,-c", det.config_path, "config file");
  detect->add_option("--docs", det.docs_path, "documents JSONL")->required();
  detect->add_option("--reports", det.report_dir, "report directory")
      ->required();
  detect->add_option("--mode", det.mode, "semantic | kgw")
      ->default_val("semantic");
  detect->add_option("--prompt-field", det.prompt_field,
                     "JSONL field holding the generation prompt");
  detect->add_option("--human-scores", det.human_scores,
                     "human z-scores for threshold calibration");
  detect->add_option("--fpr", det.fpr, "target false positive rate")
      ->default_val(0.05);
  detect->add_option("--threshold", det.threshold,
                     "fixed z threshold when no human scores are given");
  detect->add_option("--jobs,-j", det.jobs, "worker threads");

  cli::AttackArgs atk;
  CLI::App* attack =
      app.add_subcommand("attack", "paraphrase documents sentence-by-sentence");
  attack->add_option("--config,-c", atk.config_path, "config file");
  attack->add_option("--docs", atk.docs_path, "documents JSONL")->required();
  attack->add_option("--out,-o", atk.out_path, "output JSONL")->required();
  attack->add_option("--mode", atk.mode, "vanilla | bigram (overrides config)");
  attack->add_option("--synonyms", atk.synonyms, "synonym table TSV");
  attack->add_option("--jobs,-j", atk.jobs, "worker threads");

  cli::EvaluateArgs ev;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "classification and quality metrics");
  evaluate->add_option("--config,-c", ev.config_path, "config file");
  evaluate->add_option("--pos-scores", ev.pos_scores,
                       "machine z-scores, one per line")
      ->required();
  evaluate->add_option("--neg-scores", ev.neg_scores,
                       "human z-scores, one per line")
      ->required();
  evaluate->add_option("--texts", ev.texts_path, "JSONL texts for Ent-3");
  evaluate->add_option("--pairs", ev.pairs_path,
                       "JSONL original/paraphrase pairs for LSH consistency");
  evaluate->add_option("--out,-o", ev.out_csv, "metrics CSV")->required();
  evaluate->add_option("--ppl", ev.ppl,
                       "precomputed perplexity (reporting only)");
  evaluate->add_flag("--sem-ent", ev.sem_ent,
                     "also compute semantic cluster entropy");

  cli::CalibrateArgs cal;
  CLI::App* calibrate = app.add_subcommand(
      "calibrate", "FPR-calibrated detection threshold from human scores");
  calibrate->add_option("--human-scores", cal.human_scores,
                        "human z-scores, one per line")
      ->required();
  calibrate->add_option("--fpr", cal.fpr, "target false positive rate")
      ->default_val(0.05);
  calibrate->add_option("--out,-o", cal.out_path, "result JSON");

  cli::TrainArgs train;
  CLI::App* train_embedder = app.add_subcommand(
      "train-embedder", "fit the embedder projection on triplets");
  train_embedder->add_option("--config,-c", train.config_path, "config file");
  train_embedder
      ->add_option("--triplets", train.triplets_path,
                   "JSONL anchor/positive/negative")
      ->required();
  train_embedder->add_option("--out,-o", train.out_model, "model output path")
      ->required();
  train_embedder->add_option("--lr", train.learning_rate, "learning rate")
      ->default_val(0.1);
  train_embedder->add_option("--epochs", train.epochs, "epochs")
      ->default_val(10);
  train_embedder->add_option("--batch", train.batch_size, "batch size")
      ->default_val(8);
  train_embedder->add_option("--seed", train.seed, "shuffle seed")
      ->default_val(1);

  CLI11_PARSE(app, argc, argv);

  if (detect->parsed() && detect->count("--fpr") > 0 &&
      det.human_scores.empty()) {
    std::fprintf(stderr, "detect: --fpr requires --human-scores\n");
    return cli::kConfigError;
  }

  if (generate->parsed()) return cli::cmd_generate(gen);
  if (detect->parsed()) return cli::cmd_detect(det);
  if (attack->parsed()) return cli::cmd_attack(atk);
  if (evaluate->parsed()) return cli::cmd_evaluate(ev);
  if (calibrate->parsed()) return cli::cmd_calibrate(cal);
  if (train_embedder->parsed()) return cli::cmd_train_embedder(train);
  return cli::kUsageError;
}
