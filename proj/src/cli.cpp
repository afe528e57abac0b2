#include "sentmark/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include "sentmark/attack.hpp"
#include "sentmark/config.hpp"
#include "sentmark/detection.hpp"
#include "sentmark/generation.hpp"
#include "sentmark/io.hpp"
#include "sentmark/prng.hpp"

namespace sentmark::cli {

namespace {

namespace fs = std::filesystem;

// Bounded worker pool; results land in caller-owned slots so output order
// stays equal to input order regardless of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  jobs = std::max(jobs, 1);
  if (jobs == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> workers;
  const int count = static_cast<int>(std::min<std::size_t>(jobs, n));
  workers.reserve(count);
  for (int w = 0; w < count; ++w) workers.emplace_back(worker);
  for (std::thread& t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

EmbedderModel make_embedder(const RunConfig& cfg) {
  if (!cfg.embedder_model.empty()) {
    return EmbedderModel::load(cfg.embedder_model);
  }
  return EmbedderModel::random(cfg.watermark.h, cfg.feature_dim,
                               cfg.embedder_seed);
}

NgramModel make_generator(const RunConfig& cfg) {
  if (cfg.generator_corpus.empty()) {
    throw std::invalid_argument(
        "config: generator_corpus is required for this command");
  }
  return NgramModel::from_file(cfg.generator_corpus,
                               cfg.watermark.temperature);
}

SplitMix64 doc_rng(std::uint64_t run_seed, const std::string& doc_id) {
  return SplitMix64(mix64(run_seed) ^ hash_bytes(doc_id));
}

int classify_error(const std::exception& e, const char* command) {
  std::cerr << command << ": " << e.what() << "\n";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return kConfigError;
  return kIoError;
}

}  // namespace

std::string resolve_config_path(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("SENTMARK_CONFIG")) {
    if (*env) return env;
  }
  throw std::invalid_argument(
      "no config given: pass --config or set SENTMARK_CONFIG");
}

int cmd_generate(const GenerateArgs& args) {
  try {
    const RunConfig cfg = load_config(resolve_config_path(args.config_path));
    if (args.mode != "semantic" && args.mode != "kgw" && args.mode != "none") {
      throw std::invalid_argument("mode must be semantic, kgw, or none");
    }
    const std::vector<Json> prompts = read_jsonl(args.prompts_path);
    const EmbedderModel embedder = make_embedder(cfg);
    NgramModel generator = make_generator(cfg);

    std::vector<Json> records(prompts.size());
    parallel_for(prompts.size(), args.jobs, [&](std::size_t i) {
      const std::string id = prompts[i].at("id").get<std::string>();
      const std::string prompt = prompts[i].at("text").get<std::string>();
      SplitMix64 rng = doc_rng(cfg.run_seed, id);
      Json rec{{"id", id}, {"prompt", prompt}};
      if (args.mode == "semantic") {
        const GenerationTrace trace =
            semantic_generate(generator, embedder, cfg.watermark, prompt,
                              args.sentences, rng);
        rec["text"] = trace.text();
        rec["tries"] = trace.tries_per_sentence;
        rec["valid"] = trace.accepted_valid;
      } else if (args.mode == "kgw") {
        const std::vector<int> tokens =
            kgw_generate(generator, cfg.watermark, prompt, args.tokens, rng);
        rec["text"] = generator.decode(tokens);
      } else {
        std::vector<Sentence> context = segment_sentences(prompt);
        if (context.empty()) {
          throw std::invalid_argument("prompt has no sentences: " + id);
        }
        std::string text;
        for (int t = 0; t < args.sentences; ++t) {
          Sentence s = generator.next_sentence(context, rng);
          s.index = t;
          if (!text.empty()) text.push_back(' ');
          text += s.text;
          context.push_back(std::move(s));
        }
        rec["text"] = text;
      }
      records[i] = std::move(rec);
    });

    write_jsonl(args.out_path, records);
    RunManifest manifest;
    manifest.command = "generate --mode " + args.mode;
    manifest.config_hash = config_hash(cfg);
    manifest.input_paths = {args.prompts_path};
    manifest.output_paths = {args.out_path};
    manifest.rng_seeds = {{"run_seed", cfg.run_seed}};
    manifest.timestamp = RunManifest::now();
    manifest.write_for(args.out_path);
    std::cout << "generated " << records.size() << " documents -> "
              << args.out_path << "\n";
    return kOk;
  } catch (const std::exception& e) {
    return classify_error(e, "generate");
  }
}

int cmd_detect(const DetectArgs& args) {
  try {
    const RunConfig cfg = load_config(resolve_config_path(args.config_path));
    if (args.mode != "semantic" && args.mode != "kgw") {
      throw std::invalid_argument("mode must be semantic or kgw");
    }
    const std::vector<Json> docs = read_jsonl(args.docs_path);

    double threshold = args.threshold;
    bool saturated = false;
    if (!args.human_scores.empty()) {
      threshold =
          calibrate_threshold(load_scores(args.human_scores), args.fpr,
                              &saturated);
      if (saturated) {
        std::cerr << "detect: calibration saturated at threshold 6.0\n";
      }
    }

    std::optional<EmbedderModel> embedder;
    std::optional<LshHyperplanes> planes;
    std::optional<NgramModel> token_model;
    if (args.mode == "semantic") {
      embedder.emplace(make_embedder(cfg));
      planes.emplace(cfg.watermark.key, cfg.watermark.d, cfg.watermark.h);
    } else {
      token_model.emplace(make_generator(cfg));
    }

    struct Slot {
      std::optional<DetectionReport> report;
      std::string error;
    };
    std::vector<Slot> slots(docs.size());
    parallel_for(docs.size(), args.jobs, [&](std::size_t i) {
      const std::string id = docs[i].at("id").get<std::string>();
      const std::string text = docs[i].at("text").get<std::string>();
      std::optional<std::string> prompt;
      if (!args.prompt_field.empty() && docs[i].contains(args.prompt_field)) {
        prompt = docs[i].at(args.prompt_field).get<std::string>();
      }
      try {
        ValidityCount count;
        if (args.mode == "semantic") {
          count = count_valid_sentences(text, *embedder, *planes,
                                        cfg.watermark.prime,
                                        cfg.watermark.gamma, prompt);
        } else {
          count = count_green_tokens(text, *token_model, cfg.watermark, prompt);
        }
        slots[i].report =
            make_report(id, count, cfg.watermark.gamma, threshold);
      } catch (const std::invalid_argument& e) {
        slots[i].error = e.what();
      }
    });

    // Store writes are serialized through this single thread.
    ReportStore store(args.report_dir);
    int failed = 0;
    long long sum_valid = 0, sum_total = 0;
    int positives = 0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (!slots[i].report) {
        ++failed;
        std::cerr << "detect: skipping doc "
                  << docs[i].at("id").get<std::string>() << ": "
                  << slots[i].error << "\n";
        continue;
      }
      store.write(*slots[i].report);
      sum_valid += slots[i].report->valid;
      sum_total += slots[i].report->total;
      positives += slots[i].report->verdict ? 1 : 0;
    }
    store.save_index();

    RunManifest manifest;
    manifest.command = "detect --mode " + args.mode;
    manifest.config_hash = config_hash(cfg);
    manifest.input_paths = {args.docs_path};
    if (!args.human_scores.empty()) {
      manifest.input_paths.push_back(args.human_scores);
    }
    manifest.output_paths = {(fs::path(args.report_dir) / "index.json").string()};
    manifest.timestamp = RunManifest::now();
    manifest.write_for((fs::path(args.report_dir) / "detect").string());

    std::cout << "scored " << (slots.size() - failed) << "/" << slots.size()
              << " docs: valid " << sum_valid << "/" << sum_total
              << ", flagged " << positives << " at threshold " << threshold
              << "\n";
    if (failed == static_cast<int>(slots.size()) && !slots.empty()) {
      std::cerr << "detect: all documents failed\n";
      return kIoError;
    }
    return kOk;
  } catch (const std::exception& e) {
    return classify_error(e, "detect");
  }
}

int cmd_attack(const AttackArgs& args) {
  try {
    RunConfig cfg = load_config(resolve_config_path(args.config_path));
    if (!args.mode.empty()) {
      cfg.attack.mode = attack_mode_from_name(args.mode);
    }
    const std::vector<Json> docs = read_jsonl(args.docs_path);
    const EmbedderModel embedder = make_embedder(cfg);
    const SimilarityFn similarity = embedding_similarity(embedder);
    const SynonymTable table = args.synonyms.empty()
                                   ? SynonymTable::builtin()
                                   : SynonymTable::load_tsv(args.synonyms);

    std::vector<Json> records(docs.size());
    parallel_for(docs.size(), args.jobs, [&](std::size_t i) {
      // One paraphraser per worker slot: the contract does not require
      // concurrent-call safety.
      PerturbationParaphraser paraphraser(table, cfg.attack.strength,
                                          cfg.attack.seed);
      Json rec = docs[i];
      rec["text"] = attack_document(docs[i].at("text").get<std::string>(),
                                    cfg.attack, paraphraser, similarity);
      rec["attack"] = Json{{"mode", attack_mode_name(cfg.attack.mode)},
                           {"delta", cfg.attack.delta},
                           {"k", cfg.attack.k},
                           {"seed", cfg.attack.seed},
                           {"strength", cfg.attack.strength}};
      records[i] = std::move(rec);
    });

    write_jsonl(args.out_path, records);
    RunManifest manifest;
    manifest.command = "attack --mode " + attack_mode_name(cfg.attack.mode);
    manifest.config_hash = config_hash(cfg);
    manifest.input_paths = {args.docs_path};
    manifest.output_paths = {args.out_path};
    manifest.rng_seeds = {{"attack_seed", cfg.attack.seed}};
    manifest.timestamp = RunManifest::now();
    manifest.write_for(args.out_path);
    std::cout << "attacked " << records.size() << " documents -> "
              << args.out_path << "\n";
    return kOk;
  } catch (const std::exception& e) {
    return classify_error(e, "attack");
  }
}

int cmd_evaluate(const EvaluateArgs& args) {
  try {
    const RunConfig cfg = load_config(resolve_config_path(args.config_path));
    ScoreSet scores;
    scores.positives = load_scores(args.pos_scores);
    scores.negatives = load_scores(args.neg_scores);

    const double auc_value = auc(scores);
    const double tp1 = tp_at_fpr(scores, 0.01);
    const double tp5 = tp_at_fpr(scores, 0.05);

    std::optional<double> ent3_value;
    std::optional<double> sem_ent_value;
    std::optional<double> consistency;
    std::optional<EmbedderModel> embedder;
    if (!args.texts_path.empty() || !args.pairs_path.empty()) {
      embedder.emplace(make_embedder(cfg));
    }
    if (!args.texts_path.empty()) {
      std::vector<std::string> texts;
      for (const Json& r : read_jsonl(args.texts_path)) {
        texts.push_back(r.at("text").get<std::string>());
      }
      ent3_value = ent3(texts);
      if (args.sem_ent) {
        sem_ent_value =
            sem_ent(texts, *embedder, cfg.sem_ent_clusters, cfg.run_seed);
      }
    }
    if (!args.pairs_path.empty()) {
      std::vector<std::pair<std::string, std::string>> pairs;
      for (const Json& r : read_jsonl(args.pairs_path)) {
        pairs.emplace_back(r.at("original").get<std::string>(),
                           r.at("paraphrase").get<std::string>());
      }
      const LshHyperplanes planes(cfg.watermark.key, cfg.watermark.d,
                                  cfg.watermark.h);
      consistency = lsh_consistency(pairs, *embedder, planes);
    }

    std::ofstream out(args.out_csv);
    if (!out) throw std::runtime_error("cannot write csv: " + args.out_csv);
    out.precision(6);
    out << "auc,tp_at_1pct,tp_at_5pct,ent3,lsh_consistency,sem_ent,ppl\n";
    out << auc_value << ',' << tp1 << ',' << tp5 << ',';
    if (ent3_value) out << *ent3_value;
    out << ',';
    if (consistency) out << *consistency;
    out << ',';
    if (sem_ent_value) out << *sem_ent_value;
    out << ',';
    if (args.ppl >= 0.0) out << args.ppl;
    out << '\n';
    out.close();

    RunManifest manifest;
    manifest.command = "evaluate";
    manifest.config_hash = config_hash(cfg);
    manifest.input_paths = {args.pos_scores, args.neg_scores};
    if (!args.texts_path.empty()) manifest.input_paths.push_back(args.texts_path);
    if (!args.pairs_path.empty()) manifest.input_paths.push_back(args.pairs_path);
    manifest.output_paths = {args.out_csv};
    manifest.timestamp = RunManifest::now();
    manifest.write_for(args.out_csv);

    std::cout << "auc " << auc_value << ", tp@1% " << tp1 << ", tp@5% " << tp5
              << " -> " << args.out_csv << "\n";
    return kOk;
  } catch (const std::exception& e) {
    return classify_error(e, "evaluate");
  }
}

int cmd_calibrate(const CalibrateArgs& args) {
  try {
    const std::vector<double> scores = load_scores(args.human_scores);
    bool saturated = false;
    const double threshold = calibrate_threshold(scores, args.fpr, &saturated);
    if (saturated) {
      std::cerr << "calibrate: no grid point reaches FPR <= " << args.fpr
                << "; saturating at 6.0\n";
    }
    const Json result{{"threshold", threshold},
                      {"fpr", args.fpr},
                      {"n_scores", scores.size()},
                      {"saturated", saturated}};
    if (!args.out_path.empty()) {
      std::ofstream out(args.out_path);
      if (!out) throw std::runtime_error("cannot write: " + args.out_path);
      out << result.dump(2) << '\n';
      RunManifest manifest;
      manifest.command = "calibrate";
      manifest.input_paths = {args.human_scores};
      manifest.output_paths = {args.out_path};
      manifest.timestamp = RunManifest::now();
      manifest.write_for(args.out_path);
    }
    std::cout << result.dump() << "\n";
    return kOk;
  } catch (const std::exception& e) {
    return classify_error(e, "calibrate");
  }
}

int cmd_train_embedder(const TrainArgs& args) {
  try {
    const RunConfig cfg = load_config(resolve_config_path(args.config_path));
    const TripletBatch corpus = load_triplets(args.triplets_path);
    TrainOptions options;
    options.delta = cfg.contrastive_delta;
    options.learning_rate = args.learning_rate;
    options.epochs = args.epochs;
    options.batch_size = args.batch_size;
    options.seed = args.seed;
    const EmbedderModel initial = EmbedderModel::random(
        cfg.watermark.h, cfg.feature_dim, cfg.embedder_seed);

    const TrainResult result = train_embedder(corpus, initial, options);
    result.model.save(args.out_model);

    const Json history{{"epoch_losses", result.epoch_losses}};
    std::ofstream hist(args.out_model + ".history.json");
    hist << history.dump(2) << '\n';

    RunManifest manifest;
    manifest.command = "train-embedder";
    manifest.config_hash = config_hash(cfg);
    manifest.input_paths = {args.triplets_path};
    manifest.output_paths = {args.out_model, args.out_model + ".history.json"};
    manifest.rng_seeds = {{"train_seed", args.seed},
                          {"embedder_seed", cfg.embedder_seed}};
    manifest.timestamp = RunManifest::now();
    manifest.write_for(args.out_model);

    std::cout << "trained on " << corpus.size() << " triples: loss "
              << result.epoch_losses.front() << " -> "
              << result.epoch_losses.back() << ", model " << args.out_model
              << "\n";
    return kOk;
  } catch (const std::exception& e) {
    return classify_error(e, "train-embedder");
  }
}

}  // namespace sentmark::cli
