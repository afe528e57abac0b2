#pragma once

#include <string>
#include <vector>

#include "sentmark/detection.hpp"
#include "sentmark/embedding.hpp"

#include "json.hpp"

namespace sentmark {

using Json = nlohmann::json;

// Newline-delimited JSON, UTF-8.
std::vector<Json> read_jsonl(const std::string& path);
void write_jsonl(const std::string& path, const std::vector<Json>& records);

// Plain text scores, one per line; blank lines and '#' comments skipped.
std::vector<double> load_scores(const std::string& path);
void save_scores(const std::string& path, const std::vector<double>& scores);

// Triplet corpus: JSONL with fields anchor/positive/negative.
TripletBatch load_triplets(const std::string& path);

Json report_to_json(const DetectionReport& report);
DetectionReport report_from_json(const Json& j);

// Provenance for one CLI run. Replaying the same command with the same
// config and seeds reproduces the listed outputs byte for byte.
struct RunManifest {
  std::string command;
  std::string config_hash;
  std::vector<std::string> input_paths;
  std::vector<std::string> output_paths;
  std::vector<std::pair<std::string, std::uint64_t>> rng_seeds;
  std::int64_t timestamp = 0;  // unix seconds; env SENTMARK_EPOCH overrides

  static std::int64_t now();
  Json to_json() const;
  // Writes next to the primary output as <path>.manifest.json.
  void write_for(const std::string& primary_output) const;
};

// Append-only directory of DetectionReport JSON files plus an index keyed by
// docId. Rebuilding the index from the files reproduces it.
class ReportStore {
 public:
  explicit ReportStore(const std::string& directory);

  std::string write(const DetectionReport& report);  // returns file path
  DetectionReport read(const std::string& doc_id) const;
  bool contains(const std::string& doc_id) const;
  std::vector<std::string> doc_ids() const;

  void save_index() const;
  void reindex();  // rebuild the in-memory index from the files on disk

  const std::string& directory() const { return dir_; }

 private:
  std::string file_name_for(const std::string& doc_id) const;

  std::string dir_;
  std::map<std::string, std::string> index_;  // docId -> file name
};

}  // namespace sentmark
