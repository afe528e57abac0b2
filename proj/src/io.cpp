#include "sentmark/io.hpp"

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "sentmark/prng.hpp"

namespace sentmark {

namespace fs = std::filesystem;

std::vector<Json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<Json> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      records.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": bad JSON: " + e.what());
    }
  }
  return records;
}

void write_jsonl(const std::string& path, const std::vector<Json>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (const Json& r : records) {
    out << r.dump() << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<double> load_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scores file: " + path);
  std::vector<double> scores;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    scores.push_back(std::stod(line.substr(b)));
  }
  return scores;
}

void save_scores(const std::string& path, const std::vector<double>& scores) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scores file: " + path);
  out.precision(17);
  for (double s : scores) out << s << '\n';
}

TripletBatch load_triplets(const std::string& path) {
  TripletBatch batch;
  for (const Json& r : read_jsonl(path)) {
    Triplet t;
    t.anchor = r.at("anchor").get<std::string>();
    t.positive = r.at("positive").get<std::string>();
    t.negative = r.at("negative").get<std::string>();
    if (t.anchor.empty() || t.positive.empty() || t.negative.empty()) {
      throw std::runtime_error("triplet with empty text in " + path);
    }
    batch.push_back(std::move(t));
  }
  return batch;
}

Json report_to_json(const DetectionReport& report) {
  return Json{{"doc_id", report.doc_id},
              {"valid", report.valid},
              {"total", report.total},
              {"z", report.z},
              {"threshold", report.threshold},
              {"verdict", report.verdict},
              {"per_sentence_valid", report.per_sentence_valid}};
}

DetectionReport report_from_json(const Json& j) {
  DetectionReport report;
  report.doc_id = j.at("doc_id").get<std::string>();
  report.valid = j.at("valid").get<int>();
  report.total = j.at("total").get<int>();
  report.z = j.at("z").get<double>();
  report.threshold = j.at("threshold").get<double>();
  report.verdict = j.at("verdict").get<bool>();
  report.per_sentence_valid =
      j.at("per_sentence_valid").get<std::vector<bool>>();
  return report;
}

std::int64_t RunManifest::now() {
  if (const char* epoch = std::getenv("SENTMARK_EPOCH")) {
    return std::atoll(epoch);
  }
  return static_cast<std::int64_t>(std::time(nullptr));
}

Json RunManifest::to_json() const {
  Json seeds = Json::object();
  for (const auto& [name, value] : rng_seeds) seeds[name] = value;
  return Json{{"command", command},
              {"config_hash", config_hash},
              {"input_paths", input_paths},
              {"output_paths", output_paths},
              {"rng_seeds", seeds},
              {"timestamp", timestamp}};
}

void RunManifest::write_for(const std::string& primary_output) const {
  const fs::path path = primary_output + ".manifest.json";
  const fs::path base =
      path.has_parent_path() ? path.parent_path() : fs::path(".");
  // Paths are stored relative to the manifest so a replayed output tree is
  // position-independent (and byte-comparable across runs).
  RunManifest rel = *this;
  auto relativize = [&base](std::string& p) {
    std::error_code ec;
    const fs::path r = fs::proximate(p, base, ec);
    if (!ec && !r.empty()) p = r.generic_string();
  };
  for (std::string& p : rel.input_paths) relativize(p);
  for (std::string& p : rel.output_paths) relativize(p);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
  out << rel.to_json().dump(2) << '\n';
}

ReportStore::ReportStore(const std::string& directory) : dir_(directory) {
  fs::create_directories(dir_);
  const fs::path index_path = fs::path(dir_) / "index.json";
  if (fs::exists(index_path)) {
    std::ifstream in(index_path);
    const Json j = Json::parse(in);
    for (const auto& [doc_id, file] : j.items()) {
      index_[doc_id] = file.get<std::string>();
    }
  }
}

std::string ReportStore::file_name_for(const std::string& doc_id) const {
  std::string safe;
  for (char c : doc_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-';
    safe.push_back(ok ? c : '_');
  }
  char suffix[24];
  std::snprintf(suffix, sizeof(suffix), "-%08llx",
                static_cast<unsigned long long>(hash_bytes(doc_id) & 0xFFFFFFFF));
  return safe + suffix + ".json";
}

std::string ReportStore::write(const DetectionReport& report) {
  const std::string name = file_name_for(report.doc_id);
  const fs::path path = fs::path(dir_) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path.string());
  out << report_to_json(report).dump(2) << '\n';
  index_[report.doc_id] = name;
  return path.string();
}

bool ReportStore::contains(const std::string& doc_id) const {
  return index_.contains(doc_id);
}

DetectionReport ReportStore::read(const std::string& doc_id) const {
  auto it = index_.find(doc_id);
  if (it == index_.end()) {
    throw std::runtime_error("report store has no doc: " + doc_id);
  }
  std::ifstream in(fs::path(dir_) / it->second);
  if (!in) throw std::runtime_error("missing report file: " + it->second);
  return report_from_json(Json::parse(in));
}

std::vector<std::string> ReportStore::doc_ids() const {
  std::vector<std::string> ids;
  ids.reserve(index_.size());
  for (const auto& [id, file] : index_) ids.push_back(id);
  return ids;
}

void ReportStore::save_index() const {
  Json j = Json::object();
  for (const auto& [id, file] : index_) j[id] = file;
  const fs::path path = fs::path(dir_) / "index.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write index: " + path.string());
  out << j.dump(2) << '\n';
}

void ReportStore::reindex() {
  index_.clear();
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name == "index.json" || !name.ends_with(".json")) continue;
    std::ifstream in(entry.path());
    try {
      const DetectionReport report = report_from_json(Json::parse(in));
      index_[report.doc_id] = name;
    } catch (const std::exception&) {
      // non-report JSON in the directory is skipped
    }
  }
}

}  // namespace sentmark
