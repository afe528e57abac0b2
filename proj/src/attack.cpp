#include "sentmark/attack.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "sentmark/prng.hpp"
#include "sentmark/tokenize.hpp"

namespace sentmark {

namespace {

std::vector<std::pair<std::string, std::string>> bigrams_of(
    const Sentence& s) {
  const std::vector<std::string> tokens = tokenize(s.text);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    pairs.emplace_back(tokens[i], tokens[i + 1]);
  }
  return pairs;
}

const std::vector<std::string> kFunctionWords = {
    "the",  "a",      "an",     "very", "quite",   "just",
    "really", "rather", "then",  "still", "almost", "soon",
    "indeed", "nearly", "perhaps"};

// word <TAB> synonym <TAB> synonym ...
const char* kBuiltinSynonyms =
    "big\tlarge\thuge\tgreat\n"
    "small\tlittle\ttiny\n"
    "old\tancient\taged\n"
    "new\trecent\tmodern\n"
    "quick\tfast\trapid\tswift\n"
    "slow\tunhurried\tgradual\n"
    "happy\tglad\tcheerful\tjoyful\n"
    "sad\tunhappy\tgloomy\n"
    "quiet\tsilent\thushed\n"
    "loud\tnoisy\tthunderous\n"
    "bright\tshiny\tbrilliant\n"
    "dark\tdim\tshadowy\n"
    "warm\tmild\tcozy\n"
    "cold\tchilly\tcool\n"
    "long\tlengthy\textended\n"
    "short\tbrief\tcompact\n"
    "late\tdelayed\ttardy\n"
    "strong\tsturdy\tpowerful\n"
    "weak\tfeeble\tfrail\n"
    "clean\ttidy\tspotless\n"
    "busy\tcrowded\tactive\n"
    "calm\tpeaceful\tserene\n"
    "deep\tprofound\tbottomless\n"
    "wide\tbroad\tvast\n"
    "narrow\ttight\tslim\n"
    "empty\tvacant\tbare\n"
    "full\tfilled\tloaded\n"
    "fresh\tcrisp\tnewly-made\n"
    "man\tfellow\tgentleman\n"
    "woman\tlady\tmadam\n"
    "dog\thound\tpup\n"
    "cat\tkitten\ttomcat\n"
    "house\thome\tdwelling\tcottage\n"
    "city\tmetropolis\tcapital\n"
    "river\tstream\tcreek\n"
    "road\tstreet\tpath\tlane\n"
    "tree\tpine\toak\n"
    "bird\tcrow\tsparrow\n"
    "child\tkid\tyoungster\n"
    "friend\tcompanion\tpal\n"
    "team\tgroup\tcrew\n"
    "plan\tscheme\tstrategy\n"
    "idea\tnotion\tthought\n"
    "story\ttale\taccount\n"
    "book\tvolume\tnovel\n"
    "paper\tsheet\treport\n"
    "letter\tnote\tmessage\n"
    "garden\tyard\torchard\n"
    "market\tbazaar\tshop\n"
    "morning\tdawn\tdaybreak\n"
    "evening\tdusk\ttwilight\n"
    "rain\tdrizzle\tshower\n"
    "snow\tsleet\tfrost\n"
    "wind\tbreeze\tgust\n"
    "fire\tflame\tblaze\n"
    "food\tmeal\tfare\n"
    "bread\tloaf\tpastry\n"
    "coffee\tbrew\tespresso\n"
    "music\tmelody\ttune\n"
    "song\tballad\tanthem\n"
    "door\tdoorway\tgate\n"
    "window\tpane\tcasement\n"
    "wall\tbarrier\tfence\n"
    "table\tdesk\tcounter\n"
    "chair\tseat\tstool\n"
    "boat\tship\tvessel\n"
    "car\tautomobile\tvehicle\n"
    "train\tlocomotive\trailcar\n"
    "field\tmeadow\tpasture\n"
    "hill\tslope\tridge\n"
    "forest\twoods\twoodland\n"
    "village\thamlet\tsettlement\n"
    "town\tborough\ttownship\n"
    "walked\tstrolled\tpaced\twandered\n"
    "ran\tsprinted\tdashed\traced\n"
    "moved\tshifted\tstirred\n"
    "looked\tgazed\tglanced\tstared\n"
    "watched\tobserved\tviewed\n"
    "found\tdiscovered\tlocated\n"
    "made\tcreated\tproduced\tcrafted\n"
    "built\tconstructed\tassembled\n"
    "wrote\tpenned\tdrafted\n"
    "read\tscanned\tperused\n"
    "spoke\ttalked\tchatted\n"
    "said\tstated\tremarked\tdeclared\n"
    "told\tinformed\trecounted\n"
    "asked\tinquired\trequested\n"
    "answered\treplied\tresponded\n"
    "opened\tunlocked\tunsealed\n"
    "closed\tshut\tsealed\n"
    "started\tbegan\tcommenced\n"
    "finished\tended\tcompleted\tconcluded\n"
    "helped\taided\tassisted\n"
    "carried\thauled\tlugged\n"
    "brought\tfetched\tdelivered\n"
    "took\tgrabbed\tseized\n"
    "gave\thanded\toffered\n"
    "kept\tretained\theld\n"
    "left\tdeparted\texited\n"
    "stayed\tremained\tlingered\n"
    "turned\trotated\tpivoted\n"
    "crossed\ttraversed\tforded\n"
    "followed\ttrailed\tpursued\n"
    "reached\tattained\tapproached\n"
    "visited\tfrequented\tdropped-by\n"
    "waited\tpaused\tidled\n"
    "worked\tlabored\ttoiled\n"
    "played\tperformed\tfrolicked\n"
    "sang\thummed\tchanted\n"
    "slept\tdozed\trested\n"
    "dreamed\timagined\tenvisioned\n";

}  // namespace

int bigram_overlap(const Sentence& x, const Sentence& s) {
  std::map<std::pair<std::string, std::string>, int> counts;
  for (const auto& pair : bigrams_of(x)) counts[pair] += 1;
  int overlap = 0;
  for (const auto& pair : bigrams_of(s)) {
    auto it = counts.find(pair);
    if (it != counts.end() && it->second > 0) {
      it->second -= 1;
      ++overlap;
    }
  }
  return overlap;
}

int bigram_count(const Sentence& s) {
  return static_cast<int>(bigrams_of(s).size());
}

SimilarityFn embedding_similarity(const Embedder& embedder) {
  return [&embedder](const std::string& a, const std::string& b) {
    return cosine(embedder.embed(a), embedder.embed(b));
  };
}

Sentence select_bigram_attack(const CandidateSet& candidates,
                              const SimilarityFn& similarity, double delta,
                              bool sort_by_similarity) {
  const std::vector<Sentence>& cands = candidates.candidates;
  if (cands.empty()) {
    throw std::invalid_argument("select_bigram_attack: no candidates");
  }
  std::vector<double> sims;
  if (candidates.similarities &&
      candidates.similarities->size() == cands.size()) {
    sims = *candidates.similarities;
  } else {
    sims.reserve(cands.size());
    for (const Sentence& c : cands) {
      sims.push_back(similarity(c.text, candidates.original.text));
    }
  }

  std::vector<std::size_t> order(cands.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (sort_by_similarity) {
    std::stable_sort(order.begin(), order.end(),
                     [&sims](std::size_t a, std::size_t b) {
                       return sims[a] > sims[b];
                     });
  }

  const double first_beam_sim = sims[order[0]];
  int best_overlap = 0;
  std::size_t best = cands.size();  // sentinel: none chosen yet
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::size_t idx = order[rank];
    const bool feasible =
        first_beam_sim - sims[idx] <= delta * first_beam_sim;
    if (!feasible) continue;
    const int overlap = bigram_overlap(cands[idx], candidates.original);
    if (best == cands.size() || overlap < best_overlap) {
      best = idx;
      best_overlap = overlap;
    }
  }
  if (best == cands.size()) return cands[order[0]];
  return cands[best];
}

const std::vector<std::string>* SynonymTable::lookup(
    const std::string& word) const {
  auto it = table_.find(word);
  return it == table_.end() ? nullptr : &it->second;
}

SynonymTable SynonymTable::builtin() {
  SynonymTable t;
  std::istringstream in(kBuiltinSynonyms);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string word;
    if (!std::getline(fields, word, '\t')) continue;
    std::vector<std::string> syns;
    std::string syn;
    while (std::getline(fields, syn, '\t')) {
      if (!syn.empty()) syns.push_back(syn);
    }
    if (!word.empty() && !syns.empty()) t.table_[word] = std::move(syns);
  }
  return t;
}

SynonymTable SynonymTable::load_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open synonym table: " + path);
  SynonymTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string word;
    if (!std::getline(fields, word, '\t')) continue;
    std::vector<std::string> syns;
    std::string syn;
    while (std::getline(fields, syn, '\t')) {
      if (!syn.empty()) syns.push_back(syn);
    }
    if (!word.empty() && !syns.empty()) t.table_[word] = std::move(syns);
  }
  if (t.table_.empty()) {
    throw std::runtime_error("synonym table has no entries: " + path);
  }
  return t;
}

void SynonymTable::save_tsv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write synonym table: " + path);
  for (const auto& [word, syns] : table_) {
    out << word;
    for (const std::string& s : syns) out << '\t' << s;
    out << '\n';
  }
}

PerturbationParaphraser::PerturbationParaphraser(SynonymTable table,
                                                 double strength,
                                                 std::uint64_t seed)
    : table_(std::move(table)), strength_(strength), seed_(seed) {
  if (strength < 0.0 || strength > 1.0) {
    throw std::invalid_argument("paraphraser strength must be in [0, 1]");
  }
}

CandidateSet PerturbationParaphraser::paraphrase(const Sentence& sentence,
                                                 int k) {
  if (k < 1) {
    throw std::invalid_argument("paraphrase: k must be >= 1");
  }
  CandidateSet out;
  out.original = sentence;
  out.candidates.reserve(k);

  std::vector<std::string> tokens = tokenize(sentence.text);
  std::string delimiter = ".";
  if (!tokens.empty() && is_delimiter_token(tokens.back())) {
    delimiter = tokens.back();
    tokens.pop_back();
  }

  for (int j = 0; j < k; ++j) {
    // Fixed draw order per candidate: substitutions left to right, then one
    // insertion, one deletion, one reorder attempt.
    SplitMix64 rng(mix64(seed_) ^ hash_bytes(sentence.text) ^
                   mix64(static_cast<std::uint64_t>(j) + 1));
    const double intensity =
        strength_ * static_cast<double>(j + 1) / static_cast<double>(k);
    std::vector<std::string> body = tokens;

    for (std::string& word : body) {
      const std::vector<std::string>* syns = table_.lookup(word);
      if (!syns) continue;
      if (rng.next_double() < intensity) {
        word = (*syns)[rng.next_below(syns->size())];
      }
    }
    if (rng.next_double() < intensity * 0.5) {
      const std::size_t pos = rng.next_below(body.size() + 1);
      const std::string& word =
          kFunctionWords[rng.next_below(kFunctionWords.size())];
      body.insert(body.begin() + pos, word);
    }
    if (rng.next_double() < intensity * 0.5) {
      std::vector<std::size_t> removable;
      for (std::size_t i = 0; i < body.size(); ++i) {
        if (std::find(kFunctionWords.begin(), kFunctionWords.end(), body[i]) !=
            kFunctionWords.end()) {
          removable.push_back(i);
        }
      }
      if (!removable.empty() && body.size() > 1) {
        body.erase(body.begin() +
                   removable[rng.next_below(removable.size())]);
      }
    }
    if (body.size() >= 3 && rng.next_double() < intensity) {
      const std::size_t i = rng.next_below(body.size() - 2);
      std::swap(body[i], body[i + 2]);
    }

    std::string text = detokenize(body);
    text += delimiter;
    out.candidates.push_back({std::move(text), sentence.index});
  }
  return out;
}

std::string attack_document(const std::string& doc, const AttackConfig& cfg,
                            Paraphraser& paraphraser,
                            const SimilarityFn& similarity) {
  cfg.validate();
  const std::vector<Sentence> sentences = segment_sentences(doc);
  if (sentences.empty()) {
    throw std::invalid_argument("attack_document: no sentences");
  }
  std::string out;
  for (const Sentence& s : sentences) {
    const CandidateSet cands = paraphraser.paraphrase(s, cfg.k);
    const Sentence chosen =
        cfg.mode == AttackMode::kVanilla
            ? cands.candidates.front()
            : select_bigram_attack(cands, similarity, cfg.delta,
                                   cfg.sort_by_similarity);
    if (!out.empty()) out.push_back(' ');
    out += chosen.text;
  }
  return out;
}

}  // namespace sentmark
