#include "sentmark/tokenize.hpp"

#include <cctype>

namespace sentmark {

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }
bool is_punct(unsigned char c) { return std::ispunct(c) != 0; }

}  // namespace

std::string ascii_lower(const std::string& text) {
  std::string out(text);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::vector<std::string> tokenize(const std::string& text) {
  const std::string lowered = ascii_lower(text);
  std::vector<std::string> tokens;

  std::size_t i = 0;
  const std::size_t n = lowered.size();
  while (i < n) {
    while (i < n && is_space(lowered[i])) ++i;
    if (i >= n) break;
    std::size_t j = i;
    while (j < n && !is_space(lowered[j])) ++j;
    // chunk = lowered[i, j)
    std::size_t lead = i;
    while (lead < j && is_punct(lowered[lead])) ++lead;
    std::size_t trail = j;
    while (trail > lead && is_punct(lowered[trail - 1])) --trail;

    for (std::size_t k = i; k < lead; ++k) tokens.emplace_back(1, lowered[k]);
    if (lead < trail) tokens.push_back(lowered.substr(lead, trail - lead));
    for (std::size_t k = trail; k < j; ++k) tokens.emplace_back(1, lowered[k]);
    i = j;
  }
  return tokens;
}

std::string detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  for (const std::string& tok : tokens) {
    bool punct_only = !tok.empty();
    for (unsigned char c : tok) {
      if (!is_punct(c)) {
        punct_only = false;
        break;
      }
    }
    if (!out.empty() && !punct_only) out.push_back(' ');
    out += tok;
  }
  return out;
}

}  // namespace sentmark
