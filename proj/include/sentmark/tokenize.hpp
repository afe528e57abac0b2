#pragma once

#include <string>
#include <vector>

namespace sentmark {

// Shared tokenizer for the token-level watermark, n-gram metrics, and the
// bigram attack: ASCII case-fold, split on whitespace, then peel leading and
// trailing punctuation off each chunk into standalone tokens. Interior
// punctuation ("don't", "co-op") stays attached.
//
//   "Hello, world!"  ->  ["hello", ",", "world", "!"]
std::vector<std::string> tokenize(const std::string& text);

// Inverse-ish of tokenize for generated token streams: join with single
// spaces, except punctuation-only tokens attach to the previous token.
std::string detokenize(const std::vector<std::string>& tokens);

// ASCII lowercase copy.
std::string ascii_lower(const std::string& text);

}  // namespace sentmark
