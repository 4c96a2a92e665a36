#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ragaudit {

using TokenSet = std::unordered_set<std::string>;

/// Lowercases, splits on anything that is not an ASCII letter or digit, and
/// drops tokens shorter than two bytes. Bytes >= 0x80 count as word
/// characters so UTF-8 words stay whole. No stemming.
std::vector<std::string> tokenize(std::string_view text);

TokenSet token_set(std::string_view text);

/// Term frequencies over tokenize(text).
std::unordered_map<std::string, double> term_frequencies(std::string_view text);

std::string join_tokens(std::span<const std::string> tokens);

bool is_stopword(std::string_view token);

/// Tokens that are not stopwords, in order.
std::vector<std::string> content_tokens(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace ragaudit
