#include "ragaudit/text.hpp"

#include <algorithm>
#include <iterator>

namespace ragaudit {

namespace {

bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

char lower(unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

// Sorted for binary search.
constexpr std::string_view kStopwords[] = {
    "about", "after", "all",   "also",  "an",    "and",   "any",   "are",   "as",    "at",
    "be",    "been",  "being", "between", "both", "but",  "by",    "can",   "could", "did",
    "do",    "does",  "each",  "for",   "from",  "had",   "has",   "have",  "he",    "her",
    "his",   "how",   "if",    "in",    "into",  "is",    "it",    "its",   "may",   "might",
    "more",  "most",  "of",    "on",    "or",    "other", "our",   "she",   "should", "so",
    "such",  "than",  "that",  "the",   "their", "them",  "there", "these", "they",  "this",
    "those", "to",    "was",   "we",    "were",  "what",  "when",  "which", "who",   "will",
    "with",  "would",
};
static_assert(std::is_sorted(std::begin(kStopwords), std::end(kStopwords)));

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.size() >= 2) {
            tokens.push_back(std::move(current));
        }
        current.clear();
    };
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (is_word_byte(c)) {
            current.push_back(lower(c));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

TokenSet token_set(std::string_view text) {
    auto tokens = tokenize(text);
    return TokenSet(std::make_move_iterator(tokens.begin()), std::make_move_iterator(tokens.end()));
}

std::unordered_map<std::string, double> term_frequencies(std::string_view text) {
    std::unordered_map<std::string, double> tf;
    for (auto& token : tokenize(text)) {
        tf[std::move(token)] += 1.0;
    }
    return tf;
}

std::string join_tokens(std::span<const std::string> tokens) {
    std::string out;
    for (const auto& token : tokens) {
        if (!out.empty()) {
            out.push_back(' ');
        }
        out += token;
    }
    return out;
}

bool is_stopword(std::string_view token) {
    return std::binary_search(std::begin(kStopwords), std::end(kStopwords), token);
}

std::vector<std::string> content_tokens(std::string_view text) {
    auto tokens = tokenize(text);
    std::erase_if(tokens, [](const std::string& t) { return is_stopword(t); });
    return tokens;
}

std::string_view trim(std::string_view text) {
    constexpr std::string_view ws = " \t\r\n\f\v";
    auto first = text.find_first_not_of(ws);
    if (first == std::string_view::npos) {
        return {};
    }
    auto last = text.find_last_not_of(ws);
    return text.substr(first, last - first + 1);
}

}  // namespace ragaudit
