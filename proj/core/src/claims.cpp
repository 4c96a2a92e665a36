#include "ragaudit/claims.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "ragaudit/text.hpp"

namespace ragaudit {

namespace {

constexpr std::string_view kAbbreviations[] = {
    "al",  "approx", "ca",   "cf",  "dr",  "e.g", "eg",  "et",  "etc", "fig", "figs",
    "i.e", "ie",     "inc",  "jr",  "mr",  "mrs", "ms",  "no",  "nos", "prof", "sr",
    "st",  "vol",    "vs",
};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}'; }

// The word (letters and inner periods) immediately before position `dot`.
std::string word_before(std::string_view text, std::size_t dot) {
    std::size_t start = dot;
    while (start > 0) {
        char c = text[start - 1];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '.') {
            --start;
        } else {
            break;
        }
    }
    std::string word(text.substr(start, dot - start));
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return word;
}

bool protected_period(std::string_view text, std::size_t dot) {
    auto word = word_before(text, dot);
    return std::find(std::begin(kAbbreviations), std::end(kAbbreviations), word) !=
           std::end(kAbbreviations);
}

void push_trimmed(std::string_view text, std::size_t begin, std::size_t end, std::vector<Span>& out) {
    while (begin < end && is_space(text[begin])) {
        ++begin;
    }
    while (end > begin && is_space(text[end - 1])) {
        --end;
    }
    if (begin < end) {
        out.push_back({begin, end});
    }
}

std::vector<std::pair<std::string, double>> sorted_tf(std::string_view text) {
    auto tokens = tokenize(text);
    std::sort(tokens.begin(), tokens.end());
    std::vector<std::pair<std::string, double>> tf;
    for (auto& token : tokens) {
        if (!tf.empty() && tf.back().first == token) {
            tf.back().second += 1.0;
        } else {
            tf.emplace_back(std::move(token), 1.0);
        }
    }
    return tf;
}

}  // namespace

std::vector<Span> RuleSegmenter::segment(std::string_view text) const {
    std::vector<Span> spans;
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c != '.' && c != '!' && c != '?') {
            ++i;
            continue;
        }
        if (c == '.' && protected_period(text, i)) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?' || is_closer(text[j]))) {
            ++j;
        }
        std::size_t k = j;
        while (k < text.size() && is_space(text[k])) {
            ++k;
        }
        bool boundary = k == text.size() ||
                        (k > j && (std::isupper(static_cast<unsigned char>(text[k])) ||
                                   std::isdigit(static_cast<unsigned char>(text[k]))));
        if (boundary) {
            push_trimmed(text, start, j, spans);
            start = k;
        }
        i = j;
    }
    push_trimmed(text, start, text.size(), spans);
    return spans;
}

std::vector<Span> segment(std::string_view text) { return RuleSegmenter{}.segment(text); }

double tf_cosine(std::string_view a, std::string_view b) {
    auto ta = sorted_tf(a);
    auto tb = sorted_tf(b);
    if (ta.empty() || tb.empty()) {
        return 0.0;
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (const auto& [_, v] : ta) {
        na += v * v;
    }
    for (const auto& [_, v] : tb) {
        nb += v * v;
    }
    auto ia = ta.begin();
    auto ib = tb.begin();
    while (ia != ta.end() && ib != tb.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            dot += ia->second * ib->second;
            ++ia;
            ++ib;
        }
    }
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

double TfCosineSimilarity::similarity(std::string_view a, std::string_view b) const {
    return tf_cosine(a, b);
}

std::vector<RankedSentence> rank_sentences(std::string_view text, std::span<const Span> sentences,
                                           std::string_view question,
                                           const SimilarityProvider& similarity) {
    std::vector<RankedSentence> ranked;
    ranked.reserve(sentences.size());
    for (const auto& span : sentences) {
        ranked.push_back({span, similarity.similarity(span.slice(text), question)});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedSentence& a, const RankedSentence& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.span.begin < b.span.begin;
    });
    return ranked;
}

std::vector<Claim> extract_claims(const RagOutput& rag, const SimilarityProvider& similarity,
                                  const Segmenter& segmenter, const ClaimOptions& options) {
    const std::string_view text = rag.response_text;
    auto sentences = segmenter.segment(text);
    auto ranked = rank_sentences(text, sentences, rag.question, similarity);

    std::string main_source;
    if (rag.chosen_answer && !trim(*rag.chosen_answer).empty()) {
        main_source = std::string(trim(*rag.chosen_answer));
    } else if (!ranked.empty()) {
        main_source = std::string(ranked.front().span.slice(text));
    }

    std::vector<Claim> claims;
    Claim main;
    main.kind = ClaimKind::Main;
    main.text = std::string(trim(rag.question));
    if (!main_source.empty()) {
        main.text += ' ';
        main.text += main_source;
    }
    claims.push_back(std::move(main));

    std::size_t taken = 0;
    for (const auto& sentence : ranked) {
        if (taken == options.max_ranked) {
            break;
        }
        auto sentence_text = sentence.span.slice(text);
        if (sentence_text == main_source) {
            continue;
        }
        Claim claim;
        claim.kind = ClaimKind::Ranked;
        claim.text = std::string(sentence_text);
        claim.rank_score = sentence.score;
        claim.source_span = sentence.span;
        claims.push_back(std::move(claim));
        ++taken;
    }
    return claims;
}

std::vector<Claim> extract_claims(const RagOutput& rag) {
    return extract_claims(rag, TfCosineSimilarity{}, RuleSegmenter{});
}

}  // namespace ragaudit
