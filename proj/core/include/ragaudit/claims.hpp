#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragaudit/corpus.hpp"

namespace ragaudit {

/// Half-open byte range [begin, end) into a response text.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - begin; }
    std::string_view slice(std::string_view text) const { return text.substr(begin, end - begin); }
    bool operator==(const Span&) const = default;
};

enum class ClaimKind { Main, Ranked };

struct Claim {
    std::string text;
    ClaimKind kind = ClaimKind::Main;
    std::optional<double> rank_score;  // Ranked only
    std::optional<Span> source_span;   // Ranked only

    bool operator==(const Claim&) const = default;
};

class Segmenter {
public:
    virtual ~Segmenter() = default;
    /// Ordered, non-overlapping, whitespace-trimmed sentence spans.
    virtual std::vector<Span> segment(std::string_view text) const = 0;
};

/// Splits after '.', '!' or '?' (plus trailing quotes/brackets) when followed
/// by whitespace and an uppercase letter or digit. A period that ends a known
/// abbreviation ("e.g.", "Dr.", "Fig.", ...) never splits; decimals never
/// split because the period is not followed by whitespace.
class RuleSegmenter final : public Segmenter {
public:
    std::vector<Span> segment(std::string_view text) const override;
};

std::vector<Span> segment(std::string_view text);

class SimilarityProvider {
public:
    virtual ~SimilarityProvider() = default;
    /// Similarity in [0, 1]. Must be safe to call concurrently.
    virtual double similarity(std::string_view a, std::string_view b) const = 0;
};

/// Cosine between term-frequency vectors of tokenize(a) and tokenize(b).
class TfCosineSimilarity final : public SimilarityProvider {
public:
    double similarity(std::string_view a, std::string_view b) const override;
};

double tf_cosine(std::string_view a, std::string_view b);

struct RankedSentence {
    Span span;
    double score = 0.0;
};

/// Score desc; equal scores keep the earlier span first.
std::vector<RankedSentence> rank_sentences(std::string_view text, std::span<const Span> sentences,
                                           std::string_view question,
                                           const SimilarityProvider& similarity);

struct ClaimOptions {
    std::size_t max_ranked = 4;
};

/// One Main claim (question + chosen answer, or question + best sentence when
/// there is no chosen answer) followed by up to `max_ranked` Ranked claims.
/// Sentences identical to the Main claim's source are not repeated.
std::vector<Claim> extract_claims(const RagOutput& rag, const SimilarityProvider& similarity,
                                  const Segmenter& segmenter, const ClaimOptions& options = {});
std::vector<Claim> extract_claims(const RagOutput& rag);

}  // namespace ragaudit
