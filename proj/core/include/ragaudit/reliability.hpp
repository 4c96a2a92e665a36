#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragaudit/corpus.hpp"
#include "ragaudit/retrieval.hpp"
#include "ragaudit/text.hpp"

namespace ragaudit {

inline constexpr int kMaxReliability = 7;

struct ReliabilityComponents {
    int recency_points = 0;  // 0-3
    int type_points = 0;     // 0-3
    int mesh_points = 0;     // 0-1

    bool operator==(const ReliabilityComponents&) const = default;
};

/// value == recency_points + type_points + mesh_points, always in [0, 7].
struct ReliabilityScore {
    int value = 0;
    ReliabilityComponents components;

    bool operator==(const ReliabilityScore&) const = default;
};

/// An article revised within `years` of the reference date earns `points`.
struct RecencyTier {
    int years = 0;
    int points = 0;
};

struct PublicationTypeClass {
    std::string type;  // matched case-insensitively against Article::publication_types
    int points = 0;
};

/// Point table for the rule-based reliability score.
struct Rubric {
    std::vector<RecencyTier> recency;
    std::vector<PublicationTypeClass> publication_types;

    /// 2/5/10 years -> 3/2/1; meta-analysis/systematic review 3, RCT 2,
    /// clinical trial/review 1.
    static Rubric defaults();
    static Rubric from_json(const nlohmann::json& config);
    static Rubric load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    /// Throws ValidationError if a component could leave its range.
    void validate() const;
};

ReliabilityScore score_article(const Article& article, const TokenSet& query_tokens, Date today,
                               const Rubric& rubric);

/// Sort by (reliability desc, bm25 desc, id asc) and keep the first m.
/// Throws ValidationError if a candidate has no score.
std::vector<ScoredArticle> rerank_by_reliability(
    std::span<const ScoredArticle> candidates,
    const std::unordered_map<std::string, ReliabilityScore>& scores, std::size_t m);

/// Same ordering over bare reliability values.
std::vector<ScoredArticle> rerank_by_reliability(std::span<const ScoredArticle> candidates,
                                                 const std::unordered_map<std::string, int>& reliability,
                                                 std::size_t m);

}  // namespace ragaudit
