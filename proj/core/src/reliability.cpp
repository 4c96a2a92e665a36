#include "ragaudit/reliability.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "ragaudit/error.hpp"

namespace ragaudit {

using nlohmann::json;

namespace {

std::string fold(std::string_view text) {
    std::string out(trim(text));
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

int recency_points(Date revised, Date today, const Rubric& rubric) {
    int best = 0;
    for (const auto& tier : rubric.recency) {
        if (revised >= years_before(today, tier.years)) {
            best = std::max(best, tier.points);
        }
    }
    return best;
}

int type_points(const Article& article, const Rubric& rubric) {
    int best = 0;
    for (const auto& raw : article.publication_types) {
        auto type = fold(raw);
        for (const auto& cls : rubric.publication_types) {
            if (fold(cls.type) == type) {
                best = std::max(best, cls.points);
            }
        }
    }
    return best;
}

int mesh_points(const Article& article, const TokenSet& query_tokens) {
    for (const auto& heading : article.mesh_headings) {
        for (const auto& token : tokenize(heading)) {
            if (query_tokens.contains(token)) {
                return 1;
            }
        }
    }
    return 0;
}

}  // namespace

Rubric Rubric::defaults() {
    Rubric rubric;
    rubric.recency = {{2, 3}, {5, 2}, {10, 1}};
    rubric.publication_types = {
        {"Meta-Analysis", 3},
        {"Systematic Review", 3},
        {"Randomized Controlled Trial", 2},
        {"Equivalence Trial", 2},
        {"Clinical Trial", 1},
        {"Clinical Trial, Phase I", 1},
        {"Clinical Trial, Phase II", 1},
        {"Clinical Trial, Phase III", 1},
        {"Clinical Trial, Phase IV", 1},
        {"Controlled Clinical Trial", 1},
        {"Pragmatic Clinical Trial", 1},
        {"Review", 1},
    };
    return rubric;
}

Rubric Rubric::from_json(const json& config) {
    Rubric rubric;
    try {
        for (const auto& tier : config.at("recency")) {
            rubric.recency.push_back({tier.at("years").get<int>(), tier.at("points").get<int>()});
        }
        for (const auto& cls : config.at("publication_types")) {
            rubric.publication_types.push_back(
                {cls.at("type").get<std::string>(), cls.at("points").get<int>()});
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed rubric: ") + e.what());
    }
    rubric.validate();
    return rubric;
}

Rubric Rubric::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    try {
        return from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string(), 0, e.what());
    }
}

json Rubric::to_json() const {
    json recency_json = json::array();
    for (const auto& tier : recency) {
        recency_json.push_back({{"years", tier.years}, {"points", tier.points}});
    }
    json types_json = json::array();
    for (const auto& cls : publication_types) {
        types_json.push_back({{"type", cls.type}, {"points", cls.points}});
    }
    return json{{"recency", recency_json}, {"publication_types", types_json}};
}

void Rubric::validate() const {
    for (const auto& tier : recency) {
        if (tier.years < 0 || tier.points < 0 || tier.points > 3) {
            throw ValidationError("recency tier must have years >= 0 and points in [0, 3]");
        }
    }
    for (const auto& cls : publication_types) {
        if (cls.points < 0 || cls.points > 3 || trim(cls.type).empty()) {
            throw ValidationError("publication type class '" + cls.type + "' must have points in [0, 3]");
        }
    }
}

ReliabilityScore score_article(const Article& article, const TokenSet& query_tokens, Date today,
                               const Rubric& rubric) {
    ReliabilityScore score;
    score.components.recency_points = recency_points(article.date_revised, today, rubric);
    score.components.type_points = type_points(article, rubric);
    score.components.mesh_points = mesh_points(article, query_tokens);
    score.value = score.components.recency_points + score.components.type_points +
                  score.components.mesh_points;
    return score;
}

std::vector<ScoredArticle> rerank_by_reliability(std::span<const ScoredArticle> candidates,
                                                 const std::unordered_map<std::string, int>& reliability,
                                                 std::size_t m) {
    struct Keyed {
        ScoredArticle candidate;
        int reliability;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(candidates.size());
    for (const auto& candidate : candidates) {
        auto it = reliability.find(candidate.article->id);
        if (it == reliability.end()) {
            throw ValidationError("no reliability score for '" + candidate.article->id + "'");
        }
        keyed.push_back({candidate, it->second});
    }
    std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
        if (a.reliability != b.reliability) {
            return a.reliability > b.reliability;
        }
        if (a.candidate.bm25_score != b.candidate.bm25_score) {
            return a.candidate.bm25_score > b.candidate.bm25_score;
        }
        return a.candidate.article->id < b.candidate.article->id;
    });
    std::vector<ScoredArticle> out;
    for (std::size_t i = 0; i < keyed.size() && i < m; ++i) {
        out.push_back(keyed[i].candidate);
    }
    return out;
}

std::vector<ScoredArticle> rerank_by_reliability(
    std::span<const ScoredArticle> candidates,
    const std::unordered_map<std::string, ReliabilityScore>& scores, std::size_t m) {
    std::unordered_map<std::string, int> values;
    values.reserve(scores.size());
    for (const auto& [id, score] : scores) {
        values.emplace(id, score.value);
    }
    return rerank_by_reliability(candidates, values, m);
}

}  // namespace ragaudit
