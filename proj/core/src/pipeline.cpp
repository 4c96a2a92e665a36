#include "ragaudit/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "ragaudit/error.hpp"
#include "ragaudit/text.hpp"

namespace ragaudit {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string_view to_string(FilterStatistic s) { return s == FilterStatistic::CochranQ ? "q" : "tau2"; }

std::string_view to_string(Aggregation a) {
    return a == Aggregation::HeterogeneityScore ? "heterogeneity" : "any_negation";
}

template <typename T>
void read_key(const json& config, const char* key, T& target) {
    if (auto it = config.find(key); it != config.end()) {
        target = it->get<T>();
    }
}

class StageClock {
public:
    double lap() {
        auto now = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
        return ms;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

void PipelineConfig::validate() const {
    if (extra_m < 1) {
        throw ValidationError("extra_m must be at least 1 (disable extra evidence with use_extra_evidence=false)");
    }
    if (retrieval_k < extra_m) {
        throw ValidationError("retrieval_k must be >= extra_m");
    }
    if (!(weights.v_constant > 0.0) || !(weights.w_floor > 0.0)) {
        throw ValidationError("v_constant and w_floor must be positive");
    }
    if (adjudication.filter.q_threshold && *adjudication.filter.q_threshold < 0.0) {
        throw ValidationError("q_threshold must be non-negative");
    }
    if (adjudication.filter.tau_threshold < 0.0) {
        throw ValidationError("tau_threshold must be non-negative");
    }
    if (!today.ok()) {
        throw ValidationError("reference date is not a valid calendar date");
    }
    if (stance_provider != "lexical" && stance_provider != "oracle" && stance_provider != "http") {
        throw ValidationError("unknown stance provider '" + stance_provider + "'");
    }
    rubric.validate();
}

json PipelineConfig::to_json() const {
    json out{
        {"retrieval_k", retrieval_k},
        {"extra_m", extra_m},
        {"use_extra_evidence", use_extra_evidence},
        {"per_response_retrieval", per_response_retrieval},
        {"v_constant", weights.v_constant},
        {"w_floor", weights.w_floor},
        {"filter_statistic", to_string(adjudication.filter.statistic)},
        {"q_threshold", adjudication.filter.q_threshold ? json(*adjudication.filter.q_threshold) : json(nullptr)},
        {"tau_threshold", adjudication.filter.tau_threshold},
        {"min_k", adjudication.filter.min_k},
        {"aggregation", to_string(adjudication.aggregation)},
        {"max_ranked_claims", claims.max_ranked},
        {"rubric", rubric.to_json()},
        {"today", format_date(today)},
        {"random_reliability_seed", random_reliability_seed ? json(*random_reliability_seed) : json(nullptr)},
        {"stance_provider", stance_provider},
        {"stance_parallelism", stance_parallelism},
    };
    return out;
}

PipelineConfig PipelineConfig::from_json(const json& config, PipelineConfig base) {
    if (!config.is_object()) {
        throw ValidationError("pipeline config must be a JSON object");
    }
    try {
        read_key(config, "retrieval_k", base.retrieval_k);
        read_key(config, "extra_m", base.extra_m);
        read_key(config, "use_extra_evidence", base.use_extra_evidence);
        read_key(config, "per_response_retrieval", base.per_response_retrieval);
        read_key(config, "v_constant", base.weights.v_constant);
        read_key(config, "w_floor", base.weights.w_floor);
        read_key(config, "tau_threshold", base.adjudication.filter.tau_threshold);
        read_key(config, "min_k", base.adjudication.filter.min_k);
        read_key(config, "max_ranked_claims", base.claims.max_ranked);
        read_key(config, "stance_provider", base.stance_provider);
        read_key(config, "stance_parallelism", base.stance_parallelism);
        if (auto it = config.find("filter_statistic"); it != config.end()) {
            auto value = it->get<std::string>();
            if (value == "q") {
                base.adjudication.filter.statistic = FilterStatistic::CochranQ;
            } else if (value == "tau2") {
                base.adjudication.filter.statistic = FilterStatistic::TauSquared;
            } else {
                throw ValidationError("filter_statistic must be 'q' or 'tau2'");
            }
        }
        if (auto it = config.find("q_threshold"); it != config.end()) {
            base.adjudication.filter.q_threshold =
                it->is_null() ? std::nullopt : std::optional<double>(it->get<double>());
        }
        if (auto it = config.find("aggregation"); it != config.end()) {
            auto value = it->get<std::string>();
            if (value == "heterogeneity") {
                base.adjudication.aggregation = Aggregation::HeterogeneityScore;
            } else if (value == "any_negation") {
                base.adjudication.aggregation = Aggregation::AnyNegation;
            } else {
                throw ValidationError("aggregation must be 'heterogeneity' or 'any_negation'");
            }
        }
        if (auto it = config.find("rubric"); it != config.end()) {
            base.rubric = Rubric::from_json(*it);
        }
        if (auto it = config.find("rubric_path"); it != config.end()) {
            base.rubric = Rubric::load(it->get<std::string>());
        }
        if (auto it = config.find("today"); it != config.end()) {
            auto date = parse_date(it->get<std::string>());
            if (!date) {
                throw ValidationError("'today' must be YYYY-MM-DD");
            }
            base.today = *date;
        }
        if (auto it = config.find("random_reliability_seed"); it != config.end()) {
            base.random_reliability_seed =
                it->is_null() ? std::nullopt : std::optional<std::uint64_t>(it->get<std::uint64_t>());
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed pipeline config: ") + e.what());
    }
    return base;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path, PipelineConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    json config = json::parse(in, nullptr, false);
    if (config.is_discarded()) {
        throw ParseError(path.string(), 0, "config is not valid JSON");
    }
    return from_json(config, std::move(base));
}

std::string PipelineConfig::fingerprint() const {
    auto canonical = to_json();
    canonical.erase("stance_parallelism");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical.dump())));
    return buf;
}

int random_reliability(std::uint64_t seed, std::string_view query_id, std::string_view article_id) {
    std::uint64_t h = fnv1a(std::to_string(seed));
    h = fnv1a("\x1f", h);
    h = fnv1a(query_id, h);
    h = fnv1a("\x1f", h);
    h = fnv1a(article_id, h);
    std::mt19937_64 rng(h);
    return static_cast<int>(rng() % 8);
}

Verifier::Verifier(const Index& index, PipelineConfig config, const StanceProvider& stance)
    : index_(index), config_(std::move(config)), stance_(stance), similarity_(nullptr) {
    config_.validate();
    fingerprint_ = config_.fingerprint();
}

Verifier::Verifier(const Index& index, PipelineConfig config, const StanceProvider& stance,
                   const SimilarityProvider& similarity)
    : Verifier(index, std::move(config), stance) {
    similarity_ = &similarity;
}

VerificationReport Verifier::verify(const RagOutput& rag) const {
    VerificationReport report;
    report.query_id = rag.id;
    report.config_fingerprint = fingerprint_;
    report.gold_label = rag.gold_label;
    StageClock clock;

    std::vector<Claim> claims;
    try {
        claims = extract_claims(rag, similarity_ ? *similarity_ : fallback_similarity_, segmenter_, config_.claims);
    } catch (const ProviderError& e) {
        spdlog::warn("query {}: similarity provider failed ({}); using TF cosine", rag.id, e.what());
        claims = extract_claims(rag, fallback_similarity_, segmenter_, config_.claims);
        report.degraded = true;
    }
    report.timings.claims_ms = clock.lap();

    std::unordered_set<std::string> given_ids;
    std::vector<std::string> given_order;
    for (const auto& article : rag.given_evidence) {
        if (given_ids.insert(article.id).second) {
            given_order.push_back(article.id);
        }
    }

    auto reliability_for = [&](const Article& article, const TokenSet& tokens) {
        if (config_.random_reliability_seed) {
            return random_reliability(*config_.random_reliability_seed, rag.id, article.id);
        }
        return score_article(article, tokens, config_.today, config_.rubric).value;
    };

    // Per claim: query tokens, given reliabilities, and the selected extra evidence.
    struct ClaimEvidence {
        std::vector<int> given_reliability;
        std::vector<ScoredArticle> extra;
        std::vector<int> extra_reliability;
    };
    std::vector<ClaimEvidence> evidence(claims.size());

    auto select_extra = [&](std::string_view query_text, const TokenSet& tokens, ClaimEvidence& out) {
        auto candidates = index_.query(query_text, config_.retrieval_k, given_ids);
        std::unordered_map<std::string, int> reliability;
        for (const auto& c : candidates) {
            reliability.emplace(c.article->id, reliability_for(*c.article, tokens));
        }
        out.extra = rerank_by_reliability(candidates, reliability, config_.extra_m);
        for (const auto& e : out.extra) {
            out.extra_reliability.push_back(reliability.at(e.article->id));
        }
    };

    if (config_.use_extra_evidence && config_.per_response_retrieval) {
        std::string joined;
        for (const auto& claim : claims) {
            joined += claim.text;
            joined += '\n';
        }
        ClaimEvidence shared;
        select_extra(joined, token_set(joined), shared);
        for (auto& e : evidence) {
            e.extra = shared.extra;
            e.extra_reliability = shared.extra_reliability;
        }
    }
    for (std::size_t c = 0; c < claims.size(); ++c) {
        auto tokens = token_set(claims[c].text);
        if (config_.use_extra_evidence && !config_.per_response_retrieval) {
            select_extra(claims[c].text, tokens, evidence[c]);
        }
        for (const auto& article : rag.given_evidence) {
            evidence[c].given_reliability.push_back(reliability_for(article, tokens));
        }
        for (std::size_t i = 0; i < evidence[c].extra.size(); ++i) {
            report.extra_evidence_used.push_back({c, evidence[c].extra[i].article->id,
                                                  evidence[c].extra_reliability[i], evidence[c].extra[i].bm25_score});
        }
    }
    report.timings.retrieval_ms = clock.lap();

    std::vector<StancePair> pairs;
    for (std::size_t c = 0; c < claims.size(); ++c) {
        for (const auto& article : rag.given_evidence) {
            pairs.push_back({c, &claims[c], &article});
        }
        for (const auto& extra : evidence[c].extra) {
            pairs.push_back({c, &claims[c], extra.article});
        }
    }
    report.stance_verdicts = judge_batch(stance_, pairs, config_.stance_parallelism);
    for (const auto& v : report.stance_verdicts) {
        if (v.provider == "error") {
            report.degraded = true;
        }
    }
    report.timings.stance_ms = clock.lap();

    std::size_t next_verdict = 0;
    for (std::size_t c = 0; c < claims.size(); ++c) {
        std::vector<WeightedStudy> given;
        std::vector<WeightedStudy> extra;
        for (std::size_t g = 0; g < rag.given_evidence.size(); ++g) {
            const auto& v = report.stance_verdicts[next_verdict++];
            given.push_back(make_study(rag.given_evidence[g].id, stance_value(v.value),
                                       evidence[c].given_reliability[g], Origin::Given, config_.weights));
        }
        for (std::size_t e = 0; e < evidence[c].extra.size(); ++e) {
            const auto& v = report.stance_verdicts[next_verdict++];
            extra.push_back(make_study(evidence[c].extra[e].article->id, stance_value(v.value),
                                       evidence[c].extra_reliability[e], Origin::Extra, config_.weights));
        }
        report.claim_adjudications.push_back(adjudicate(claims[c], given, extra, config_.adjudication));
    }
    report.response_label = verdict(report.claim_adjudications);
    report.timings.adjudication_ms = clock.lap();

    report.evidence_audits = audit_given_evidence(report.claim_adjudications, given_order);
    report.contribution =
        query_contribution(report.claim_adjudications, given_order.size(), config_.adjudication.aggregation);
    report.timings.audit_ms = clock.lap();
    return report;
}

VerificationReport verify(const RagOutput& rag, const Index& index, const PipelineConfig& config,
                          const StanceProvider& stance) {
    return Verifier(index, config, stance).verify(rag);
}

}  // namespace ragaudit
