#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragaudit/audit.hpp"
#include "ragaudit/claims.hpp"
#include "ragaudit/corpus.hpp"
#include "ragaudit/heterogeneity.hpp"
#include "ragaudit/reliability.hpp"
#include "ragaudit/retrieval.hpp"
#include "ragaudit/stance.hpp"

namespace ragaudit {

struct PipelineConfig {
    std::size_t retrieval_k = 15;  // BM25 candidates per claim
    std::size_t extra_m = 9;       // kept after reliability rerank
    /// false drops extra evidence entirely; the verdict then rests on the
    /// given evidence alone.
    bool use_extra_evidence = true;
    /// Retrieve once per response (all claims joined) instead of per claim.
    bool per_response_retrieval = false;
    WeightOptions weights;
    AdjudicationOptions adjudication;
    ClaimOptions claims;
    Rubric rubric = Rubric::defaults();
    Date today = today_utc();
    /// When set, every article's reliability is replaced by a seeded uniform
    /// integer in [0, 7].
    std::optional<std::uint64_t> random_reliability_seed;
    std::string stance_provider = "lexical";  // lexical | oracle | http
    std::size_t stance_parallelism = 4;       // not part of the fingerprint

    /// Throws ValidationError unless retrieval_k >= extra_m >= 1 and the
    /// weights, filter and rubric are well formed.
    void validate() const;

    nlohmann::json to_json() const;
    /// Keys absent from `config` keep their value from `base`.
    static PipelineConfig from_json(const nlohmann::json& config, PipelineConfig base);
    static PipelineConfig from_json(const nlohmann::json& config) { return from_json(config, PipelineConfig{}); }
    static PipelineConfig load(const std::filesystem::path& path, PipelineConfig base);
    static PipelineConfig load(const std::filesystem::path& path) { return load(path, PipelineConfig{}); }

    /// 16 hex digits; changes whenever a parameter that can alter a report changes.
    std::string fingerprint() const;
};

struct ExtraEvidence {
    std::size_t claim_index = 0;
    std::string article_id;
    int reliability = 0;
    double bm25_score = 0.0;

    bool operator==(const ExtraEvidence&) const = default;
};

struct StageTimings {
    double claims_ms = 0.0;
    double retrieval_ms = 0.0;
    double stance_ms = 0.0;
    double adjudication_ms = 0.0;
    double audit_ms = 0.0;

    bool operator==(const StageTimings&) const = default;
};

struct VerificationReport {
    std::string query_id;
    ResponseLabel response_label = ResponseLabel::Correct;
    std::vector<ClaimAdjudication> claim_adjudications;
    std::vector<EvidenceAudit> evidence_audits;
    std::vector<ExtraEvidence> extra_evidence_used;
    std::vector<StanceVerdict> stance_verdicts;
    QueryContribution contribution;
    std::string config_fingerprint;
    /// A provider failed somewhere and its answers were replaced by neutral ones.
    bool degraded = false;
    std::optional<bool> gold_label;
    StageTimings timings;

    bool operator==(const VerificationReport&) const = default;
};

/// Runs claims -> retrieval -> reliability -> stance -> adjudication ->
/// verdict -> audit for one response. Holds references only; the index (and
/// its corpus) and providers must outlive it. verify() is const and may be
/// called concurrently.
class Verifier {
public:
    Verifier(const Index& index, PipelineConfig config, const StanceProvider& stance);
    Verifier(const Index& index, PipelineConfig config, const StanceProvider& stance,
             const SimilarityProvider& similarity);

    VerificationReport verify(const RagOutput& rag) const;

    const PipelineConfig& config() const noexcept { return config_; }

private:
    const Index& index_;
    PipelineConfig config_;
    std::string fingerprint_;
    const StanceProvider& stance_;
    const SimilarityProvider* similarity_;  // null: TF cosine
    TfCosineSimilarity fallback_similarity_;
    RuleSegmenter segmenter_;
};

VerificationReport verify(const RagOutput& rag, const Index& index, const PipelineConfig& config,
                          const StanceProvider& stance);

/// Seeded reliability used by the random-reliability ablation.
int random_reliability(std::uint64_t seed, std::string_view query_id, std::string_view article_id);

}  // namespace ragaudit
