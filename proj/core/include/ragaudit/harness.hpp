#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ragaudit/pipeline.hpp"

namespace ragaudit {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
    bool operator==(const ConfusionCounts&) const = default;
};

/// The positive class is "response contains a factual error".
struct EvalMetrics {
    double accuracy = 0.0;
    std::optional<double> recall;       // absent when there are no positives
    std::optional<double> specificity;  // absent when there are no negatives
    ConfusionCounts counts;

    bool operator==(const EvalMetrics&) const = default;
};

inline bool is_positive(ResponseLabel label) noexcept { return label == ResponseLabel::Incorrect; }

EvalMetrics metrics_from_counts(const ConfusionCounts& counts);

/// `gold_correct[i]` is true when response i is factually correct.
EvalMetrics evaluate(std::span<const ResponseLabel> predicted, std::span<const bool> gold_correct);

/// Uses each report's gold label; throws ValidationError if one is missing.
EvalMetrics evaluate(std::span<const VerificationReport> reports);

enum class RandomPool {
    AllCandidates,  // sample from every candidate
    ExcludeFiner,   // sample only from candidates outside the Finer group
};

struct EvidenceGroups {
    std::vector<ScoredArticle> finer;
    std::vector<ScoredArticle> random;
};

/// Finer = top `group_size` by (reliability, relevance); Random = seeded
/// uniform sample of `group_size` from the pool. Throws ValidationError when
/// the pool is too small.
EvidenceGroups build_groups(std::span<const ScoredArticle> candidates,
                            const std::unordered_map<std::string, int>& reliability, std::uint64_t seed,
                            RandomPool pool = RandomPool::AllCandidates, std::size_t group_size = 3);

/// Verifies every item with `workers` threads; output order follows input.
std::vector<VerificationReport> run_dataset(std::span<const RagOutput> items, const Index& index,
                                            const PipelineConfig& config, const StanceProvider& stance,
                                            std::size_t workers = 1);

/// m == 0 turns extra evidence off; otherwise sets extra_m (raising
/// retrieval_k if needed).
PipelineConfig with_extra_evidence(PipelineConfig config, std::size_t m);

struct SweepRow {
    std::size_t extra_m = 0;
    EvalMetrics metrics;
    std::optional<double> contribution_ratio;

    bool operator==(const SweepRow&) const = default;
};

std::vector<SweepRow> sweep_extra_evidence(std::span<const RagOutput> items, const Index& index,
                                           const PipelineConfig& config, const StanceProvider& stance,
                                           std::span<const std::size_t> m_values, std::size_t workers = 1);

enum class Ablation {
    RandomReliability,  // reliability replaced by seeded uniform integers in [0, 7]
    AnyNegation,        // claim refuted when any evidence contradicts it
    NoRetrieval,        // no extra evidence
};

std::string_view to_string(Ablation kind) noexcept;
std::optional<Ablation> parse_ablation(std::string_view text) noexcept;  // a-reli | a-hete | a-retr

PipelineConfig ablate(PipelineConfig config, Ablation kind, std::uint64_t seed);

EvalMetrics run_ablation(Ablation kind, std::span<const RagOutput> items, const Index& index,
                         const PipelineConfig& config, const StanceProvider& stance, std::uint64_t seed,
                         std::size_t workers = 1);

/// Provenance lines written as "# key=value" before every table.
struct TableHeader {
    std::uint64_t seed = 0;
    std::string config_fingerprint;
    std::string title;
};

/// method,accuracy,recall,specificity,tp,fp,tn,fn
void write_metrics_table(std::ostream& out, const TableHeader& header,
                         std::span<const std::pair<std::string, EvalMetrics>> rows);
/// extra_m,accuracy,recall,specificity,contribution_ratio,tp,fp,tn,fn
void write_sweep_table(std::ostream& out, const TableHeader& header, std::span<const SweepRow> rows);
/// extra_count,contribution_ratio
void write_contribution_csv(std::ostream& out, const TableHeader& header, std::span<const SweepRow> rows);

}  // namespace ragaudit
