#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragaudit/heterogeneity.hpp"

namespace ragaudit {

enum class Alignment { Aligned, Opposed, Irrelevant };

enum class EvidenceClass { Supportive, Misleading, Irrelevant };

/// How one given article behaved across every adjudicated claim.
struct EvidenceAudit {
    std::string article_id;
    std::vector<Alignment> per_claim_alignment;
    EvidenceClass classification = EvidenceClass::Irrelevant;
    int reliability = 0;  // highest score the article received across claims
    bool removed_by_filter = false;

    bool operator==(const EvidenceAudit&) const = default;
};

Alignment alignment(int y, double m_score) noexcept;

/// Misleading when opposed more often than aligned, Supportive when aligned
/// more often (and at least once), Irrelevant otherwise.
EvidenceClass classify(std::span<const Alignment> per_claim) noexcept;

std::vector<EvidenceAudit> audit_given_evidence(std::span<const ClaimAdjudication> adjudications,
                                                std::span<const std::string> given_ids);

/// Whether the given evidence on its own would have produced the final label.
struct QueryContribution {
    std::size_t given_count = 0;
    ResponseLabel given_label = ResponseLabel::Correct;
    ResponseLabel final_label = ResponseLabel::Correct;

    bool matches() const noexcept { return given_label == final_label; }
    bool operator==(const QueryContribution&) const = default;
};

/// The given-only label applies the same aggregation to the kept given
/// studies of each claim; with no extra evidence it equals the final label.
QueryContribution query_contribution(std::span<const ClaimAdjudication> adjudications, std::size_t given_count,
                                     Aggregation aggregation = Aggregation::HeterogeneityScore);

/// Fraction of queries with at least one given article whose given-only label
/// matches the final label; nullopt when no query has given evidence.
std::optional<double> contribution_ratio(std::span<const QueryContribution> queries);

std::string_view to_string(Alignment a) noexcept;
std::string_view to_string(EvidenceClass c) noexcept;

}  // namespace ragaudit
