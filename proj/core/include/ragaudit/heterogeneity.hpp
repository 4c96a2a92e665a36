#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragaudit/claims.hpp"

namespace ragaudit {

enum class Origin { Given, Extra };

/// One piece of evidence as a study in a fixed-variance random-effects model.
struct WeightedStudy {
    std::string article_id;
    int y = 0;            // stance: +1, -1 or 0
    int reliability = 0;  // 0-7
    double v = 1.0;       // sampling variance, constant across studies
    double w = 1.0;       // reliability / v, or the floor weight when reliability is 0
    Origin origin = Origin::Extra;

    bool operator==(const WeightedStudy&) const = default;
};

struct WeightOptions {
    double v_constant = 1.0;
    double w_floor = 0.5;
};

/// Throws ValidationError for y outside {-1, 0, 1}, reliability outside
/// [0, 7], or non-positive v / w_floor.
WeightedStudy make_study(std::string article_id, int y, int reliability, Origin origin,
                         const WeightOptions& options = {});

struct HeterogeneityStats {
    double weighted_mean = 0.0;
    double q_total = 0.0;
    std::vector<double> per_study_q;  // aligned with the input studies
    double tau_squared = 0.0;
    bool tau_degenerate = false;  // denominator <= 0 or k < 2; tau_squared reported as 0
    std::size_t k = 0;

    bool operator==(const HeterogeneityStats&) const = default;
};

/// Weighted mean, per-study contributions w_i (y_i - mean)^2 and their sum.
/// Throws DegenerateError when the studies are empty or carry no positive weight.
HeterogeneityStats cochran_q(std::span<const WeightedStudy> studies);

/// DerSimonian-Laird between-study variance, clamped at 0. Requires k >= 2;
/// throws DegenerateError when sum(w) - sum(w^2)/sum(w) <= 0.
double tau_squared_dl(const HeterogeneityStats& stats, std::span<const WeightedStudy> studies);

/// cochran_q plus tau_squared, with degenerate tau reported as 0 and flagged.
HeterogeneityStats heterogeneity(std::span<const WeightedStudy> studies);

enum class FilterStatistic { CochranQ, TauSquared };

struct FilterOptions {
    FilterStatistic statistic = FilterStatistic::CochranQ;
    /// Fixed Q threshold; nullopt means k - 1 for the current kept set.
    std::optional<double> q_threshold;
    double tau_threshold = 0.0;
    std::size_t min_k = 3;
};

struct FilterResult {
    std::vector<WeightedStudy> kept;     // input order
    std::vector<WeightedStudy> removed;  // removal order
};

/// Greedy: while the statistic exceeds its threshold and more than min_k
/// studies remain, drop the largest Q contributor (ties: lower reliability,
/// then higher article id).
FilterResult filter_studies(std::span<const WeightedStudy> studies, const FilterOptions& options);

enum class ClaimLabel { Supported, Refuted, Unverifiable };

ClaimLabel label_for_score(double m_score) noexcept;

enum class Aggregation {
    HeterogeneityScore,  // filter, then sign of sum(y * reliability) over kept studies
    AnyNegation,         // no filter; Refuted iff any study contradicts
};

struct AdjudicationOptions {
    FilterOptions filter;
    Aggregation aggregation = Aggregation::HeterogeneityScore;
};

struct ClaimAdjudication {
    Claim claim;
    std::vector<WeightedStudy> studies;  // kept, given first then extra
    std::vector<WeightedStudy> removed;  // filtered out, removal order
    std::optional<HeterogeneityStats> stats;  // over kept studies; absent when there are none
    double m_score = 0.0;
    ClaimLabel label = ClaimLabel::Unverifiable;

    std::vector<std::string> removed_ids() const;
    bool operator==(const ClaimAdjudication&) const = default;
};

/// Reliability-weighted vote of given and extra evidence on one claim. With
/// no evidence at all the claim is Unverifiable and stats are absent.
ClaimAdjudication adjudicate(Claim claim, std::span<const WeightedStudy> given,
                             std::span<const WeightedStudy> extra, const AdjudicationOptions& options = {});

enum class ResponseLabel { Correct, Incorrect };

/// Incorrect iff at least one claim is Refuted. Throws std::invalid_argument
/// on an empty set.
ResponseLabel verdict(std::span<const ClaimAdjudication> adjudications);

std::string_view to_string(ClaimLabel label) noexcept;
std::string_view to_string(ResponseLabel label) noexcept;
std::string_view to_string(Origin origin) noexcept;

}  // namespace ragaudit
