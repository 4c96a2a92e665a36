#include "ragaudit/heterogeneity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ragaudit/error.hpp"

namespace ragaudit {

WeightedStudy make_study(std::string article_id, int y, int reliability, Origin origin,
                         const WeightOptions& options) {
    if (y < -1 || y > 1) {
        throw ValidationError("stance value must be -1, 0 or +1");
    }
    if (reliability < 0 || reliability > 7) {
        throw ValidationError("reliability must be in [0, 7]");
    }
    if (!(options.v_constant > 0.0) || !(options.w_floor > 0.0)) {
        throw ValidationError("v and the floor weight must be positive");
    }
    WeightedStudy study;
    study.article_id = std::move(article_id);
    study.y = y;
    study.reliability = reliability;
    study.v = options.v_constant;
    study.w = reliability > 0 ? reliability / options.v_constant : options.w_floor;
    study.origin = origin;
    return study;
}

HeterogeneityStats cochran_q(std::span<const WeightedStudy> studies) {
    if (studies.empty()) {
        throw DegenerateError("Cochran's Q needs at least one study");
    }
    double sum_w = 0.0;
    double sum_wy = 0.0;
    for (const auto& s : studies) {
        sum_w += s.w;
        sum_wy += s.w * s.y;
    }
    if (!(sum_w > 0.0)) {
        throw DegenerateError("all study weights are zero");
    }
    HeterogeneityStats stats;
    stats.k = studies.size();
    stats.weighted_mean = sum_wy / sum_w;
    stats.per_study_q.reserve(studies.size());
    for (const auto& s : studies) {
        double d = s.y - stats.weighted_mean;
        double q = s.w * d * d;
        stats.per_study_q.push_back(q);
        stats.q_total += q;
    }
    return stats;
}

double tau_squared_dl(const HeterogeneityStats& stats, std::span<const WeightedStudy> studies) {
    if (studies.size() < 2) {
        throw DegenerateError("tau^2 needs at least two studies");
    }
    double sum_w = 0.0;
    double sum_w2 = 0.0;
    for (const auto& s : studies) {
        sum_w += s.w;
        sum_w2 += s.w * s.w;
    }
    double denominator = sum_w - sum_w2 / sum_w;
    if (!(denominator > 0.0)) {
        throw DegenerateError("tau^2 denominator is not positive");
    }
    double k = static_cast<double>(studies.size());
    return std::max((stats.q_total - (k - 1.0)) / denominator, 0.0);
}

HeterogeneityStats heterogeneity(std::span<const WeightedStudy> studies) {
    auto stats = cochran_q(studies);
    try {
        stats.tau_squared = tau_squared_dl(stats, studies);
    } catch (const DegenerateError&) {
        stats.tau_squared = 0.0;
        stats.tau_degenerate = true;
    }
    return stats;
}

namespace {

// Contributions that are mathematically equal can differ in the last bits
// depending on how they were computed; treat those as ties.
bool nearly_equal(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

bool exceeds(const HeterogeneityStats& stats, const FilterOptions& options) {
    if (options.statistic == FilterStatistic::TauSquared) {
        return stats.tau_squared > options.tau_threshold && !nearly_equal(stats.tau_squared, options.tau_threshold);
    }
    double threshold = options.q_threshold.value_or(static_cast<double>(stats.k) - 1.0);
    return stats.q_total > threshold && !nearly_equal(stats.q_total, threshold);
}

}  // namespace

FilterResult filter_studies(std::span<const WeightedStudy> studies, const FilterOptions& options) {
    FilterResult result;
    result.kept.assign(studies.begin(), studies.end());
    if (result.kept.empty()) {
        return result;
    }
    auto stats = heterogeneity(result.kept);
    while (result.kept.size() > options.min_k && exceeds(stats, options)) {
        std::size_t worst = 0;
        for (std::size_t i = 1; i < result.kept.size(); ++i) {
            const auto& a = result.kept[i];
            const auto& b = result.kept[worst];
            double qa = stats.per_study_q[i];
            double qb = stats.per_study_q[worst];
            if (!nearly_equal(qa, qb)) {
                if (qa > qb) {
                    worst = i;
                }
            } else if (a.reliability != b.reliability) {
                if (a.reliability < b.reliability) {
                    worst = i;
                }
            } else if (a.article_id > b.article_id) {
                worst = i;
            }
        }
        result.removed.push_back(std::move(result.kept[worst]));
        result.kept.erase(result.kept.begin() + static_cast<std::ptrdiff_t>(worst));
        stats = heterogeneity(result.kept);
    }
    return result;
}

ClaimLabel label_for_score(double m_score) noexcept {
    if (m_score > 0.0) {
        return ClaimLabel::Supported;
    }
    if (m_score < 0.0) {
        return ClaimLabel::Refuted;
    }
    return ClaimLabel::Unverifiable;
}

std::vector<std::string> ClaimAdjudication::removed_ids() const {
    std::vector<std::string> ids;
    ids.reserve(removed.size());
    for (const auto& s : removed) {
        ids.push_back(s.article_id);
    }
    return ids;
}

ClaimAdjudication adjudicate(Claim claim, std::span<const WeightedStudy> given,
                             std::span<const WeightedStudy> extra, const AdjudicationOptions& options) {
    ClaimAdjudication out;
    out.claim = std::move(claim);
    std::vector<WeightedStudy> all;
    all.reserve(given.size() + extra.size());
    all.insert(all.end(), given.begin(), given.end());
    all.insert(all.end(), extra.begin(), extra.end());

    if (options.aggregation == Aggregation::AnyNegation) {
        out.studies = std::move(all);
    } else {
        auto filtered = filter_studies(all, options.filter);
        out.studies = std::move(filtered.kept);
        out.removed = std::move(filtered.removed);
    }
    if (!out.studies.empty()) {
        out.stats = heterogeneity(out.studies);
    }
    for (const auto& s : out.studies) {
        out.m_score += static_cast<double>(s.y) * s.reliability;
    }

    if (options.aggregation == Aggregation::AnyNegation) {
        bool any_contra = std::any_of(out.studies.begin(), out.studies.end(), [](const auto& s) { return s.y < 0; });
        bool any_support = std::any_of(out.studies.begin(), out.studies.end(), [](const auto& s) { return s.y > 0; });
        out.label = any_contra ? ClaimLabel::Refuted : any_support ? ClaimLabel::Supported : ClaimLabel::Unverifiable;
    } else {
        out.label = label_for_score(out.m_score);
    }
    return out;
}

ResponseLabel verdict(std::span<const ClaimAdjudication> adjudications) {
    if (adjudications.empty()) {
        throw std::invalid_argument("verdict needs at least one adjudicated claim");
    }
    bool refuted = std::any_of(adjudications.begin(), adjudications.end(),
                               [](const ClaimAdjudication& a) { return a.label == ClaimLabel::Refuted; });
    return refuted ? ResponseLabel::Incorrect : ResponseLabel::Correct;
}

std::string_view to_string(ClaimLabel label) noexcept {
    switch (label) {
        case ClaimLabel::Supported:
            return "supported";
        case ClaimLabel::Refuted:
            return "refuted";
        case ClaimLabel::Unverifiable:
            break;
    }
    return "unverifiable";
}

std::string_view to_string(ResponseLabel label) noexcept {
    return label == ResponseLabel::Correct ? "correct" : "incorrect";
}

std::string_view to_string(Origin origin) noexcept { return origin == Origin::Given ? "given" : "extra"; }

}  // namespace ragaudit
