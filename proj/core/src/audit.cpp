#include "ragaudit/audit.hpp"

#include <algorithm>

namespace ragaudit {

namespace {

int sign(double x) noexcept { return (x > 0.0) - (x < 0.0); }

}  // namespace

Alignment alignment(int y, double m_score) noexcept {
    int s = sign(m_score);
    if (y == 0 || s == 0) {
        return Alignment::Irrelevant;
    }
    return sign(y) == s ? Alignment::Aligned : Alignment::Opposed;
}

EvidenceClass classify(std::span<const Alignment> per_claim) noexcept {
    auto aligned = std::count(per_claim.begin(), per_claim.end(), Alignment::Aligned);
    auto opposed = std::count(per_claim.begin(), per_claim.end(), Alignment::Opposed);
    if (opposed > aligned) {
        return EvidenceClass::Misleading;
    }
    if (aligned > opposed && aligned >= 1) {
        return EvidenceClass::Supportive;
    }
    return EvidenceClass::Irrelevant;
}

std::vector<EvidenceAudit> audit_given_evidence(std::span<const ClaimAdjudication> adjudications,
                                                std::span<const std::string> given_ids) {
    std::vector<EvidenceAudit> audits;
    audits.reserve(given_ids.size());
    for (const auto& id : given_ids) {
        EvidenceAudit audit;
        audit.article_id = id;
        for (const auto& adj : adjudications) {
            auto same_id = [&](const WeightedStudy& s) { return s.origin == Origin::Given && s.article_id == id; };
            const WeightedStudy* study = nullptr;
            if (auto it = std::find_if(adj.studies.begin(), adj.studies.end(), same_id); it != adj.studies.end()) {
                study = &*it;
            } else if (auto rit = std::find_if(adj.removed.begin(), adj.removed.end(), same_id);
                       rit != adj.removed.end()) {
                study = &*rit;
                audit.removed_by_filter = true;
            }
            if (study == nullptr) {
                audit.per_claim_alignment.push_back(Alignment::Irrelevant);
                continue;
            }
            audit.reliability = std::max(audit.reliability, study->reliability);
            audit.per_claim_alignment.push_back(alignment(study->y, adj.m_score));
        }
        audit.classification = classify(audit.per_claim_alignment);
        audits.push_back(std::move(audit));
    }
    return audits;
}

QueryContribution query_contribution(std::span<const ClaimAdjudication> adjudications, std::size_t given_count,
                                     Aggregation aggregation) {
    QueryContribution out;
    out.given_count = given_count;
    bool given_refutes = false;
    for (const auto& adj : adjudications) {
        double given_score = 0.0;
        bool given_contradicts = false;
        for (const auto& s : adj.studies) {
            if (s.origin == Origin::Given) {
                given_score += static_cast<double>(s.y) * s.reliability;
                given_contradicts = given_contradicts || s.y < 0;
            }
        }
        bool refuted = aggregation == Aggregation::AnyNegation ? given_contradicts
                                                                : label_for_score(given_score) == ClaimLabel::Refuted;
        given_refutes = given_refutes || refuted;
    }
    out.given_label = given_refutes ? ResponseLabel::Incorrect : ResponseLabel::Correct;
    out.final_label = adjudications.empty() ? ResponseLabel::Correct : verdict(adjudications);
    return out;
}

std::optional<double> contribution_ratio(std::span<const QueryContribution> queries) {
    std::size_t counted = 0;
    std::size_t matching = 0;
    for (const auto& q : queries) {
        if (q.given_count == 0) {
            continue;
        }
        ++counted;
        matching += q.matches() ? 1 : 0;
    }
    if (counted == 0) {
        return std::nullopt;
    }
    return static_cast<double>(matching) / static_cast<double>(counted);
}

std::string_view to_string(Alignment a) noexcept {
    switch (a) {
        case Alignment::Aligned:
            return "aligned";
        case Alignment::Opposed:
            return "opposed";
        case Alignment::Irrelevant:
            break;
    }
    return "irrelevant";
}

std::string_view to_string(EvidenceClass c) noexcept {
    switch (c) {
        case EvidenceClass::Supportive:
            return "supportive";
        case EvidenceClass::Misleading:
            return "misleading";
        case EvidenceClass::Irrelevant:
            break;
    }
    return "irrelevant";
}

}  // namespace ragaudit
