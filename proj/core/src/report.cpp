#include "ragaudit/report.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "ragaudit/error.hpp"
#include "ragaudit/text.hpp"

namespace ragaudit {

using nlohmann::json;

namespace {

template <typename Enum, std::size_t N>
Enum enum_from(const json& value, const std::pair<std::string_view, Enum> (&table)[N]) {
    auto text = value.get<std::string>();
    for (const auto& [name, e] : table) {
        if (name == text) {
            return e;
        }
    }
    throw ParseError("<report>", 0, "unknown enum value '" + text + "'");
}

constexpr std::pair<std::string_view, ClaimKind> kClaimKinds[] = {{"main", ClaimKind::Main},
                                                                  {"ranked", ClaimKind::Ranked}};
constexpr std::pair<std::string_view, Origin> kOrigins[] = {{"given", Origin::Given}, {"extra", Origin::Extra}};
constexpr std::pair<std::string_view, ClaimLabel> kClaimLabels[] = {{"supported", ClaimLabel::Supported},
                                                                    {"refuted", ClaimLabel::Refuted},
                                                                    {"unverifiable", ClaimLabel::Unverifiable}};
constexpr std::pair<std::string_view, ResponseLabel> kResponseLabels[] = {{"correct", ResponseLabel::Correct},
                                                                          {"incorrect", ResponseLabel::Incorrect}};
constexpr std::pair<std::string_view, Alignment> kAlignments[] = {{"aligned", Alignment::Aligned},
                                                                  {"opposed", Alignment::Opposed},
                                                                  {"irrelevant", Alignment::Irrelevant}};
constexpr std::pair<std::string_view, EvidenceClass> kClasses[] = {{"supportive", EvidenceClass::Supportive},
                                                                   {"misleading", EvidenceClass::Misleading},
                                                                   {"irrelevant", EvidenceClass::Irrelevant}};
constexpr std::pair<std::string_view, Stance> kStances[] = {{"support", Stance::Support},
                                                            {"contradict", Stance::Contradict},
                                                            {"neutral", Stance::Neutral}};

json claim_json(const Claim& claim) {
    json out{{"text", claim.text}, {"kind", claim.kind == ClaimKind::Main ? "main" : "ranked"}};
    out["rank_score"] = claim.rank_score ? json(*claim.rank_score) : json(nullptr);
    out["source_span"] = claim.source_span ? json::array({claim.source_span->begin, claim.source_span->end})
                                           : json(nullptr);
    return out;
}

Claim claim_from(const json& j) {
    Claim claim;
    claim.text = j.at("text").get<std::string>();
    claim.kind = enum_from(j.at("kind"), kClaimKinds);
    if (!j.at("rank_score").is_null()) {
        claim.rank_score = j.at("rank_score").get<double>();
    }
    if (!j.at("source_span").is_null()) {
        claim.source_span = Span{j.at("source_span").at(0).get<std::size_t>(), j.at("source_span").at(1).get<std::size_t>()};
    }
    return claim;
}

json study_json(const WeightedStudy& s) {
    return json{{"article_id", s.article_id}, {"y", s.y},  {"reliability", s.reliability},
                {"v", s.v},                   {"w", s.w}, {"origin", to_string(s.origin)}};
}

WeightedStudy study_from(const json& j) {
    WeightedStudy s;
    s.article_id = j.at("article_id").get<std::string>();
    s.y = j.at("y").get<int>();
    s.reliability = j.at("reliability").get<int>();
    s.v = j.at("v").get<double>();
    s.w = j.at("w").get<double>();
    s.origin = enum_from(j.at("origin"), kOrigins);
    return s;
}

json studies_json(const std::vector<WeightedStudy>& studies) {
    json out = json::array();
    for (const auto& s : studies) {
        out.push_back(study_json(s));
    }
    return out;
}

std::vector<WeightedStudy> studies_from(const json& j) {
    std::vector<WeightedStudy> out;
    for (const auto& item : j) {
        out.push_back(study_from(item));
    }
    return out;
}

json stats_json(const HeterogeneityStats& s) {
    return json{{"weighted_mean", s.weighted_mean}, {"q_total", s.q_total},
                {"per_study_q", s.per_study_q},     {"tau_squared", s.tau_squared},
                {"tau_degenerate", s.tau_degenerate}, {"k", s.k}};
}

HeterogeneityStats stats_from(const json& j) {
    HeterogeneityStats s;
    s.weighted_mean = j.at("weighted_mean").get<double>();
    s.q_total = j.at("q_total").get<double>();
    s.per_study_q = j.at("per_study_q").get<std::vector<double>>();
    s.tau_squared = j.at("tau_squared").get<double>();
    s.tau_degenerate = j.at("tau_degenerate").get<bool>();
    s.k = j.at("k").get<std::size_t>();
    return s;
}

json adjudication_json(const ClaimAdjudication& a) {
    return json{{"claim", claim_json(a.claim)},
                {"studies", studies_json(a.studies)},
                {"removed_ids", a.removed_ids()},
                {"removed_studies", studies_json(a.removed)},
                {"stats", a.stats ? stats_json(*a.stats) : json(nullptr)},
                {"m_score", a.m_score},
                {"label", to_string(a.label)}};
}

ClaimAdjudication adjudication_from(const json& j) {
    ClaimAdjudication a;
    a.claim = claim_from(j.at("claim"));
    a.studies = studies_from(j.at("studies"));
    a.removed = studies_from(j.at("removed_studies"));
    if (!j.at("stats").is_null()) {
        a.stats = stats_from(j.at("stats"));
    }
    a.m_score = j.at("m_score").get<double>();
    a.label = enum_from(j.at("label"), kClaimLabels);
    return a;
}

json audit_json(const EvidenceAudit& a) {
    json alignments = json::array();
    for (auto al : a.per_claim_alignment) {
        alignments.push_back(to_string(al));
    }
    return json{{"article_id", a.article_id},
                {"per_claim_alignment", alignments},
                {"classification", to_string(a.classification)},
                {"reliability", a.reliability},
                {"removed_by_filter", a.removed_by_filter}};
}

EvidenceAudit audit_from(const json& j) {
    EvidenceAudit a;
    a.article_id = j.at("article_id").get<std::string>();
    for (const auto& al : j.at("per_claim_alignment")) {
        a.per_claim_alignment.push_back(enum_from(al, kAlignments));
    }
    a.classification = enum_from(j.at("classification"), kClasses);
    a.reliability = j.at("reliability").get<int>();
    a.removed_by_filter = j.at("removed_by_filter").get<bool>();
    return a;
}

}  // namespace

json report_to_json(const VerificationReport& report, bool include_timings) {
    json adjudications = json::array();
    for (const auto& a : report.claim_adjudications) {
        adjudications.push_back(adjudication_json(a));
    }
    json audits = json::array();
    for (const auto& a : report.evidence_audits) {
        audits.push_back(audit_json(a));
    }
    json extra = json::array();
    for (const auto& e : report.extra_evidence_used) {
        extra.push_back(json{{"claim_index", e.claim_index},
                             {"article_id", e.article_id},
                             {"reliability", e.reliability},
                             {"bm25_score", e.bm25_score}});
    }
    json verdicts = json::array();
    for (const auto& v : report.stance_verdicts) {
        verdicts.push_back(json{{"claim_index", v.claim_index},
                                {"article_id", v.article_id},
                                {"value", stance_value(v.value)},
                                {"stance", to_string(v.value)},
                                {"provider", v.provider},
                                {"rationale", v.rationale ? json(*v.rationale) : json(nullptr)}});
    }
    json out{{"report_version", kReportVersion},
             {"query_id", report.query_id},
             {"response_label", to_string(report.response_label)},
             {"claim_adjudications", adjudications},
             {"evidence_audits", audits},
             {"extra_evidence_used", extra},
             {"stance_verdicts", verdicts},
             {"contribution",
              {{"given_count", report.contribution.given_count},
               {"given_label", to_string(report.contribution.given_label)},
               {"final_label", to_string(report.contribution.final_label)}}},
             {"config_fingerprint", report.config_fingerprint},
             {"degraded", report.degraded},
             {"gold_label", report.gold_label ? json(*report.gold_label) : json(nullptr)}};
    if (include_timings) {
        out["timings"] = {{"claims_ms", report.timings.claims_ms},
                          {"retrieval_ms", report.timings.retrieval_ms},
                          {"stance_ms", report.timings.stance_ms},
                          {"adjudication_ms", report.timings.adjudication_ms},
                          {"audit_ms", report.timings.audit_ms}};
    }
    return out;
}

VerificationReport report_from_json(const json& j) {
    try {
        if (j.at("report_version").get<int>() != kReportVersion) {
            throw ParseError("<report>", 0, "unsupported report_version");
        }
        VerificationReport r;
        r.query_id = j.at("query_id").get<std::string>();
        r.response_label = enum_from(j.at("response_label"), kResponseLabels);
        for (const auto& a : j.at("claim_adjudications")) {
            r.claim_adjudications.push_back(adjudication_from(a));
        }
        for (const auto& a : j.at("evidence_audits")) {
            r.evidence_audits.push_back(audit_from(a));
        }
        for (const auto& e : j.at("extra_evidence_used")) {
            r.extra_evidence_used.push_back({e.at("claim_index").get<std::size_t>(), e.at("article_id").get<std::string>(),
                                             e.at("reliability").get<int>(), e.at("bm25_score").get<double>()});
        }
        for (const auto& v : j.at("stance_verdicts")) {
            StanceVerdict verdict;
            verdict.claim_index = v.at("claim_index").get<std::size_t>();
            verdict.article_id = v.at("article_id").get<std::string>();
            verdict.value = enum_from(v.at("stance"), kStances);
            verdict.provider = v.at("provider").get<std::string>();
            if (!v.at("rationale").is_null()) {
                verdict.rationale = v.at("rationale").get<std::string>();
            }
            r.stance_verdicts.push_back(std::move(verdict));
        }
        const auto& c = j.at("contribution");
        r.contribution.given_count = c.at("given_count").get<std::size_t>();
        r.contribution.given_label = enum_from(c.at("given_label"), kResponseLabels);
        r.contribution.final_label = enum_from(c.at("final_label"), kResponseLabels);
        r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
        r.degraded = j.at("degraded").get<bool>();
        if (!j.at("gold_label").is_null()) {
            r.gold_label = j.at("gold_label").get<bool>();
        }
        if (auto t = j.find("timings"); t != j.end()) {
            r.timings = {t->at("claims_ms").get<double>(), t->at("retrieval_ms").get<double>(),
                         t->at("stance_ms").get<double>(), t->at("adjudication_ms").get<double>(),
                         t->at("audit_ms").get<double>()};
        }
        return r;
    } catch (const json::exception& e) {
        throw ParseError("<report>", 0, e.what());
    }
}

void write_reports(std::ostream& out, std::span<const VerificationReport> reports, bool include_timings) {
    for (const auto& r : reports) {
        out << report_to_json(r, include_timings).dump() << '\n';
    }
}

std::vector<VerificationReport> read_reports(std::istream& in) {
    std::vector<VerificationReport> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto record = json::parse(line, nullptr, false);
        if (record.is_discarded()) {
            throw ParseError("<reports>", line_no, "not valid JSON");
        }
        out.push_back(report_from_json(record));
    }
    return out;
}

std::vector<VerificationReport> load_reports(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return read_reports(in);
}

}  // namespace ragaudit
