#include "ragaudit/stance.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "ragaudit/error.hpp"
#include "ragaudit/text.hpp"

namespace ragaudit {

using nlohmann::json;

namespace {

constexpr std::string_view kNegations[] = {
    "aren", "cannot", "didn", "doesn", "don",     "fail",  "failed", "fails", "isn",
    "lack", "lacked", "neither", "never", "no",   "none",  "nor",    "not",   "wasn",
    "weren", "without", "won",
};

}  // namespace

std::string_view to_string(Stance s) noexcept {
    switch (s) {
        case Stance::Support:
            return "support";
        case Stance::Contradict:
            return "contradict";
        case Stance::Neutral:
            break;
    }
    return "neutral";
}

std::optional<Stance> parse_stance(std::string_view text) noexcept {
    if (text == "support") {
        return Stance::Support;
    }
    if (text == "contradict") {
        return Stance::Contradict;
    }
    if (text == "neutral") {
        return Stance::Neutral;
    }
    return std::nullopt;
}

bool is_negation_token(std::string_view token) {
    return std::find(std::begin(kNegations), std::end(kNegations), token) != std::end(kNegations);
}

StanceJudgement LexicalStanceProvider::judge(const Claim& claim, const Article& article) const {
    TokenSet claim_content;
    for (auto& token : content_tokens(claim.text)) {
        if (!is_negation_token(token)) {
            claim_content.insert(std::move(token));
        }
    }
    if (claim_content.empty()) {
        return {};
    }
    auto evidence = tokenize(article.title + "\n" + article.abstract);

    TokenSet matched;
    std::vector<std::size_t> overlap_positions;
    for (std::size_t i = 0; i < evidence.size(); ++i) {
        if (claim_content.contains(evidence[i])) {
            matched.insert(evidence[i]);
            overlap_positions.push_back(i);
        }
    }
    double overlap = static_cast<double>(matched.size()) / static_cast<double>(claim_content.size());
    if (overlap < options_.overlap_threshold) {
        return {};
    }
    const auto window = options_.negation_window;
    for (std::size_t i = 0; i < evidence.size(); ++i) {
        if (!is_negation_token(evidence[i])) {
            continue;
        }
        for (auto pos : overlap_positions) {
            auto distance = pos > i ? pos - i : i - pos;
            if (distance <= window) {
                return {Stance::Contradict, false, "negation '" + evidence[i] + "' near '" + evidence[pos] + "'"};
            }
        }
    }
    return {Stance::Support, false, std::nullopt};
}

OracleStanceProvider::OracleStanceProvider(std::span<const PlantedStance> planted) {
    for (const auto& p : planted) {
        planted_.insert_or_assign(p.article_id, p);
    }
}

StanceJudgement OracleStanceProvider::judge(const Claim& claim, const Article& article) const {
    auto it = planted_.find(article.id);
    if (it == planted_.end()) {
        return {};
    }
    for (const auto& token : tokenize(claim.text)) {
        if (token == it->second.topic) {
            return {it->second.stance, false, std::nullopt};
        }
    }
    return {};
}

std::vector<PlantedStance> read_planted_stances(std::istream& in, const std::string& source) {
    std::vector<PlantedStance> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        try {
            auto record = json::parse(line);
            auto stance = parse_stance(record.at("stance").get<std::string>());
            if (!stance) {
                throw ParseError(source, line_no, "unknown stance value");
            }
            out.push_back({record.at("article_id").get<std::string>(), record.at("topic").get<std::string>(),
                           *stance});
        } catch (const json::exception& e) {
            throw ParseError(source, line_no, e.what());
        }
    }
    return out;
}

std::vector<PlantedStance> load_planted_stances(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return read_planted_stances(in, path.string());
}

void write_planted_stances(std::ostream& out, std::span<const PlantedStance> planted) {
    for (const auto& p : planted) {
        out << json{{"article_id", p.article_id}, {"topic", p.topic}, {"stance", to_string(p.stance)}}.dump()
            << '\n';
    }
}

namespace {

void check_pair(const Claim& claim, const Article& article) {
    if (trim(claim.text).empty()) {
        throw std::invalid_argument("stance requested for an empty claim");
    }
    if (article.id.empty()) {
        throw std::invalid_argument("stance requested for an article without id");
    }
}

StanceVerdict judge_unchecked(const StanceProvider& provider, const Claim& claim, std::size_t claim_index,
                              const Article& article) {
    StanceVerdict verdict;
    verdict.claim_index = claim_index;
    verdict.article_id = article.id;
    try {
        auto judgement = provider.judge(claim, article);
        verdict.value = judgement.coerced ? Stance::Neutral : judgement.value;
        verdict.provider = judgement.coerced ? provider.tag() + ":coerced" : provider.tag();
        verdict.rationale = std::move(judgement.rationale);
    } catch (const std::exception& e) {
        spdlog::warn("stance provider '{}' failed on claim {} / article {}: {}", provider.tag(), claim_index,
                     article.id, e.what());
        verdict.value = Stance::Neutral;
        verdict.provider = "error";
        verdict.rationale = e.what();
    }
    return verdict;
}

}  // namespace

StanceVerdict judge(const StanceProvider& provider, const Claim& claim, std::size_t claim_index,
                    const Article& article) {
    check_pair(claim, article);
    return judge_unchecked(provider, claim, claim_index, article);
}

std::vector<StanceVerdict> judge_batch(const StanceProvider& provider, std::span<const StancePair> pairs,
                                       std::size_t parallelism) {
    for (const auto& pair : pairs) {
        if (pair.claim == nullptr || pair.article == nullptr) {
            throw std::invalid_argument("stance pair with missing claim or article");
        }
        check_pair(*pair.claim, *pair.article);
    }
    std::vector<StanceVerdict> verdicts(pairs.size());
    std::size_t workers = std::clamp<std::size_t>(std::min(parallelism, provider.max_in_flight()), 1, pairs.size() == 0 ? 1 : pairs.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            verdicts[i] = judge_unchecked(provider, *pairs[i].claim, pairs[i].claim_index, *pairs[i].article);
        }
        return verdicts;
    }
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (auto i = next.fetch_add(1); i < pairs.size(); i = next.fetch_add(1)) {
                    verdicts[i] =
                        judge_unchecked(provider, *pairs[i].claim, pairs[i].claim_index, *pairs[i].article);
                }
            });
        }
    }
    return verdicts;
}

}  // namespace ragaudit
