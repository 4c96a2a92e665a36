#include <gtest/gtest.h>

#include <atomic>
#include <sstream>

#include "ragaudit/error.hpp"
#include "ragaudit/stance.hpp"
#include "support.hpp"

namespace ragaudit {
namespace {

using testing::article;

Claim claim(std::string text) { return Claim{std::move(text), ClaimKind::Ranked, std::nullopt, std::nullopt}; }

TEST(LexicalStance, OverlapWithoutNegationSupports) {
    LexicalStanceProvider lexical;
    auto a = article("A", "Cohort", "aspirin significantly reduced stroke incidence");
    // Claim content {aspirin, reduces, stroke, risk}; evidence matches aspirin and stroke: 2/4 >= 0.35.
    EXPECT_EQ(judge(lexical, claim("aspirin reduces stroke risk"), 0, a).value, Stance::Support);
}

TEST(LexicalStance, NegationNearOverlapContradicts) {
    LexicalStanceProvider lexical;
    auto a = article("A", "Cohort", "aspirin did not reduce stroke incidence");
    auto v = judge(lexical, claim("aspirin reduces stroke risk"), 0, a);
    EXPECT_EQ(v.value, Stance::Contradict);
    EXPECT_EQ(v.provider, "lexical");
    EXPECT_TRUE(v.rationale.has_value());
}

TEST(LexicalStance, NegationOutsideWindowIsIgnored) {
    LexicalStanceProvider lexical;
    auto a = article("A", "Cohort", "aspirin stroke alpha beta gamma delta no");
    EXPECT_EQ(judge(lexical, claim("aspirin reduces stroke risk"), 0, a).value, Stance::Support);
}

TEST(LexicalStance, NoSharedContentIsNeutral) {
    LexicalStanceProvider lexical;
    auto a = article("A", "Cohort", "statins lower cholesterol");
    EXPECT_EQ(judge(lexical, claim("aspirin reduces stroke risk"), 0, a).value, Stance::Neutral);
}

TEST(LexicalStance, OverlapBelowThresholdIsNeutral) {
    LexicalStanceProvider lexical;
    auto a = article("A", "Cohort", "aspirin was given");
    // 1 of 4 content tokens.
    EXPECT_EQ(judge(lexical, claim("aspirin reduces stroke risk"), 0, a).value, Stance::Neutral);
}

TEST(LexicalStance, Deterministic) {
    LexicalStanceProvider lexical;
    auto a = article("A", "Aspirin", "aspirin did not reduce stroke incidence");
    auto c = claim("aspirin reduces stroke risk");
    auto first = judge(lexical, c, 1, a);
    for (int i = 0; i < 10; ++i) {
        EXPECT_EQ(judge(lexical, c, 1, a), first);
    }
}

TEST(ParseStance, KnownValuesOnly) {
    EXPECT_EQ(parse_stance("support"), Stance::Support);
    EXPECT_EQ(parse_stance("contradict"), Stance::Contradict);
    EXPECT_EQ(parse_stance("neutral"), Stance::Neutral);
    EXPECT_FALSE(parse_stance("maybe").has_value());
    EXPECT_EQ(to_string(Stance::Contradict), "contradict");
    EXPECT_EQ(stance_value(Stance::Contradict), -1);
}

TEST(OracleStance, AppliesOnlyToClaimsMentioningTheTopic) {
    std::vector<PlantedStance> planted{{"A", "zxtopic", Stance::Contradict}};
    OracleStanceProvider oracle(planted);
    auto a = article("A", "t", "x");
    auto b = article("B", "t", "x");
    EXPECT_EQ(judge(oracle, claim("drug works in zxtopic patients"), 0, a).value, Stance::Contradict);
    EXPECT_EQ(judge(oracle, claim("drug works in other patients"), 0, a).value, Stance::Neutral);
    EXPECT_EQ(judge(oracle, claim("drug works in zxtopic patients"), 0, b).value, Stance::Neutral);
}

TEST(PlantedStances, JsonlRoundTrip) {
    std::vector<PlantedStance> planted{{"A", "t1", Stance::Support}, {"B", "t2", Stance::Contradict}};
    std::ostringstream out;
    write_planted_stances(out, planted);
    std::istringstream in(out.str());
    auto back = read_planted_stances(in);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].article_id, "B");
    EXPECT_EQ(back[1].topic, "t2");
    EXPECT_EQ(back[1].stance, Stance::Contradict);
    std::istringstream bad(R"({"article_id":"A","topic":"t","stance":"maybe"})");
    EXPECT_THROW(read_planted_stances(bad), ParseError);
}

// Fails on any claim containing "boom"; replies out of enum on "weird".
class ScriptedProvider final : public StanceProvider {
public:
    std::string tag() const override { return "scripted"; }
    StanceJudgement judge(const Claim& c, const Article&) const override {
        ++calls;
        if (c.text.find("boom") != std::string::npos) {
            throw ProviderError("boom");
        }
        if (c.text.find("weird") != std::string::npos) {
            return {Stance::Neutral, true, "weird"};
        }
        return {c.text.find("no") != std::string::npos ? Stance::Contradict : Stance::Support, false, std::nullopt};
    }
    std::size_t max_in_flight() const override { return 8; }
    mutable std::atomic<int> calls{0};
};

TEST(JudgeBatch, PreservesInputOrder) {
    ScriptedProvider provider;
    auto a = article("A", "t", "x");
    std::vector<Claim> claims;
    for (int i = 0; i < 40; ++i) {
        claims.push_back(claim(i % 3 == 0 ? "no " + std::to_string(i) : "yes " + std::to_string(i)));
    }
    std::vector<StancePair> pairs;
    for (std::size_t i = 0; i < claims.size(); ++i) {
        pairs.push_back({i, &claims[i], &a});
    }
    auto verdicts = judge_batch(provider, pairs, 4);
    ASSERT_EQ(verdicts.size(), claims.size());
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        EXPECT_EQ(verdicts[i].claim_index, i);
        EXPECT_EQ(verdicts[i].value, i % 3 == 0 ? Stance::Contradict : Stance::Support);
    }
}

TEST(JudgeBatch, FailingPairDegradesToNeutral) {
    ScriptedProvider provider;
    auto a = article("A", "t", "x");
    std::vector<Claim> claims{claim("yes"), claim("boom"), claim("no")};
    std::vector<StancePair> pairs{{0, &claims[0], &a}, {1, &claims[1], &a}, {2, &claims[2], &a}};
    auto verdicts = judge_batch(provider, pairs, 2);
    ASSERT_EQ(verdicts.size(), 3u);
    EXPECT_EQ(verdicts[0].value, Stance::Support);
    EXPECT_EQ(verdicts[1].value, Stance::Neutral);
    EXPECT_EQ(verdicts[1].provider, "error");
    EXPECT_EQ(verdicts[2].value, Stance::Contradict);
    EXPECT_EQ(verdicts[2].provider, "scripted");
}

TEST(JudgeBatch, CoercedRepliesAreTagged) {
    ScriptedProvider provider;
    auto a = article("A", "t", "x");
    auto v = judge(provider, claim("weird"), 0, a);
    EXPECT_EQ(v.value, Stance::Neutral);
    EXPECT_EQ(v.provider, "scripted:coerced");
}

TEST(JudgeBatch, EmptyClaimFailsBeforeAnyCall) {
    ScriptedProvider provider;
    auto a = article("A", "t", "x");
    std::vector<Claim> claims{claim("yes"), claim("  ")};
    std::vector<StancePair> pairs{{0, &claims[0], &a}, {1, &claims[1], &a}};
    EXPECT_THROW(judge_batch(provider, pairs, 2), std::invalid_argument);
    EXPECT_EQ(provider.calls.load(), 0);
}

}  // namespace
}  // namespace ragaudit
