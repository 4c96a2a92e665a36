#include <gtest/gtest.h>

#include <random>

#include "ragaudit/error.hpp"
#include "ragaudit/reliability.hpp"
#include "ragaudit/text.hpp"
#include "support.hpp"

namespace ragaudit {
namespace {

using testing::article;
using testing::reference_day;
using testing::ymd;

ReliabilityScore score(const Article& a, std::string_view query) {
    return score_article(a, token_set(query), reference_day(), Rubric::defaults());
}

TEST(ScoreArticle, MaximumOfEveryComponent) {
    auto a = article("A", "t", "x", {"Aspirin"}, {"Meta-Analysis"}, ymd(2024, 1, 1));
    auto s = score(a, "does aspirin help");
    EXPECT_EQ(s.value, 7);
    EXPECT_EQ(s.components, (ReliabilityComponents{3, 3, 1}));
}

TEST(ScoreArticle, MinimumOfEveryComponent) {
    auto a = article("A", "t", "x", {"Warfarin"}, {"Letter"}, ymd(1995, 1, 1));
    EXPECT_EQ(score(a, "does aspirin help").value, 0);
}

TEST(ScoreArticle, FourYearOldTrialWithMeshOverlap) {
    auto a = article("A", "t", "x", {"Stroke"}, {"Randomized Controlled Trial"}, ymd(2021, 1, 1));
    auto s = score(a, "aspirin stroke");
    EXPECT_EQ(s.components, (ReliabilityComponents{2, 2, 1}));
    EXPECT_EQ(s.value, 5);
}

TEST(ScoreArticle, RecencyTierBoundariesAreInclusive) {
    auto at = [](Date d) { return score(article("A", "t", "x", {}, {}, d), "q").components.recency_points; };
    EXPECT_EQ(at(ymd(2023, 1, 1)), 3);
    EXPECT_EQ(at(ymd(2022, 12, 31)), 2);
    EXPECT_EQ(at(ymd(2020, 1, 1)), 2);
    EXPECT_EQ(at(ymd(2019, 12, 31)), 1);
    EXPECT_EQ(at(ymd(2015, 1, 1)), 1);
    EXPECT_EQ(at(ymd(2014, 12, 31)), 0);
}

TEST(ScoreArticle, PublicationTypeTakesBestClassCaseInsensitively) {
    auto a = article("A", "t", "x", {}, {"Journal Article", "review", "Clinical Trial, Phase III"}, ymd(1990, 1, 1));
    EXPECT_EQ(score(a, "q").components.type_points, 1);
    auto b = article("B", "t", "x", {}, {"Review", "Systematic Review"}, ymd(1990, 1, 1));
    EXPECT_EQ(score(b, "q").components.type_points, 3);
}

TEST(ScoreArticle, MeshOverlapUsesHeadingTokens) {
    auto a = article("A", "t", "x", {"Cerebrovascular Disorders"}, {}, ymd(1990, 1, 1));
    EXPECT_EQ(score(a, "disorders of the brain").components.mesh_points, 1);
    EXPECT_EQ(score(a, "heart failure").components.mesh_points, 0);
}

TEST(ScoreArticle, NewerRevisionNeverScoresLower) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> days(0, 40 * 366);
    const char* types[] = {"Meta-Analysis", "Randomized Controlled Trial", "Review", "Letter"};
    for (int trial = 0; trial < 1000; ++trial) {
        int a_days = days(rng);
        int b_days = days(rng);
        const char* type = types[trial % 4];
        auto newer = article("N", "t", "x", {"Aspirin"}, {type}, days_before(reference_day(), std::min(a_days, b_days)));
        auto older = article("O", "t", "x", {"Aspirin"}, {type}, days_before(reference_day(), std::max(a_days, b_days)));
        auto sn = score(newer, "aspirin");
        auto so = score(older, "aspirin");
        ASSERT_GE(sn.value, so.value);
        ASSERT_EQ(sn.value, sn.components.recency_points + sn.components.type_points + sn.components.mesh_points);
    }
}

TEST(Rubric, JsonRoundTripAndValidation) {
    auto rubric = Rubric::defaults();
    auto back = Rubric::from_json(rubric.to_json());
    EXPECT_EQ(back.to_json(), rubric.to_json());
    auto bad = rubric.to_json();
    bad["publication_types"][0]["points"] = 4;
    EXPECT_THROW(Rubric::from_json(bad), ValidationError);
    EXPECT_THROW(Rubric::from_json(nlohmann::json::object()), ValidationError);
}

class Rerank : public ::testing::Test {
protected:
    Corpus corpus{{article("a", "t", "x"), article("b", "t", "x"), article("c", "t", "x")}};
    const Article* at(std::size_t i) const { return &corpus.at(i); }
};

TEST_F(Rerank, OrdersByReliability) {
    std::vector<ScoredArticle> candidates{{at(0), 3.0}, {at(1), 2.0}, {at(2), 1.0}};
    std::unordered_map<std::string, int> rel{{"a", 3}, {"b", 7}, {"c", 5}};
    auto top = rerank_by_reliability(candidates, rel, 2);
    ASSERT_EQ(top.size(), 2u);
    EXPECT_EQ(top[0].article->id, "b");
    EXPECT_EQ(top[1].article->id, "c");
}

TEST_F(Rerank, TiesFallBackToBm25ThenId) {
    std::vector<ScoredArticle> candidates{{at(0), 1.0}, {at(1), 2.0}, {at(2), 2.0}};
    std::unordered_map<std::string, int> rel{{"a", 4}, {"b", 4}, {"c", 4}};
    auto top = rerank_by_reliability(candidates, rel, 3);
    EXPECT_EQ(top[0].article->id, "b");
    EXPECT_EQ(top[1].article->id, "c");
    EXPECT_EQ(top[2].article->id, "a");
    EXPECT_EQ(rerank_by_reliability(candidates, rel, 1)[0].article->id, "b");
}

TEST_F(Rerank, ShortfallReturnsEverything) {
    std::vector<ScoredArticle> candidates{{at(0), 1.0}, {at(1), 2.0}, {at(2), 3.0}};
    std::unordered_map<std::string, ReliabilityScore> rel{{"a", {1, {}}}, {"b", {1, {}}}, {"c", {1, {}}}};
    EXPECT_EQ(rerank_by_reliability(candidates, rel, 9).size(), 3u);
}

TEST_F(Rerank, MissingScoreIsAnError) {
    std::vector<ScoredArticle> candidates{{at(0), 1.0}};
    EXPECT_THROW(rerank_by_reliability(candidates, std::unordered_map<std::string, int>{}, 1), ValidationError);
}

}  // namespace
}  // namespace ragaudit
