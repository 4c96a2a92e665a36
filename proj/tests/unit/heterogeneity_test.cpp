#include <gtest/gtest.h>

#include <random>

#include "ragaudit/error.hpp"
#include "ragaudit/heterogeneity.hpp"
#include "support.hpp"

namespace ragaudit {
namespace {

using testing::study;

WeightedStudy weighted(std::string id, int y, double w) {
    WeightedStudy s;
    s.article_id = std::move(id);
    s.y = y;
    s.w = w;
    s.reliability = static_cast<int>(w);
    return s;
}

TEST(CochranQ, HomogeneousStudiesHaveZeroQ) {
    std::vector<WeightedStudy> s{study("a", 1, 3), study("b", 1, 5), study("c", 1, 7)};
    auto stats = cochran_q(s);
    EXPECT_DOUBLE_EQ(stats.weighted_mean, 1.0);
    EXPECT_DOUBLE_EQ(stats.q_total, 0.0);
}

TEST(CochranQ, WorkedExample) {
    std::vector<WeightedStudy> s{weighted("a", 1, 2), weighted("b", 1, 2), weighted("c", -1, 1)};
    auto stats = cochran_q(s);
    EXPECT_NEAR(stats.weighted_mean, 0.6, 1e-12);
    ASSERT_EQ(stats.per_study_q.size(), 3u);
    EXPECT_NEAR(stats.per_study_q[0], 0.32, 1e-12);
    EXPECT_NEAR(stats.per_study_q[1], 0.32, 1e-12);
    EXPECT_NEAR(stats.per_study_q[2], 2.56, 1e-12);
    EXPECT_NEAR(stats.q_total, 3.2, 1e-12);
    EXPECT_NEAR(tau_squared_dl(stats, s), 0.375, 1e-12);
}

TEST(CochranQ, SingleStudy) {
    std::vector<WeightedStudy> s{study("a", -1, 4)};
    auto stats = heterogeneity(s);
    EXPECT_DOUBLE_EQ(stats.q_total, 0.0);
    EXPECT_TRUE(stats.tau_degenerate);
    EXPECT_DOUBLE_EQ(stats.tau_squared, 0.0);
    EXPECT_THROW(tau_squared_dl(stats, s), DegenerateError);
}

TEST(CochranQ, EmptySetIsDegenerate) { EXPECT_THROW(cochran_q({}), DegenerateError); }

TEST(TauSquared, ClampedAtZero) {
    std::vector<WeightedStudy> s{weighted("a", 1, 1), weighted("b", 0, 1), weighted("c", 1, 1)};
    auto stats = cochran_q(s);
    ASSERT_LE(stats.q_total, 2.0);
    EXPECT_DOUBLE_EQ(tau_squared_dl(stats, s), 0.0);
}

TEST(TauSquared, EqualWeightsMatchAlgebraicForm) {
    // With w_i = c the denominator is c (k - 1), so tau^2 = max(Q - (k - 1), 0) / (c (k - 1)).
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> ys(-1, 1);
    for (int c = 1; c <= 7; ++c) {
        for (int k = 2; k <= 8; ++k) {
            for (int trial = 0; trial < 20; ++trial) {
                std::vector<WeightedStudy> s;
                for (int i = 0; i < k; ++i) {
                    s.push_back(weighted(std::to_string(i), ys(rng), c));
                }
                auto stats = cochran_q(s);
                double expected = std::max(stats.q_total - (k - 1), 0.0) / (c * (k - 1.0));
                ASSERT_NEAR(tau_squared_dl(stats, s), expected, 1e-12);
            }
        }
    }
}

TEST(TauSquared, WeightScalingPreservesMeanAndScalesQ) {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> ys(-1, 1);
    std::uniform_int_distribution<int> rs(1, 7);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<WeightedStudy> s;
        std::vector<WeightedStudy> scaled;
        double c = 1.0 + trial % 5;
        for (int i = 0; i < 5; ++i) {
            auto st = weighted(std::to_string(i), ys(rng), rs(rng));
            s.push_back(st);
            st.w *= c;
            scaled.push_back(st);
        }
        auto a = cochran_q(s);
        auto b = cochran_q(scaled);
        ASSERT_NEAR(a.weighted_mean, b.weighted_mean, 1e-12);
        ASSERT_NEAR(b.q_total, c * a.q_total, 1e-9);
    }
}

TEST(MakeStudy, WeightsFollowReliabilityWithFloor) {
    EXPECT_DOUBLE_EQ(study("a", 1, 5).w, 5.0);
    EXPECT_DOUBLE_EQ(study("a", 1, 0).w, 0.5);
    EXPECT_DOUBLE_EQ(make_study("a", 1, 4, Origin::Given, WeightOptions{2.0, 0.5}).w, 2.0);
    EXPECT_THROW(study("a", 2, 3), ValidationError);
    EXPECT_THROW(study("a", 1, 8), ValidationError);
    EXPECT_THROW(make_study("a", 1, 1, Origin::Given, WeightOptions{0.0, 0.5}), ValidationError);
}

TEST(FilterStudies, HomogeneousSetKeepsEverything) {
    std::vector<WeightedStudy> s{study("a", 1, 3), study("b", 1, 5), study("c", 1, 7), study("d", 1, 2)};
    auto r = filter_studies(s, FilterOptions{});
    EXPECT_EQ(r.kept.size(), 4u);
    EXPECT_TRUE(r.removed.empty());
}

TEST(FilterStudies, RemovesTheLargestContributor) {
    std::vector<WeightedStudy> s{weighted("a", 1, 1), weighted("b", 1, 1), weighted("c", 1, 1),
                                 weighted("d", -1, 1)};
    FilterOptions options;
    options.q_threshold = 1.0;
    options.min_k = 2;
    // Mean 0.5: q = 0.25, 0.25, 0.25, 2.25.
    auto r = filter_studies(s, options);
    ASSERT_EQ(r.removed.size(), 1u);
    EXPECT_EQ(r.removed[0].article_id, "d");
    EXPECT_EQ(r.kept.size(), 3u);
}

TEST(FilterStudies, MinKFloorStopsRemoval) {
    std::vector<WeightedStudy> s{weighted("a", 1, 1), weighted("b", -1, 1), weighted("c", 1, 1), weighted("d", -1, 1)};
    FilterOptions options;
    options.q_threshold = 0.0;
    options.min_k = 4;
    EXPECT_TRUE(filter_studies(s, options).removed.empty());
}

TEST(FilterStudies, TiesRemoveLowerReliabilityThenHigherId) {
    // Two symmetric outliers with equal q.
    std::vector<WeightedStudy> s{study("a", 0, 2), study("b", 0, 2), study("c", 0, 2), study("x", 1, 2),
                                 study("y", -1, 2)};
    FilterOptions options;
    options.q_threshold = 0.0;
    options.min_k = 4;
    auto r = filter_studies(s, options);
    ASSERT_EQ(r.removed.size(), 1u);
    EXPECT_EQ(r.removed[0].article_id, "y");

    s[4].reliability = 5;
    r = filter_studies(s, options);
    ASSERT_EQ(r.removed.size(), 1u);
    EXPECT_EQ(r.removed[0].article_id, "x");
}

TEST(FilterStudies, TauStatisticUsesTauThreshold) {
    std::vector<WeightedStudy> s{study("a", 1, 7), study("b", 1, 7), study("c", 1, 7), study("d", -1, 7)};
    FilterOptions options;
    options.statistic = FilterStatistic::TauSquared;
    options.min_k = 3;
    auto r = filter_studies(s, options);
    ASSERT_EQ(r.removed.size(), 1u);
    EXPECT_EQ(r.removed[0].article_id, "d");
    options.tau_threshold = 100.0;
    EXPECT_TRUE(filter_studies(s, options).removed.empty());
}

TEST(Adjudicate, WeightedVoteExample) {
    std::vector<WeightedStudy> given{study("g1", 1, 5, Origin::Given), study("g2", -1, 3, Origin::Given)};
    std::vector<WeightedStudy> extra{study("e1", 1, 7)};
    auto adj = adjudicate(Claim{"c"}, given, extra);
    EXPECT_DOUBLE_EQ(adj.m_score, 9.0);
    EXPECT_EQ(adj.label, ClaimLabel::Supported);
    EXPECT_EQ(adj.studies.size(), 3u);
    ASSERT_TRUE(adj.stats.has_value());
    EXPECT_EQ(adj.stats->k, 3u);
}

TEST(Adjudicate, AllNeutralIsUnverifiable) {
    std::vector<WeightedStudy> extra{study("a", 0, 7), study("b", 0, 3)};
    auto adj = adjudicate(Claim{"c"}, {}, extra);
    EXPECT_DOUBLE_EQ(adj.m_score, 0.0);
    EXPECT_EQ(adj.label, ClaimLabel::Unverifiable);
}

TEST(Adjudicate, SymmetricEvidenceCancels) {
    std::vector<WeightedStudy> extra{study("a", 1, 4), study("b", -1, 4)};
    EXPECT_EQ(adjudicate(Claim{"c"}, {}, extra).label, ClaimLabel::Unverifiable);
}

TEST(Adjudicate, NoEvidenceIsUnverifiableWithoutStats) {
    auto adj = adjudicate(Claim{"c"}, {}, {});
    EXPECT_EQ(adj.label, ClaimLabel::Unverifiable);
    EXPECT_FALSE(adj.stats.has_value());
}

TEST(Adjudicate, FilteredOutlierDoesNotVote) {
    std::vector<WeightedStudy> extra{study("a", 1, 2), study("b", 1, 2), study("c", 1, 2), study("d", 1, 2),
                                     study("z", -1, 7)};
    auto adj = adjudicate(Claim{"c"}, {}, extra);
    EXPECT_EQ(adj.removed_ids(), std::vector<std::string>{"z"});
    EXPECT_DOUBLE_EQ(adj.m_score, 8.0);
    EXPECT_EQ(adj.label, ClaimLabel::Supported);
}

TEST(Adjudicate, AnyNegationRefutesOnASingleContradiction) {
    std::vector<WeightedStudy> extra{study("a", 1, 7), study("b", 1, 7), study("c", 1, 7), study("z", -1, 0)};
    AdjudicationOptions options;
    options.aggregation = Aggregation::AnyNegation;
    auto adj = adjudicate(Claim{"c"}, {}, extra, options);
    EXPECT_EQ(adj.label, ClaimLabel::Refuted);
    EXPECT_TRUE(adj.removed.empty());
    EXPECT_EQ(adjudicate(Claim{"c"}, {}, extra).label, ClaimLabel::Supported);
}

ClaimAdjudication labelled(ClaimLabel label) {
    ClaimAdjudication a;
    a.label = label;
    return a;
}

TEST(Verdict, AllSupportedIsCorrect) {
    std::vector<ClaimAdjudication> adj(5, labelled(ClaimLabel::Supported));
    EXPECT_EQ(verdict(adj), ResponseLabel::Correct);
}

TEST(Verdict, OneRefutedIsIncorrect) {
    std::vector<ClaimAdjudication> adj(4, labelled(ClaimLabel::Supported));
    adj.push_back(labelled(ClaimLabel::Refuted));
    EXPECT_EQ(verdict(adj), ResponseLabel::Incorrect);
}

TEST(Verdict, UnverifiableDoesNotMakeIncorrect) {
    std::vector<ClaimAdjudication> adj(3, labelled(ClaimLabel::Supported));
    adj.push_back(labelled(ClaimLabel::Unverifiable));
    adj.push_back(labelled(ClaimLabel::Unverifiable));
    EXPECT_EQ(verdict(adj), ResponseLabel::Correct);
}

TEST(Verdict, EmptySetIsRejected) { EXPECT_THROW(verdict({}), std::invalid_argument); }

}  // namespace
}  // namespace ragaudit
