#include <gtest/gtest.h>

#include <sstream>

#include "ragaudit/error.hpp"
#include "ragaudit/harness.hpp"
#include "ragaudit/synth.hpp"
#include "support.hpp"

namespace ragaudit {
namespace {

using testing::article;

TEST(Evaluate, PerfectDetector) {
    std::vector<ResponseLabel> predicted{ResponseLabel::Incorrect, ResponseLabel::Correct};
    bool gold[] = {false, true};
    auto m = evaluate(predicted, gold);
    EXPECT_DOUBLE_EQ(m.accuracy, 1.0);
    EXPECT_EQ(m.recall, 1.0);
    EXPECT_EQ(m.specificity, 1.0);
}

TEST(Evaluate, HandComputedConfusionMatrix) {
    std::vector<ResponseLabel> predicted{ResponseLabel::Incorrect, ResponseLabel::Correct, ResponseLabel::Correct,
                                         ResponseLabel::Correct};
    bool gold[] = {false, false, true, true};
    auto m = evaluate(predicted, gold);
    EXPECT_EQ(m.counts.tp, 1u);
    EXPECT_EQ(m.counts.fn, 1u);
    EXPECT_EQ(m.counts.tn, 2u);
    EXPECT_EQ(m.counts.fp, 0u);
    EXPECT_DOUBLE_EQ(m.accuracy, 0.75);
    EXPECT_EQ(m.recall, 0.5);
    EXPECT_EQ(m.specificity, 1.0);
}

TEST(Evaluate, UndefinedRatesAreAbsent) {
    std::vector<ResponseLabel> predicted{ResponseLabel::Correct};
    bool gold[] = {true};
    auto m = evaluate(predicted, gold);
    EXPECT_FALSE(m.recall.has_value());
    EXPECT_EQ(m.specificity, 1.0);
}

TEST(Evaluate, MismatchedLengthsAndMissingGoldAreErrors) {
    std::vector<ResponseLabel> predicted{ResponseLabel::Correct};
    bool gold[] = {true, false};
    EXPECT_THROW(evaluate(predicted, gold), ValidationError);
    std::vector<VerificationReport> reports(1);
    EXPECT_THROW(evaluate(reports), ValidationError);
}

class Groups : public ::testing::Test {
protected:
    Groups() {
        std::vector<Article> articles;
        for (int i = 0; i < 15; ++i) {
            articles.push_back(article("a" + std::to_string(i), "t", "x"));
        }
        corpus = Corpus(std::move(articles));
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            candidates.push_back({&corpus.at(i), 15.0 - static_cast<double>(i)});
            reliability[corpus.at(i).id] = static_cast<int>(i % 8);
        }
    }
    Corpus corpus;
    std::vector<ScoredArticle> candidates;
    std::unordered_map<std::string, int> reliability;
};

TEST_F(Groups, FinerIsTopThreeAfterRerank) {
    auto g = build_groups(candidates, reliability, 1);
    ASSERT_EQ(g.finer.size(), 3u);
    // Reliability 7 at a7; 6 at a6 and a14 (a6 has higher BM25).
    EXPECT_EQ(g.finer[0].article->id, "a7");
    EXPECT_EQ(g.finer[1].article->id, "a6");
    EXPECT_EQ(g.finer[2].article->id, "a14");
}

TEST_F(Groups, RandomGroupIsSeeded) {
    auto a = build_groups(candidates, reliability, 99);
    auto b = build_groups(candidates, reliability, 99);
    ASSERT_EQ(a.random.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(a.random[i].article, b.random[i].article);
    }
    bool differs = false;
    for (std::uint64_t seed = 0; seed < 20 && !differs; ++seed) {
        auto c = build_groups(candidates, reliability, seed);
        differs = c.random[0].article != a.random[0].article;
    }
    EXPECT_TRUE(differs);
}

TEST_F(Groups, ExcludeFinerPoolNeverOverlaps) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto g = build_groups(candidates, reliability, seed, RandomPool::ExcludeFiner);
        for (const auto& r : g.random) {
            for (const auto& f : g.finer) {
                ASSERT_NE(r.article, f.article);
            }
        }
    }
}

TEST_F(Groups, TooFewCandidates) {
    std::span<const ScoredArticle> two(candidates.data(), 2);
    EXPECT_THROW(build_groups(two, reliability, 1), ValidationError);
    std::span<const ScoredArticle> five(candidates.data(), 5);
    EXPECT_THROW(build_groups(five, reliability, 1, RandomPool::ExcludeFiner), ValidationError);
}

class SmallBenchmark : public ::testing::Test {
protected:
    static SyntheticBenchmark make() {
        SynthOptions options;
        options.queries = 24;
        options.kind = SynthKind::ContradictionInjection;
        options.seed = 5;
        return generate_benchmark(options);
    }
    SyntheticBenchmark bench = make();
    Index index = Index::build(bench.corpus);
    OracleStanceProvider oracle{bench.stances};
    PipelineConfig config() const {
        PipelineConfig c;
        c.today = bench.today;
        c.stance_provider = "oracle";
        return c;
    }
};

TEST_F(SmallBenchmark, ParallelRunMatchesSequential) {
    auto sequential = run_dataset(bench.items, index, config(), oracle, 1);
    auto parallel = run_dataset(bench.items, index, config(), oracle, 4);
    ASSERT_EQ(sequential.size(), parallel.size());
    for (std::size_t i = 0; i < sequential.size(); ++i) {
        EXPECT_EQ(sequential[i].query_id, bench.items[i].id);
        EXPECT_EQ(parallel[i].query_id, sequential[i].query_id);
        EXPECT_EQ(parallel[i].response_label, sequential[i].response_label);
        EXPECT_EQ(parallel[i].claim_adjudications, sequential[i].claim_adjudications);
    }
}

TEST_F(SmallBenchmark, SweepLeftEdgeIsFullContribution) {
    std::vector<std::size_t> ms{0, 1, 5};
    auto rows = sweep_extra_evidence(bench.items, index, config(), oracle, ms, 2);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].extra_m, 0u);
    EXPECT_EQ(rows[0].contribution_ratio, 1.0);
    EXPECT_EQ(rows[0].metrics, run_ablation(Ablation::NoRetrieval, bench.items, index, config(), oracle, 0, 2));
}

TEST(Ablations, NamesAndConfigs) {
    for (auto kind : {Ablation::RandomReliability, Ablation::AnyNegation, Ablation::NoRetrieval}) {
        EXPECT_EQ(parse_ablation(to_string(kind)), kind);
    }
    EXPECT_FALSE(parse_ablation("a-none").has_value());
    PipelineConfig base;
    EXPECT_EQ(ablate(base, Ablation::RandomReliability, 7).random_reliability_seed, std::optional<std::uint64_t>(7));
    EXPECT_EQ(ablate(base, Ablation::AnyNegation, 0).adjudication.aggregation, Aggregation::AnyNegation);
    EXPECT_FALSE(ablate(base, Ablation::NoRetrieval, 0).use_extra_evidence);
    auto three = with_extra_evidence(base, 30);
    EXPECT_EQ(three.extra_m, 30u);
    EXPECT_GE(three.retrieval_k, 30u);
    EXPECT_NO_THROW(three.validate());
}

TEST(Tables, HeaderAndFixedPrecision) {
    ConfusionCounts counts{1, 0, 2, 1};
    std::vector<std::pair<std::string, EvalMetrics>> rows{{"full", metrics_from_counts(counts)}};
    std::ostringstream out;
    write_metrics_table(out, TableHeader{3, "abc", "demo"}, rows);
    auto text = out.str();
    EXPECT_NE(text.find("# seed=3\n"), std::string::npos);
    EXPECT_NE(text.find("# config=abc\n"), std::string::npos);
    EXPECT_NE(text.find("# positive_class=incorrect_response\n"), std::string::npos);
    EXPECT_NE(text.find("method,accuracy,recall,specificity,tp,fp,tn,fn\nfull,0.750000,0.500000,1.000000,1,0,2,1\n"),
              std::string::npos);

    std::vector<SweepRow> sweep{{0, metrics_from_counts(counts), 1.0}, {1, metrics_from_counts(counts), std::nullopt}};
    std::ostringstream csv;
    write_contribution_csv(csv, TableHeader{}, sweep);
    EXPECT_NE(csv.str().find("extra_count,contribution_ratio\n0,1.000000\n1,\n"), std::string::npos) << csv.str();
}

}  // namespace
}  // namespace ragaudit
