#include <gtest/gtest.h>

#include <sstream>

#include "ragaudit/error.hpp"
#include "ragaudit/harness.hpp"
#include "ragaudit/report.hpp"
#include "ragaudit/synth.hpp"

namespace ragaudit {
namespace {

std::vector<VerificationReport> sample_reports() {
    SynthOptions options;
    options.queries = 6;
    options.kind = SynthKind::ContradictionInjection;
    auto bench = generate_benchmark(options);
    auto index = Index::build(bench.corpus);
    OracleStanceProvider oracle(bench.stances);
    PipelineConfig config;
    config.today = bench.today;
    config.random_reliability_seed = 3;
    return run_dataset(bench.items, index, config, oracle, 1);
}

TEST(Reports, JsonlRoundTripIsExact) {
    auto reports = sample_reports();
    std::ostringstream out;
    write_reports(out, reports, true);
    std::istringstream in(out.str());
    auto back = read_reports(in);
    ASSERT_EQ(back.size(), reports.size());
    for (std::size_t i = 0; i < reports.size(); ++i) {
        EXPECT_EQ(back[i], reports[i]) << reports[i].query_id;
    }
}

TEST(Reports, TimingsCanBeOmitted) {
    auto reports = sample_reports();
    auto with = report_to_json(reports[0], true);
    auto without = report_to_json(reports[0], false);
    EXPECT_TRUE(with.contains("timings"));
    EXPECT_FALSE(without.contains("timings"));
    EXPECT_EQ(without["report_version"], kReportVersion);
}

TEST(Reports, UnsupportedVersionIsRejected) {
    auto record = report_to_json(sample_reports()[0], false);
    record["report_version"] = kReportVersion + 1;
    EXPECT_THROW(report_from_json(record), ParseError);
    record.erase("report_version");
    EXPECT_THROW(report_from_json(record), ParseError);
}

}  // namespace
}  // namespace ragaudit
