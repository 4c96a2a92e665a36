#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragaudit/pipeline.hpp"

namespace ragaudit {

inline constexpr int kReportVersion = 1;

nlohmann::json report_to_json(const VerificationReport& report, bool include_timings = true);

/// Throws ParseError on a missing field or an unsupported report_version.
VerificationReport report_from_json(const nlohmann::json& record);

/// One JSON object per line.
void write_reports(std::ostream& out, std::span<const VerificationReport> reports, bool include_timings = true);
std::vector<VerificationReport> read_reports(std::istream& in);
std::vector<VerificationReport> load_reports(const std::filesystem::path& path);

}  // namespace ragaudit
