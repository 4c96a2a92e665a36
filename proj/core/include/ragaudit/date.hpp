#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace ragaudit {

using Date = std::chrono::year_month_day;

/// Strict "YYYY-MM-DD" parse; nullopt on any deviation or an invalid calendar date.
std::optional<Date> parse_date(std::string_view text);

std::string format_date(Date date);

/// The same calendar day `years` earlier, clamped to the month end (Feb 29 -> Feb 28).
Date years_before(Date date, int years);

Date days_before(Date date, int days);

/// Current UTC calendar date.
Date today_utc();

}  // namespace ragaudit
