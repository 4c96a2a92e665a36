#pragma once

#include <chrono>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ragaudit/corpus.hpp"
#include "ragaudit/date.hpp"
#include "ragaudit/heterogeneity.hpp"

namespace ragaudit::testing {

inline Date ymd(int y, unsigned m, unsigned d) {
    return Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

inline Date reference_day() { return ymd(2025, 1, 1); }

inline Article article(std::string id, std::string title, std::string abstract,
                       std::vector<std::string> mesh = {}, std::vector<std::string> types = {"Journal Article"},
                       Date revised = ymd(2024, 6, 1)) {
    return Article{std::move(id), std::move(title), std::move(abstract), std::move(mesh), std::move(types),
                   revised};
}

inline WeightedStudy study(std::string id, int y, int reliability, Origin origin = Origin::Extra) {
    return make_study(std::move(id), y, reliability, origin);
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("ragaudit-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace ragaudit::testing
