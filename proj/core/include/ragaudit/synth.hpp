#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "ragaudit/corpus.hpp"
#include "ragaudit/stance.hpp"

namespace ragaudit {

enum class SynthKind {
    /// All evidence on a topic agrees with the gold label.
    Clean,
    /// Given evidence always backs the response; on gold-incorrect responses
    /// the corpus holds high-reliability contradicting articles, preceded by
    /// 0-2 higher-reliability supporting decoys so detection needs 1, 3 or 5
    /// extra articles. Some correct responses carry a low-reliability
    /// contradicting article among their given or extra evidence.
    ContradictionInjection,
};

struct SynthOptions {
    std::size_t queries = 200;
    std::uint64_t seed = 1;
    SynthKind kind = SynthKind::Clean;
    /// Share of gold-incorrect responses; defaults to 0.5 (Clean) or 0.2
    /// (ContradictionInjection).
    std::optional<double> incorrect_fraction;
    Date today = Date{std::chrono::year{2025}, std::chrono::January, std::chrono::day{1}};
};

/// Every topic has its own vocabulary and topic token, so retrieval for a
/// topic's claims only ever reaches that topic's articles. Planted stances
/// are keyed by topic token for OracleStanceProvider.
struct SyntheticBenchmark {
    Corpus corpus;
    std::vector<RagOutput> items;
    std::vector<PlantedStance> stances;
    Date today;
};

SyntheticBenchmark generate_benchmark(const SynthOptions& options);

/// Writes corpus.jsonl, rag.jsonl (given evidence by reference),
/// stances.jsonl and config.json into `dir`, creating it if needed.
void save_benchmark(const SyntheticBenchmark& benchmark, const std::filesystem::path& dir);

}  // namespace ragaudit
