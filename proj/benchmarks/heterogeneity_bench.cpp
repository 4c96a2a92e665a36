#include <benchmark/benchmark.h>

#include <random>

#include "ragaudit/heterogeneity.hpp"

namespace {

using namespace ragaudit;

std::vector<WeightedStudy> random_studies(std::size_t k) {
    std::mt19937_64 rng(k);
    std::uniform_int_distribution<int> ys(-1, 1);
    std::uniform_int_distribution<int> rs(0, 7);
    std::vector<WeightedStudy> studies;
    for (std::size_t i = 0; i < k; ++i) {
        studies.push_back(make_study("s" + std::to_string(i), ys(rng), rs(rng), Origin::Extra));
    }
    return studies;
}

void BM_Heterogeneity(benchmark::State& state) {
    auto studies = random_studies(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(heterogeneity(studies));
    }
}
BENCHMARK(BM_Heterogeneity)->Arg(4)->Arg(12)->Arg(64);

void BM_Adjudicate(benchmark::State& state) {
    auto studies = random_studies(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(adjudicate(Claim{"claim"}, {}, studies));
    }
}
BENCHMARK(BM_Adjudicate)->Arg(4)->Arg(12)->Arg(64);

}  // namespace
