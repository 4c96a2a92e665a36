#include <benchmark/benchmark.h>

#include <random>

#include "ragaudit/retrieval.hpp"

namespace {

using namespace ragaudit;

Corpus random_corpus(std::size_t documents) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> word(0, 4999);
    std::vector<Article> articles;
    for (std::size_t d = 0; d < documents; ++d) {
        Article a;
        a.id = "doc" + std::to_string(d);
        for (int i = 0; i < 10; ++i) {
            a.title += "t" + std::to_string(word(rng)) + ' ';
        }
        for (int i = 0; i < 200; ++i) {
            a.abstract += "w" + std::to_string(word(rng)) + ' ';
        }
        a.mesh_headings = {"m" + std::to_string(word(rng) % 300)};
        a.date_revised = std::chrono::year{2024} / 1 / 1;
        articles.push_back(std::move(a));
    }
    return Corpus(std::move(articles));
}

void BM_IndexBuild(benchmark::State& state) {
    auto corpus = random_corpus(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(Index::build(corpus));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IndexBuild)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Query(benchmark::State& state) {
    auto corpus = random_corpus(static_cast<std::size_t>(state.range(0)));
    auto index = Index::build(corpus);
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> word(0, 4999);
    std::vector<std::string> queries;
    for (int q = 0; q < 64; ++q) {
        std::string text;
        for (int i = 0; i < 12; ++i) {
            text += "w" + std::to_string(word(rng)) + ' ';
        }
        queries.push_back(text);
    }
    std::size_t next = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(index.query(queries[next++ % queries.size()], 15));
    }
}
BENCHMARK(BM_Query)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

}  // namespace
