// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "crevtax/digest.hpp"
#include "crevtax/serial_reference.hpp"
#include "support.hpp"

using namespace crevtax;

namespace {

std::pair<std::vector<int>, std::vector<int>> labels(std::size_t n) {
    std::mt19937_64 rng(n);
    std::vector<int> gold(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
        gold[i] = static_cast<int>(bounded_draw(rng, kCategoryCount));
        pred[i] = bounded_draw(rng, 2) ? gold[i] : static_cast<int>(bounded_draw(rng, kCategoryCount));
    }
    return {gold, pred};
}

std::vector<std::uint32_t> doubled_ranks(std::size_t n) {
    std::vector<std::uint32_t> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = static_cast<std::uint32_t>(2 * (i + 1));
    return r;
}

template <bool Parallel>
void BM_Confusion(benchmark::State& state) {
    const auto [gold, pred] = labels(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        if constexpr (Parallel)
            benchmark::DoNotOptimize(confusion_counts(gold, pred, kCategoryCount));
        else
            benchmark::DoNotOptimize(serial::confusion_counts(gold, pred, kCategoryCount));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_SignPatterns(benchmark::State& state) {
    const auto ranks = doubled_ranks(static_cast<std::size_t>(state.range(0)));
    const std::uint64_t total = std::accumulate(ranks.begin(), ranks.end(), std::uint64_t{0});
    for (auto _ : state) {
        if constexpr (Parallel)
            benchmark::DoNotOptimize(count_sign_patterns(ranks, total / 3, true));
        else
            benchmark::DoNotOptimize(serial::count_sign_patterns(ranks, total / 3, true));
    }
}

template <bool Parallel>
void BM_RandomSweep(benchmark::State& state) {
    const auto corpus = fixtures::counted_corpus(fixtures::kTable1Counts);
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(state.range(0)));
    std::iota(seeds.begin(), seeds.end(), 1);
    for (auto _ : state) {
        if constexpr (Parallel)
            benchmark::DoNotOptimize(random_baseline_sweep(corpus, seeds));
        else
            benchmark::DoNotOptimize(serial::random_baseline_sweep(corpus, seeds));
    }
}

}  // namespace

BENCHMARK(BM_Confusion<false>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Confusion<true>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_SignPatterns<false>)->Arg(16)->Arg(20);
BENCHMARK(BM_SignPatterns<true>)->Arg(16)->Arg(20);
BENCHMARK(BM_RandomSweep<false>)->Arg(100)->Arg(1000);
BENCHMARK(BM_RandomSweep<true>)->Arg(100)->Arg(1000);

BENCHMARK_MAIN();
