#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include <omp.h>

#include "crevtax/digest.hpp"
#include "crevtax/serial_reference.hpp"
#include "support.hpp"

using namespace crevtax;

namespace {

class ThreadCount {
public:
    explicit ThreadCount(int n) : saved_(omp_get_max_threads()) { omp_set_num_threads(n); }
    ~ThreadCount() { omp_set_num_threads(saved_); }

private:
    int saved_;
};

std::pair<std::vector<int>, std::vector<int>> labels(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> gold(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
        gold[i] = static_cast<int>(bounded_draw(rng, kCategoryCount));
        const auto r = bounded_draw(rng, 20);
        pred[i] = r < 8 ? gold[i] : r == 19 ? kUnparseable : static_cast<int>(bounded_draw(rng, kCategoryCount));
    }
    return {gold, pred};
}

}  // namespace

TEST(Kernels, ConfusionParallelMatchesSerial) {
    for (int threads : {1, 2, 4, 7}) {
        ThreadCount tc(threads);
        for (std::size_t n : {0u, 1u, 1000u, 50000u, 200001u}) {
            const auto [gold, pred] = labels(n, n + threads);
            EXPECT_EQ(confusion_counts(gold, pred, kCategoryCount), serial::confusion_counts(gold, pred, kCategoryCount))
                << "n " << n << " threads " << threads;
        }
    }
}

TEST(Kernels, SignPatternsParallelMatchesSerial) {
    std::mt19937_64 rng(3);
    for (int threads : {1, 3, 4}) {
        ThreadCount tc(threads);
        for (std::size_t n : {1u, 5u, 13u, 14u, 18u, 20u}) {
            std::vector<std::uint32_t> ranks(n);
            for (auto& r : ranks) r = static_cast<std::uint32_t>(2 + bounded_draw(rng, 2 * n));
            const std::uint64_t total = std::accumulate(ranks.begin(), ranks.end(), std::uint64_t{0});
            for (std::uint64_t threshold : {std::uint64_t{0}, total / 3, total / 2, total}) {
                for (bool upper : {true, false})
                    EXPECT_EQ(count_sign_patterns(ranks, threshold, upper), serial::count_sign_patterns(ranks, threshold, upper))
                        << "n " << n << " threshold " << threshold;
            }
        }
    }
}

TEST(Kernels, SignPatternsSymmetry) {
    // the upper tail at t and the lower tail at total - t count mirror-image patterns
    std::vector<std::uint32_t> ranks(16);
    for (std::size_t i = 0; i < ranks.size(); ++i) ranks[i] = static_cast<std::uint32_t>(2 * (i + 1));
    const std::uint64_t total = std::accumulate(ranks.begin(), ranks.end(), std::uint64_t{0});
    for (std::uint64_t t : {std::uint64_t{10}, std::uint64_t{100}, std::uint64_t{200}})
        EXPECT_EQ(count_sign_patterns(ranks, t, true), count_sign_patterns(ranks, total - t, false));
    EXPECT_EQ(count_sign_patterns(ranks, 0, true), std::uint64_t{1} << 16);
}

TEST(Kernels, RandomSweepParallelMatchesSerial) {
    const auto corpus = fixtures::counted_corpus(fixtures::kTable1Counts);
    std::vector<std::uint64_t> seeds(12);
    std::iota(seeds.begin(), seeds.end(), 100);
    for (int threads : {1, 4}) {
        ThreadCount tc(threads);
        const auto par = random_baseline_sweep(corpus, seeds);
        const auto ser = serial::random_baseline_sweep(corpus, seeds);
        ASSERT_EQ(par.runs.size(), ser.runs.size());
        for (std::size_t i = 0; i < par.runs.size(); ++i) {
            EXPECT_DOUBLE_EQ(par.runs[i].f1, ser.runs[i].f1);
            EXPECT_DOUBLE_EQ(par.runs[i].precision, ser.runs[i].precision);
            EXPECT_DOUBLE_EQ(par.runs[i].recall, ser.runs[i].recall);
        }
        EXPECT_DOUBLE_EQ(par.f1.mean, ser.f1.mean);
        EXPECT_DOUBLE_EQ(par.precision.stddev, ser.precision.stddev);
    }
}
