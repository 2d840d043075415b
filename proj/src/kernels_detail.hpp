#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "crevtax/corpus.hpp"
#include "crevtax/digest.hpp"
#include "crevtax/metrics.hpp"

namespace crevtax::detail {

/// Labels of the random baseline for one seed, matching baseline_random().
inline std::vector<int> random_labels(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> out(n);
    for (auto& v : out) v = static_cast<int>(bounded_draw(rng, kCategoryCount));
    return out;
}

inline std::vector<int> gold_labels(const Corpus& corpus) {
    std::vector<int> gold;
    gold.reserve(corpus.size());
    for (const auto& item : corpus.items()) gold.push_back(static_cast<int>(index_of(item.gold)));
    return gold;
}

inline void fill_sweep_stats(RandomSweep& sweep) {
    std::vector<double> f1, p, r;
    for (const auto& s : sweep.runs) {
        f1.push_back(s.f1);
        p.push_back(s.precision);
        r.push_back(s.recall);
    }
    sweep.f1 = sweep_stats(f1);
    sweep.precision = sweep_stats(p);
    sweep.recall = sweep_stats(r);
}

}  // namespace crevtax::detail
