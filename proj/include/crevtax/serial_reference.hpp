#pragma once

// Single-threaded versions of the OpenMP kernels. Kept for equivalence tests and
// as the baseline in bench/.

#include <cstdint>
#include <span>

#include "crevtax/metrics.hpp"
#include "crevtax/wilcoxon.hpp"

namespace crevtax::serial {

ConfusionCounts confusion_counts(std::span<const int> gold, std::span<const int> pred, std::size_t classes);

std::uint64_t count_sign_patterns(std::span<const std::uint32_t> doubled_ranks, std::uint64_t threshold, bool upper);

RandomSweep random_baseline_sweep(const Corpus& corpus, std::span<const std::uint64_t> seeds);

}  // namespace crevtax::serial
