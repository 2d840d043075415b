#include "crevtax/serial_reference.hpp"

#include <stdexcept>

#include "crevtax/errors.hpp"
#include "kernels_detail.hpp"

namespace crevtax::serial {

ConfusionCounts confusion_counts(std::span<const int> gold, std::span<const int> pred, std::size_t classes) {
    if (gold.size() != pred.size()) throw EvaluationError("confusion: length mismatch");
    ConfusionCounts out;
    out.tp.assign(classes, 0);
    out.fp.assign(classes, 0);
    out.fn.assign(classes, 0);
    out.tn.assign(classes, 0);
    out.n = gold.size();
    const auto c = static_cast<int>(classes);
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const int g = gold[i];
        const int p = pred[i];
        if (g < 0 || g >= c || p < kUnparseable || p >= c) throw EvaluationError("confusion: label outside the class range");
        for (int k = 0; k < c; ++k) {
            const bool is_g = g == k;
            const bool is_p = p == k;
            if (is_g && is_p) ++out.tp[k];
            else if (is_p) ++out.fp[k];
            else if (is_g) ++out.fn[k];
            else ++out.tn[k];
        }
    }
    return out;
}

std::uint64_t count_sign_patterns(std::span<const std::uint32_t> doubled_ranks, std::uint64_t threshold, bool upper) {
    const std::size_t n = doubled_ranks.size();
    if (n > kExactWilcoxonLimit) throw std::invalid_argument("exact enumeration limit exceeded");
    std::uint64_t count = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::uint64_t w = 0;
        for (std::size_t k = 0; k < n; ++k)
            if ((mask >> k) & 1U) w += doubled_ranks[k];
        if (upper ? w >= threshold : w <= threshold) ++count;
    }
    return count;
}

RandomSweep random_baseline_sweep(const Corpus& corpus, std::span<const std::uint64_t> seeds) {
    const auto gold = detail::gold_labels(corpus);
    const auto weights = class_weights(corpus);
    RandomSweep sweep;
    for (const auto seed : seeds) {
        const auto pred = detail::random_labels(gold.size(), seed);
        sweep.runs.push_back(weighted_summary(serial::confusion_counts(gold, pred, kCategoryCount), weights));
    }
    detail::fill_sweep_stats(sweep);
    return sweep;
}

}  // namespace crevtax::serial
