#include "crevtax/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "crevtax/errors.hpp"

namespace crevtax {

std::string_view to_string(Alternative a) noexcept { return a == Alternative::Greater ? "greater" : "less"; }

std::string_view WilcoxonResult::stars() const noexcept {
    if (p_value < 0.001) return "***";
    if (p_value < 0.01) return "**";
    if (p_value < 0.05) return "*";
    return "";
}

std::vector<std::uint32_t> doubled_abs_ranks(std::span<const double> nonzero_diffs) {
    const std::size_t n = nonzero_diffs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return std::abs(nonzero_diffs[x]) < std::abs(nonzero_diffs[y]); });

    std::vector<std::uint32_t> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && std::abs(nonzero_diffs[order[j]]) == std::abs(nonzero_diffs[order[i]])) ++j;
        // positions i..j-1 share ranks i+1..j; twice their mean is i+1+j
        const auto doubled = static_cast<std::uint32_t>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = doubled;
        i = j;
    }
    return ranks;
}

std::uint64_t count_sign_patterns(std::span<const std::uint32_t> doubled_ranks, std::uint64_t threshold, bool upper) {
    const std::size_t n = doubled_ranks.size();
    if (n > kExactWilcoxonLimit)
        throw std::invalid_argument(fmt::format("exact enumeration limited to {} pairs, got {}", kExactWilcoxonLimit, n));
    const auto total = static_cast<std::int64_t>(std::uint64_t{1} << n);
    std::uint64_t count = 0;

#pragma omp parallel for reduction(+ : count) schedule(static) if (n >= 14)
    for (std::int64_t mask = 0; mask < total; ++mask) {
        std::uint64_t w = 0;
        for (std::size_t k = 0; k < n; ++k)
            if ((static_cast<std::uint64_t>(mask) >> k) & 1U) w += doubled_ranks[k];
        if (upper ? w >= threshold : w <= threshold) ++count;
    }
    return count;
}

namespace {

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, Alternative alternative) {
    if (a.size() != b.size())
        throw EvaluationError(fmt::format("wilcoxon: {} vs {} paired values", a.size(), b.size()));

    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (!std::isfinite(d)) throw EvaluationError("wilcoxon: non-finite difference");
        if (d != 0.0) diffs.push_back(d);
    }

    WilcoxonResult r;
    r.alternative = alternative;
    r.n_effective = diffs.size();
    if (diffs.empty()) {
        r.degenerate = true;
        r.p_value = 1.0;
        return r;
    }

    const auto ranks = doubled_abs_ranks(diffs);
    std::uint64_t w2 = 0;
    for (std::size_t i = 0; i < diffs.size(); ++i)
        if (diffs[i] > 0.0) w2 += ranks[i];
    r.statistic_w = static_cast<double>(w2) / 2.0;

    const std::size_t n = diffs.size();
    const bool upper = alternative == Alternative::Greater;
    if (n <= kExactWilcoxonLimit) {
        r.exact = true;
        const auto hits = count_sign_patterns(ranks, w2, upper);
        r.p_value = static_cast<double>(hits) / std::ldexp(1.0, static_cast<int>(n));
        return r;
    }

    r.exact = false;
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    // tie correction: sum over tie groups of (t^3 - t) / 48
    std::vector<std::uint32_t> sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += (t * t * t - t) / 48.0;
        i = j;
    }
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term;
    if (var <= 0.0) {
        r.p_value = 1.0;
        return r;
    }
    const double sd = std::sqrt(var);
    if (upper)
        r.p_value = normal_upper_tail((r.statistic_w - mean - 0.5) / sd);
    else
        r.p_value = 1.0 - normal_upper_tail((r.statistic_w - mean + 0.5) / sd);
    r.p_value = std::clamp(r.p_value, 0.0, 1.0);
    return r;
}

}  // namespace crevtax
