#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace crevtax {

enum class Alternative { Greater, Less };

std::string_view to_string(Alternative a) noexcept;

struct WilcoxonResult {
    std::size_t n_effective = 0;  ///< pairs with a non-zero difference
    double statistic_w = 0.0;     ///< W+, the rank sum of positive differences
    double p_value = 1.0;
    Alternative alternative = Alternative::Greater;
    bool exact = true;
    bool degenerate = false;      ///< every difference was zero

    /// "***" p<0.001, "**" p<0.01, "*" p<0.05, "" otherwise.
    [[nodiscard]] std::string_view stars() const noexcept;
};

inline constexpr std::size_t kExactWilcoxonLimit = 20;

/// One-sided paired signed-rank test of a against b (Greater: a tends to exceed b).
/// Zero differences are dropped, tied |differences| share average ranks. For up to
/// kExactWilcoxonLimit non-zero pairs the p-value comes from enumerating every sign
/// assignment; above that a tie- and continuity-corrected normal approximation is used.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    Alternative alternative = Alternative::Greater);

/// Average ranks of |d| doubled so they stay integral (ties give half ranks).
std::vector<std::uint32_t> doubled_abs_ranks(std::span<const double> nonzero_diffs);

/// Number of sign patterns whose doubled W+ is >= threshold (upper) or <= threshold (lower).
/// OpenMP kernel over the 2^n masks.
std::uint64_t count_sign_patterns(std::span<const std::uint32_t> doubled_ranks, std::uint64_t threshold, bool upper);

}  // namespace crevtax
