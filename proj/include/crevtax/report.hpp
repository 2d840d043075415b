#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "crevtax/metrics.hpp"
#include "crevtax/taxonomy.hpp"
#include "crevtax/wilcoxon.hpp"

namespace crevtax {

/// Metric on the ×100 scale with one decimal, e.g. "46.2".
std::string format_score(double unit_value);

/// "+11.4%", "-0.2%", or "n/a".
std::string format_change(const std::optional<double>& change);

/// Categories by usefulness rating, highest first; unrated ones last, ties in table order.
std::vector<CategoryId> categories_by_rating(const Taxonomy& taxonomy);

struct SummaryRow {
    std::string label;
    WeightedSummary summary;
};

/// Weighted F1 / precision / recall / accuracy per row.
std::string render_summary_table(std::span<const SummaryRow> rows);

/// Per-category F1 / precision / recall / accuracy (= recall) sorted by rating. When a
/// baseline is given, every cell carries the percent change against it.
std::string render_category_table(const Taxonomy& taxonomy, const ConfusionCounts& ours,
                                  const ConfusionCounts* baseline = nullptr);

struct ComparisonRow {
    std::string label;
    WeightedSummary mean;
    /// Significance against the baseline per metric (F1, precision, recall, accuracy); absent for the baseline row.
    std::optional<std::array<WilcoxonResult, 4>> tests;
    std::optional<DeltaReport> change;
};

std::string render_comparison_table(std::span<const ComparisonRow> rows);

struct DeltaRow {
    std::string label;
    DeltaReport delta;
};

std::string render_delta_table(std::span<const DeltaRow> rows);

nlohmann::ordered_json summary_json(const WeightedSummary& summary);
nlohmann::ordered_json category_json(const Taxonomy& taxonomy, const ConfusionCounts& counts);
nlohmann::ordered_json delta_json(const DeltaReport& delta);
nlohmann::ordered_json wilcoxon_json(const WilcoxonResult& result);

}  // namespace crevtax
