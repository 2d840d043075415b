#include "crevtax/report.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace crevtax {

namespace {

using Row = std::vector<std::string>;

std::string render_grid(const Row& header, const std::vector<Row>& rows) {
    std::vector<std::size_t> width(header.size(), 0);
    auto widen = [&](const Row& r) {
        for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
    };
    widen(header);
    for (const auto& r : rows) widen(r);

    auto line = [&](const Row& r) {
        std::string out;
        for (std::size_t i = 0; i < width.size(); ++i) {
            const std::string cell = i < r.size() ? r[i] : std::string{};
            if (i == 0)
                out += fmt::format("{:<{}}", cell, width[i]);
            else
                out += fmt::format("  {:>{}}", cell, width[i]);
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        return out + "\n";
    };

    std::size_t total = 0;
    for (auto w : width) total += w;
    total += 2 * (width.empty() ? 0 : width.size() - 1);
    std::string out = line(header);
    out += std::string(total, '-') + "\n";
    for (const auto& r : rows) out += line(r);
    return out;
}

}  // namespace

std::string format_score(double unit_value) { return fmt::format("{:.1f}", unit_value * 100.0); }

std::string format_change(const std::optional<double>& change) {
    if (!change) return "n/a";
    return fmt::format("{:+.1f}%", *change);
}

std::vector<CategoryId> categories_by_rating(const Taxonomy& taxonomy) {
    std::vector<CategoryId> ids;
    for (const auto& c : taxonomy.categories()) ids.push_back(c.id);
    std::stable_sort(ids.begin(), ids.end(), [&](CategoryId a, CategoryId b) {
        const auto& ra = taxonomy.category(a).usefulness_rating;
        const auto& rb = taxonomy.category(b).usefulness_rating;
        if (ra.has_value() != rb.has_value()) return ra.has_value();
        return ra && *ra > *rb;
    });
    return ids;
}

std::string render_summary_table(std::span<const SummaryRow> rows) {
    std::vector<Row> body;
    for (const auto& r : rows)
        body.push_back({r.label, format_score(r.summary.f1), format_score(r.summary.precision),
                        format_score(r.summary.recall), format_score(r.summary.micro_accuracy)});
    return render_grid({"Approach", "F1", "Precision", "Recall", "Accuracy"}, body);
}

std::string render_category_table(const Taxonomy& taxonomy, const ConfusionCounts& ours, const ConfusionCounts* baseline) {
    const auto m = per_class_metrics(ours);
    std::vector<CategoryMetrics> b;
    if (baseline) b = per_class_metrics(*baseline);

    auto cell = [&](double ours_v, std::optional<double> base_v) {
        std::string s = format_score(ours_v);
        if (base_v) s += " (" + format_change(percent_change(ours_v, *base_v)) + ")";
        return s;
    };

    std::vector<Row> body;
    for (auto id : categories_by_rating(taxonomy)) {
        const auto i = index_of(id);
        const auto& def = taxonomy.category(id);
        const auto base = [&](auto field) -> std::optional<double> {
            if (!baseline) return std::nullopt;
            return b[i].*field;
        };
        body.push_back({def.display_name,
                        def.usefulness_rating ? fmt::format("{:.2f}", *def.usefulness_rating) : std::string("N/A"),
                        std::to_string(m[i].support), cell(m[i].f1, base(&CategoryMetrics::f1)),
                        cell(m[i].precision, base(&CategoryMetrics::precision)),
                        cell(m[i].recall, base(&CategoryMetrics::recall)),
                        cell(m[i].recall, base(&CategoryMetrics::recall))});
    }
    return render_grid({"Category", "Rating", "N", "F1", "Precision", "Recall", "Accuracy"}, body);
}

std::string render_comparison_table(std::span<const ComparisonRow> rows) {
    std::vector<Row> body;
    for (const auto& r : rows) {
        const std::array<double, 4> v{r.mean.f1, r.mean.precision, r.mean.recall, r.mean.micro_accuracy};
        Row row{r.label};
        for (std::size_t k = 0; k < 4; ++k) {
            std::string s = format_score(v[k]);
            if (r.tests) s += std::string((*r.tests)[k].stars());
            row.push_back(std::move(s));
        }
        if (r.change) {
            row.push_back(format_change(r.change->f1));
        } else {
            row.emplace_back("");
        }
        body.push_back(std::move(row));
    }
    auto out = render_grid({"Approach", "F1", "Precision", "Recall", "Accuracy", "F1 change"}, body);
    out += "p<0.001 ***, p<0.01 **, p<0.05 * (one-sided Wilcoxon signed-rank over folds)\n";
    return out;
}

std::string render_delta_table(std::span<const DeltaRow> rows) {
    std::vector<Row> body;
    for (const auto& r : rows)
        body.push_back({r.label, format_change(r.delta.f1), format_change(r.delta.precision),
                        format_change(r.delta.recall), format_change(r.delta.accuracy)});
    return render_grid({"Configuration", "F1", "Precision", "Recall", "Accuracy"}, body);
}

nlohmann::ordered_json summary_json(const WeightedSummary& s) {
    return {{"f1", s.f1}, {"precision", s.precision}, {"recall", s.recall}, {"accuracy", s.micro_accuracy}};
}

nlohmann::ordered_json category_json(const Taxonomy& taxonomy, const ConfusionCounts& counts) {
    const auto m = per_class_metrics(counts);
    auto arr = nlohmann::ordered_json::array();
    for (auto id : categories_by_rating(taxonomy)) {
        const auto i = index_of(id);
        const auto& def = taxonomy.category(id);
        nlohmann::ordered_json row = {{"category", std::string(to_string(id))},
                                      {"rating", def.usefulness_rating ? nlohmann::ordered_json(*def.usefulness_rating)
                                                                       : nlohmann::ordered_json(nullptr)},
                                      {"support", m[i].support},
                                      {"tp", counts.tp[i]},
                                      {"fp", counts.fp[i]},
                                      {"fn", counts.fn[i]},
                                      {"tn", counts.tn[i]},
                                      {"f1", m[i].f1},
                                      {"precision", m[i].precision},
                                      {"recall", m[i].recall},
                                      {"accuracy", m[i].recall}};
        arr.push_back(std::move(row));
    }
    return arr;
}

nlohmann::ordered_json delta_json(const DeltaReport& d) {
    auto v = [](const std::optional<double>& x) {
        return x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr);
    };
    return {{"f1", v(d.f1)}, {"precision", v(d.precision)}, {"recall", v(d.recall)}, {"accuracy", v(d.accuracy)}};
}

nlohmann::ordered_json wilcoxon_json(const WilcoxonResult& r) {
    return {{"n_effective", r.n_effective}, {"statistic_w", r.statistic_w},  {"p_value", r.p_value},
            {"alternative", std::string(to_string(r.alternative))},        {"exact", r.exact},
            {"degenerate", r.degenerate},   {"stars", std::string(r.stars())}};
}

}  // namespace crevtax
