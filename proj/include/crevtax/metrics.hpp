#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "crevtax/classifier.hpp"
#include "crevtax/corpus.hpp"

namespace crevtax {

/// Prediction label for a reply that could not be standardized.
inline constexpr int kUnparseable = -1;

/// One-vs-rest counts per class.
struct ConfusionCounts {
    std::vector<std::uint64_t> tp, fp, fn, tn;
    std::uint64_t n = 0;

    [[nodiscard]] std::size_t classes() const noexcept { return tp.size(); }
    [[nodiscard]] std::uint64_t support(std::size_t i) const noexcept { return tp[i] + fn[i]; }
    [[nodiscard]] std::uint64_t correct() const noexcept;

    bool operator==(const ConfusionCounts&) const = default;
};

/// OpenMP counting kernel. gold in [0, classes), pred in [0, classes) or kUnparseable;
/// an unparseable prediction is a false negative for its gold class and nothing else.
ConfusionCounts confusion_counts(std::span<const int> gold, std::span<const int> pred, std::size_t classes);

struct CategoryMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
};

/// Zero denominators give 0.
std::vector<CategoryMetrics> per_class_metrics(const ConfusionCounts& counts);

struct WeightedSummary {
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double micro_accuracy = 0.0;
    std::vector<double> weights;
};

/// Σ M_i·w_i / Σ w_i over classes with support > 0 in `counts`.
WeightedSummary weighted_summary(const ConfusionCounts& counts, std::span<const double> weights);
/// Weights taken from the evaluated set itself (w_i = support_i / N).
WeightedSummary weighted_summary(const ConfusionCounts& counts);

double micro_accuracy(std::span<const int> gold, std::span<const int> pred);

enum class UnparseablePolicy {
    Incorrect,        ///< sentinel matching no gold label
    AsFalsePositive,  ///< replaced by the False positive category (and group)
};

struct LabelVectors {
    std::vector<int> gold;
    std::vector<int> pred;
};

/// Matches predictions to corpus items by comment id (any order); throws EvaluationError
/// on missing, extra or duplicate ids.
LabelVectors category_labels(const Corpus& corpus, std::span<const Prediction> predictions,
                             UnparseablePolicy policy = UnparseablePolicy::Incorrect);

/// Group-level labels. Uses the step-1 group when present, else the predicted category's group.
LabelVectors group_labels(const Corpus& corpus, std::span<const Prediction> predictions,
                          UnparseablePolicy policy = UnparseablePolicy::Incorrect);

ConfusionCounts confusion(const Corpus& corpus, std::span<const Prediction> predictions,
                          UnparseablePolicy policy = UnparseablePolicy::Incorrect);
double micro_accuracy(const Corpus& corpus, std::span<const Prediction> predictions,
                      UnparseablePolicy policy = UnparseablePolicy::Incorrect);

/// (ours - baseline) / baseline * 100; nullopt when baseline is 0.
std::optional<double> percent_change(double ours, double baseline);

struct PercentRange {
    double low = 0.0;
    double high = 0.0;
};

/// Range of percent_change when both inputs carry ± half_width rounding error.
std::optional<PercentRange> percent_change_range(double ours, double baseline, double half_width);

struct DeltaReport {
    std::optional<double> f1;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> accuracy;
};

/// Per-metric percent_change(ours, baseline).
DeltaReport compare_summaries(const WeightedSummary& ours, const WeightedSummary& baseline);

/// (M_original - M_refined) / M_refined * 100 per metric.
DeltaReport definition_delta(const WeightedSummary& original, const WeightedSummary& refined);

/// Uniform i.i.d. draws over the categories; deterministic per seed.
std::vector<Prediction> baseline_random(const Corpus& corpus, std::uint64_t seed);

/// Every item gets the modal category; ties go to the earlier category in taxonomy order.
std::vector<Prediction> baseline_majority(const Corpus& corpus);

/// Exact expectation of weighted recall (= accuracy) for the uniform random predictor.
double expected_random_recall();
/// Σ w_i², the large-sample expectation of weighted precision for the uniform random predictor.
double expected_random_precision(std::span<const double> weights);

struct SweepStats {
    double mean = 0.0;
    double stddev = 0.0;  ///< sample standard deviation
};

struct RandomSweep {
    std::vector<WeightedSummary> runs;  ///< one per seed, seed order
    SweepStats f1, precision, recall;
};

/// Random baseline evaluated for each seed; seeds are processed in parallel.
RandomSweep random_baseline_sweep(const Corpus& corpus, std::span<const std::uint64_t> seeds);

SweepStats sweep_stats(std::span<const double> values);

}  // namespace crevtax
