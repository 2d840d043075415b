#include "crevtax/metrics.hpp"

#include <atomic>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <omp.h>

#include "crevtax/errors.hpp"
#include "kernels_detail.hpp"

namespace crevtax {

namespace {

constexpr std::ptrdiff_t kParallelThreshold = 1 << 14;

double ratio(std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::uint64_t ConfusionCounts::correct() const noexcept { return std::accumulate(tp.begin(), tp.end(), std::uint64_t{0}); }

ConfusionCounts confusion_counts(std::span<const int> gold, std::span<const int> pred, std::size_t classes) {
    if (gold.size() != pred.size())
        throw EvaluationError(fmt::format("confusion: {} gold labels vs {} predictions", gold.size(), pred.size()));

    ConfusionCounts out;
    out.tp.assign(classes, 0);
    out.fp.assign(classes, 0);
    out.fn.assign(classes, 0);
    out.n = gold.size();

    const auto n = static_cast<std::ptrdiff_t>(gold.size());
    const auto c = static_cast<int>(classes);
    std::atomic<bool> bad_label{false};

#pragma omp parallel if (n >= kParallelThreshold)
    {
        std::vector<std::uint64_t> tp(classes, 0), fp(classes, 0), fn(classes, 0);
#pragma omp for schedule(static) nowait
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const int g = gold[i];
            const int p = pred[i];
            if (g < 0 || g >= c || p < kUnparseable || p >= c) {
                bad_label.store(true, std::memory_order_relaxed);
                continue;
            }
            if (p == g) {
                ++tp[g];
            } else {
                ++fn[g];
                if (p != kUnparseable) ++fp[p];
            }
        }
#pragma omp critical(crevtax_confusion_merge)
        for (std::size_t k = 0; k < classes; ++k) {
            out.tp[k] += tp[k];
            out.fp[k] += fp[k];
            out.fn[k] += fn[k];
        }
    }
    if (bad_label) throw EvaluationError("confusion: label outside the class range");

    out.tn.resize(classes);
    for (std::size_t k = 0; k < classes; ++k) out.tn[k] = out.n - out.tp[k] - out.fp[k] - out.fn[k];
    return out;
}

std::vector<CategoryMetrics> per_class_metrics(const ConfusionCounts& counts) {
    std::vector<CategoryMetrics> out(counts.classes());
    for (std::size_t i = 0; i < counts.classes(); ++i) {
        auto& m = out[i];
        m.precision = ratio(counts.tp[i], counts.tp[i] + counts.fp[i]);
        m.recall = ratio(counts.tp[i], counts.tp[i] + counts.fn[i]);
        m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        m.support = counts.support(i);
    }
    return out;
}

WeightedSummary weighted_summary(const ConfusionCounts& counts, std::span<const double> weights) {
    if (counts.n == 0) throw EvaluationError("weighted summary of an empty evaluation set");
    if (weights.size() != counts.classes()) throw EvaluationError("weight vector does not match the class count");

    const auto per_class = per_class_metrics(counts);
    WeightedSummary s;
    s.weights.assign(weights.begin(), weights.end());
    double total_w = 0.0;
    for (std::size_t i = 0; i < per_class.size(); ++i) {
        if (per_class[i].support == 0) continue;
        s.f1 += per_class[i].f1 * weights[i];
        s.precision += per_class[i].precision * weights[i];
        s.recall += per_class[i].recall * weights[i];
        total_w += weights[i];
    }
    if (total_w > 0.0) {
        s.f1 /= total_w;
        s.precision /= total_w;
        s.recall /= total_w;
    }
    s.micro_accuracy = ratio(counts.correct(), counts.n);
    return s;
}

WeightedSummary weighted_summary(const ConfusionCounts& counts) {
    std::vector<double> w(counts.classes());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = ratio(counts.support(i), counts.n);
    return weighted_summary(counts, w);
}

double micro_accuracy(std::span<const int> gold, std::span<const int> pred) {
    if (gold.empty()) throw EvaluationError("micro_accuracy of an empty evaluation set");
    if (gold.size() != pred.size()) throw EvaluationError("micro_accuracy: length mismatch");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) correct += gold[i] == pred[i] ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(gold.size());
}

namespace {

// Orders predictions like the corpus; ids must match one-to-one.
std::vector<const Prediction*> align(const Corpus& corpus, std::span<const Prediction> predictions) {
    if (corpus.size() != predictions.size())
        throw EvaluationError(fmt::format("{} predictions for a corpus of {} items", predictions.size(), corpus.size()));
    std::vector<const Prediction*> out(corpus.size(), nullptr);
    for (const auto& p : predictions) {
        const auto idx = corpus.index_of(p.comment_id);
        if (!idx) throw EvaluationError(fmt::format("prediction for unknown comment '{}'", p.comment_id));
        if (out[*idx] != nullptr) throw EvaluationError(fmt::format("duplicate prediction for comment '{}'", p.comment_id));
        out[*idx] = &p;
    }
    return out;
}

}  // namespace

LabelVectors category_labels(const Corpus& corpus, std::span<const Prediction> predictions, UnparseablePolicy policy) {
    const auto aligned = align(corpus, predictions);
    LabelVectors out;
    out.gold = detail::gold_labels(corpus);
    out.pred.reserve(predictions.size());
    for (const auto* pp : aligned) {
        const auto& p = *pp;
        if (p.category)
            out.pred.push_back(static_cast<int>(index_of(*p.category)));
        else if (policy == UnparseablePolicy::AsFalsePositive)
            out.pred.push_back(static_cast<int>(index_of(CategoryId::FalsePositive)));
        else
            out.pred.push_back(kUnparseable);
    }
    return out;
}

LabelVectors group_labels(const Corpus& corpus, std::span<const Prediction> predictions, UnparseablePolicy policy) {
    const auto aligned = align(corpus, predictions);
    LabelVectors out;
    out.gold.reserve(corpus.size());
    for (const auto& item : corpus.items()) out.gold.push_back(static_cast<int>(index_of(group_of(item.gold))));
    out.pred.reserve(predictions.size());
    for (const auto* pp : aligned) {
        const auto& p = *pp;
        if (p.step1_group)
            out.pred.push_back(static_cast<int>(index_of(*p.step1_group)));
        else if (p.category)
            out.pred.push_back(static_cast<int>(index_of(group_of(*p.category))));
        else if (policy == UnparseablePolicy::AsFalsePositive)
            out.pred.push_back(static_cast<int>(index_of(GroupId::FalsePositive)));
        else
            out.pred.push_back(kUnparseable);
    }
    return out;
}

ConfusionCounts confusion(const Corpus& corpus, std::span<const Prediction> predictions, UnparseablePolicy policy) {
    const auto labels = category_labels(corpus, predictions, policy);
    return confusion_counts(labels.gold, labels.pred, kCategoryCount);
}

double micro_accuracy(const Corpus& corpus, std::span<const Prediction> predictions, UnparseablePolicy policy) {
    const auto labels = category_labels(corpus, predictions, policy);
    return micro_accuracy(labels.gold, labels.pred);
}

std::optional<double> percent_change(double ours, double baseline) {
    if (baseline == 0.0) return std::nullopt;
    return (ours - baseline) / baseline * 100.0;
}

std::optional<PercentRange> percent_change_range(double ours, double baseline, double half_width) {
    if (std::abs(baseline) <= half_width) return std::nullopt;
    const double a = *percent_change(ours - half_width, baseline + half_width);
    const double b = *percent_change(ours + half_width, baseline - half_width);
    return PercentRange{std::min(a, b), std::max(a, b)};
}

DeltaReport compare_summaries(const WeightedSummary& ours, const WeightedSummary& baseline) {
    return {percent_change(ours.f1, baseline.f1), percent_change(ours.precision, baseline.precision),
            percent_change(ours.recall, baseline.recall), percent_change(ours.micro_accuracy, baseline.micro_accuracy)};
}

DeltaReport definition_delta(const WeightedSummary& original, const WeightedSummary& refined) {
    return compare_summaries(original, refined);
}

namespace {

Prediction baseline_prediction(const ReviewComment& item, CategoryId category, std::string model) {
    Prediction p;
    p.comment_id = item.id;
    p.category = category;
    p.model_id = std::move(model);
    return p;
}

}  // namespace

std::vector<Prediction> baseline_random(const Corpus& corpus, std::uint64_t seed) {
    const auto labels = detail::random_labels(corpus.size(), seed);
    std::vector<Prediction> out;
    out.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i)
        out.push_back(baseline_prediction(corpus[i], category_at(static_cast<std::size_t>(labels[i])),
                                          fmt::format("baseline:random:{}", seed)));
    return out;
}

std::vector<Prediction> baseline_majority(const Corpus& corpus) {
    if (corpus.empty()) return {};
    const auto support = corpus.support();
    std::size_t best = 0;
    for (std::size_t i = 1; i < kCategoryCount; ++i)
        if (support[i] > support[best]) best = i;
    std::vector<Prediction> out;
    out.reserve(corpus.size());
    for (const auto& item : corpus.items()) out.push_back(baseline_prediction(item, category_at(best), "baseline:majority"));
    return out;
}

double expected_random_recall() { return 1.0 / static_cast<double>(kCategoryCount); }

double expected_random_precision(std::span<const double> weights) {
    double s = 0.0;
    for (double w : weights) s += w * w;
    return s;
}

SweepStats sweep_stats(std::span<const double> values) {
    SweepStats s;
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

RandomSweep random_baseline_sweep(const Corpus& corpus, std::span<const std::uint64_t> seeds) {
    const auto gold = detail::gold_labels(corpus);
    const auto weights = class_weights(corpus);
    RandomSweep sweep;
    sweep.runs.resize(seeds.size());
    const auto m = static_cast<std::ptrdiff_t>(seeds.size());

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t s = 0; s < m; ++s) {
        const auto pred = detail::random_labels(gold.size(), seeds[s]);
        // Counted inline rather than through confusion_counts() to avoid a nested parallel region.
        ConfusionCounts counts;
        counts.tp.assign(kCategoryCount, 0);
        counts.fp.assign(kCategoryCount, 0);
        counts.fn.assign(kCategoryCount, 0);
        counts.tn.assign(kCategoryCount, 0);
        counts.n = gold.size();
        for (std::size_t i = 0; i < gold.size(); ++i) {
            if (pred[i] == gold[i]) {
                ++counts.tp[gold[i]];
            } else {
                ++counts.fn[gold[i]];
                ++counts.fp[pred[i]];
            }
        }
        for (std::size_t k = 0; k < kCategoryCount; ++k)
            counts.tn[k] = counts.n - counts.tp[k] - counts.fp[k] - counts.fn[k];
        sweep.runs[s] = weighted_summary(counts, weights);
    }

    detail::fill_sweep_stats(sweep);
    return sweep;
}

}  // namespace crevtax
