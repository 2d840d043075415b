#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "crevtax/digest.hpp"
#include "crevtax/errors.hpp"
#include "crevtax/metrics.hpp"
#include "support.hpp"

using namespace crevtax;

namespace {

// Straight-line recomputation of the weighted metrics, one class at a time.
struct Oracle {
    double f1 = 0, precision = 0, recall = 0, accuracy = 0;
};

Oracle oracle(const std::vector<int>& gold, const std::vector<int>& pred, const std::vector<double>& w) {
    Oracle o;
    double wsum = 0;
    for (int c = 0; c < static_cast<int>(kCategoryCount); ++c) {
        double tp = 0, predicted = 0, actual = 0;
        for (std::size_t i = 0; i < gold.size(); ++i) {
            if (pred[i] == c) ++predicted;
            if (gold[i] == c) ++actual;
            if (pred[i] == c && gold[i] == c) ++tp;
        }
        if (actual == 0) continue;
        const double p = predicted > 0 ? tp / predicted : 0;
        const double r = tp / actual;
        const double f = p + r > 0 ? 2 * p * r / (p + r) : 0;
        o.precision += w[c] * p;
        o.recall += w[c] * r;
        o.f1 += w[c] * f;
        wsum += w[c];
    }
    o.precision /= wsum;
    o.recall /= wsum;
    o.f1 /= wsum;
    double hit = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) hit += gold[i] == pred[i];
    o.accuracy = hit / static_cast<double>(gold.size());
    return o;
}

std::vector<double> self_weights(const std::vector<int>& gold) {
    std::vector<double> w(kCategoryCount, 0);
    for (int g : gold) w[g] += 1.0 / static_cast<double>(gold.size());
    return w;
}

std::vector<int> noisy_labels(const Corpus& corpus, double keep, std::uint64_t seed, bool allow_unparseable = true) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<int> out;
    for (const auto& c : corpus.items()) {
        const double x = u(rng);
        if (x < keep)
            out.push_back(static_cast<int>(index_of(c.gold)));
        else if (allow_unparseable && x > 0.97)
            out.push_back(kUnparseable);
        else
            out.push_back(static_cast<int>(bounded_draw(rng, kCategoryCount)));
    }
    return out;
}

}  // namespace

TEST(Confusion, SmallWorkedExample) {
    const std::vector<int> gold{0, 0, 1, 1, 2};
    const std::vector<int> pred{0, 1, 1, kUnparseable, 0};
    const auto c = confusion_counts(gold, pred, 3);
    EXPECT_EQ(c.tp, (std::vector<std::uint64_t>{1, 1, 0}));
    EXPECT_EQ(c.fp, (std::vector<std::uint64_t>{1, 1, 0}));
    EXPECT_EQ(c.fn, (std::vector<std::uint64_t>{1, 1, 1}));
    EXPECT_EQ(c.tn, (std::vector<std::uint64_t>{2, 2, 4}));
    EXPECT_EQ(c.correct(), 2u);
    const auto m = per_class_metrics(c);
    EXPECT_DOUBLE_EQ(m[0].precision, 0.5);
    EXPECT_DOUBLE_EQ(m[0].recall, 0.5);
    EXPECT_DOUBLE_EQ(m[2].precision, 0.0);
    EXPECT_DOUBLE_EQ(m[2].f1, 0.0);
    EXPECT_THROW((void)confusion_counts(gold, std::vector<int>{0, 1}, 3), EvaluationError);
    EXPECT_THROW((void)confusion_counts(std::vector<int>{3}, std::vector<int>{0}, 3), EvaluationError);
    EXPECT_THROW((void)confusion_counts(std::vector<int>{0}, std::vector<int>{-2}, 3), EvaluationError);
}

TEST(Confusion, CellsSumToN) {
    const auto corpus = fixtures::random_corpus(700, 21);
    const auto pred = noisy_labels(corpus, 0.4, 21);
    const auto c = confusion_counts(category_labels(corpus, fixtures::predictions_from(corpus, pred)).gold, pred,
                                    kCategoryCount);
    for (std::size_t k = 0; k < kCategoryCount; ++k) EXPECT_EQ(c.tp[k] + c.fp[k] + c.fn[k] + c.tn[k], c.n);
}

TEST(Weighted, MatchesIndependentOracle) {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const auto corpus = fixtures::random_corpus(900, seed);
        const auto pred = noisy_labels(corpus, 0.5, seed + 100);
        const auto preds = fixtures::predictions_from(corpus, pred);
        const auto labels = category_labels(corpus, preds);
        const auto o = oracle(labels.gold, labels.pred, self_weights(labels.gold));
        const auto s = weighted_summary(confusion(corpus, preds));
        EXPECT_NEAR(s.f1, o.f1, 1e-12);
        EXPECT_NEAR(s.precision, o.precision, 1e-12);
        EXPECT_NEAR(s.recall, o.recall, 1e-12);
        EXPECT_NEAR(s.micro_accuracy, o.accuracy, 1e-12);
    }
}

TEST(Weighted, MajorityBaselineClosedForm) {
    const auto corpus = fixtures::counted_corpus(fixtures::kTable1Counts);
    const auto preds = baseline_majority(corpus);
    for (const auto& p : preds) EXPECT_EQ(p.category, CategoryId::Documentation);
    const auto s = weighted_summary(confusion(corpus, preds), class_weights(corpus));
    const double w = 387.0 / 1828.0;
    EXPECT_NEAR(s.precision, w * w, 1e-12);
    EXPECT_NEAR(s.recall, w, 1e-12);
    EXPECT_NEAR(s.f1, w * 2 * w / (1 + w), 1e-12);
    EXPECT_NEAR(s.micro_accuracy, w, 1e-12);
    EXPECT_NEAR(s.f1 * 100, 7.4, 0.05);
    EXPECT_NEAR(s.recall * 100, 21.2, 0.05);
}

TEST(Weighted, MajorityTieGoesToEarlierCategory) {
    std::array<std::size_t, kCategoryCount> counts{};
    counts[index_of(CategoryId::Praise)] = 3;
    counts[index_of(CategoryId::Logical)] = 3;
    const auto preds = baseline_majority(fixtures::counted_corpus(counts));
    EXPECT_EQ(preds.front().category, CategoryId::Logical);
    EXPECT_TRUE(baseline_majority(Corpus{}).empty());
}

TEST(Weighted, PerfectPredictorScoresOne) {
    const auto corpus = fixtures::random_corpus(400, 6);
    std::vector<Prediction> preds;
    for (const auto& c : corpus.items()) {
        Prediction p;
        p.comment_id = c.id;
        p.category = c.gold;
        preds.push_back(p);
    }
    const auto s = weighted_summary(confusion(corpus, preds));
    EXPECT_DOUBLE_EQ(s.f1, 1.0);
    EXPECT_DOUBLE_EQ(s.precision, 1.0);
    EXPECT_DOUBLE_EQ(s.recall, 1.0);
    EXPECT_DOUBLE_EQ(s.micro_accuracy, 1.0);
}

TEST(Weighted, PropertiesOnRandomInputs) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const auto corpus = fixtures::random_corpus(50 + trial * 13, trial);
        const auto pred = noisy_labels(corpus, static_cast<double>(trial) / 40.0, trial);
        const auto preds = fixtures::predictions_from(corpus, pred);
        const auto s = weighted_summary(confusion(corpus, preds));
        for (double v : {s.f1, s.precision, s.recall, s.micro_accuracy}) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
        // self-weighted recall is micro accuracy
        EXPECT_NEAR(s.recall, s.micro_accuracy, 1e-12);

        auto shuffled = preds;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        EXPECT_EQ(confusion(corpus, shuffled), confusion(corpus, preds));

        auto items = corpus.items();
        std::vector<std::size_t> order(items.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<ReviewComment> permuted;
        std::vector<Prediction> permuted_preds;
        for (auto i : order) {
            permuted.push_back(items[i]);
            permuted_preds.push_back(preds[i]);
        }
        const auto again = weighted_summary(confusion(Corpus(permuted), permuted_preds));
        EXPECT_NEAR(again.f1, s.f1, 1e-12);
        EXPECT_NEAR(again.precision, s.precision, 1e-12);
    }
}

TEST(Weighted, ExternalWeightsAndValidation) {
    const auto corpus = fixtures::random_corpus(300, 12);
    const auto pred = noisy_labels(corpus, 0.3, 12, false);
    const auto labels = category_labels(corpus, fixtures::predictions_from(corpus, pred));
    std::vector<double> w(kCategoryCount);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(fixtures::kTable1Counts[i]) / 1828.0;
    const auto o = oracle(labels.gold, labels.pred, w);
    const auto s = weighted_summary(confusion_counts(labels.gold, labels.pred, kCategoryCount), w);
    EXPECT_NEAR(s.f1, o.f1, 1e-12);
    EXPECT_NEAR(s.precision, o.precision, 1e-12);
    EXPECT_NEAR(s.recall, o.recall, 1e-12);

    EXPECT_THROW((void)weighted_summary(ConfusionCounts{}), EvaluationError);
    EXPECT_THROW((void)weighted_summary(confusion_counts(labels.gold, labels.pred, kCategoryCount), std::vector<double>{1.0}),
                 EvaluationError);
}

TEST(Policy, UnparseableCountsAsFalsePositiveWhenAsked) {
    std::array<std::size_t, kCategoryCount> counts{};
    counts[index_of(CategoryId::FalsePositive)] = 2;
    counts[index_of(CategoryId::Praise)] = 2;
    const auto corpus = fixtures::counted_corpus(counts);
    // corpus order: Praise, Praise, FalsePositive, FalsePositive
    const std::vector<int> pred{kUnparseable, static_cast<int>(index_of(CategoryId::Praise)), kUnparseable,
                                static_cast<int>(index_of(CategoryId::FalsePositive))};
    const auto preds = fixtures::predictions_from(corpus, pred);
    const auto fp = static_cast<std::size_t>(index_of(CategoryId::FalsePositive));
    const auto strict = confusion(corpus, preds);
    EXPECT_EQ(strict.tp[fp], 1u);
    EXPECT_EQ(strict.fp[fp], 0u);
    const auto lenient = confusion(corpus, preds, UnparseablePolicy::AsFalsePositive);
    EXPECT_EQ(lenient.tp[fp], 2u);
    EXPECT_EQ(lenient.fp[fp], 1u);
    EXPECT_DOUBLE_EQ(micro_accuracy(corpus, preds), 0.5);
    EXPECT_DOUBLE_EQ(micro_accuracy(corpus, preds, UnparseablePolicy::AsFalsePositive), 0.75);

    const auto groups = group_labels(corpus, preds, UnparseablePolicy::AsFalsePositive);
    EXPECT_EQ(groups.pred[0], static_cast<int>(index_of(GroupId::FalsePositive)));
    EXPECT_EQ(group_labels(corpus, preds).pred[0], kUnparseable);
}

TEST(Alignment, MismatchedIdsAreErrors) {
    const auto corpus = fixtures::random_corpus(5, 1);
    const std::vector<int> pred(5, 0);
    auto preds = fixtures::predictions_from(corpus, pred);
    auto missing = preds;
    missing.pop_back();
    EXPECT_THROW((void)confusion(corpus, missing), EvaluationError);
    auto renamed = preds;
    renamed[1].comment_id = "nope";
    EXPECT_THROW((void)confusion(corpus, renamed), EvaluationError);
    auto dup = preds;
    dup[1].comment_id = dup[0].comment_id;
    EXPECT_THROW((void)confusion(corpus, dup), EvaluationError);
    std::reverse(preds.begin(), preds.end());
    EXPECT_NO_THROW((void)confusion(corpus, preds));
}

TEST(Groups, StepOneGroupPreferredOverCategoryGroup) {
    std::array<std::size_t, kCategoryCount> counts{};
    counts[index_of(CategoryId::Praise)] = 1;
    const auto corpus = fixtures::counted_corpus(counts);
    Prediction p;
    p.comment_id = corpus[0].id;
    p.category = CategoryId::Logical;
    p.step1_group = GroupId::Discussion;
    const std::vector<Prediction> preds{p};
    EXPECT_EQ(group_labels(corpus, preds).pred[0], static_cast<int>(index_of(GroupId::Discussion)));
    EXPECT_EQ(group_labels(corpus, preds).gold[0], static_cast<int>(index_of(GroupId::Discussion)));
}

TEST(PercentChange, WorkedValues) {
    EXPECT_NEAR(*percent_change(45.0, 40.4), 11.386, 1e-3);
    EXPECT_NEAR(*percent_change(46.7, 42.4), 10.142, 1e-3);
    EXPECT_DOUBLE_EQ(*percent_change(10, 10), 0.0);
    EXPECT_LT(*percent_change(5, 10), 0.0);
    EXPECT_FALSE(percent_change(3, 0));
    const auto range = percent_change_range(45.0, 40.4, 0.05);
    ASSERT_TRUE(range);
    EXPECT_NEAR(range->low, (44.95 - 40.45) / 40.45 * 100, 1e-9);
    EXPECT_NEAR(range->high, (45.05 - 40.35) / 40.35 * 100, 1e-9);
    EXPECT_FALSE(percent_change_range(1.0, 0.04, 0.05));
}

TEST(PercentChange, SummariesAndDefinitionDelta) {
    WeightedSummary ours{0.5, 0.6, 0.4, 0.4, {}};
    WeightedSummary base{0.4, 0.6, 0.5, 0.0, {}};
    const auto d = compare_summaries(ours, base);
    EXPECT_NEAR(*d.f1, 25.0, 1e-9);
    EXPECT_NEAR(*d.precision, 0.0, 1e-9);
    EXPECT_NEAR(*d.recall, -20.0, 1e-9);
    EXPECT_FALSE(d.accuracy);
    // original relative to refined
    const auto delta = definition_delta(base, ours);
    EXPECT_NEAR(*delta.f1, -20.0, 1e-9);
    EXPECT_NEAR(*delta.recall, 25.0, 1e-9);
}

TEST(RandomBaseline, RepeatableAndSeedSensitive) {
    const auto corpus = fixtures::random_corpus(200, 3);
    EXPECT_EQ(baseline_random(corpus, 5), baseline_random(corpus, 5));
    EXPECT_NE(baseline_random(corpus, 5), baseline_random(corpus, 6));
    for (const auto& p : baseline_random(corpus, 5)) EXPECT_TRUE(p.classified());
}

TEST(RandomBaseline, ExpectationsHold) {
    std::array<std::size_t, kCategoryCount> counts;
    for (std::size_t i = 0; i < kCategoryCount; ++i) counts[i] = fixtures::kTable1Counts[i] * 55;
    const auto corpus = fixtures::counted_corpus(counts);
    ASSERT_GE(corpus.size(), 100000u);
    const auto w = class_weights(corpus);
    double sum_sq = 0;
    for (auto c : fixtures::kTable1Counts) sum_sq += (c / 1828.0) * (c / 1828.0);
    EXPECT_NEAR(expected_random_precision(w), sum_sq, 1e-12);
    EXPECT_NEAR(sum_sq, 0.1101, 5e-5);
    EXPECT_DOUBLE_EQ(expected_random_recall(), 1.0 / 17.0);

    std::vector<std::uint64_t> seeds(20);
    std::iota(seeds.begin(), seeds.end(), 1);
    const auto sweep = random_baseline_sweep(corpus, seeds);
    EXPECT_NEAR(sweep.precision.mean, sum_sq, 0.01 * sum_sq);
    EXPECT_NEAR(sweep.recall.mean, 1.0 / 17.0, 0.01 / 17.0);
    EXPECT_GT(sweep.precision.stddev, 0.0);

    // a sweep run equals evaluating the per-seed predictions directly
    const auto direct = weighted_summary(confusion(corpus, baseline_random(corpus, 3)), w);
    EXPECT_NEAR(sweep.runs[2].f1, direct.f1, 1e-12);
    EXPECT_NEAR(sweep.runs[2].precision, direct.precision, 1e-12);
}

TEST(Sweep, SampleStatistics) {
    const std::vector<double> v{1, 2, 3, 4};
    const auto s = sweep_stats(v);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_NEAR(s.stddev, std::sqrt(5.0 / 3.0), 1e-12);
    EXPECT_DOUBLE_EQ(sweep_stats(std::vector<double>{7}).stddev, 0.0);
}
