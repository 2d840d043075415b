#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "crevtax/corpus.hpp"
#include "crevtax/digest.hpp"
#include "crevtax/errors.hpp"
#include "support.hpp"

using namespace crevtax;

namespace {

const Taxonomy& tax() {
    static const Taxonomy t = Taxonomy::builtin();
    return t;
}

Corpus parse(const std::string& text) {
    std::istringstream in(text);
    return parse_corpus(in, tax());
}

std::string record(const std::string& id, const std::string& label, const char* new_code = "x = 1") {
    nlohmann::json j;
    j["id"] = id;
    j["comment"] = "comment " + id;
    j["old_code"] = "x = 0";
    j["new_code"] = new_code ? nlohmann::json(new_code) : nlohmann::json(nullptr);
    j["label"] = label;
    return j.dump() + "\n";
}

}  // namespace

TEST(Corpus, LabelsResolveThroughAliases) {
    const auto c = parse(record("a", "Praise") + record("b", "CODE ORGANIZATION") + record("c", "Organization of Code"));
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c[0].gold, CategoryId::Praise);
    EXPECT_EQ(c[1].gold, CategoryId::CodeOrganization);
    EXPECT_EQ(c[2].gold, CategoryId::CodeOrganization);
    EXPECT_EQ(c[0].old_code, "x = 0");
}

TEST(Corpus, UnknownLabelReportsLine) {
    try {
        (void)parse(record("a", "Praise") + "\n" + record("b", "Bugs"));
        FAIL();
    } catch (const CorpusError& e) {
        EXPECT_EQ(e.kind(), CorpusError::Kind::UnknownLabel);
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("UnknownLabel(\"Bugs\", line 3)"), std::string::npos);
    }
}

TEST(Corpus, DuplicateIdAndMalformedRecords) {
    try {
        (void)parse(record("a", "Praise") + record("a", "Logical"));
        FAIL();
    } catch (const CorpusError& e) {
        EXPECT_EQ(e.kind(), CorpusError::Kind::DuplicateId);
        EXPECT_EQ(e.line(), 2u);
    }
    for (const std::string bad : {std::string("{not json}\n"), std::string("[1,2]\n"),
                                  std::string(R"({"id":"a","comment":"c","old_code":null,"new_code":null})" "\n"),
                                  std::string(R"({"id":"a","comment":"c","old_code":null,"new_code":null,"label":"Praise","x":1})" "\n"),
                                  std::string(R"({"id":"a","comment":"","old_code":null,"new_code":null,"label":"Praise"})" "\n")}) {
        try {
            (void)parse(bad);
            FAIL() << bad;
        } catch (const CorpusError& e) {
            EXPECT_EQ(e.kind(), CorpusError::Kind::MalformedRecord) << bad;
            EXPECT_EQ(e.line(), 1u);
        }
    }
}

TEST(Corpus, WriteParseRoundTrip) {
    const auto c = parse(record("a", "Praise") + record("b", "Timing", nullptr));
    std::ostringstream out;
    write_corpus(out, c, tax());
    const auto again = parse(out.str());
    EXPECT_EQ(again.items(), c.items());
    EXPECT_EQ(again.digest(), c.digest());
}

TEST(Corpus, FilterWithCode) {
    const auto c = parse(record("a", "Praise") + record("b", "Praise", nullptr) + record("c", "Logical"));
    const auto f = filter_with_code(c);
    EXPECT_EQ(f.size(), 2u);
    ASSERT_FALSE(f.filter_log().empty());
    EXPECT_EQ(f.filter_log().back(), "excluded 1");

    const auto empty_code = parse(record("a", "Praise", ""));
    EXPECT_EQ(filter_with_code(empty_code).size(), 0u);

    const auto all = parse(record("a", "Praise") + record("b", "Logical"));
    EXPECT_EQ(filter_with_code(all).items(), all.items());
    EXPECT_EQ(filter_with_code(filter_with_code(c)).items(), f.items());
}

TEST(Corpus, ClassWeights) {
    const auto paper = fixtures::counted_corpus(fixtures::kTable1Counts);
    const auto w = class_weights(paper);
    EXPECT_NEAR(w[index_of(CategoryId::Documentation)], 387.0 / 1828.0, 1e-15);
    EXPECT_NEAR(w[index_of(CategoryId::Documentation)], 0.2117, 5e-5);
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-9);

    std::array<std::size_t, kCategoryCount> one{};
    one[index_of(CategoryId::Timing)] = 1;
    const auto single = class_weights(fixtures::counted_corpus(one));
    for (std::size_t i = 0; i < kCategoryCount; ++i) EXPECT_EQ(single[i], i == index_of(CategoryId::Timing) ? 1.0 : 0.0);

    std::array<std::size_t, kCategoryCount> uniform;
    uniform.fill(1);
    for (double x : class_weights(fixtures::counted_corpus(uniform))) EXPECT_DOUBLE_EQ(x, 1.0 / 17.0);

    EXPECT_THROW((void)class_weights(Corpus{}), CorpusError);
}

TEST(Corpus, ClassWeightsIgnoreOrder) {
    const auto c = fixtures::random_corpus(500, 3);
    auto items = c.items();
    std::mt19937_64 rng(11);
    stable_shuffle(items, rng);
    EXPECT_EQ(class_weights(c), class_weights(Corpus(items)));
}

TEST(Folds, PaperCorpusTenFolds) {
    const auto c = fixtures::counted_corpus(fixtures::kTable1Counts);
    const auto folds = stratified_kfold(c, 10, 42);
    const auto sizes = folds.fold_sizes();
    EXPECT_EQ(*std::min_element(sizes.begin(), sizes.end()), 182u);
    EXPECT_EQ(*std::max_element(sizes.begin(), sizes.end()), 183u);
    EXPECT_EQ(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}), 1828u);
}

TEST(Folds, PerCategoryBalanceAndPartition) {
    for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
        for (std::size_t k : {2u, 3u, 5u, 10u}) {
            const auto c = fixtures::random_corpus(300, seed);
            const auto folds = stratified_kfold(c, k, seed);
            ASSERT_EQ(folds.fold_of.size(), c.size());
            std::set<std::size_t> members;
            for (std::size_t f = 0; f < k; ++f)
                for (auto i : folds.members(f)) {
                    EXPECT_TRUE(members.insert(i).second);
                    EXPECT_EQ(folds.fold_of[i], f);
                }
            EXPECT_EQ(members.size(), c.size());
            for (std::size_t cat = 0; cat < kCategoryCount; ++cat) {
                std::vector<std::size_t> counts(k, 0);
                for (std::size_t i = 0; i < c.size(); ++i)
                    if (index_of(c[i].gold) == cat) ++counts[folds.fold_of[i]];
                const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
                EXPECT_LE(*hi - *lo, 1u) << "category " << cat << " k " << k;
            }
        }
    }
}

TEST(Folds, TwoFoldsOnBalancedFourItems) {
    std::array<std::size_t, kCategoryCount> counts{};
    counts[0] = 2;
    counts[1] = 2;
    const auto c = fixtures::counted_corpus(counts);
    const auto folds = stratified_kfold(c, 2, 5);
    for (std::size_t f = 0; f < 2; ++f) {
        const auto m = folds.members(f);
        ASSERT_EQ(m.size(), 2u);
        EXPECT_NE(c[m[0]].gold, c[m[1]].gold);
    }
}

TEST(Folds, DeterministicAndSeedSensitive) {
    const auto c = fixtures::random_corpus(200, 8);
    EXPECT_EQ(stratified_kfold(c, 10, 1).fold_of, stratified_kfold(c, 10, 1).fold_of);
    EXPECT_NE(stratified_kfold(c, 10, 1).fold_of, stratified_kfold(c, 10, 2).fold_of);
    EXPECT_EQ(plain_kfold(c, 10, 1).fold_of, plain_kfold(c, 10, 1).fold_of);
    EXPECT_FALSE(plain_kfold(c, 10, 1).stratified);
}

TEST(Folds, RareCategorySpreadsOverDistinctFolds) {
    const auto c = fixtures::counted_corpus(fixtures::kTable1Counts);
    const auto folds = stratified_kfold(c, 10, 3);
    std::set<std::size_t> timing_folds;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i].gold == CategoryId::Timing) timing_folds.insert(folds.fold_of[i]);
    EXPECT_EQ(timing_folds.size(), 4u);
}

TEST(Folds, BadFoldCounts) {
    const auto c = fixtures::random_corpus(5, 1);
    EXPECT_THROW((void)stratified_kfold(c, 1, 0), CorpusError);
    EXPECT_THROW((void)stratified_kfold(c, 6, 0), CorpusError);
    EXPECT_NO_THROW((void)stratified_kfold(c, 5, 0));
}
