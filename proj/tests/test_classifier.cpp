#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "crevtax/classifier.hpp"
#include "crevtax/cli/commands.hpp"
#include "crevtax/digest.hpp"
#include "crevtax/errors.hpp"
#include "support.hpp"

using namespace crevtax;

namespace {

const Taxonomy& tax() {
    static const Taxonomy t = Taxonomy::builtin();
    return t;
}

std::vector<std::string> category_names() {
    std::vector<std::string> out;
    for (const auto& c : tax().categories()) out.push_back(c.display_name);
    return out;
}

PromptSpec spec(Strategy strategy, ContextMode context = ContextMode::CodeAndComment) {
    PromptSpec s;
    s.strategy = strategy;
    s.context = context;
    s.definitions = DefinitionStyle::Brief;
    return s;
}

ReviewComment item(const std::string& id, CategoryId gold) {
    ReviewComment c;
    c.id = id;
    c.comment_text = "comment " + id;
    c.old_code = "a";
    c.new_code = "b";
    c.gold = gold;
    return c;
}

Gateway scripted(std::map<std::string, std::string> responses, std::optional<std::string> fallback = std::nullopt) {
    return Gateway::mock(std::make_shared<MockSource>(MockScript{std::move(responses), std::move(fallback)}));
}

}  // namespace

TEST(Parse, ExactAndTolerantMatches) {
    const auto names = category_names();
    const auto index = [&](CategoryId id) { return std::optional<std::size_t>(index_of(id)); };
    EXPECT_EQ(parse_response("Praise$ because it compliments", names).matched, index(CategoryId::Praise));
    EXPECT_EQ(parse_response("  visual representation $", names).matched, index(CategoryId::VisualRepresentation));
    EXPECT_EQ(parse_response("**Naming Convention**", names).matched, index(CategoryId::NamingConvention));
    EXPECT_EQ(parse_response("The answer is Timing.$", names).matched, index(CategoryId::Timing));
    EXPECT_EQ(parse_response("Functional defects$", names).matched, index(CategoryId::FunctionalDefect));
}

TEST(Parse, AmbiguousEmptyAndNoMatch) {
    const auto names = category_names();
    EXPECT_EQ(parse_response("It is either Logical or Validation$", names),
              (ParseOutcome{std::nullopt, UnparseableReason::Ambiguous}));
    EXPECT_EQ(parse_response("   $ Praise", names), (ParseOutcome{std::nullopt, UnparseableReason::Empty}));
    EXPECT_EQ(parse_response("", names).reason, UnparseableReason::Empty);
    EXPECT_EQ(parse_response("???", names).reason, UnparseableReason::Empty);
    EXPECT_EQ(parse_response("no idea$", names).reason, UnparseableReason::NoMatch);
    EXPECT_EQ(parse_response("Illogical$", names).reason, UnparseableReason::NoMatch);
}

TEST(Parse, NestedNameIsNotASecondMention) {
    // "Documentation" inside the longer option is part of that name
    const std::vector<std::string> options{"Documentation", "Documentation comments"};
    EXPECT_EQ(parse_response("I pick Documentation comments$", options).matched, std::optional<std::size_t>(1));
}

TEST(Classify, FlatSingleRequest) {
    auto gw = scripted({{"a", "Logical$"}});
    const ClassifierContext ctx(tax(), spec(Strategy::Flat));
    const auto p = classify_flat(item("a", CategoryId::Logical), ctx, gw);
    EXPECT_EQ(p.category, CategoryId::Logical);
    EXPECT_FALSE(p.step1_group);
    EXPECT_EQ(p.raw_responses, std::vector<std::string>{"Logical$"});
    EXPECT_EQ(p.model_id, "mock");
    EXPECT_EQ(gw.requests(), 1u);
    EXPECT_THROW((void)classify_hierarchical(item("a", CategoryId::Logical), ctx, gw), Error);
}

TEST(Classify, HierarchicalTwoSteps) {
    auto gw = scripted({{"a#1", "Functional$"}, {"a#2", "Validation$"}, {"b#1", "Documentation$"}});
    const ClassifierContext ctx(tax(), spec(Strategy::Hierarchical));
    const auto a = classify_hierarchical(item("a", CategoryId::Validation), ctx, gw);
    EXPECT_EQ(a.step1_group, GroupId::Functional);
    EXPECT_EQ(a.category, CategoryId::Validation);
    EXPECT_EQ(a.raw_responses.size(), 2u);
    const auto b = classify_hierarchical(item("b", CategoryId::Documentation), ctx, gw);
    EXPECT_EQ(b.category, CategoryId::Documentation);
    EXPECT_EQ(b.raw_responses.size(), 1u);
    EXPECT_EQ(gw.requests(), 3u);
}

TEST(Classify, StepTwoOnlyOffersChildren) {
    std::vector<std::string> seen;
    auto source = std::make_shared<MockSource>([&](const ChatRequest& r) -> std::optional<std::string> {
        seen.push_back(r.user_text);
        return r.tag.step == 1 ? "Discussion$" : "Logical$";
    });
    auto gw = Gateway::mock(source);
    const ClassifierContext ctx(tax(), spec(Strategy::Hierarchical));
    const auto p = classify(item("a", CategoryId::Praise), ctx, gw);
    // Logical is not a Discussion child
    EXPECT_FALSE(p.category);
    EXPECT_EQ(p.step1_group, GroupId::Discussion);
    EXPECT_EQ(p.unparseable_reason, UnparseableReason::NoMatch);
    ASSERT_EQ(seen.size(), 2u);
    EXPECT_NE(seen[1].find("Praise: "), std::string::npos);
    EXPECT_EQ(seen[1].find("Logical: "), std::string::npos);
}

TEST(Classify, GatewayFailureCarriesCommentId) {
    auto gw = scripted({});
    const ClassifierContext ctx(tax(), spec(Strategy::Flat));
    try {
        (void)classify(item("c-17", CategoryId::Praise), ctx, gw);
        FAIL();
    } catch (const ClassificationError& e) {
        EXPECT_EQ(e.comment_id(), "c-17");
    }
}

TEST(ClassifyCorpus, OracleIsPerfectUnderBothStrategies) {
    const auto corpus = fixtures::counted_corpus(fixtures::kTable1Counts);
    for (auto strategy : {Strategy::Flat, Strategy::Hierarchical}) {
        auto gw = Gateway::mock(cli::oracle_source(corpus, tax(), strategy));
        const ClassifierContext ctx(tax(), spec(strategy));
        const auto run = classify_corpus(corpus, ctx, gw, {.parallelism = 2});
        ASSERT_EQ(run.predictions.size(), corpus.size());
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            EXPECT_EQ(run.predictions[i].comment_id, corpus[i].id);
            EXPECT_EQ(run.predictions[i].category, corpus[i].gold);
        }
        EXPECT_EQ(run.manifest.unparseable_count, 0u);
        if (strategy == Strategy::Hierarchical) {
            EXPECT_DOUBLE_EQ(group_accuracy(corpus, run.predictions), 1.0);
            // singleton groups need no second request
            EXPECT_EQ(run.manifest.request_count, 2 * 1828u - 387u - 158u);
        } else {
            EXPECT_EQ(run.manifest.request_count, 1828u);
        }
    }
}

TEST(ClassifyCorpus, GarbageRepliesAreAllUnparseable) {
    const auto corpus = fixtures::random_corpus(50, 4);
    auto gw = scripted({}, "???");
    const ClassifierContext ctx(tax(), spec(Strategy::Flat));
    const auto run = classify_corpus(corpus, ctx, gw);
    EXPECT_EQ(run.manifest.unparseable_count, 50u);
    EXPECT_EQ(run.manifest.corpus_size, 50u);
    for (const auto& p : run.predictions) {
        EXPECT_FALSE(p.classified());
        EXPECT_EQ(p.unparseable_reason, UnparseableReason::Empty);
    }
}

TEST(ClassifyCorpus, ParallelismDoesNotChangeOutput) {
    const auto corpus = fixtures::random_corpus(300, 9);
    const ClassifierContext ctx(tax(), spec(Strategy::Hierarchical));
    auto run_with = [&](int threads) {
        auto gw = Gateway::mock(cli::oracle_source(corpus, tax(), Strategy::Hierarchical));
        return classify_corpus(corpus, ctx, gw, {.parallelism = threads});
    };
    const auto serial = run_with(1);
    const auto parallel = run_with(8);
    EXPECT_EQ(serial.predictions, parallel.predictions);
    EXPECT_EQ(serial.manifest.to_json(), parallel.manifest.to_json());
    EXPECT_THROW((void)run_with(0), Error);
}

TEST(ClassifyCorpus, ManifestCountsDegradedContext) {
    auto items = fixtures::random_corpus(10, 2).items();
    items[3].old_code.reset();
    items[7].new_code = "";
    const Corpus corpus(items, "degraded");
    auto gw = scripted({}, "Praise$");
    const ClassifierContext ctx(tax(), spec(Strategy::Flat));
    const auto run = classify_corpus(corpus, ctx, gw);
    EXPECT_EQ(run.manifest.degraded_context_count, 2u);
    EXPECT_EQ(run.manifest.corpus_digest, corpus.digest());
    EXPECT_EQ(run.manifest.backend, "mock");
    EXPECT_EQ(run.manifest.template_version, PromptTemplate::canonical().version);

    const ClassifierContext comment_only(tax(), spec(Strategy::Flat, ContextMode::CommentOnly));
    EXPECT_EQ(classify_corpus(corpus, comment_only, gw).manifest.degraded_context_count, 0u);
}

TEST(ClassifyCorpus, AbortsAfterConsecutiveFailures) {
    const auto corpus = fixtures::random_corpus(40, 1);
    auto gw = scripted({});
    const ClassifierContext ctx(tax(), spec(Strategy::Flat));
    try {
        (void)classify_corpus(corpus, ctx, gw, {.parallelism = 1, .max_consecutive_failures = 3});
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("3 consecutive"), std::string::npos);
    }
    EXPECT_LE(gw.requests(), 3u);
}

TEST(ClassifyCorpus, IsolatedFailureSurfacesWithId) {
    const auto corpus = fixtures::random_corpus(5, 1);
    std::map<std::string, std::string> responses;
    for (const auto& c : corpus.items())
        if (c.id != "r00002") responses[c.id] = "Praise$";
    auto gw = scripted(responses);
    const ClassifierContext ctx(tax(), spec(Strategy::Flat));
    try {
        (void)classify_corpus(corpus, ctx, gw);
        FAIL();
    } catch (const ClassificationError& e) {
        EXPECT_EQ(e.comment_id(), "r00002");
    }
}

TEST(GroupAccuracy, BoundsCategoryAccuracyFromAbove) {
    const auto corpus = fixtures::random_corpus(200, 5);
    std::mt19937_64 rng(5);
    std::vector<Prediction> preds;
    std::size_t category_correct = 0;
    for (const auto& c : corpus.items()) {
        Prediction p;
        p.comment_id = c.id;
        const auto g = group_at(bounded_draw(rng, kGroupCount));
        p.step1_group = g;
        const auto kids = tax().children_of(g);
        p.category = kids[bounded_draw(rng, kids.size())].id;
        if (p.category == c.gold) ++category_correct;
        preds.push_back(std::move(p));
    }
    const double acc = group_accuracy(corpus, preds);
    EXPECT_GE(acc, static_cast<double>(category_correct) / 200.0);
    std::reverse(preds.begin(), preds.end());
    EXPECT_DOUBLE_EQ(group_accuracy(corpus, preds), acc);
    preds.pop_back();
    EXPECT_THROW((void)group_accuracy(corpus, preds), EvaluationError);
}
