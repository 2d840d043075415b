#include <cstdint>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "crevtax/cli/commands.hpp"
#include "crevtax/errors.hpp"

using namespace crevtax;
using namespace crevtax::cli;

namespace {

struct Flags {
    RunConfig config;
    std::string strategy = "flat";
    std::string context = "code_and_comment";
    std::string definitions_style = "refined";
    std::string backend = "mock";
    bool as_false_positive = false;
    double timeout_s = 60.0;
};

void add_corpus_options(CLI::App* cmd, Flags& f) {
    cmd->add_option("--corpus", f.config.corpus, "Labeled corpus (JSON lines)")->required();
    cmd->add_option("--definitions", f.config.definitions, "Taxonomy definitions file (default: built-in)");
    cmd->add_option("--seed", f.config.seed, "Seed recorded in outputs; drives folds and random baselines");
    cmd->add_option("-o,--output-dir", f.config.output_dir, "Where outputs are written");
    cmd->add_flag("--unparseable-as-false-positive", f.as_false_positive,
                  "Score unparseable replies as the False positive category");
    cmd->add_option("--max-unparseable-rate", f.config.max_unparseable_rate,
                    "Exit with code 3 when the unparseable fraction is above this")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_flag("--keep-codeless", f.config.keep_codeless, "Do not drop items without new code");
}

void add_run_options(CLI::App* cmd, Flags& f) {
    cmd->add_option("--strategy", f.strategy, "flat | hierarchical")->check(CLI::IsMember({"flat", "hierarchical"}));
    cmd->add_option("--context", f.context, "comment_only | code_and_comment")
        ->check(CLI::IsMember({"comment_only", "code_and_comment"}));
    cmd->add_option("--definition-style", f.definitions_style, "brief | refined")->check(CLI::IsMember({"brief", "refined"}));
    cmd->add_option("--max-code-chars", f.config.spec.max_code_chars, "Per-side code budget before truncation")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--template-system", f.config.template_system, "System prompt template file");
    cmd->add_option("--template-user", f.config.template_user, "User prompt template file");
    cmd->add_option("--backend", f.backend, "remote | mock | replay | oracle")
        ->check(CLI::IsMember({"remote", "mock", "replay", "oracle"}));
    cmd->add_option("--mock-script", f.config.mock_script, "Scripted responses for the mock backend");
    cmd->add_option("--cache", f.config.cache, "Response cache file (JSON lines)");
    cmd->add_option("--endpoint", f.config.model.endpoint_url, "Chat-completion endpoint URL");
    cmd->add_option("--model", f.config.model.model_id, "Model identifier");
    cmd->add_option("--temperature", f.config.model.temperature);
    cmd->add_option("--max-tokens", f.config.model.max_tokens)->check(CLI::PositiveNumber);
    cmd->add_option("--timeout", f.timeout_s, "Per-request timeout in seconds")->check(CLI::PositiveNumber);
    cmd->add_option("--max-retries", f.config.model.max_retries)->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-in-flight", f.config.model.max_in_flight)->check(CLI::PositiveNumber);
    cmd->add_option("--api-key-env", f.config.model.api_key_env, "Environment variable holding the API key");
    cmd->add_option("-j,--parallelism", f.config.parallelism, "Concurrent comments")->check(CLI::PositiveNumber);
    cmd->add_option("--max-consecutive-failures", f.config.max_consecutive_failures)->check(CLI::NonNegativeNumber);
}

RunConfig finish(Flags& f) {
    auto& c = f.config;
    c.spec.strategy = *strategy_from_string(f.strategy);
    c.spec.context = *context_from_string(f.context);
    c.spec.definitions = *definition_style_from_string(f.definitions_style);
    c.backend = *backend_from_string(f.backend);
    c.unparseable = f.as_false_positive ? UnparseablePolicy::AsFalsePositive : UnparseablePolicy::Incorrect;
    c.model.request_timeout = std::chrono::milliseconds(static_cast<long long>(f.timeout_s * 1000.0));
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classify code review comments with an LLM and evaluate the results"};
    app.set_config("--config", "", "TOML/INI file with option defaults; flags take precedence");
    app.require_subcommand(1);

    Flags f;
    std::function<int()> action;

    auto* classify = app.add_subcommand("classify", "Classify a corpus");
    add_corpus_options(classify, f);
    add_run_options(classify, f);
    bool grid = false;
    classify->add_flag("--grid", grid, "Run all strategy x context combinations");
    classify->callback([&] { action = [&] { return cmd_classify(finish(f), grid, std::cout); }; });

    auto* evaluate = app.add_subcommand("evaluate", "Score a predictions file");
    add_corpus_options(evaluate, f);
    EvaluateOptions eval;
    evaluate->add_option("--predictions", eval.predictions)->required()->check(CLI::ExistingFile);
    evaluate->add_option("--label-map", eval.label_map, "JSON object mapping external labels to categories");
    evaluate->add_flag("--local-weights", eval.local_weights, "Weight by the evaluated set instead of the corpus");
    evaluate->callback([&] { action = [&] { return cmd_evaluate(finish(f), eval, std::cout); }; });

    auto* compare = app.add_subcommand("compare", "Compare two prediction sets over folds");
    add_corpus_options(compare, f);
    CompareOptions cmp;
    compare->add_option("--ours", cmp.ours)->required()->check(CLI::ExistingFile);
    compare->add_option("--baseline", cmp.baseline)->required()->check(CLI::ExistingFile);
    compare->add_option("--label-map", cmp.label_map);
    compare->add_option("--ours-label", cmp.ours_label);
    compare->add_option("--baseline-label", cmp.baseline_label);
    compare->add_option("-k,--folds", cmp.folds)->check(CLI::Range(2, 1000000));
    compare->add_flag("--plain-folds", cmp.plain_folds, "Unstratified folds");
    compare->callback([&] { action = [&] { return cmd_compare(finish(f), cmp, std::cout); }; });

    auto* crossval = app.add_subcommand("crossval", "Per-fold and mean scores for one run");
    add_corpus_options(crossval, f);
    add_run_options(crossval, f);
    CrossvalOptions cv;
    crossval->add_option("-k,--folds", cv.folds)->check(CLI::Range(2, 1000000));
    crossval->add_flag("--plain-folds", cv.plain_folds);
    crossval->add_option("--predictions", cv.predictions, "Reuse a predictions file instead of classifying")
        ->check(CLI::ExistingFile);
    crossval->callback([&] { action = [&] { return cmd_crossval(finish(f), cv, std::cout); }; });

    auto* taxonomy = app.add_subcommand("taxonomy", "Taxonomy utilities");
    taxonomy->require_subcommand(1);
    auto* show = taxonomy->add_subcommand("show", "Print the taxonomy");
    show->add_option("--definitions", f.config.definitions);
    bool as_json = false;
    show->add_flag("--json", as_json);
    show->callback([&] { action = [&] { return cmd_taxonomy_show(f.config, as_json, std::cout); }; });

    auto* baseline = app.add_subcommand("baseline", "Majority or random baseline predictions and scores");
    add_corpus_options(baseline, f);
    BaselineOptions base;
    baseline->add_option("kind", base.kind, "majority | random")->check(CLI::IsMember({"majority", "random"}));
    baseline->add_option("--sweep", base.sweep_seeds, "Random only: also average over this many seeds");
    baseline->callback([&] { action = [&] { return cmd_baseline(finish(f), base, std::cout); }; });

    auto* delta = app.add_subcommand("delta", "Percent change between two reported values");
    double ours = 0.0, reference = 0.0;
    delta->add_option("ours", ours)->required();
    delta->add_option("baseline", reference)->required();
    delta->callback([&] { action = [&] { return cmd_delta(ours, reference, std::cout); }; });

    auto* ablation = app.add_subcommand("ablation", "Change from refined to brief definitions");
    add_corpus_options(ablation, f);
    AblationOptions abl;
    ablation->add_option("--original", abl.original, "Predictions made with brief definitions")
        ->required()
        ->check(CLI::ExistingFile);
    ablation->add_option("--refined", abl.refined, "Predictions made with refined definitions")
        ->required()
        ->check(CLI::ExistingFile);
    ablation->add_option("--label", abl.label);
    ablation->callback([&] { action = [&] { return cmd_ablation(finish(f), abl, std::cout); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        return action ? action() : kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
