#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "crevtax/classifier.hpp"
#include "crevtax/corpus.hpp"
#include "crevtax/gateway.hpp"
#include "crevtax/metrics.hpp"
#include "crevtax/prompt.hpp"
#include "crevtax/taxonomy.hpp"

namespace crevtax::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitError = 1,
    kExitUsage = 2,
    kExitUnparseable = 3,  ///< run finished but the unparseable rate exceeded the threshold
};

/// Backend selection. `oracle` is a mock that answers every item with its gold label.
enum class BackendChoice { Remote, Mock, Replay, Oracle };

std::string_view to_string(BackendChoice b) noexcept;
std::optional<BackendChoice> backend_from_string(std::string_view s);

struct RunConfig {
    std::filesystem::path corpus;
    std::filesystem::path definitions;  ///< empty: built-in taxonomy
    PromptSpec spec;
    std::filesystem::path template_system;
    std::filesystem::path template_user;
    ModelConfig model;
    BackendChoice backend = BackendChoice::Mock;
    std::filesystem::path mock_script;
    std::filesystem::path cache;
    int parallelism = 1;
    int max_consecutive_failures = 5;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "crevtax-out";
    UnparseablePolicy unparseable = UnparseablePolicy::Incorrect;
    double max_unparseable_rate = 1.0;
    bool keep_codeless = false;  ///< skip filter_with_code on load

    /// Options that affect results. Output location, cache path and parallelism are left out.
    [[nodiscard]] nlohmann::ordered_json to_json() const;
    [[nodiscard]] std::string digest() const;
};

/// sha256 of the canonical dump.
std::string config_digest(const nlohmann::ordered_json& inputs);

/// Taxonomy from config.definitions (or built-in) and the corpus, filtered unless keep_codeless.
struct Inputs {
    Taxonomy taxonomy;
    Corpus corpus;
};
Inputs load_inputs(const RunConfig& config);

/// Answers each request with the gold category (or, at the hierarchical group step, its group) plus "$".
std::shared_ptr<MockSource> oracle_source(const Corpus& corpus, const Taxonomy& taxonomy, Strategy strategy);

/// Opens config.cache when set; Replay requires it.
std::shared_ptr<ResponseCache> open_cache(const RunConfig& config);

/// Mock and oracle backends run under Gateway::mock_config() with the configured decoding values.
Gateway make_gateway(const RunConfig& config, const Inputs& inputs, Strategy strategy,
                     std::shared_ptr<ResponseCache> cache);

/// Writes predictions.jsonl, manifest.json and timing.json under config.output_dir.
/// With grid set, runs {flat, hierarchical} x {comment_only, code_and_comment} into subdirectories.
int cmd_classify(const RunConfig& config, bool grid, std::ostream& log);

struct EvaluateOptions {
    std::filesystem::path predictions;
    std::filesystem::path label_map;
    bool local_weights = false;  ///< default: weights of the whole loaded corpus
};

/// Writes report.json and report.txt (weighted row + per-category table) under config.output_dir.
int cmd_evaluate(const RunConfig& config, const EvaluateOptions& options, std::ostream& out);

struct CompareOptions {
    std::filesystem::path ours;
    std::filesystem::path baseline;
    std::filesystem::path label_map;
    std::string ours_label = "ours";
    std::string baseline_label = "baseline";
    std::size_t folds = 10;
    bool plain_folds = false;
};

/// Per-fold local-weight summaries for both sides, Wilcoxon (greater) per metric, percent changes.
int cmd_compare(const RunConfig& config, const CompareOptions& options, std::ostream& out);

struct CrossvalOptions {
    std::size_t folds = 10;
    bool plain_folds = false;
    std::filesystem::path predictions;  ///< reuse; empty: classify the corpus first
};

int cmd_crossval(const RunConfig& config, const CrossvalOptions& options, std::ostream& out);

int cmd_taxonomy_show(const RunConfig& config, bool as_json, std::ostream& out);

struct BaselineOptions {
    std::string kind = "majority";  ///< majority | random
    std::size_t sweep_seeds = 0;    ///< random only: also report a sweep over seeds seed..seed+n-1
};

/// Writes baseline predictions and their evaluation under config.output_dir.
int cmd_baseline(const RunConfig& config, const BaselineOptions& options, std::ostream& out);

/// Percent change between two published values, with the rounding interval for one-decimal inputs.
int cmd_delta(double ours, double baseline, std::ostream& out);

struct AblationOptions {
    std::filesystem::path original;  ///< predictions with brief definitions
    std::filesystem::path refined;   ///< predictions with refined definitions
    std::string label = "run";
};

/// (M_original - M_refined) / M_refined per metric.
int cmd_ablation(const RunConfig& config, const AblationOptions& options, std::ostream& out);

}  // namespace crevtax::cli
