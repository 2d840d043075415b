#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crevtax/corpus.hpp"
#include "crevtax/gateway.hpp"
#include "crevtax/prompt.hpp"
#include "crevtax/taxonomy.hpp"

namespace crevtax {

enum class UnparseableReason { NoMatch, Ambiguous, Empty };

std::string_view to_string(UnparseableReason r) noexcept;

struct ParseOutcome {
    std::optional<std::size_t> matched;  ///< index into the offered options
    UnparseableReason reason = UnparseableReason::NoMatch;  ///< meaningful only when !matched

    [[nodiscard]] bool ok() const noexcept { return matched.has_value(); }
    bool operator==(const ParseOutcome&) const = default;
};

/// Standardizes a model reply against the offered option names. Never throws.
///
/// The reply is cut at the first `$`, stripped of wrapping whitespace/punctuation,
/// and compared case-insensitively with each option. Failing an exact match, a
/// reply naming exactly one option as a whole word is accepted; two or more
/// distinct names are Ambiguous, none is NoMatch.
ParseOutcome parse_response(std::string_view raw, std::span<const std::string> options) noexcept;

struct Prediction {
    std::string comment_id;
    std::optional<CategoryId> category;  ///< nullopt: Unparseable
    std::optional<UnparseableReason> unparseable_reason;
    std::optional<GroupId> step1_group;  ///< hierarchical only
    std::vector<std::string> raw_responses;
    std::optional<PromptSpec> spec;      ///< absent for baselines and imported predictions
    std::string model_id;

    [[nodiscard]] bool classified() const noexcept { return category.has_value(); }
    bool operator==(const Prediction&) const = default;
};

/// Shared per-run state: taxonomy, rendered option lists and template.
class ClassifierContext {
public:
    ClassifierContext(const Taxonomy& taxonomy, PromptSpec spec, PromptTemplate tmpl = PromptTemplate::canonical());

    [[nodiscard]] const Taxonomy& taxonomy() const noexcept { return *taxonomy_; }
    [[nodiscard]] const PromptSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] const PromptTemplate& prompt_template() const noexcept { return template_; }
    [[nodiscard]] const OptionCatalog& catalog() const noexcept { return catalog_; }
    [[nodiscard]] std::span<const std::string> category_names() const noexcept { return category_names_; }
    [[nodiscard]] std::span<const std::string> group_names() const noexcept { return group_names_; }
    [[nodiscard]] std::span<const std::string> child_names(GroupId g) const noexcept { return child_names_[index_of(g)]; }

private:
    const Taxonomy* taxonomy_;
    PromptSpec spec_;
    PromptTemplate template_;
    OptionCatalog catalog_;
    std::vector<std::string> category_names_;
    std::vector<std::string> group_names_;
    std::array<std::vector<std::string>, kGroupCount> child_names_;
};

/// One completion over all categories.
Prediction classify_flat(const ReviewComment& comment, const ClassifierContext& ctx, Gateway& gateway);

/// Group step, then a category step restricted to the group's children. Singleton
/// groups (Documentation, False positive) resolve without a second request.
Prediction classify_hierarchical(const ReviewComment& comment, const ClassifierContext& ctx, Gateway& gateway);

/// Dispatches on ctx.spec().strategy.
Prediction classify(const ReviewComment& comment, const ClassifierContext& ctx, Gateway& gateway);

struct RunManifest {
    std::string corpus_digest;
    std::string taxonomy_digest;
    std::string template_version;
    PromptSpec spec;
    std::string backend;
    std::string model_id;
    std::string endpoint_url;
    nlohmann::ordered_json decoding;
    std::size_t corpus_size = 0;
    std::size_t unparseable_count = 0;
    std::size_t request_count = 0;
    std::size_t degraded_context_count = 0;

    [[nodiscard]] nlohmann::ordered_json to_json() const;
};

struct RunTiming {
    std::string started;
    std::string finished;
    double wall_seconds = 0.0;
};

struct CorpusRunOptions {
    int parallelism = 1;
    /// Abort once this many gateway failures happen back to back (0 disables).
    int max_consecutive_failures = 5;
};

struct CorpusRun {
    std::vector<Prediction> predictions;
    RunManifest manifest;
    RunTiming timing;
};

/// One prediction per corpus item, in corpus order regardless of completion order.
CorpusRun classify_corpus(const Corpus& corpus, const ClassifierContext& ctx, Gateway& gateway,
                          const CorpusRunOptions& options = {});

/// Step-1 group correctness over hierarchical predictions (items without a group count as wrong).
double group_accuracy(const Corpus& corpus, std::span<const Prediction> predictions);

}  // namespace crevtax
