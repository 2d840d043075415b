#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crevtax/corpus.hpp"
#include "crevtax/taxonomy.hpp"
#include "json.hpp"

namespace crevtax {

enum class Strategy { Flat, Hierarchical };
enum class ContextMode { CommentOnly, CodeAndComment };

std::string_view to_string(Strategy s) noexcept;
std::string_view to_string(ContextMode c) noexcept;
std::optional<Strategy> strategy_from_string(std::string_view s);
std::optional<ContextMode> context_from_string(std::string_view s);

inline constexpr std::size_t kDefaultMaxCodeChars = 6000;
inline constexpr std::string_view kStopToken = "$";

struct PromptSpec {
    Strategy strategy = Strategy::Flat;
    ContextMode context = ContextMode::CodeAndComment;
    DefinitionStyle definitions = DefinitionStyle::Refined;
    std::size_t max_code_chars = kDefaultMaxCodeChars;  ///< per side (old / new)

    [[nodiscard]] nlohmann::ordered_json to_json() const;
    static PromptSpec from_json(const nlohmann::json& j);
    bool operator==(const PromptSpec&) const = default;
};

struct PromptOption {
    std::string name;
    std::string definition;
};

struct RenderedPrompt {
    std::string system_text;
    std::string user_text;
    std::vector<std::string> options;
    std::string stop_token{kStopToken};
    /// CodeAndComment was requested but old and/or new code was missing.
    bool degraded_context = false;
};

/// System and user templates. The user template is split into blank-line-separated
/// paragraphs; a paragraph mentioning {old_code} or {new_code} is dropped when that
/// code is not rendered. Placeholders: {options}, {comment}, {old_code}, {new_code}.
struct PromptTemplate {
    std::string version;
    std::string system_text;
    std::string user_text;

    static PromptTemplate canonical();
    /// Either path may be empty to keep the canonical text for that half.
    static PromptTemplate load(const std::filesystem::path& system_path, const std::filesystem::path& user_path);
};

RenderedPrompt render_classification_prompt(const ReviewComment& comment, std::span<const PromptOption> options,
                                            const PromptSpec& spec,
                                            const PromptTemplate& tmpl = PromptTemplate::canonical());

/// Keeps head and tail halves of the budget around an elision marker, cutting at line
/// breaks where the halves contain one.
std::string truncate_code(std::string_view code, std::size_t budget);

/// Option lists for each step, precomputed once per (taxonomy, definition style).
struct OptionCatalog {
    std::vector<PromptOption> categories;
    std::vector<PromptOption> groups;
    std::array<std::vector<PromptOption>, kGroupCount> children;
    std::array<std::vector<CategoryId>, kGroupCount> child_ids;
    std::vector<std::string> warnings;  ///< refined-definition fallbacks

    static OptionCatalog build(const Taxonomy& taxonomy, DefinitionStyle style);
};

}  // namespace crevtax
