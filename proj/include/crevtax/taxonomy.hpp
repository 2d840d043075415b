#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace crevtax {

enum class GroupId : std::uint8_t { Functional, Refactoring, Documentation, Discussion, FalsePositive };

/// Listed in taxonomy table order; members of one group are contiguous.
enum class CategoryId : std::uint8_t {
    FunctionalDefect,
    Logical,
    Validation,
    Resource,
    Timing,
    SupportIssues,
    Interface,
    SolutionApproach,
    CodeOrganization,
    AlternateOutput,
    NamingConvention,
    VisualRepresentation,
    Documentation,
    Question,
    DesignDiscussion,
    Praise,
    FalsePositive,
};

inline constexpr std::size_t kGroupCount = 5;
inline constexpr std::size_t kCategoryCount = 17;

inline constexpr std::array<GroupId, kGroupCount> kAllGroups{
    GroupId::Functional, GroupId::Refactoring, GroupId::Documentation, GroupId::Discussion, GroupId::FalsePositive};

enum class DefinitionStyle { Brief, Refined };

constexpr std::size_t index_of(CategoryId id) noexcept { return static_cast<std::size_t>(id); }
constexpr std::size_t index_of(GroupId id) noexcept { return static_cast<std::size_t>(id); }
constexpr CategoryId category_at(std::size_t i) noexcept { return static_cast<CategoryId>(i); }
constexpr GroupId group_at(std::size_t i) noexcept { return static_cast<GroupId>(i); }

/// Fixed two-level partition of the categories.
constexpr GroupId group_of(CategoryId id) noexcept {
    const auto i = index_of(id);
    if (i <= index_of(CategoryId::Interface)) return GroupId::Functional;
    if (i <= index_of(CategoryId::VisualRepresentation)) return GroupId::Refactoring;
    if (id == CategoryId::Documentation) return GroupId::Documentation;
    if (id == CategoryId::FalsePositive) return GroupId::FalsePositive;
    return GroupId::Discussion;
}

/// Canonical identifiers ("FunctionalDefect", "Discussion", ...).
std::string_view to_string(CategoryId id) noexcept;
std::string_view to_string(GroupId id) noexcept;
std::string_view to_string(DefinitionStyle style) noexcept;

/// Canonical identifier lookup, case-insensitive. Display names are handled by Taxonomy.
std::optional<CategoryId> category_from_id(std::string_view s);
std::optional<GroupId> group_from_id(std::string_view s);
std::optional<DefinitionStyle> definition_style_from_string(std::string_view s);

struct CategoryDef {
    CategoryId id{};
    GroupId group{};
    std::string display_name;
    std::string brief_definition;
    std::string refined_definition;  ///< empty when none was loaded
    std::optional<double> usefulness_rating;
    std::uint32_t reference_frequency = 0;
    std::vector<std::string> aliases;

    bool operator==(const CategoryDef&) const = default;
};

struct GroupDef {
    GroupId id{};
    std::string display_name;
    std::string brief_definition;
    std::string refined_definition;

    bool operator==(const GroupDef&) const = default;
};

struct ResolvedDefinition {
    std::string text;
    bool fell_back = false;  ///< Refined was requested but only Brief text exists
};

struct TaxonomyLoadOptions {
    /// Frequency/total disagreement is downgraded to a warning (custom corpora).
    bool allow_frequency_mismatch = false;
};

/// Immutable after construction; safe for concurrent reads.
class Taxonomy {
public:
    /// Table ratings, brief definitions and frequencies; no refined texts.
    static Taxonomy builtin();

    static Taxonomy from_json(const nlohmann::json& doc, const TaxonomyLoadOptions& options = {});
    static Taxonomy load(const std::filesystem::path& path, const TaxonomyLoadOptions& options = {});

    [[nodiscard]] const std::array<CategoryDef, kCategoryCount>& categories() const noexcept { return categories_; }
    [[nodiscard]] const std::array<GroupDef, kGroupCount>& groups() const noexcept { return groups_; }
    [[nodiscard]] const CategoryDef& category(CategoryId id) const noexcept { return categories_[index_of(id)]; }
    [[nodiscard]] const GroupDef& group(GroupId id) const noexcept { return groups_[index_of(id)]; }

    /// Children in table order.
    [[nodiscard]] std::span<const CategoryDef> children_of(GroupId group) const noexcept;

    [[nodiscard]] ResolvedDefinition definition_text(CategoryId id, DefinitionStyle style) const;
    [[nodiscard]] ResolvedDefinition definition_text(GroupId id, DefinitionStyle style) const;

    /// Display names, canonical ids and aliases, case- and whitespace-insensitive.
    [[nodiscard]] std::optional<CategoryId> resolve_label(std::string_view label) const;
    [[nodiscard]] std::optional<GroupId> resolve_group(std::string_view label) const;

    [[nodiscard]] std::uint64_t frequency_total() const noexcept;
    [[nodiscard]] std::optional<std::uint64_t> declared_total() const noexcept { return declared_total_; }
    [[nodiscard]] bool has_refined_definitions() const noexcept;

    [[nodiscard]] nlohmann::json to_json() const;
    [[nodiscard]] std::string digest() const;

    bool operator==(const Taxonomy&) const = default;

private:
    Taxonomy() = default;
    void validate() const;

    std::array<CategoryDef, kCategoryCount> categories_{};
    std::array<GroupDef, kGroupCount> groups_{};
    std::optional<std::uint64_t> declared_total_;
};

}  // namespace crevtax
