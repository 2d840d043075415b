#include "crevtax/taxonomy.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>

#include "crevtax/digest.hpp"
#include "crevtax/errors.hpp"
#include "crevtax/text.hpp"

namespace crevtax {

namespace {

struct BuiltinCategory {
    CategoryId id;
    std::string_view canonical;
    std::string_view display;
    std::string_view brief;
    std::optional<double> rating;
    std::uint32_t frequency;
    std::initializer_list<std::string_view> extra_aliases;
};

// Brief definitions, ratings and frequencies of the 1,828-comment reference set.
const std::array<BuiltinCategory, kCategoryCount>& builtin_categories() {
    static const std::array<BuiltinCategory, kCategoryCount> table{{
        {CategoryId::FunctionalDefect, "FunctionalDefect", "Functional defects",
         "Functionality is missing or implemented incorrectly and such defects often require additional code or larger "
         "modifications to the existing solution.",
         4.38, 12, {"Functional defect"}},
        {CategoryId::Logical, "Logical", "Logical", "Control flow, comparison related, and logical errors.", 4.11, 56, {}},
        {CategoryId::Validation, "Validation", "Validation",
         "Validation mistakes or mistakes made when detecting an invalid value are of this class. Any kind of user data "
         "sanitization-related comments are in this category, too.",
         4.16, 90, {}},
        {CategoryId::Resource, "Resource", "Resource",
         "Resource (variables, memory, files, database) initialization, manipulation, and release.", 3.83, 34, {}},
        {CategoryId::Timing, "Timing", "Timing", "Potential issues due to incorrect thread synchronization.", 3.5, 4, {}},
        {CategoryId::SupportIssues, "SupportIssues", "Support issues",
         "Issues related to support systems and libraries or their configurations.", 3.51, 14, {"Support"}},
        {CategoryId::Interface, "Interface", "Interface",
         "Mistakes when interacting with other parts of the software such as existing code library, hardware device, "
         "database, or operating system.",
         4.10, 30, {}},
        {CategoryId::SolutionApproach, "SolutionApproach", "Solution approach",
         "Suggestions to adopt an alternate algorithm or data structure.", 4.00, 201, {}},
        {CategoryId::CodeOrganization, "CodeOrganization", "Code Organization",
         "Refactoring suggestions such as those included in Martin Fowlers\xE2\x80\x99s catalog.", 3.68, 184,
         {"Organization of Code"}},
        {CategoryId::AlternateOutput, "AlternateOutput", "Alternate Output",
         "Comments that suggest modifying the error message, toast message, alert, or change what is returned by a "
         "function.",
         3.63, 64, {}},
        {CategoryId::NamingConvention, "NamingConvention", "Naming Convention",
         "Violations of identifier naming conventions.", 3.43, 76, {}},
        {CategoryId::VisualRepresentation, "VisualRepresentation", "Visual Representation",
         "Whitespace, blank lines, code rearrangements, and indentation-related comments.", 2.92, 73, {}},
        {CategoryId::Documentation, "Documentation", "Documentation",
         "Suggestions to add /modify comments or documentation to aid code comprehension.", 3.73, 387, {}},
        {CategoryId::Question, "Question", "Question",
         "Questions to understand the design or implementation choices.", 3.99, 275, {}},
        {CategoryId::DesignDiscussion, "DesignDiscussion", "Design discussion",
         "Discussions on design direction, design pattern, and software architecture.", 3.87, 87, {}},
        {CategoryId::Praise, "Praise", "Praise", "Complement for a code.", 3.03, 83, {}},
        {CategoryId::FalsePositive, "FalsePositive", "False positive",
         "If a review comment raises an invalid bug or concern.", std::nullopt, 158, {"False positives"}},
    }};
    return table;
}

struct BuiltinGroup {
    GroupId id;
    std::string_view canonical;
    std::string_view display;
    std::string_view brief;
};

const std::array<BuiltinGroup, kGroupCount>& builtin_groups() {
    static const std::array<BuiltinGroup, kGroupCount> table{{
        {GroupId::Functional, "Functional", "Functional",
         "Functional defects in the code: missing or incorrect functionality, control flow and logical errors, "
         "validation of values and user data, resource handling, thread synchronization, support systems and "
         "libraries, and mistakes when interacting with other parts of the software."},
        {GroupId::Refactoring, "Refactoring", "Refactoring",
         "Suggestions to improve working code: alternate algorithms or data structures, refactoring and code "
         "organization, changes to messages or returned values, identifier naming, and whitespace or indentation."},
        {GroupId::Documentation, "Documentation", "Documentation",
         "Suggestions to add /modify comments or documentation to aid code comprehension."},
        {GroupId::Discussion, "Discussion", "Discussion",
         "Comments that discuss the change rather than report a defect: questions about design or implementation "
         "choices, discussions on design direction and architecture, and compliments for the code."},
        {GroupId::FalsePositive, "FalsePositive", "False positive",
         "If a review comment raises an invalid bug or concern."},
    }};
    return table;
}

constexpr std::uint64_t kReferenceTotal = 1828;

std::string require_string(const nlohmann::json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string())
        throw TaxonomyError(TaxonomyError::Kind::Malformed, fmt::format("{}: missing string field '{}'", where, key));
    return it->get<std::string>();
}

std::string optional_string(const nlohmann::json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_string())
        throw TaxonomyError(TaxonomyError::Kind::Malformed, fmt::format("field '{}' must be a string", key));
    return it->get<std::string>();
}

}  // namespace

std::string_view to_string(CategoryId id) noexcept { return builtin_categories()[index_of(id)].canonical; }
std::string_view to_string(GroupId id) noexcept { return builtin_groups()[index_of(id)].canonical; }

std::string_view to_string(DefinitionStyle style) noexcept {
    return style == DefinitionStyle::Brief ? "brief" : "refined";
}

std::optional<CategoryId> category_from_id(std::string_view s) {
    for (const auto& c : builtin_categories())
        if (text::iequals(c.canonical, text::trim(s))) return c.id;
    return std::nullopt;
}

std::optional<GroupId> group_from_id(std::string_view s) {
    for (const auto& g : builtin_groups())
        if (text::iequals(g.canonical, text::trim(s))) return g.id;
    return std::nullopt;
}

std::optional<DefinitionStyle> definition_style_from_string(std::string_view s) {
    if (text::iequals(s, "brief")) return DefinitionStyle::Brief;
    if (text::iequals(s, "refined")) return DefinitionStyle::Refined;
    return std::nullopt;
}

Taxonomy Taxonomy::builtin() {
    Taxonomy t;
    for (const auto& b : builtin_categories()) {
        auto& def = t.categories_[index_of(b.id)];
        def.id = b.id;
        def.group = group_of(b.id);
        def.display_name = std::string(b.display);
        def.brief_definition = std::string(b.brief);
        def.usefulness_rating = b.rating;
        def.reference_frequency = b.frequency;
        def.aliases.emplace_back(b.canonical);
        for (auto a : b.extra_aliases) def.aliases.emplace_back(a);
    }
    for (const auto& g : builtin_groups()) {
        auto& def = t.groups_[index_of(g.id)];
        def.id = g.id;
        def.display_name = std::string(g.display);
        def.brief_definition = std::string(g.brief);
    }
    t.declared_total_ = kReferenceTotal;
    t.validate();
    return t;
}

Taxonomy Taxonomy::from_json(const nlohmann::json& doc, const TaxonomyLoadOptions& options) {
    if (!doc.is_object() || !doc.contains("categories") || !doc["categories"].is_array())
        throw TaxonomyError(TaxonomyError::Kind::Malformed, "definitions file must be an object with a 'categories' array");

    // Start from the built-in table so display names, aliases and group summaries have defaults.
    Taxonomy t = builtin();
    t.declared_total_.reset();
    std::array<bool, kCategoryCount> seen{};

    for (std::size_t n = 0; n < doc["categories"].size(); ++n) {
        const auto& rec = doc["categories"][n];
        const std::string where = fmt::format("categories[{}]", n);
        if (!rec.is_object()) throw TaxonomyError(TaxonomyError::Kind::Malformed, where + ": expected an object");

        const std::string raw_id = require_string(rec, "id", where);
        auto id = category_from_id(raw_id);
        if (!id) id = t.resolve_label(raw_id);
        if (!id)
            throw TaxonomyError(TaxonomyError::Kind::Malformed, fmt::format("{}: unknown category id '{}'", where, raw_id));
        if (seen[index_of(*id)])
            throw TaxonomyError(TaxonomyError::Kind::DuplicateCategory,
                                fmt::format("DuplicateCategory({})", to_string(*id)));
        seen[index_of(*id)] = true;

        const std::string raw_group = require_string(rec, "group", where);
        auto group = group_from_id(raw_group);
        if (!group) group = t.resolve_group(raw_group);
        if (!group || *group != group_of(*id))
            throw TaxonomyError(TaxonomyError::Kind::BadGroup,
                                fmt::format("BadGroup({} -> '{}'), expected {}", to_string(*id), raw_group,
                                            to_string(group_of(*id))));

        auto& def = t.categories_[index_of(*id)];
        def.brief_definition = require_string(rec, "brief", where);
        def.refined_definition = optional_string(rec, "refined");
        if (auto name = optional_string(rec, "name"); !name.empty()) {
            if (!text::iequals(name, def.display_name)) def.aliases.push_back(def.display_name);
            def.display_name = std::move(name);
        }
        if (const auto it = rec.find("aliases"); it != rec.end() && it->is_array())
            for (const auto& a : *it) def.aliases.push_back(a.get<std::string>());

        def.usefulness_rating.reset();
        if (const auto it = rec.find("rating"); it != rec.end() && !it->is_null()) {
            if (!it->is_number())
                throw TaxonomyError(TaxonomyError::Kind::BadRating, where + ": rating must be a number or null");
            def.usefulness_rating = it->get<double>();
        }
        def.reference_frequency = 0;
        if (const auto it = rec.find("frequency"); it != rec.end() && !it->is_null()) {
            if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
                throw TaxonomyError(TaxonomyError::Kind::Malformed, where + ": frequency must be a non-negative integer");
            def.reference_frequency = it->get<std::uint32_t>();
        }
    }

    for (std::size_t i = 0; i < kCategoryCount; ++i)
        if (!seen[i])
            throw TaxonomyError(TaxonomyError::Kind::MissingCategory,
                                fmt::format("MissingCategory({})", to_string(category_at(i))));

    if (const auto it = doc.find("groups"); it != doc.end()) {
        if (!it->is_array()) throw TaxonomyError(TaxonomyError::Kind::Malformed, "'groups' must be an array");
        for (const auto& rec : *it) {
            const std::string raw_id = require_string(rec, "id", "groups");
            auto gid = group_from_id(raw_id);
            if (!gid) gid = t.resolve_group(raw_id);
            if (!gid) throw TaxonomyError(TaxonomyError::Kind::BadGroup, fmt::format("unknown group '{}'", raw_id));
            auto& g = t.groups_[index_of(*gid)];
            if (auto brief = optional_string(rec, "brief"); !brief.empty()) g.brief_definition = std::move(brief);
            g.refined_definition = optional_string(rec, "refined");
            if (auto name = optional_string(rec, "name"); !name.empty()) g.display_name = std::move(name);
        }
    }

    if (const auto it = doc.find("total"); it != doc.end() && !it->is_null()) {
        if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
            throw TaxonomyError(TaxonomyError::Kind::Malformed, "'total' must be a non-negative integer");
        t.declared_total_ = it->get<std::uint64_t>();
        if (t.frequency_total() != *t.declared_total_) {
            const auto msg = fmt::format("frequency sum {} differs from declared total {}", t.frequency_total(),
                                         *t.declared_total_);
            if (!options.allow_frequency_mismatch) throw TaxonomyError(TaxonomyError::Kind::FrequencyMismatch, msg);
            text::warn(msg);
        }
    }

    t.validate();
    return t;
}

Taxonomy Taxonomy::load(const std::filesystem::path& path, const TaxonomyLoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw TaxonomyError(TaxonomyError::Kind::Malformed, "cannot open definitions file " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw TaxonomyError(TaxonomyError::Kind::Malformed, path.string() + ": " + e.what());
    }
    return from_json(doc, options);
}

void Taxonomy::validate() const {
    std::set<std::string> names;
    for (const auto& c : categories_) {
        if (text::trim(c.brief_definition).empty())
            throw TaxonomyError(TaxonomyError::Kind::Malformed, fmt::format("{}: empty brief definition", to_string(c.id)));
        if (c.usefulness_rating && (*c.usefulness_rating < 1.0 || *c.usefulness_rating > 5.0))
            throw TaxonomyError(TaxonomyError::Kind::BadRating,
                                fmt::format("{}: rating {} outside [1,5]", to_string(c.id), *c.usefulness_rating));
        if (!names.insert(text::normalize_name(c.display_name)).second)
            throw TaxonomyError(TaxonomyError::Kind::DuplicateCategory,
                                fmt::format("display name '{}' is not unique", c.display_name));
    }
    for (const auto& g : groups_)
        if (text::trim(g.brief_definition).empty())
            throw TaxonomyError(TaxonomyError::Kind::Malformed, fmt::format("group {}: empty definition", to_string(g.id)));
}

std::span<const CategoryDef> Taxonomy::children_of(GroupId group) const noexcept {
    std::size_t first = kCategoryCount;
    std::size_t last = 0;
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
        if (group_of(category_at(i)) == group) {
            first = std::min(first, i);
            last = i + 1;
        }
    }
    return std::span<const CategoryDef>(categories_).subspan(first, last - first);
}

ResolvedDefinition Taxonomy::definition_text(CategoryId id, DefinitionStyle style) const {
    const auto& c = category(id);
    if (style == DefinitionStyle::Brief) return {c.brief_definition, false};
    if (!c.refined_definition.empty()) return {c.refined_definition, false};
    return {c.brief_definition, true};
}

ResolvedDefinition Taxonomy::definition_text(GroupId id, DefinitionStyle style) const {
    const auto& g = group(id);
    if (style == DefinitionStyle::Brief) return {g.brief_definition, false};
    if (!g.refined_definition.empty()) return {g.refined_definition, false};
    return {g.brief_definition, true};
}

std::optional<CategoryId> Taxonomy::resolve_label(std::string_view label) const {
    const auto needle = text::normalize_name(label);
    if (needle.empty()) return std::nullopt;
    for (const auto& c : categories_) {
        if (text::normalize_name(c.display_name) == needle) return c.id;
        for (const auto& a : c.aliases)
            if (text::normalize_name(a) == needle) return c.id;
    }
    return std::nullopt;
}

std::optional<GroupId> Taxonomy::resolve_group(std::string_view label) const {
    const auto needle = text::normalize_name(label);
    for (const auto& g : groups_)
        if (text::normalize_name(g.display_name) == needle || text::normalize_name(to_string(g.id)) == needle)
            return g.id;
    return std::nullopt;
}

std::uint64_t Taxonomy::frequency_total() const noexcept {
    std::uint64_t total = 0;
    for (const auto& c : categories_) total += c.reference_frequency;
    return total;
}

bool Taxonomy::has_refined_definitions() const noexcept {
    for (const auto& c : categories_)
        if (!c.refined_definition.empty()) return true;
    return false;
}

nlohmann::json Taxonomy::to_json() const {
    nlohmann::json doc;
    doc["total"] = declared_total_ ? nlohmann::json(*declared_total_) : nlohmann::json(nullptr);
    auto& groups = doc["groups"] = nlohmann::json::array();
    for (const auto& g : groups_)
        groups.push_back({{"id", to_string(g.id)},
                          {"name", g.display_name},
                          {"brief", g.brief_definition},
                          {"refined", g.refined_definition}});
    auto& cats = doc["categories"] = nlohmann::json::array();
    for (const auto& c : categories_) {
        cats.push_back({{"id", to_string(c.id)},
                        {"group", to_string(c.group)},
                        {"name", c.display_name},
                        {"brief", c.brief_definition},
                        {"refined", c.refined_definition},
                        {"rating", c.usefulness_rating ? nlohmann::json(*c.usefulness_rating) : nlohmann::json(nullptr)},
                        {"frequency", c.reference_frequency}});
    }
    return doc;
}

std::string Taxonomy::digest() const { return sha256_hex(to_json().dump()); }

}  // namespace crevtax
