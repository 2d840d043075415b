#include "crevtax/prompt.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "crevtax/digest.hpp"
#include "crevtax/errors.hpp"
#include "crevtax/text.hpp"

namespace crevtax {

std::string_view to_string(Strategy s) noexcept { return s == Strategy::Flat ? "flat" : "hierarchical"; }

std::string_view to_string(ContextMode c) noexcept {
    return c == ContextMode::CommentOnly ? "comment_only" : "code_and_comment";
}

std::optional<Strategy> strategy_from_string(std::string_view s) {
    if (text::iequals(s, "flat")) return Strategy::Flat;
    if (text::iequals(s, "hierarchical")) return Strategy::Hierarchical;
    return std::nullopt;
}

std::optional<ContextMode> context_from_string(std::string_view s) {
    if (text::iequals(s, "comment_only") || text::iequals(s, "comment-only") || text::iequals(s, "comment"))
        return ContextMode::CommentOnly;
    if (text::iequals(s, "code_and_comment") || text::iequals(s, "code+comment") || text::iequals(s, "code"))
        return ContextMode::CodeAndComment;
    return std::nullopt;
}

nlohmann::ordered_json PromptSpec::to_json() const {
    nlohmann::ordered_json j;
    j["strategy"] = to_string(strategy);
    j["context"] = to_string(context);
    j["definitions"] = to_string(definitions);
    j["max_code_chars"] = max_code_chars;
    return j;
}

PromptSpec PromptSpec::from_json(const nlohmann::json& j) {
    PromptSpec spec;
    const auto strategy = strategy_from_string(j.at("strategy").get<std::string>());
    const auto context = context_from_string(j.at("context").get<std::string>());
    const auto defs = definition_style_from_string(j.at("definitions").get<std::string>());
    if (!strategy || !context || !defs) throw Error("invalid prompt spec: " + j.dump());
    spec.strategy = *strategy;
    spec.context = *context;
    spec.definitions = *defs;
    spec.max_code_chars = j.value("max_code_chars", kDefaultMaxCodeChars);
    if (spec.max_code_chars == 0) throw Error("max_code_chars must be positive");
    return spec;
}

PromptTemplate PromptTemplate::canonical() {
    return PromptTemplate{
        "crevtax-prompt-v1",
        "You are an experienced software engineer who reviews code changes. Your objective is to analyze code review "
        "comments and classify each comment according to the concern it raises, using a defect-based taxonomy of code "
        "review comments.",
        "Answer the following multiple-choice question. Which one of the options below best describes the concern "
        "raised in the review comment? Select exactly one option from the list.\n"
        "\n"
        "Options:\n"
        "{options}\n"
        "\n"
        "Review comment: {comment}\n"
        "\n"
        "Old code:\n"
        "{old_code}\n"
        "\n"
        "New code:\n"
        "{new_code}\n"
        "\n"
        "Answer with the name of the selected option exactly as written in the list, followed by the $ symbol, and "
        "nothing else (for example: <option name>$).",
    };
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open template file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

PromptTemplate PromptTemplate::load(const std::filesystem::path& system_path, const std::filesystem::path& user_path) {
    auto t = canonical();
    if (!system_path.empty()) t.system_text = read_file(system_path);
    if (!user_path.empty()) {
        t.user_text = read_file(user_path);
        while (!t.user_text.empty() && (t.user_text.back() == '\n' || t.user_text.back() == '\r')) t.user_text.pop_back();
        if (t.user_text.find("{options}") == std::string::npos || t.user_text.find("{comment}") == std::string::npos)
            throw Error("user template must contain {options} and {comment}");
    }
    if (!system_path.empty() || !user_path.empty()) t.version = "custom:" + sha256_hex(t.system_text + '\x1f' + t.user_text).substr(0, 16);
    return t;
}

namespace {

std::vector<std::string> split_paragraphs(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find("\n\n", start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 2;
        while (start < s.size() && s[start] == '\n') ++start;
    }
    return out;
}

struct Substitutions {
    const std::string* options = nullptr;
    const std::string* comment = nullptr;
    const std::string* old_code = nullptr;
    const std::string* new_code = nullptr;
};

// Single pass over the template, so placeholder-looking text inside inserted values is left alone.
std::string substitute(std::string_view tmpl, const Substitutions& subs) {
    static constexpr std::pair<std::string_view, const std::string* Substitutions::*> kKeys[] = {
        {"{options}", &Substitutions::options},
        {"{comment}", &Substitutions::comment},
        {"{old_code}", &Substitutions::old_code},
        {"{new_code}", &Substitutions::new_code},
    };
    std::string out;
    out.reserve(tmpl.size() * 2);
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            bool replaced = false;
            for (const auto& [key, member] : kKeys) {
                if (tmpl.substr(i, key.size()) == key) {
                    if (const auto* value = subs.*member) out += *value;
                    i += key.size();
                    replaced = true;
                    break;
                }
            }
            if (replaced) continue;
        }
        out.push_back(tmpl[i++]);
    }
    return out;
}

}  // namespace

RenderedPrompt render_classification_prompt(const ReviewComment& comment, std::span<const PromptOption> options,
                                            const PromptSpec& spec, const PromptTemplate& tmpl) {
    if (options.empty()) throw std::invalid_argument("render_classification_prompt: empty option list");
    if (spec.max_code_chars == 0) throw std::invalid_argument("render_classification_prompt: max_code_chars must be > 0");

    RenderedPrompt out;
    out.system_text = tmpl.system_text;

    std::set<std::string> seen;
    std::string option_block;
    for (const auto& opt : options) {
        if (!seen.insert(text::normalize_name(opt.name)).second)
            throw std::invalid_argument("render_classification_prompt: duplicate option '" + opt.name + "'");
        if (!option_block.empty()) option_block.push_back('\n');
        option_block += opt.name;
        option_block += ": ";
        option_block += text::collapse_whitespace(text::trim(opt.definition));
        out.options.push_back(opt.name);
    }

    const bool with_code = spec.context == ContextMode::CodeAndComment;
    std::optional<std::string> old_code;
    std::optional<std::string> new_code;
    if (with_code) {
        if (comment.old_code && !comment.old_code->empty()) old_code = truncate_code(*comment.old_code, spec.max_code_chars);
        if (comment.new_code && !comment.new_code->empty()) new_code = truncate_code(*comment.new_code, spec.max_code_chars);
        out.degraded_context = !old_code || !new_code;
    }

    Substitutions subs{&option_block, &comment.comment_text, old_code ? &*old_code : nullptr,
                       new_code ? &*new_code : nullptr};
    std::string user;
    for (const auto& para : split_paragraphs(tmpl.user_text)) {
        if (para.find("{old_code}") != std::string::npos && !old_code) continue;
        if (para.find("{new_code}") != std::string::npos && !new_code) continue;
        if (!user.empty()) user += "\n\n";
        user += substitute(para, subs);
    }
    out.user_text = std::move(user);
    return out;
}

std::string truncate_code(std::string_view code, std::size_t budget) {
    if (budget == 0) throw std::invalid_argument("truncate_code: budget must be > 0");
    if (code.size() <= budget) return std::string(code);

    const std::size_t half = budget / 2;

    std::size_t head_end = text::utf8_floor(code, half);
    if (const auto nl = code.rfind('\n', head_end == 0 ? 0 : head_end - 1); nl != std::string_view::npos && nl > 0 && nl < head_end)
        head_end = nl + 1;

    std::size_t tail_begin = code.size() - half;
    while (tail_begin < code.size() && (static_cast<unsigned char>(code[tail_begin]) & 0xC0) == 0x80) ++tail_begin;
    if (tail_begin > 0 && code[tail_begin - 1] != '\n') {
        if (const auto nl = code.find('\n', tail_begin); nl != std::string_view::npos && nl + 1 < code.size())
            tail_begin = nl + 1;
    }

    const auto head = code.substr(0, head_end);
    const auto tail = code.substr(tail_begin);
    std::string out(head);
    if (!out.empty() && out.back() != '\n') out.push_back('\n');
    out += fmt::format("[... {} characters omitted ...]\n", code.size() - head.size() - tail.size());
    out += tail;
    return out;
}

OptionCatalog OptionCatalog::build(const Taxonomy& taxonomy, DefinitionStyle style) {
    OptionCatalog cat;
    for (const auto& c : taxonomy.categories()) {
        auto def = taxonomy.definition_text(c.id, style);
        if (def.fell_back)
            cat.warnings.push_back(fmt::format("no refined definition for category {}; using brief text", to_string(c.id)));
        PromptOption opt{c.display_name, std::move(def.text)};
        cat.children[index_of(c.group)].push_back(opt);
        cat.child_ids[index_of(c.group)].push_back(c.id);
        cat.categories.push_back(std::move(opt));
    }
    for (const auto g : kAllGroups) {
        auto def = taxonomy.definition_text(g, style);
        if (def.fell_back)
            cat.warnings.push_back(fmt::format("no refined definition for group {}; using brief text", to_string(g)));
        cat.groups.push_back({taxonomy.group(g).display_name, std::move(def.text)});
    }
    return cat;
}

}  // namespace crevtax
