#include "crevtax/predictions_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>

#include "crevtax/errors.hpp"
#include "crevtax/text.hpp"

namespace crevtax {

namespace {

std::optional<UnparseableReason> reason_from_string(std::string_view s) {
    for (auto r : {UnparseableReason::NoMatch, UnparseableReason::Ambiguous, UnparseableReason::Empty})
        if (to_string(r) == s) return r;
    return std::nullopt;
}

CorpusError record_error(std::string_view source, std::size_t line, const std::string& what,
                         CorpusError::Kind kind = CorpusError::Kind::MalformedRecord) {
    return CorpusError(kind, fmt::format("{}:{}: {}", source, line, what), line);
}

}  // namespace

LabelMap parse_label_map(const nlohmann::json& j, const Taxonomy& taxonomy) {
    if (!j.is_object()) throw Error("label map must be a JSON object of external label -> category");
    LabelMap map;
    for (const auto& [key, value] : j.items()) {
        if (!value.is_string()) throw Error(fmt::format("label map entry '{}' is not a string", key));
        const auto target = taxonomy.resolve_label(value.get<std::string>());
        if (!target) throw Error(fmt::format("label map entry '{}' names unknown category '{}'", key, value.get<std::string>()));
        map[text::normalize_name(key)] = *target;
    }
    return map;
}

LabelMap load_label_map(const std::filesystem::path& path, const Taxonomy& taxonomy) {
    std::ifstream in(path);
    if (!in) throw CorpusError(CorpusError::Kind::Io, "cannot open label map " + path.string());
    try {
        return parse_label_map(nlohmann::json::parse(in), taxonomy);
    } catch (const nlohmann::json::exception& e) {
        throw Error(fmt::format("{}: {}", path.string(), e.what()));
    }
}

nlohmann::ordered_json prediction_json(const Prediction& p, std::string_view run_digest) {
    nlohmann::ordered_json j;
    j["comment_id"] = p.comment_id;
    j["outcome"] = p.category ? "classified" : "unparseable";
    j["category"] = p.category ? nlohmann::ordered_json(std::string(to_string(*p.category))) : nlohmann::ordered_json(nullptr);
    j["step1_group"] =
        p.step1_group ? nlohmann::ordered_json(std::string(to_string(*p.step1_group))) : nlohmann::ordered_json(nullptr);
    j["unparseable_reason"] = p.unparseable_reason ? nlohmann::ordered_json(std::string(to_string(*p.unparseable_reason)))
                                                   : nlohmann::ordered_json(nullptr);
    j["raw_responses"] = p.raw_responses;
    j["model_id"] = p.model_id;
    j["spec"] = p.spec ? p.spec->to_json() : nlohmann::ordered_json(nullptr);
    j["run_digest"] = std::string(run_digest);
    return j;
}

void write_predictions(std::ostream& out, std::span<const Prediction> predictions, std::string_view run_digest) {
    for (const auto& p : predictions) out << prediction_json(p, run_digest).dump() << '\n';
}

std::vector<Prediction> read_predictions(std::istream& in, const Taxonomy& taxonomy, std::string_view source,
                                         const LabelMap* labels) {
    std::vector<Prediction> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw record_error(source, line_no, e.what());
        }
        if (!j.is_object() || !j.contains("comment_id") || !j["comment_id"].is_string())
            throw record_error(source, line_no, "record needs a string comment_id");

        Prediction p;
        p.comment_id = j["comment_id"].get<std::string>();
        if (!seen.insert(p.comment_id).second)
            throw record_error(source, line_no, "duplicate comment_id " + p.comment_id, CorpusError::Kind::DuplicateId);

        const auto cat = j.find("category");
        if (cat != j.end() && !cat->is_null()) {
            if (!cat->is_string()) throw record_error(source, line_no, "category must be a string or null");
            const auto label = cat->get<std::string>();
            std::optional<CategoryId> id;
            if (labels) {
                if (auto it = labels->find(text::normalize_name(label)); it != labels->end()) id = it->second;
            }
            if (!id) id = taxonomy.resolve_label(label);
            if (!id)
                throw record_error(source, line_no, fmt::format("unknown category '{}'", label),
                                   CorpusError::Kind::UnknownLabel);
            p.category = id;
        } else {
            p.unparseable_reason = UnparseableReason::NoMatch;
            if (auto r = j.find("unparseable_reason"); r != j.end() && r->is_string())
                if (auto parsed = reason_from_string(r->get<std::string>())) p.unparseable_reason = parsed;
        }

        if (auto g = j.find("step1_group"); g != j.end() && g->is_string()) {
            p.step1_group = taxonomy.resolve_group(g->get<std::string>());
            if (!p.step1_group) throw record_error(source, line_no, "unknown step1_group " + g->get<std::string>());
        }
        if (auto r = j.find("raw_responses"); r != j.end() && r->is_array())
            for (const auto& s : *r) p.raw_responses.push_back(s.get<std::string>());
        if (auto m = j.find("model_id"); m != j.end() && m->is_string()) p.model_id = m->get<std::string>();
        if (auto s = j.find("spec"); s != j.end() && s->is_object()) p.spec = PromptSpec::from_json(*s);
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path, const Taxonomy& taxonomy,
                                         const LabelMap* labels) {
    std::ifstream in(path);
    if (!in) throw CorpusError(CorpusError::Kind::Io, "cannot open predictions file " + path.string());
    return read_predictions(in, taxonomy, path.string(), labels);
}

}  // namespace crevtax
