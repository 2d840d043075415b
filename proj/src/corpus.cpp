#include "crevtax/corpus.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "crevtax/digest.hpp"
#include "crevtax/errors.hpp"
#include "crevtax/text.hpp"
#include "json.hpp"

namespace crevtax {

Corpus::Corpus(std::vector<ReviewComment> items, std::string source) : items_(std::move(items)), source_(std::move(source)) {
    by_id_.reserve(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i) {
        if (text::trim(items_[i].comment_text).empty())
            throw CorpusError(CorpusError::Kind::MalformedRecord, fmt::format("item '{}' has empty comment text", items_[i].id));
        if (!by_id_.emplace(items_[i].id, i).second)
            throw CorpusError(CorpusError::Kind::DuplicateId, fmt::format("DuplicateId({})", items_[i].id));
    }
}

std::optional<std::size_t> Corpus::index_of(const std::string& id) const {
    const auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

std::array<std::size_t, kCategoryCount> Corpus::support() const {
    std::array<std::size_t, kCategoryCount> counts{};
    for (const auto& item : items_) ++counts[crevtax::index_of(item.gold)];
    return counts;
}

std::string Corpus::digest() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& item : items_) {
        arr.push_back({item.id, item.comment_text, item.old_code ? nlohmann::json(*item.old_code) : nlohmann::json(nullptr),
                       item.new_code ? nlohmann::json(*item.new_code) : nlohmann::json(nullptr), to_string(item.gold)});
    }
    return sha256_hex(arr.dump());
}

Corpus Corpus::with_items(std::vector<ReviewComment> items, std::string log_entry) const {
    Corpus out(std::move(items), source_);
    out.filter_log_ = filter_log_;
    out.filter_log_.push_back(std::move(log_entry));
    return out;
}

namespace {

std::optional<std::string> nullable_string(const nlohmann::json& rec, const char* key, std::size_t line) {
    const auto it = rec.find(key);
    if (it == rec.end())
        throw CorpusError(CorpusError::Kind::MalformedRecord, fmt::format("line {}: missing field '{}'", line, key), line);
    if (it->is_null()) return std::nullopt;
    if (!it->is_string())
        throw CorpusError(CorpusError::Kind::MalformedRecord, fmt::format("line {}: field '{}' must be a string or null", line, key),
                          line);
    return it->get<std::string>();
}

}  // namespace

Corpus parse_corpus(std::istream& in, const Taxonomy& taxonomy, std::string source) {
    static const std::set<std::string> kFields{"id", "comment", "old_code", "new_code", "label"};

    std::vector<ReviewComment> items;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;

        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw CorpusError(CorpusError::Kind::MalformedRecord, fmt::format("line {}: {}", line_no, e.what()), line_no);
        }
        if (!rec.is_object())
            throw CorpusError(CorpusError::Kind::MalformedRecord, fmt::format("line {}: expected a JSON object", line_no), line_no);
        for (const auto& [key, _] : rec.items())
            if (!kFields.contains(key))
                throw CorpusError(CorpusError::Kind::MalformedRecord, fmt::format("line {}: unexpected field '{}'", line_no, key),
                                  line_no);

        ReviewComment item;
        auto id = nullable_string(rec, "id", line_no);
        auto comment = nullable_string(rec, "comment", line_no);
        auto label = nullable_string(rec, "label", line_no);
        if (!id || id->empty())
            throw CorpusError(CorpusError::Kind::MalformedRecord, fmt::format("line {}: empty id", line_no), line_no);
        if (!comment || text::trim(*comment).empty())
            throw CorpusError(CorpusError::Kind::MalformedRecord, fmt::format("line {}: empty comment", line_no), line_no);
        if (!label)
            throw CorpusError(CorpusError::Kind::MalformedRecord, fmt::format("line {}: null label", line_no), line_no);

        const auto gold = taxonomy.resolve_label(*label);
        if (!gold)
            throw CorpusError(CorpusError::Kind::UnknownLabel, fmt::format("UnknownLabel(\"{}\", line {})", *label, line_no),
                              line_no);
        if (!ids.insert(*id).second)
            throw CorpusError(CorpusError::Kind::DuplicateId, fmt::format("DuplicateId({}, line {})", *id, line_no), line_no);

        item.id = std::move(*id);
        item.comment_text = std::move(*comment);
        item.old_code = nullable_string(rec, "old_code", line_no);
        item.new_code = nullable_string(rec, "new_code", line_no);
        item.gold = *gold;
        items.push_back(std::move(item));
    }
    return Corpus(std::move(items), std::move(source));
}

Corpus load_corpus(const std::filesystem::path& path, const Taxonomy& taxonomy) {
    std::ifstream in(path);
    if (!in) throw CorpusError(CorpusError::Kind::Io, "cannot open corpus file " + path.string());
    return parse_corpus(in, taxonomy, path.string());
}

void write_corpus(std::ostream& out, const Corpus& corpus, const Taxonomy& taxonomy) {
    for (const auto& item : corpus.items()) {
        nlohmann::ordered_json rec;
        rec["id"] = item.id;
        rec["comment"] = item.comment_text;
        rec["old_code"] = item.old_code ? nlohmann::ordered_json(*item.old_code) : nlohmann::ordered_json(nullptr);
        rec["new_code"] = item.new_code ? nlohmann::ordered_json(*item.new_code) : nlohmann::ordered_json(nullptr);
        rec["label"] = taxonomy.category(item.gold).display_name;
        out << rec.dump() << '\n';
    }
}

Corpus filter_with_code(const Corpus& corpus) {
    std::vector<ReviewComment> kept;
    kept.reserve(corpus.size());
    for (const auto& item : corpus.items())
        if (item.new_code && !item.new_code->empty()) kept.push_back(item);
    const auto excluded = corpus.size() - kept.size();
    return corpus.with_items(std::move(kept), fmt::format("excluded {}", excluded));
}

ClassWeights class_weights(const Corpus& corpus) {
    if (corpus.empty()) throw CorpusError(CorpusError::Kind::EmptyCorpus, "EmptyCorpus: cannot weight an empty corpus");
    ClassWeights w{};
    const auto counts = corpus.support();
    const auto n = static_cast<double>(corpus.size());
    for (std::size_t i = 0; i < kCategoryCount; ++i) w[i] = static_cast<double>(counts[i]) / n;
    return w;
}

std::vector<std::size_t> FoldAssignment::members(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (auto f : fold_of) ++sizes[f];
    return sizes;
}

namespace {

void check_fold_count(const Corpus& corpus, std::size_t k) {
    if (k < 2) throw CorpusError(CorpusError::Kind::BadFoldCount, fmt::format("fold count must be >= 2 (got {})", k));
    if (k > corpus.size())
        throw CorpusError(CorpusError::Kind::BadFoldCount,
                          fmt::format("fold count {} exceeds corpus size {}", k, corpus.size()));
}

}  // namespace

FoldAssignment stratified_kfold(const Corpus& corpus, std::size_t k, std::uint64_t seed) {
    check_fold_count(corpus, k);
    std::mt19937_64 rng(seed);

    // Shuffle within each category, then deal the concatenation round-robin. Each category
    // occupies a contiguous run of the deal, so its per-fold counts differ by at most one,
    // and so do the fold totals.
    std::array<std::vector<std::size_t>, kCategoryCount> by_category;
    for (std::size_t i = 0; i < corpus.size(); ++i) by_category[crevtax::index_of(corpus[i].gold)].push_back(i);

    std::vector<std::size_t> fold_labels(k);
    for (std::size_t f = 0; f < k; ++f) fold_labels[f] = f;
    stable_shuffle(fold_labels, rng);

    FoldAssignment out{k, seed, true, std::vector<std::size_t>(corpus.size(), 0)};
    std::size_t position = 0;
    for (auto& members : by_category) {
        stable_shuffle(members, rng);
        for (auto idx : members) out.fold_of[idx] = fold_labels[position++ % k];
    }
    return out;
}

FoldAssignment plain_kfold(const Corpus& corpus, std::size_t k, std::uint64_t seed) {
    check_fold_count(corpus, k);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    stable_shuffle(order, rng);

    FoldAssignment out{k, seed, false, std::vector<std::size_t>(corpus.size(), 0)};
    for (std::size_t pos = 0; pos < order.size(); ++pos) out.fold_of[order[pos]] = pos % k;
    return out;
}

}  // namespace crevtax
