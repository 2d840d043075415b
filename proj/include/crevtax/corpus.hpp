#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "crevtax/taxonomy.hpp"

namespace crevtax {

struct ReviewComment {
    std::string id;
    std::string comment_text;
    std::optional<std::string> old_code;
    std::optional<std::string> new_code;
    CategoryId gold{};

    bool operator==(const ReviewComment&) const = default;
};

class Corpus {
public:
    Corpus() = default;
    /// Validates id uniqueness and non-empty comment text.
    explicit Corpus(std::vector<ReviewComment> items, std::string source = {});

    [[nodiscard]] const std::vector<ReviewComment>& items() const noexcept { return items_; }
    [[nodiscard]] std::size_t size() const noexcept { return items_.size(); }
    [[nodiscard]] bool empty() const noexcept { return items_.empty(); }
    [[nodiscard]] const ReviewComment& operator[](std::size_t i) const { return items_[i]; }

    [[nodiscard]] const std::string& source() const noexcept { return source_; }
    [[nodiscard]] const std::vector<std::string>& filter_log() const noexcept { return filter_log_; }

    [[nodiscard]] std::optional<std::size_t> index_of(const std::string& id) const;

    /// Per-category gold counts in taxonomy order.
    [[nodiscard]] std::array<std::size_t, kCategoryCount> support() const;

    /// Stable over item order and content; used in run manifests.
    [[nodiscard]] std::string digest() const;

    Corpus with_items(std::vector<ReviewComment> items, std::string log_entry) const;

private:
    std::vector<ReviewComment> items_;
    std::string source_;
    std::vector<std::string> filter_log_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// Line-delimited JSON records with fields id, comment, old_code, new_code, label.
Corpus load_corpus(const std::filesystem::path& path, const Taxonomy& taxonomy);
Corpus parse_corpus(std::istream& in, const Taxonomy& taxonomy, std::string source = "<stream>");
void write_corpus(std::ostream& out, const Corpus& corpus, const Taxonomy& taxonomy);

/// Keeps items whose new_code is present and non-empty.
Corpus filter_with_code(const Corpus& corpus);

/// w_i = support_i / N, indexed by category.
using ClassWeights = std::array<double, kCategoryCount>;
ClassWeights class_weights(const Corpus& corpus);

struct FoldAssignment {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    bool stratified = true;
    std::vector<std::size_t> fold_of;  ///< aligned with corpus order

    [[nodiscard]] std::vector<std::size_t> members(std::size_t fold) const;
    [[nodiscard]] std::vector<std::size_t> fold_sizes() const;
};

/// Deterministic for a fixed (corpus, k, seed). Per-category fold counts differ by at most one.
FoldAssignment stratified_kfold(const Corpus& corpus, std::size_t k, std::uint64_t seed);
FoldAssignment plain_kfold(const Corpus& corpus, std::size_t k, std::uint64_t seed);

}  // namespace crevtax
