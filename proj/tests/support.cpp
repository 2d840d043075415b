#include "support.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <unistd.h>

#include "crevtax/digest.hpp"
#include "crevtax/metrics.hpp"
#include "crevtax/text.hpp"

namespace crevtax::fixtures {

namespace {
[[maybe_unused]] const bool kQuiet = (text::set_warnings_enabled(false), true);
}

Corpus counted_corpus(std::span<const std::size_t> counts, const std::string& prefix) {
    std::vector<ReviewComment> items;
    std::size_t n = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        for (std::size_t j = 0; j < counts[c]; ++j, ++n) {
            ReviewComment item;
            item.id = fmt::format("{}{:05}", prefix, n);
            item.comment_text = fmt::format("review comment {} about category {}", n, c);
            item.old_code = fmt::format("int v{} = {};\n", n, j);
            item.new_code = fmt::format("int v{} = {};\n", n, j + 1);
            item.gold = category_at(c);
            items.push_back(std::move(item));
        }
    }
    return Corpus(std::move(items), "fixture");
}

Corpus random_corpus(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<ReviewComment> items;
    for (std::size_t i = 0; i < n; ++i) {
        ReviewComment item;
        item.id = fmt::format("r{:05}", i);
        item.comment_text = fmt::format("comment number {}", i);
        item.old_code = "a = 1\n";
        item.new_code = "a = 2\n";
        item.gold = category_at(bounded_draw(rng, kCategoryCount));
        items.push_back(std::move(item));
    }
    return Corpus(std::move(items), "random");
}

std::vector<Prediction> predictions_from(const Corpus& corpus, std::span<const int> labels) {
    std::vector<Prediction> out;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        Prediction p;
        p.comment_id = corpus[i].id;
        if (labels[i] == kUnparseable)
            p.unparseable_reason = UnparseableReason::NoMatch;
        else
            p.category = category_at(static_cast<std::size_t>(labels[i]));
        p.model_id = "test";
        out.push_back(std::move(p));
    }
    return out;
}

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / fmt::format("crevtax-test-{}-{}", ::getpid(), name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace crevtax::fixtures
