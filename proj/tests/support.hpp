#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "crevtax/classifier.hpp"
#include "crevtax/corpus.hpp"
#include "crevtax/taxonomy.hpp"

namespace crevtax::fixtures {

// Table 1 counts, typed in independently of the built-in taxonomy.
inline constexpr std::array<std::size_t, kCategoryCount> kTable1Counts{12, 56,  90, 34, 4,  14, 30, 201, 184,
                                                                       64, 76, 73, 387, 275, 87, 83, 158};

/// counts[i] items of category i, in taxonomy order, each with old and new code.
Corpus counted_corpus(std::span<const std::size_t> counts, const std::string& prefix = "c");

/// n items with uniformly drawn labels.
Corpus random_corpus(std::size_t n, std::uint64_t seed);

/// Labels are category indices; kUnparseable (-1) gives an unparseable prediction.
std::vector<Prediction> predictions_from(const Corpus& corpus, std::span<const int> labels);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

std::string read_file(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace crevtax::fixtures
