#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "crevtax/classifier.hpp"

namespace crevtax {

/// External label (normalized) to category, for predictions produced outside this tool.
using LabelMap = std::map<std::string, CategoryId>;

LabelMap parse_label_map(const nlohmann::json& j, const Taxonomy& taxonomy);
LabelMap load_label_map(const std::filesystem::path& path, const Taxonomy& taxonomy);

nlohmann::ordered_json prediction_json(const Prediction& p, std::string_view run_digest);

/// One JSON record per line, in the given order.
void write_predictions(std::ostream& out, std::span<const Prediction> predictions, std::string_view run_digest);

/// Reads files written by write_predictions as well as minimal imported files holding only
/// comment_id and category. Category labels go through `labels` first, then the taxonomy's
/// names and aliases; a null category means Unparseable.
std::vector<Prediction> read_predictions(std::istream& in, const Taxonomy& taxonomy, std::string_view source = "<stream>",
                                         const LabelMap* labels = nullptr);
std::vector<Prediction> load_predictions(const std::filesystem::path& path, const Taxonomy& taxonomy,
                                         const LabelMap* labels = nullptr);

}  // namespace crevtax
