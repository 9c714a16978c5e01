#pragma once

#include <string>

#include "gnp/common.hpp"

namespace gnp {

enum class FeatureFormat { text, binary };

// Auxiliary feature matrix (one row per entity).
// Text format: header line `rows dim`, then one whitespace-separated row per line.
// Binary format: u32 rows, u32 dim, then rows*dim f32, LE.
MatF load_features(const std::string& path, FeatureFormat format);
void save_features(const std::string& path, const MatF& features, FeatureFormat format);

// Optional row L2 normalization (feature scales vary across sources).
void l2_normalize_rows(MatF& features);

// Reorders raw feature rows (indexed by original integer id) into the dense
// id space: out.row(dense) = raw.row(original_id_of(dense)). Every original
// id must parse as an integer within [0, raw.rows).
MatF remap_features(const MatF& raw, const std::vector<std::string>& original_names);

} // namespace gnp
