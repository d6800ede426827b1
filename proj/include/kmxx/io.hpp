#pragma once

#include <string>
#include <vector>

#include "kmxx/geometry.hpp"

#include "json.hpp"

namespace kmxx {

// Shortest round-tripping decimal form, locale-independent.
std::string fmt_double(double v);
double parse_double(const std::string& s);

// CSV point-set format: header "w,x0,x1,...,x{d-1}", one point per row,
// dense coordinates, dot decimal separator.
std::string pointset_to_csv(const WeightedPointSet& X);
WeightedPointSet pointset_from_csv(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// JSON point-set form: {dim, points:[{w, coords}], prescribed_centers:[...]}.
// coords is either a dense array or {"idx": [...], "val": [...]} when the
// writer judges the point sparse.
nlohmann::json pointset_to_json(const WeightedPointSet& X,
                                const std::vector<int>& prescribed);
std::pair<WeightedPointSet, std::vector<int>> pointset_from_json(
    const nlohmann::json& j);

nlohmann::json sparsevec_to_json(const SparseVec& v, int dim);
SparseVec sparsevec_from_json(const nlohmann::json& j);

}  // namespace kmxx
