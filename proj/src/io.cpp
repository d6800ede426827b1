#include "kmxx/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace kmxx {

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error("bad number: '" + s + "'");
  return v;
}

std::string pointset_to_csv(const WeightedPointSet& X) {
  std::ostringstream out;
  out << "w";
  for (int d = 0; d < X.dim(); ++d) out << ",x" << d;
  out << "\n";
  for (std::size_t i = 0; i < X.size(); ++i) {
    out << fmt_double(X[i].weight);
    for (double c : X[i].coords.to_dense(X.dim())) out << "," << fmt_double(c);
    out << "\n";
  }
  return out.str();
}

static std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

WeightedPointSet pointset_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error("csv: empty input");
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "w") throw Error("csv: header must start with w");
  const int dim = static_cast<int>(header.size()) - 1;
  for (int d = 0; d < dim; ++d)
    if (header[static_cast<std::size_t>(d + 1)] != "x" + std::to_string(d))
      throw Error("csv: bad coordinate header");
  std::vector<WeightedPoint> pts;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw Error("csv: row width mismatch");
    WeightedPoint p;
    p.weight = parse_double(cells[0]);
    std::vector<double> coords(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d)
      coords[static_cast<std::size_t>(d)] = parse_double(cells[static_cast<std::size_t>(d + 1)]);
    p.coords = SparseVec::from_dense(coords);
    pts.push_back(std::move(p));
  }
  return WeightedPointSet(dim, std::move(pts));
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json sparsevec_to_json(const SparseVec& v, int dim) {
  // dense when at least half the coordinates are nonzero
  if (v.entries().size() * 2 >= static_cast<std::size_t>(dim)) {
    return nlohmann::json(v.to_dense(dim));
  }
  nlohmann::json idx = nlohmann::json::array();
  nlohmann::json val = nlohmann::json::array();
  for (const auto& [i, x] : v.entries()) {
    idx.push_back(i);
    val.push_back(x);
  }
  return nlohmann::json{{"idx", std::move(idx)}, {"val", std::move(val)}};
}

SparseVec sparsevec_from_json(const nlohmann::json& j) {
  if (j.is_array()) {
    std::vector<double> dense = j.get<std::vector<double>>();
    return SparseVec::from_dense(dense);
  }
  const auto idx = j.at("idx").get<std::vector<int>>();
  const auto val = j.at("val").get<std::vector<double>>();
  if (idx.size() != val.size()) throw Error("sparse coords: idx/val size mismatch");
  std::vector<std::pair<int, double>> entries;
  entries.reserve(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) entries.emplace_back(idx[i], val[i]);
  return SparseVec(std::move(entries));
}

nlohmann::json pointset_to_json(const WeightedPointSet& X,
                                const std::vector<int>& prescribed) {
  nlohmann::json pts = nlohmann::json::array();
  for (std::size_t i = 0; i < X.size(); ++i) {
    pts.push_back({{"w", X[i].weight},
                   {"coords", sparsevec_to_json(X[i].coords, X.dim())}});
  }
  return nlohmann::json{{"dim", X.dim()},
                        {"points", std::move(pts)},
                        {"prescribed_centers", prescribed}};
}

std::pair<WeightedPointSet, std::vector<int>> pointset_from_json(
    const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  std::vector<WeightedPoint> pts;
  for (const auto& pj : j.at("points")) {
    WeightedPoint p;
    p.weight = pj.at("w").get<double>();
    p.coords = sparsevec_from_json(pj.at("coords"));
    pts.push_back(std::move(p));
  }
  std::vector<int> prescribed;
  if (j.contains("prescribed_centers"))
    prescribed = j.at("prescribed_centers").get<std::vector<int>>();
  WeightedPointSet X(dim, std::move(pts));
  for (int idx : prescribed)
    if (idx < 0 || static_cast<std::size_t>(idx) >= X.size())
      throw Error("prescribed center index out of range");
  return {std::move(X), std::move(prescribed)};
}

}  // namespace kmxx
