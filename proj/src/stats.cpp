#include "kmxx/stats.hpp"

#include <algorithm>
#include <cmath>

#include "kmxx/geometry.hpp"

namespace kmxx {

double mean(std::span<const double> v) {
  if (v.empty()) throw Error("mean: empty");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double quantile(std::span<const double> v, double q) {
  if (v.empty()) throw Error("quantile: empty");
  std::vector<double> c(v.begin(), v.end());
  std::sort(c.begin(), c.end());
  const double rank = q * static_cast<double>(c.size());
  std::size_t idx = rank <= 1.0 ? 0 : static_cast<std::size_t>(std::ceil(rank)) - 1;
  idx = std::min(idx, c.size() - 1);
  return c[idx];
}

WilsonInterval wilson(long successes, long n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = p + z2 / (2.0 * nn);
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return {(center - half) / denom, (center + half) / denom};
}

}  // namespace kmxx
