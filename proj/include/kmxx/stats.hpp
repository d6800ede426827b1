#pragma once

#include <span>
#include <vector>

namespace kmxx {

double mean(std::span<const double> v);
double sample_sd(std::span<const double> v);
// nearest-rank quantile of a copy-sorted input, q in [0, 1]
double quantile(std::span<const double> v, double q);

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

// Wilson score interval for a binomial proportion (z = 1.96 gives 95%).
WilsonInterval wilson(long successes, long n, double z = 1.96);

}  // namespace kmxx
