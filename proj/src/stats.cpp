#include "hrvqe/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hrvqe/errors.hpp"

namespace hrvqe {

double mean(std::span<const double> x) {
  if (x.empty()) throw DomainError("mean of an empty series");
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
  if (x.size() < 2) throw DomainError("standard deviation needs two samples");
  const double m = mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(x.size() - 1));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("correlated series differ in length");
  if (x.size() < 2) throw DomainError("correlation needs two samples");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

double median(std::vector<double> x) {
  if (x.empty()) throw DomainError("median of an empty series");
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 == 1 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

std::vector<double> tail(std::span<const double> x, double fraction) {
  const auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(x.size())));
  const std::size_t k = std::min(count, x.size());
  return {x.end() - static_cast<std::ptrdiff_t>(k), x.end()};
}

}  // namespace hrvqe
