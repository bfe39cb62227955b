#pragma once

#include <span>
#include <vector>

namespace hrvqe {

/// Pearson correlation; NaN when either series has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);
double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator).
double stddev(std::span<const double> x);
double median(std::vector<double> x);

/// Last ceil(fraction * size) entries of a series.
std::vector<double> tail(std::span<const double> x, double fraction);

}  // namespace hrvqe
