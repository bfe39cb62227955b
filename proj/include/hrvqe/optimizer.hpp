#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hrvqe/trace.hpp"

namespace hrvqe {

struct Interval {
  double lo = 0.0;
  double hi = 2.0 * std::numbers::pi;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Settings of the implicit-filtering minimizer. Scales are fractions of
/// each coordinate's bound range.
struct OptimizerConfig {
  Interval default_bounds{};
  std::vector<Interval> bounds;  // per parameter; empty -> default_bounds
  double initial_scale = 0.25;
  double scale_shrink = 0.5;
  double min_scale = 1e-3;
  std::size_t max_evals = 5000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;  // concurrent stencil evaluations
  friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;

  void validate() const;
  Interval bound(std::size_t i) const;
};

/// Stochastic objective: parameters and a per-evaluation seed.
using Objective = std::function<double(std::span<const double>, std::uint64_t)>;

enum class Termination { MinScale, Budget };
std::string to_string(Termination t);

struct ImfilResult {
  std::vector<double> best_x;
  double best_value = 0.0;
  VqeTrace trace;
  Termination termination = Termination::MinScale;
  std::size_t iterations = 0;
  double final_scale = 0.0;
};

/// Seed handed to evaluation number `index` under the config seed.
std::uint64_t evaluation_seed(std::uint64_t config_seed, std::size_t index);

/// Uniform random start in the bound box from the config seed.
std::vector<double> random_start(const OptimizerConfig& config, std::size_t dim);

/// Implicit-filtering style bound-constrained minimization.
///
/// Each iteration evaluates the coordinate stencil x +- h * range_i * e_i
/// (clipped to the box). If no stencil point beats the incumbent the scale h
/// shrinks by `scale_shrink`. Otherwise a stencil (central-difference)
/// gradient drives a projected steepest-descent step whose largest
/// coordinate move starts at 2h of the range and is halved at most five
/// times; the incumbent moves to the best of the line-search and stencil
/// points. Stops when h < min_scale or after max_evals evaluations. Every
/// evaluation is recorded in the trace; a non-finite value throws
/// NumericalError.
ImfilResult imfil_minimize(const Objective& objective, std::size_t dim, const OptimizerConfig& config,
                           std::optional<std::vector<double>> x0 = std::nullopt);

}  // namespace hrvqe
