#include "hrvqe/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "hrvqe/errors.hpp"
#include "hrvqe/parallel.hpp"
#include "hrvqe/rng.hpp"

namespace hrvqe {

void OptimizerConfig::validate() const {
  auto check = [](const Interval& b) {
    if (!(b.lo < b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi)) {
      throw DomainError(fmt::format("bounds [{}, {}] need lo < hi", b.lo, b.hi));
    }
  };
  check(default_bounds);
  for (const auto& b : bounds) check(b);
  if (!(initial_scale > 0.0 && initial_scale <= 1.0)) throw DomainError("initial_scale must lie in (0, 1]");
  if (!(scale_shrink > 0.0 && scale_shrink < 1.0)) throw DomainError("scale_shrink must lie in (0, 1)");
  if (!(min_scale > 0.0)) throw DomainError("min_scale must be positive");
  if (max_evals == 0) throw DomainError("max_evals must be at least 1");
}

Interval OptimizerConfig::bound(std::size_t i) const {
  if (bounds.empty()) return default_bounds;
  if (i >= bounds.size()) throw DimensionError("no bounds for parameter index");
  return bounds[i];
}

std::string to_string(Termination t) { return t == Termination::MinScale ? "min_scale" : "budget"; }

std::uint64_t evaluation_seed(std::uint64_t config_seed, std::size_t index) {
  return substream_seed(config_seed, index);
}

std::vector<double> random_start(const OptimizerConfig& config, std::size_t dim) {
  Rng rng(substream_seed(config.seed, std::numeric_limits<std::uint64_t>::max()));
  std::vector<double> x(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const Interval b = config.bound(i);
    x[i] = uniform(rng, b.lo, b.hi);
  }
  return x;
}

namespace {

class Evaluator {
 public:
  Evaluator(const Objective& f, const OptimizerConfig& config, VqeTrace& trace)
      : f_(f), config_(config), trace_(trace) {}

  std::size_t remaining() const { return config_.max_evals - trace_.size(); }

  // Evaluates as many of `points` as the budget allows; returns trace indices.
  std::vector<std::size_t> evaluate(const std::vector<std::vector<double>>& points) {
    const std::size_t count = std::min(points.size(), remaining());
    const std::size_t base = trace_.size();
    std::vector<double> values(count);
    parallel_for(count, config_.threads, [&](std::size_t k) {
      values[k] = f_(points[k], evaluation_seed(config_.seed, base + k));
    });
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < count; ++k) {
      if (!std::isfinite(values[k])) {
        throw NumericalError(fmt::format("objective returned {} at evaluation {}", values[k], base + k));
      }
      out.push_back(trace_.append(points[k], values[k]));
    }
    return out;
  }

  double value(std::size_t idx) const { return trace_.records()[idx].energy; }
  const std::vector<double>& point(std::size_t idx) const { return trace_.records()[idx].params; }

 private:
  const Objective& f_;
  const OptimizerConfig& config_;
  VqeTrace& trace_;
};

}  // namespace

ImfilResult imfil_minimize(const Objective& objective, std::size_t dim, const OptimizerConfig& config,
                           std::optional<std::vector<double>> x0) {
  config.validate();
  if (dim == 0) throw DimensionError("optimizer needs at least one parameter");
  if (!config.bounds.empty() && config.bounds.size() != dim) {
    throw DimensionError(fmt::format("{} bounds for {} parameters", config.bounds.size(), dim));
  }
  std::vector<double> lo(dim), range(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const Interval b = config.bound(i);
    lo[i] = b.lo;
    range[i] = b.hi - b.lo;
  }
  auto clip = [&](std::size_t i, double v) { return std::clamp(v, lo[i], lo[i] + range[i]); };

  std::vector<double> start = x0 ? std::move(*x0) : random_start(config, dim);
  if (start.size() != dim) throw DimensionError("initial point has the wrong length");
  for (std::size_t i = 0; i < dim; ++i) start[i] = clip(i, start[i]);

  ImfilResult result;
  Evaluator eval(objective, config, result.trace);
  std::size_t incumbent = eval.evaluate({start}).front();
  result.trace.add_iterate(incumbent);

  double h = config.initial_scale;
  result.termination = Termination::Budget;
  while (true) {
    if (h < config.min_scale) {
      result.termination = Termination::MinScale;
      break;
    }
    if (eval.remaining() == 0) break;

    const std::vector<double> x = eval.point(incumbent);
    const double fx = eval.value(incumbent);

    // Coordinate stencil; plus[i] / minus[i] index into `points` or -1.
    std::vector<std::vector<double>> points;
    std::vector<long> plus(dim, -1), minus(dim, -1);
    for (std::size_t i = 0; i < dim; ++i) {
      for (int s : {+1, -1}) {
        std::vector<double> p = x;
        p[i] = clip(i, x[i] + s * h * range[i]);
        if (p[i] == x[i]) continue;
        (s > 0 ? plus : minus)[i] = static_cast<long>(points.size());
        points.push_back(std::move(p));
      }
    }
    const std::vector<std::size_t> idx = eval.evaluate(points);
    const bool truncated = idx.size() < points.size();

    std::size_t best_stencil = incumbent;
    for (std::size_t k : idx) {
      if (eval.value(k) < eval.value(best_stencil)) best_stencil = k;
    }
    ++result.iterations;

    if (best_stencil == incumbent) {
      if (!truncated) h *= config.scale_shrink;
      result.trace.add_iterate(incumbent);
      continue;
    }
    if (truncated) {
      incumbent = best_stencil;
      result.trace.add_iterate(incumbent);
      break;
    }

    // Stencil gradient in normalized coordinates.
    std::vector<double> gz(dim, 0.0);
    double gmax = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      auto at = [&](long k) { return idx[static_cast<std::size_t>(k)]; };
      double g = 0.0;
      if (plus[i] >= 0 && minus[i] >= 0) {
        g = (eval.value(at(plus[i])) - eval.value(at(minus[i]))) /
            (eval.point(at(plus[i]))[i] - eval.point(at(minus[i]))[i]);
      } else if (plus[i] >= 0) {
        g = (eval.value(at(plus[i])) - fx) / (eval.point(at(plus[i]))[i] - x[i]);
      } else if (minus[i] >= 0) {
        g = (eval.value(at(minus[i])) - fx) / (eval.point(at(minus[i]))[i] - x[i]);
      }
      gz[i] = g * range[i];
      gmax = std::max(gmax, std::abs(gz[i]));
    }

    std::size_t best_trial = best_stencil;
    if (gmax > 0.0) {
      double lambda = 2.0 * h / gmax;
      for (int k = 0; k <= 5 && eval.remaining() > 0; ++k, lambda *= 0.5) {
        std::vector<double> trial(dim);
        for (std::size_t i = 0; i < dim; ++i) trial[i] = clip(i, x[i] - lambda * gz[i] * range[i]);
        if (trial == x) continue;
        const std::size_t t = eval.evaluate({trial}).front();
        if (eval.value(t) < eval.value(best_trial)) {
          best_trial = t;
          break;
        }
      }
    }
    incumbent = best_trial;
    result.trace.add_iterate(incumbent);
  }

  result.best_x = eval.point(incumbent);
  result.best_value = eval.value(incumbent);
  result.final_scale = h;
  return result;
}

}  // namespace hrvqe
