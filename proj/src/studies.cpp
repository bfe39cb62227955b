#include "hrvqe/studies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "hrvqe/config.hpp"
#include "hrvqe/errors.hpp"
#include "hrvqe/hr.hpp"
#include "hrvqe/parallel.hpp"
#include "hrvqe/rng.hpp"
#include "hrvqe/stats.hpp"

namespace hrvqe {

// ---------------------------------------------------------------------------
// Tables and results

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) {
    throw DimensionError(fmt::format("row has {} cells for {} columns", row.size(), columns.size()));
  }
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  auto join = [](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    return line + '\n';
  };
  std::string out = join(columns);
  for (const auto& r : rows) out += join(r);
  return out;
}

std::string cell(double v) { return format_double(v); }
std::string cell(std::int64_t v) { return std::to_string(v); }
std::string cell(std::uint64_t v) { return std::to_string(v); }
std::string cell(const std::string& v) { return v; }
std::string cell(const char* v) { return v; }
std::string cell(bool v) { return v ? "true" : "false"; }
std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; }

bool StudyResult::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const SelfCheck& c) { return c.passed; });
}

const SelfCheck& StudyResult::check(const std::string& check_name) const {
  for (const auto& c : checks) {
    if (c.name == check_name) return c;
  }
  throw DomainError(fmt::format("study {} has no check '{}'", name, check_name));
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SelfCheck band_check(std::string name, double value, double lo, double hi) {
  return {std::move(name), value >= lo && value <= hi, value, fmt::format("[{}, {}]", lo, hi)};
}

SelfCheck at_most(std::string name, double value, double limit) {
  return {std::move(name), value <= limit, value, fmt::format("<= {}", limit)};
}

std::string p_tag(double p) { return fmt::format("{:.3g}", p); }

/// Pearson correlation of the last `fraction` of two aligned series.
double tail_correlation(const std::vector<double>& a, const std::vector<double>& b, double fraction) {
  const auto ta = tail(a, fraction);
  const auto tb = tail(b, fraction);
  return pearson(ta, tb);
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

}  // namespace

// ---------------------------------------------------------------------------
// Perturbed ensemble

Eigen::VectorXcd perturb_state(const Eigen::VectorXcd& ground, const std::vector<std::size_t>& indices,
                               const std::vector<double>& factors) {
  if (indices.size() != factors.size()) throw DimensionError("one factor per selected amplitude required");
  Eigen::VectorXcd out = ground;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= static_cast<std::size_t>(out.size())) throw DomainError("amplitude index out of range");
    out(static_cast<Eigen::Index>(indices[k])) *= factors[k];
  }
  const double norm = out.norm();
  if (!(norm > 0.0)) throw DomainError("perturbation removed every amplitude");
  return out / norm;
}

Ensemble perturbed_ensemble(const Eigen::VectorXcd& ground, std::size_t count, double threshold,
                            std::uint64_t seed) {
  constexpr std::size_t kMaxRejections = 100000;
  if (!(threshold >= 0.0 && threshold < 1.0)) throw DomainError("fidelity threshold must lie in [0, 1)");
  if (std::abs(ground.norm() - 1.0) > 1e-8) throw DomainError("ground state is not normalized");
  const auto d = static_cast<std::size_t>(ground.size());
  Rng rng(substream_seed(seed, 0));
  std::vector<std::size_t> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  auto below = [&](std::size_t n) { return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n))); };

  Ensemble out;
  double last_fidelity = 0.0;
  while (out.states.size() < count) {
    const std::size_t k = 1 + below(d);
    for (std::size_t i = 0; i < k; ++i) std::swap(perm[i], perm[i + below(d - i)]);
    std::vector<std::size_t> indices(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<double> factors(k);
    for (auto& f : factors) f = uniform01(rng);
    Eigen::VectorXcd s = ground;
    for (std::size_t j = 0; j < k; ++j) s(static_cast<Eigen::Index>(indices[j])) *= factors[j];
    const double norm = s.norm();
    bool accepted = false;
    if (norm > 0.0) {
      s /= norm;
      last_fidelity = std::norm(ground.dot(s));
      if (last_fidelity > threshold) {
        out.states.push_back(std::move(s));
        out.fidelities.push_back(last_fidelity);
        accepted = true;
      }
    }
    if (!accepted && ++out.rejections > kMaxRejections) {
      throw NumericalError(fmt::format("perturbed ensemble stalled: {} of {} states accepted after {} rejections "
                                       "(threshold {}, last fidelity {})",
                                       out.states.size(), count, out.rejections, threshold, last_fidelity));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Operator-set study

std::vector<std::vector<std::string>> operator_sets() {
  return {{"X", "ZZ"},
          {"X", "ZZ", "Z"},
          {"X", "ZZ", "Y"},
          {"X", "ZZ", "XX"},
          {"X", "ZZ", "YY"},
          {"X", "ZZ", "Z", "Y"},
          {"X", "ZZ", "Z", "XX"},
          {"X", "ZZ", "Z", "YY"},
          {"X", "ZZ", "Y", "XX"},
          {"X", "ZZ", "Y", "YY"},
          {"X", "ZZ", "XX", "YY"},
          {"X", "ZZ", "Z", "Y", "XX"},
          {"X", "ZZ", "Z", "Y", "YY"},
          {"X", "ZZ", "Z", "XX", "YY"},
          {"X", "ZZ", "Y", "XX", "YY"},
          {"X", "Y", "Z", "XX", "YY", "ZZ"}};
}

std::string set_label(const std::vector<std::string>& set) {
  std::string out;
  for (const auto& s : set) out += (out.empty() ? "" : "+") + s;
  return out;
}

namespace {

struct OperatorSetData {
  Ensemble ensemble;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> hr;  // [set][state]
  std::vector<double> correlation;
};

OperatorSetData operator_set_data(const OperatorSetConfig& config) {
  const OperatorSum h = build_tfim_1d(config.model);
  const SpectrumResult spectrum = exact_spectrum(h, 2, config.model.J);
  const LabeledBasis menu = chain_operator_menu(config.model.n);

  OperatorSetData data;
  data.ensemble = perturbed_ensemble(spectrum.vectors[0], config.count, config.threshold, config.seed);
  std::vector<QuantumState> states;
  for (const auto& s : data.ensemble.states) states.push_back(QuantumState::from_amplitudes(s));

  for (const auto& set : operator_sets()) {
    const LabeledBasis basis = menu.select(set);
    const Eigen::VectorXd coeffs = span_coefficients(basis, h);
    const CovariancePlan plan(basis);
    std::vector<double> hr(states.size());
    parallel_for(states.size(), config.threads, [&](std::size_t k) {
      hr[k] = reconstruct(plan.exact(states[k]), coeffs).hr_distance;
    });
    data.labels.push_back(set_label(set));
    data.correlation.push_back(pearson(hr, data.ensemble.fidelities));
    data.hr.push_back(std::move(hr));
  }
  return data;
}

}  // namespace

std::map<std::string, double> operator_set_correlations(const OperatorSetConfig& config) {
  const OperatorSetData data = operator_set_data(config);
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < data.labels.size(); ++i) out[data.labels[i]] = data.correlation[i];
  return out;
}

StudyResult operator_set_study(const OperatorSetConfig& config) {
  const auto t0 = Clock::now();
  const OperatorSetData data = operator_set_data(config);

  StudyResult r;
  r.name = "operator-sets";
  r.results.columns = {"set", "size", "correlation", "hr_mean", "hr_min", "hr_max"};
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    const auto& hr = data.hr[i];
    r.results.add_row({data.labels[i], cell(static_cast<std::uint64_t>(operator_sets()[i].size())),
                       cell(data.correlation[i]), cell(mean(hr)), cell(*std::min_element(hr.begin(), hr.end())),
                       cell(*std::max_element(hr.begin(), hr.end()))});
  }

  Table ens;
  ens.columns = {"state", "fidelity"};
  for (const auto& l : data.labels) ens.columns.push_back("hr_" + l);
  for (std::size_t k = 0; k < data.ensemble.states.size(); ++k) {
    std::vector<std::string> row{cell(static_cast<std::uint64_t>(k)), cell(data.ensemble.fidelities[k])};
    for (const auto& hr : data.hr) row.push_back(cell(hr[k]));
    ens.add_row(std::move(row));
  }
  r.extras["ensemble.csv"] = ens.to_csv();

  auto corr = [&](const std::string& label) {
    const auto it = std::find(data.labels.begin(), data.labels.end(), label);
    return data.correlation[static_cast<std::size_t>(it - data.labels.begin())];
  };
  const auto& f = data.ensemble.fidelities;
  r.checks.push_back(band_check("corr_X+ZZ", corr("X+ZZ"), -1.0, -0.9));
  r.checks.push_back(band_check("corr_X+ZZ+XX", corr("X+ZZ+XX"), -0.6, -0.2));
  r.checks.push_back(at_most("corr_X+ZZ+Y_minus_corr_X+ZZ+XX", corr("X+ZZ+Y") - corr("X+ZZ+XX"), 0.0));
  const double fmin = *std::min_element(f.begin(), f.end());
  r.checks.push_back({"ensemble_min_fidelity", fmin > config.threshold, fmin, fmt::format("> {}", config.threshold)});
  const double fstd = stddev(f);
  r.checks.push_back({"ensemble_fidelity_std", fstd > 0.0, fstd, "> 0"});

  r.manifest = {{"study", r.name},
                {"model", to_json(ModelSpec{config.model})},
                {"count", config.count},
                {"threshold", config.threshold},
                {"seed", config.seed},
                {"rejections", data.ensemble.rejections},
                {"sets", data.labels}};
  r.wall_seconds = seconds_since(t0);
  return r;
}

// ---------------------------------------------------------------------------
// Noise grid

StudyResult noise_grid_study(const NoiseGridConfig& config) {
  const auto t0 = Clock::now();
  if (config.p1_grid.empty() || config.p2_grid.empty()) throw DomainError("noise grids must not be empty");
  const OperatorSum h = build_hamiltonian(config.model);
  const SpectrumResult spectrum = exact_spectrum(config.model, 2);
  const HrProblem problem = hr_basis_for(config.model);
  const Circuit circuit = build_ansatz(config.ansatz, model_qubits(config.model));
  const std::size_t n1 = config.p1_grid.size(), n2 = config.p2_grid.size();

  struct Point {
    double p1 = 0, p2 = 0;
    double energy = 0, hr = 0, fidelity = 0, tail_corr = 0;
    std::size_t evals = 0;
    std::string termination;
    std::string trace_csv;
  };
  std::vector<Point> points(n1 * n2);
  parallel_for(points.size(), config.threads, [&](std::size_t k) {
    const std::size_t i = k / n2, j = k % n2;
    Point& pt = points[k];
    pt.p1 = config.p1_grid[i];
    pt.p2 = config.p2_grid[j];
    const NoiseModel noise{pt.p1, pt.p2};
    OptimizerConfig oc = config.optimizer;
    oc.threads = 1;
    const ImfilResult run = run_vqe(h, circuit, std::nullopt, noise, oc);

    ReplayContext ctx;
    ctx.hamiltonian = h;
    ctx.circuit = circuit;
    ctx.noise = noise;
    ctx.hr = problem;
    ctx.ground = spectrum.state(0);
    const std::size_t total = run.trace.size();
    std::vector<std::size_t> idx;
    if (i == j) {
      idx = all_indices(total);
    } else {
      const auto keep = static_cast<std::size_t>(std::ceil(config.tail_fraction * static_cast<double>(total)));
      for (std::size_t t = total - std::min(keep, total); t < total; ++t) idx.push_back(t);
    }
    const std::vector<std::string> ev{"hr", "fidelity"};
    const VqeTrace enriched = replay_trace(run.trace, idx, ev, ctx);
    std::vector<double> hr, fid;
    for (const auto& rec : enriched.records()) {
      hr.push_back(*rec.hr_distance);
      fid.push_back(*rec.fidelity_gs);
    }
    pt.tail_corr = i == j ? tail_correlation(hr, fid, config.tail_fraction) : pearson(hr, fid);
    if (i == j) pt.trace_csv = enriched.to_csv();

    const QuantumState final_state = prepare(circuit, run.best_x, noise);
    pt.energy = run.best_value;
    pt.hr = reconstruct(CovariancePlan(problem.basis).exact(final_state), problem.true_coeffs).hr_distance;
    pt.fidelity = fidelity(final_state, spectrum.state(0));
    pt.evals = run.trace.size();
    pt.termination = to_string(run.termination);
  });

  StudyResult r;
  r.name = "noise-grid";
  r.results.columns = {"p1", "p2", "noise_rank", "final_energy", "final_hr", "final_fidelity", "tail_correlation",
                       "evaluations", "termination"};
  std::vector<double> diag_corr;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& pt = points[k];
    const std::size_t i = k / n2, j = k % n2;
    r.results.add_row({cell(pt.p1), cell(pt.p2), i == j ? cell(static_cast<std::uint64_t>(i)) : std::string{},
                       cell(pt.energy), cell(pt.hr), cell(pt.fidelity), cell(pt.tail_corr),
                       cell(static_cast<std::uint64_t>(pt.evals)), pt.termination});
    if (i == j) {
      diag_corr.push_back(pt.tail_corr);
      r.extras[fmt::format("trace_p1_{}_p2_{}.csv", p_tag(pt.p1), p_tag(pt.p2))] = pt.trace_csv;
    }
  }

  r.checks.push_back(at_most("low_noise_tail_correlation", diag_corr.front(), -0.5));
  if (diag_corr.size() > 1) {
    const double lo = std::abs(diag_corr.front()), hi = std::abs(diag_corr.back());
    r.checks.push_back({"high_noise_weaker_correlation", hi < lo, hi, fmt::format("< {}", lo)});
    std::size_t violations = 0;
    for (std::size_t k = 1; k < diag_corr.size(); ++k) {
      if (!(std::abs(diag_corr[k]) <= std::abs(diag_corr[k - 1]))) ++violations;
    }
    r.checks.push_back({"monotone_weakening_in_noise_rank", violations == 0, static_cast<double>(violations), "0 violations"});
  }

  r.manifest = {{"study", r.name},
                {"model", to_json(config.model)},
                {"ansatz", to_json(config.ansatz)},
                {"p1_grid", config.p1_grid},
                {"p2_grid", config.p2_grid},
                {"optimizer", to_json(config.optimizer)},
                {"shots", "exact"},
                {"tail_fraction", config.tail_fraction},
                {"noise_rank", "diagonal grid index i = j"}};
  r.wall_seconds = seconds_since(t0);
  return r;
}

// ---------------------------------------------------------------------------
// Depolarization

std::string to_string(DepolarizationMode m) {
  return m == DepolarizationMode::GroundStateSweep ? "ground_state_sweep" : "ensemble_sweep";
}

DepolarizationMode depolarization_mode_from_string(std::string_view s) {
  if (s == "ground_state_sweep") return DepolarizationMode::GroundStateSweep;
  if (s == "ensemble_sweep") return DepolarizationMode::EnsembleSweep;
  throw DomainError(fmt::format("unknown depolarization mode '{}'", s));
}

std::vector<double> default_p_grid(DepolarizationMode mode) {
  if (mode == DepolarizationMode::GroundStateSweep) {
    std::vector<double> g;
    for (int k = 0; k <= 10; ++k) g.push_back(0.05 * k);
    return g;
  }
  return {0.0, 0.02, 0.05, 0.1, 0.15, 0.18, 0.2, 0.25, 0.3};
}

StudyResult depolarization_study(const DepolarizationConfig& config) {
  const auto t0 = Clock::now();
  const std::vector<double> grid = config.p_grid.empty() ? default_p_grid(config.mode) : config.p_grid;
  for (double p : grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError(fmt::format("depolarizing probability {} outside [0, 1]", p));
  }
  const ModelSpec model = config.model;
  const SpectrumResult spectrum = exact_spectrum(model, 2);
  const HrProblem problem = hr_basis_for(model);
  const CovariancePlan plan(problem.basis);
  const double inv_dim = 1.0 / static_cast<double>(std::uint64_t{1} << config.model.n);
  const QuantumState ground = spectrum.state(0);

  StudyResult r;
  r.name = "depolarization";
  r.manifest = {{"study", r.name},
                {"model", to_json(model)},
                {"mode", to_string(config.mode)},
                {"p_grid", grid},
                {"basis", problem.basis.labels},
                {"channel", "global"}};

  auto find_p = [&](double p) -> std::optional<std::size_t> {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (std::abs(grid[k] - p) < 1e-12) return k;
    }
    return std::nullopt;
  };

  if (config.mode == DepolarizationMode::GroundStateSweep) {
    r.results.columns = {"p", "hr_distance", "fidelity"};
    std::vector<double> hr;
    for (double p : grid) {
      hr.push_back(reconstruct(plan.exact_global_depolarized(ground, p), problem.true_coeffs).hr_distance);
      const double f = (1.0 - p) * fidelity(ground, ground) + p * inv_dim;
      r.results.add_row({cell(p), cell(hr.back()), cell(f)});
    }
    if (const auto k0 = find_p(0.0)) r.checks.push_back(at_most("hr_at_p0", hr[*k0], 1e-8));
    std::size_t violations = 0;
    std::vector<std::size_t> order = all_indices(grid.size());
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return grid[a] < grid[b]; });
    for (std::size_t k = 1; k < order.size(); ++k) {
      if (hr[order[k]] < hr[order[k - 1]] - 1e-12) ++violations;
    }
    r.checks.push_back({"hr_nondecreasing_in_p", violations == 0, static_cast<double>(violations), "0 violations"});
  } else {
    const Ensemble ens = perturbed_ensemble(spectrum.vectors[0], config.count, config.threshold, config.seed);
    std::vector<QuantumState> states;
    for (const auto& s : ens.states) states.push_back(QuantumState::from_amplitudes(s));
    std::vector<std::vector<double>> hr(grid.size(), std::vector<double>(states.size()));
    parallel_for(states.size(), config.threads, [&](std::size_t k) {
      for (std::size_t g = 0; g < grid.size(); ++g) {
        hr[g][k] = reconstruct(plan.exact_global_depolarized(states[k], grid[g]), problem.true_coeffs).hr_distance;
      }
    });
    r.results.columns = {"p", "correlation", "hr_mean", "hr_min", "hr_max", "fidelity_mean"};
    Table long_form;
    long_form.columns = {"p", "state", "fidelity", "hr_distance"};
    std::vector<double> corr;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double p = grid[g];
      std::vector<double> f;
      for (double f0 : ens.fidelities) f.push_back((1.0 - p) * f0 + p * inv_dim);
      corr.push_back(pearson(hr[g], f));
      r.results.add_row({cell(p), cell(corr.back()), cell(mean(hr[g])),
                         cell(*std::min_element(hr[g].begin(), hr[g].end())),
                         cell(*std::max_element(hr[g].begin(), hr[g].end())), cell(mean(f))});
      for (std::size_t k = 0; k < f.size(); ++k) {
        long_form.add_row({cell(p), cell(static_cast<std::uint64_t>(k)), cell(f[k]), cell(hr[g][k])});
      }
    }
    r.extras["ensemble.csv"] = long_form.to_csv();
    if (const auto k = find_p(0.02)) r.checks.push_back(at_most("correlation_at_p0.02", corr[*k], -0.8));
    if (const auto k = find_p(0.2)) r.checks.push_back(at_most("abs_correlation_at_p0.2", std::abs(corr[*k]), 0.3));
    r.manifest["count"] = config.count;
    r.manifest["threshold"] = config.threshold;
    r.manifest["seed"] = config.seed;
    r.manifest["rejections"] = ens.rejections;
  }
  r.wall_seconds = seconds_since(t0);
  return r;
}

// ---------------------------------------------------------------------------
// Gap study

StudyResult gap_study(const GapConfig& config) {
  const auto t0 = Clock::now();
  StudyResult r;
  r.name = "gap";
  r.results.columns = {"J",           "E0",          "E1",          "gap_over_J",          "final_energy",
                       "final_fidelity_gs", "final_fidelity_fe", "tail_corr_hr_fidelity_gs", "tail_corr_hr_fidelity_fe",
                       "evaluations"};
  std::vector<std::pair<double, double>> fe_corr;
  for (double J : config.J_values) {
    const ModelSpec model = TfimSpec{config.n, J, true};
    const OperatorSum h = build_hamiltonian(model);
    const SpectrumResult spectrum = exact_spectrum(model, 2);
    const Circuit circuit = build_ansatz(config.ansatz, config.n);
    OptimizerConfig oc = config.optimizer;
    oc.threads = config.threads;
    const ImfilResult run = run_vqe(h, circuit, config.energy_shots, std::nullopt, oc);

    ReplayContext ctx;
    ctx.hamiltonian = h;
    ctx.circuit = circuit;
    ctx.hr = hr_basis_for(model);
    ctx.hr_shots = config.hr_shots;
    ctx.ground = spectrum.state(0);
    ctx.first_excited = spectrum.state(1);
    ctx.seed = config.optimizer.seed;
    ctx.threads = config.threads;
    const std::vector<std::string> ev{"energy", "hr", "fidelity", "fidelity_excited"};
    const VqeTrace enriched = replay_trace(run.trace, all_indices(run.trace.size()), ev, ctx);
    std::vector<double> hr, fgs, ffe;
    for (const auto& rec : enriched.records()) {
      hr.push_back(*rec.hr_distance);
      fgs.push_back(*rec.fidelity_gs);
      ffe.push_back(*rec.fidelity_fe);
    }
    const double c_gs = tail_correlation(hr, fgs, config.tail_fraction);
    const double c_fe = tail_correlation(hr, ffe, config.tail_fraction);
    fe_corr.emplace_back(J, c_fe);
    const QuantumState final_state = prepare(circuit, run.best_x);
    r.results.add_row({cell(J), cell(spectrum.energies[0]), cell(spectrum.energies[1]), cell(spectrum.gap_over_J),
                       cell(run.best_value), cell(fidelity(final_state, spectrum.state(0))),
                       cell(fidelity(final_state, spectrum.state(1))), cell(c_gs), cell(c_fe),
                       cell(static_cast<std::uint64_t>(run.trace.size()))});
    r.extras[fmt::format("trace_J_{}.csv", p_tag(J))] = enriched.to_csv();

    if (config.n == 8 && J == 0.5) {
      r.checks.push_back(band_check("E0_J0.5", spectrum.energies[0], -8.509 - 0.01, -8.509 + 0.01));
      r.checks.push_back(band_check("E1_J0.5", spectrum.energies[1], -7.508 - 0.01, -7.508 + 0.01));
      r.checks.push_back(band_check("gap_over_J_J0.5", spectrum.gap_over_J, 1.99, 2.01));
    }
    if (config.n == 8 && J == 1.0) {
      r.checks.push_back(band_check("E0_J1", spectrum.energies[0], -10.25 - 0.01, -10.25 + 0.01));
      r.checks.push_back(band_check("E1_J1", spectrum.energies[1], -10.05 - 0.01, -10.05 + 0.01));
      r.checks.push_back(band_check("gap_over_J_J1", spectrum.gap_over_J, 0.19, 0.21));
    }
  }
  const auto small = std::find_if(fe_corr.begin(), fe_corr.end(), [](const auto& p) { return p.first == 0.5; });
  const auto large = std::find_if(fe_corr.begin(), fe_corr.end(), [](const auto& p) { return p.first == 1.0; });
  if (small != fe_corr.end() && large != fe_corr.end()) {
    r.checks.push_back({"excited_correlation_stronger_at_J1", std::abs(large->second) > std::abs(small->second),
                        std::abs(large->second), fmt::format("> {}", std::abs(small->second))});
  }
  r.manifest = {{"study", r.name},
                {"model", {{"kind", "tfim"}, {"n", config.n}, {"periodic", true}}},
                {"J_values", config.J_values},
                {"ansatz", to_json(config.ansatz)},
                {"energy_shots", config.energy_shots},
                {"hr_shots", config.hr_shots},
                {"optimizer", to_json(config.optimizer)},
                {"tail_fraction", config.tail_fraction},
                {"noise", nullptr}};
  r.wall_seconds = seconds_since(t0);
  return r;
}

// ---------------------------------------------------------------------------
// Shot-noise study

std::vector<ShotStdRow> shot_std_rows(const ShotStdConfig& config) {
  if (config.repeats < 2) throw DomainError("shot study needs at least two repeats");
  config.noise.validate();
  std::vector<ShotStdRow> rows;
  for (std::size_t t = 0; t < config.targets.size(); ++t) {
    const auto& target = config.targets[t];
    const OperatorSum h = build_hamiltonian(target.model);
    const Circuit circuit = build_ansatz(target.ansatz, model_qubits(target.model));
    OptimizerConfig oc = config.optimizer;
    oc.threads = config.threads;
    const ImfilResult run = run_vqe(h, circuit, std::nullopt, std::nullopt, oc);
    const QuantumState state = prepare(circuit, run.best_x, config.noise);
    const HrProblem problem = hr_basis_for(target.model);
    const CovariancePlan plan(problem.basis);
    const double exact_hr = reconstruct(plan.exact(state), problem.true_coeffs).hr_distance;
    const auto dists = plan.distributions(state);
    for (std::size_t s = 0; s < config.shot_grid.size(); ++s) {
      std::vector<double> hr(config.repeats);
      parallel_for(config.repeats, config.threads, [&](std::size_t k) {
        const std::uint64_t seed = substream_seed(substream_seed(config.optimizer.seed, t), s * config.repeats + k);
        hr[k] = reconstruct(plan.sampled_from(dists, config.shot_grid[s], seed), problem.true_coeffs).hr_distance;
      });
      rows.push_back({model_name(target.model), config.shot_grid[s], mean(hr), stddev(hr), exact_hr});
    }
  }
  return rows;
}

StudyResult shot_std_study(const ShotStdConfig& config) {
  const auto t0 = Clock::now();
  const auto rows = shot_std_rows(config);
  StudyResult r;
  r.name = "shot-std";
  r.results.columns = {"model", "shots", "repeats", "hr_mean", "hr_std", "exact_hr"};
  for (const auto& row : rows) {
    r.results.add_row({row.model, cell(row.shots), cell(static_cast<std::uint64_t>(config.repeats)), cell(row.mean_hr),
                       cell(row.std_hr), cell(row.exact_hr)});
  }
  for (const auto& target : config.targets) {
    const std::string name = model_name(target.model);
    auto std_at = [&](std::uint64_t shots) -> std::optional<double> {
      for (const auto& row : rows) {
        if (row.model == name && row.shots == shots) return row.std_hr;
      }
      return std::nullopt;
    };
    const auto s1 = std_at(1000), s4 = std_at(4000);
    if (s1 && s4) {
      r.checks.push_back({"std_decreases_" + name, *s4 < *s1, *s4, fmt::format("< {}", *s1)});
      r.checks.push_back(band_check("std_ratio_1000_4000_" + name, *s1 / *s4, 1.6, 2.6));
    }
  }
  json targets = json::array();
  for (const auto& t : config.targets) targets.push_back({{"model", to_json(t.model)}, {"ansatz", to_json(t.ansatz)}});
  r.manifest = {{"study", r.name},
                {"targets", targets},
                {"shot_grid", config.shot_grid},
                {"repeats", config.repeats},
                {"noise", to_json(config.noise)},
                {"optimizer", to_json(config.optimizer)},
                {"converged_parameters", "noiseless exact-mode VQE"}};
  r.wall_seconds = seconds_since(t0);
  return r;
}

// ---------------------------------------------------------------------------
// Plateau demonstration

std::optional<PlateauWindow> find_plateau(const std::vector<double>& energies, std::size_t window,
                                          double max_range, double hr_threshold,
                                          const std::function<double(std::size_t)>& hr_at) {
  if (window == 0) throw DomainError("plateau window must be at least 1");
  if (energies.size() < window) return std::nullopt;
  for (std::size_t b = 0; b + window <= energies.size(); ++b) {
    const auto [lo, hi] = std::minmax_element(energies.begin() + static_cast<std::ptrdiff_t>(b),
                                              energies.begin() + static_cast<std::ptrdiff_t>(b + window));
    const double range = *hi - *lo;
    if (!(range < max_range)) continue;
    double acc = 0.0;
    for (std::size_t k = b; k < b + window; ++k) acc += hr_at(k);
    const double m = acc / static_cast<double>(window);
    if (m > hr_threshold) return PlateauWindow{b, window, range, m};
  }
  return std::nullopt;
}

StudyResult plateau_demo(const PlateauConfig& config) {
  const auto t0 = Clock::now();
  const ModelSpec model = config.model;
  const OperatorSum h = build_hamiltonian(model);
  const SpectrumResult spectrum = exact_spectrum(model, 2);
  const HrProblem problem = hr_basis_for(model);
  const CovariancePlan plan(problem.basis);
  const Circuit circuit = build_ansatz(config.ansatz, config.model.n);
  const double e0 = spectrum.energies[0];

  StudyResult r;
  r.name = "plateau";
  r.results.columns = {"attempt", "seed", "evaluations", "final_energy", "final_hr", "final_fidelity",
                       "window_found", "window_begin", "window_energy_range", "window_mean_hr", "accepted"};
  std::optional<PlateauWindow> accepted_window;
  double accepted_final_hr = 0.0;
  bool nonincreasing = true;
  std::size_t attempts = 0;
  for (std::size_t a = 0; a < config.max_attempts; ++a) {
    ++attempts;
    OptimizerConfig oc = config.optimizer;
    oc.seed = config.optimizer.seed + a;
    const ImfilResult run = run_vqe(h, circuit, std::nullopt, std::nullopt, oc);
    const auto best = run.trace.best_so_far();
    for (std::size_t k = 1; k < best.size(); ++k) nonincreasing = nonincreasing && best[k] <= best[k - 1];

    std::map<std::size_t, double> cache;
    auto hr_at = [&](std::size_t k) {
      auto it = cache.find(k);
      if (it != cache.end()) return it->second;
      const QuantumState s = prepare(circuit, run.trace.records()[k].params);
      const double v = reconstruct(plan.exact(s), problem.true_coeffs).hr_distance;
      cache.emplace(k, v);
      return v;
    };
    const auto window = find_plateau(run.trace.energies(), config.window, config.energy_fraction * std::abs(e0),
                                     config.hr_threshold, hr_at);
    const QuantumState final_state = prepare(circuit, run.best_x);
    const double final_hr = reconstruct(plan.exact(final_state), problem.true_coeffs).hr_distance;
    const bool ok = window && final_hr < window->mean_hr;
    r.results.add_row({cell(static_cast<std::uint64_t>(a)), cell(oc.seed), cell(static_cast<std::uint64_t>(run.trace.size())),
                       cell(run.best_value), cell(final_hr), cell(fidelity(final_state, spectrum.state(0))), cell(window.has_value()),
                       window ? cell(static_cast<std::uint64_t>(window->begin)) : std::string{},
                       window ? cell(window->energy_range) : std::string{}, window ? cell(window->mean_hr) : std::string{},
                       cell(ok)});
    if (ok) {
      accepted_window = window;
      accepted_final_hr = final_hr;
      ReplayContext ctx;
      ctx.hamiltonian = h;
      ctx.circuit = circuit;
      ctx.hr = problem;
      ctx.ground = spectrum.state(0);
      const std::vector<std::string> ev{"hr", "fidelity"};
      r.extras["trajectory.csv"] = replay_trace(run.trace, all_indices(run.trace.size()), ev, ctx).to_csv();
      r.manifest["accepted_seed"] = oc.seed;
      break;
    }
  }

  r.checks.push_back({"plateau_found", accepted_window.has_value(), static_cast<double>(attempts),
                      fmt::format("window within {} attempts", config.max_attempts)});
  if (accepted_window) {
    r.checks.push_back(band_check("plateau_mean_hr", accepted_window->mean_hr, 0.05, 0.5));
    r.checks.push_back({"final_hr_below_plateau", accepted_final_hr < accepted_window->mean_hr, accepted_final_hr,
                        fmt::format("< {}", accepted_window->mean_hr)});
  }
  r.checks.push_back({"best_so_far_nonincreasing", nonincreasing, nonincreasing ? 1.0 : 0.0, "true"});

  r.manifest["study"] = r.name;
  r.manifest["model"] = to_json(model);
  r.manifest["ansatz"] = to_json(config.ansatz);
  r.manifest["optimizer"] = to_json(config.optimizer);
  r.manifest["shots"] = "exact";
  r.manifest["window"] = config.window;
  r.manifest["energy_fraction"] = config.energy_fraction;
  r.manifest["hr_threshold"] = config.hr_threshold;
  r.manifest["max_attempts"] = config.max_attempts;
  r.manifest["attempt_seed_rule"] = "optimizer seed + attempt index";
  r.manifest["E0"] = e0;
  r.wall_seconds = seconds_since(t0);
  return r;
}

}  // namespace hrvqe
