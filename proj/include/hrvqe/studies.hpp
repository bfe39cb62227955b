#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hrvqe/circuit.hpp"
#include "hrvqe/models.hpp"
#include "hrvqe/optimizer.hpp"
#include "hrvqe/state.hpp"
#include "hrvqe/vqe.hpp"

namespace hrvqe {

/// One assertion evaluated by a study's self-check.
struct SelfCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  std::string expected;  // human-readable band, e.g. "[-1.0, -0.9]"
};

/// Simple string table; cells are already formatted.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  void add_row(std::vector<std::string> row);
  std::string to_csv() const;
};

std::string cell(double v);
std::string cell(std::int64_t v);
std::string cell(std::uint64_t v);
std::string cell(const std::string& v);
std::string cell(const char* v);
std::string cell(bool v);
std::string cell(const std::optional<double>& v);

struct StudyResult {
  std::string name;
  Table results;                              // results.csv
  std::map<std::string, std::string> extras;  // additional CSV files by name
  nlohmann::json manifest;                    // inputs sufficient to re-run
  std::vector<SelfCheck> checks;
  double wall_seconds = 0.0;

  bool all_passed() const;
  const SelfCheck& check(const std::string& name) const;
};

// ---------------------------------------------------------------------------
// Perturbed ensemble

/// Scales the listed amplitudes by the matching factors and renormalizes.
Eigen::VectorXcd perturb_state(const Eigen::VectorXcd& ground, const std::vector<std::size_t>& indices,
                               const std::vector<double>& factors);

struct Ensemble {
  std::vector<Eigen::VectorXcd> states;
  std::vector<double> fidelities;
  std::size_t rejections = 0;
};

/// Random perturbations of a ground state kept when their fidelity exceeds
/// the threshold. Each draw picks a subset size uniformly from 1..dim, a
/// uniformly random subset of that size, and an independent U[0, 1] factor
/// per selected amplitude. More than 1e5 rejections throws NumericalError.
Ensemble perturbed_ensemble(const Eigen::VectorXcd& ground, std::size_t count, double threshold,
                            std::uint64_t seed);

// ---------------------------------------------------------------------------
// Operator-set study

struct OperatorSetConfig {
  TfimSpec model{8, 0.5, false};
  std::size_t count = 100;
  double threshold = 0.8;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

/// The sixteen operator sets compared in the study, in table order.
std::vector<std::vector<std::string>> operator_sets();
std::string set_label(const std::vector<std::string>& set);

/// Pearson correlation of HR distance against fidelity for every set.
std::map<std::string, double> operator_set_correlations(const OperatorSetConfig& config);
StudyResult operator_set_study(const OperatorSetConfig& config);

// ---------------------------------------------------------------------------
// Noise grid

struct NoiseGridConfig {
  ModelSpec model = TfimSpec{8, 0.5, false};
  AnsatzSpec ansatz{AnsatzKind::YY, 2};
  std::vector<double> p1_grid{1.08e-6, 2.86e-3, 1.0e-2, 2.69e-2};
  std::vector<double> p2_grid{1.05e-4, 1.91e-2, 4.0e-2, 8.40e-2};
  OptimizerConfig optimizer = [] {
    OptimizerConfig c;
    c.max_evals = 3000;
    return c;
  }();
  double tail_fraction = 0.25;
  std::size_t threads = 1;
};

StudyResult noise_grid_study(const NoiseGridConfig& config);

// ---------------------------------------------------------------------------
// Depolarization

enum class DepolarizationMode { GroundStateSweep, EnsembleSweep };
std::string to_string(DepolarizationMode m);
DepolarizationMode depolarization_mode_from_string(std::string_view s);

struct DepolarizationConfig {
  TfimSpec model{11, 0.5, false};
  DepolarizationMode mode = DepolarizationMode::EnsembleSweep;
  std::vector<double> p_grid;  // empty -> mode default
  std::size_t count = 100;
  double threshold = 0.8;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

std::vector<double> default_p_grid(DepolarizationMode mode);
StudyResult depolarization_study(const DepolarizationConfig& config);

// ---------------------------------------------------------------------------
// Gap study

struct GapConfig {
  std::size_t n = 8;
  std::vector<double> J_values{0.5, 1.0};
  AnsatzSpec ansatz{AnsatzKind::ALA, 3};
  std::uint64_t energy_shots = 10000;
  std::uint64_t hr_shots = 4000;
  OptimizerConfig optimizer = [] {
    OptimizerConfig c;
    c.max_evals = 3000;
    return c;
  }();
  double tail_fraction = 0.25;
  std::size_t threads = 1;
};

StudyResult gap_study(const GapConfig& config);

// ---------------------------------------------------------------------------
// Shot-noise study

struct ShotStdTarget {
  ModelSpec model;
  AnsatzSpec ansatz;
};

struct ShotStdConfig {
  std::vector<ShotStdTarget> targets{{TfimSpec{11, 0.5, false}, {AnsatzKind::ALA, 3}},
                                     {J1J2Spec{2, 3, 0.5, 0.2}, {AnsatzKind::ALA, 3}}};
  std::vector<std::uint64_t> shot_grid{1000, 2000, 4000, 10000};
  std::size_t repeats = 50;
  NoiseModel noise{0.0065, 0.0398};
  OptimizerConfig optimizer = [] {
    OptimizerConfig c;
    c.max_evals = 4000;
    return c;
  }();
  std::size_t threads = 1;
};

struct ShotStdRow {
  std::string model;
  std::uint64_t shots = 0;
  double mean_hr = 0.0;
  double std_hr = 0.0;
  double exact_hr = 0.0;
};

/// HR-distance spread at the converged parameters of a noiseless exact VQE,
/// evaluated on the noisy state.
std::vector<ShotStdRow> shot_std_rows(const ShotStdConfig& config);
StudyResult shot_std_study(const ShotStdConfig& config);

// ---------------------------------------------------------------------------
// Plateau demonstration

struct PlateauConfig {
  TfimSpec model{11, 0.5, false};
  AnsatzSpec ansatz{AnsatzKind::YY, 2};
  OptimizerConfig optimizer = [] {
    OptimizerConfig c;
    c.max_evals = 10000;
    return c;
  }();
  std::size_t window = 50;
  double energy_fraction = 0.01;  // of |E0|
  double hr_threshold = 0.1;
  std::size_t max_attempts = 10;
};

struct PlateauWindow {
  std::size_t begin = 0;  // first trace record of the window
  std::size_t length = 0;
  double energy_range = 0.0;
  double mean_hr = 0.0;
};

/// First window of `window` consecutive evaluations whose energy range is
/// below `max_range` and whose mean HR exceeds `hr_threshold`. `hr_at`
/// is called lazily, only for records inside energy-flat windows.
std::optional<PlateauWindow> find_plateau(const std::vector<double>& energies, std::size_t window,
                                          double max_range, double hr_threshold,
                                          const std::function<double(std::size_t)>& hr_at);

StudyResult plateau_demo(const PlateauConfig& config);

}  // namespace hrvqe
