#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hrvqe/circuit.hpp"
#include "hrvqe/models.hpp"
#include "hrvqe/optimizer.hpp"
#include "hrvqe/pauli.hpp"
#include "hrvqe/state.hpp"
#include "hrvqe/trace.hpp"

namespace hrvqe {

/// Energy estimation mode: nullopt means exact expectations, otherwise
/// shots per measurement-basis group.
using ShotSetting = std::optional<std::uint64_t>;

/// Runs the variational loop: the objective prepares the circuit state
/// (density matrix when `noise` is set) and returns its energy, exact or
/// estimated from `shots` samples per basis group with the evaluation seed.
ImfilResult run_vqe(const OperatorSum& h, const Circuit& circuit, ShotSetting shots,
                    const std::optional<NoiseModel>& noise, const OptimizerConfig& config,
                    std::optional<std::vector<double>> x0 = std::nullopt);

/// Everything the replay evaluators may need. Fields a requested evaluator
/// depends on must be set.
struct ReplayContext {
  OperatorSum hamiltonian{1};
  Circuit circuit{1};
  std::optional<NoiseModel> noise;
  std::optional<HrProblem> hr;
  ShotSetting hr_shots;  // nullopt: exact covariance
  std::optional<QuantumState> ground;
  std::optional<QuantumState> first_excited;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

/// Evaluator names accepted by replay_trace.
inline constexpr std::string_view kReplayEvaluators[] = {"energy", "hr", "fidelity", "fidelity_excited",
                                                         "variance"};

/// Re-prepares the state of each selected trace record under the context's
/// noise model and fills the requested enrichment columns. Returns a trace
/// holding only the selected records, in index order. "energy" fills
/// exact_energy with the exact expectation. Sampled HR uses the substream
/// seed (context seed, record iteration).
VqeTrace replay_trace(const VqeTrace& trace, std::span<const std::size_t> indices,
                      std::span<const std::string> evaluators, const ReplayContext& context);

}  // namespace hrvqe
