#include "hrvqe/vqe.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "hrvqe/errors.hpp"
#include "hrvqe/expectation.hpp"
#include "hrvqe/hr.hpp"
#include "hrvqe/measurement.hpp"
#include "hrvqe/parallel.hpp"
#include "hrvqe/rng.hpp"

namespace hrvqe {

ImfilResult run_vqe(const OperatorSum& h, const Circuit& circuit, ShotSetting shots,
                    const std::optional<NoiseModel>& noise, const OptimizerConfig& config,
                    std::optional<std::vector<double>> x0) {
  if (h.n_qubits() != circuit.n_qubits()) {
    throw DimensionError(fmt::format("{}-qubit Hamiltonian with a {}-qubit circuit", h.n_qubits(), circuit.n_qubits()));
  }
  if (shots && *shots == 0) throw DomainError("shot count must be at least 1");
  if (noise) noise->validate();
  const EnergyEstimator estimator(h);
  Objective objective = [&](std::span<const double> theta, std::uint64_t seed) {
    const QuantumState state = prepare(circuit, theta, noise);
    return shots ? estimator.sampled(state, *shots, seed) : estimator.exact(state);
  };
  return imfil_minimize(objective, param_count(circuit), config, std::move(x0));
}

VqeTrace replay_trace(const VqeTrace& trace, std::span<const std::size_t> indices,
                      std::span<const std::string> evaluators, const ReplayContext& ctx) {
  bool want_energy = false, want_hr = false, want_fid = false, want_fe = false, want_var = false;
  for (const auto& name : evaluators) {
    if (name == "energy") want_energy = true;
    else if (name == "hr") want_hr = true;
    else if (name == "fidelity") want_fid = true;
    else if (name == "fidelity_excited") want_fe = true;
    else if (name == "variance") want_var = true;
    else throw DomainError(fmt::format("unknown replay evaluator '{}'", name));
  }
  if (want_hr && !ctx.hr) throw DomainError("hr evaluator needs an HR basis");
  if (want_fid && !ctx.ground) throw DomainError("fidelity evaluator needs the ground state");
  if (want_fe && !ctx.first_excited) throw DomainError("fidelity_excited evaluator needs the first excited state");
  if (ctx.hamiltonian.n_qubits() != ctx.circuit.n_qubits()) {
    throw DimensionError("replay Hamiltonian and circuit differ in qubit count");
  }

  std::vector<std::size_t> order(indices.begin(), indices.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  for (std::size_t i : order) {
    if (i >= trace.size()) throw DomainError(fmt::format("replay index {} outside a trace of {}", i, trace.size()));
  }

  std::optional<CovariancePlan> plan;
  if (want_hr) plan.emplace(ctx.hr->basis);

  std::vector<TraceRecord> out(order.size());
  parallel_for(order.size(), ctx.threads, [&](std::size_t k) {
    TraceRecord r = trace.records()[order[k]];
    const QuantumState state = prepare(ctx.circuit, r.params, ctx.noise);
    if (want_energy) r.exact_energy = expectation_exact(ctx.hamiltonian, state);
    if (want_hr) {
      const CovarianceEstimate q = ctx.hr_shots ? plan->sampled(state, *ctx.hr_shots, substream_seed(ctx.seed, r.iter))
                                                : plan->exact(state);
      r.hr_distance = reconstruct(q, ctx.hr->true_coeffs).hr_distance;
    }
    if (want_fid) r.fidelity_gs = fidelity(state, *ctx.ground);
    if (want_fe) r.fidelity_fe = fidelity(state, *ctx.first_excited);
    if (want_var) r.variance = hamiltonian_variance(ctx.hamiltonian, state);
    out[k] = std::move(r);
  });

  VqeTrace result;
  for (auto& r : out) {
    const std::size_t idx = result.append(r.params, r.energy);
    result.records_mut()[idx] = std::move(r);  // keeps the original iteration index
  }
  return result;
}

}  // namespace hrvqe
