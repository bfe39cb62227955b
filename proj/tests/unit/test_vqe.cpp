#include <cmath>

#include <gtest/gtest.h>

#include "hrvqe/errors.hpp"
#include "hrvqe/expectation.hpp"
#include "hrvqe/hr.hpp"
#include "hrvqe/vqe.hpp"

using namespace hrvqe;

namespace {

OptimizerConfig small_config(std::size_t max_evals = 2000) {
  OptimizerConfig c;
  c.max_evals = max_evals;
  c.seed = 3;
  return c;
}

ReplayContext context_for(const ModelSpec& m, const Circuit& c) {
  ReplayContext ctx;
  ctx.hamiltonian = build_hamiltonian(m);
  ctx.circuit = c;
  ctx.hr = hr_basis_for(m);
  const auto s = exact_spectrum(m, 2);
  ctx.ground = s.state(0);
  ctx.first_excited = s.state(1);
  return ctx;
}

}  // namespace

TEST(Vqe, TwoQubitReachesGroundEnergy) {
  const ModelSpec m{TfimSpec{2, 0.5, false}};
  const auto r = run_vqe(build_hamiltonian(m), build_ala(2, 1), std::nullopt, std::nullopt, small_config());
  EXPECT_NEAR(r.best_value, -std::sqrt(4.25), 1e-2);
}

TEST(Vqe, ExactReplayReproducesEnergies) {
  const ModelSpec m{TfimSpec{4, 0.5, false}};
  const Circuit c = build_ala(4, 2);
  const auto r = run_vqe(build_hamiltonian(m), c, std::nullopt, std::nullopt, small_config(300));
  const auto idx = tail_weighted_indices(r.trace.size(), 40);
  const std::vector<std::string> ev = {"energy", "hr", "fidelity", "fidelity_excited", "variance"};
  const VqeTrace replay = replay_trace(r.trace, idx, ev, context_for(m, c));
  ASSERT_EQ(replay.size(), idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& rec = replay.records()[k];
    EXPECT_EQ(rec.iter, r.trace.records()[idx[k]].iter);
    EXPECT_NEAR(*rec.exact_energy, r.trace.records()[idx[k]].energy, 1e-10);
    EXPECT_GE(*rec.hr_distance, 0.0);
    EXPECT_LE(*rec.fidelity_gs, 1.0 + 1e-12);
    EXPECT_GE(*rec.variance, 0.0);
  }
}

TEST(Vqe, NoisyReplayMatchesNoisyEnergies) {
  const ModelSpec m{TfimSpec{3, 0.5, false}};
  const Circuit c = build_ala(3, 2);
  const NoiseModel noise{0.01, 0.04};
  const auto r = run_vqe(build_hamiltonian(m), c, std::nullopt, noise, small_config(60));
  ReplayContext ctx = context_for(m, c);
  ctx.noise = noise;
  const std::vector<std::size_t> idx = {0, 10, 59};
  const std::vector<std::string> ev = {"energy"};
  const VqeTrace replay = replay_trace(r.trace, idx, ev, ctx);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    EXPECT_NEAR(*replay.records()[k].exact_energy, r.trace.records()[idx[k]].energy, 1e-10);
  }
}

TEST(Vqe, SampledRunIsDeterministic) {
  const ModelSpec m{TfimSpec{3, 0.5, false}};
  const Circuit c = build_ala(3, 1);
  const auto a = run_vqe(build_hamiltonian(m), c, 500, std::nullopt, small_config(150));
  const auto b = run_vqe(build_hamiltonian(m), c, 500, std::nullopt, small_config(150));
  EXPECT_EQ(a.trace.to_csv(), b.trace.to_csv());
  OptimizerConfig other = small_config(150);
  other.seed = 4;
  EXPECT_NE(run_vqe(build_hamiltonian(m), c, 500, std::nullopt, other).trace.to_csv(), a.trace.to_csv());
}

TEST(Vqe, SampledHrReplayIsDeterministic) {
  const ModelSpec m{TfimSpec{3, 0.5, false}};
  const Circuit c = build_ala(3, 1);
  const auto r = run_vqe(build_hamiltonian(m), c, std::nullopt, std::nullopt, small_config(50));
  ReplayContext ctx = context_for(m, c);
  ctx.hr_shots = 1000;
  const std::vector<std::size_t> idx = {3, 4, 49};
  const std::vector<std::string> ev = {"hr"};
  EXPECT_EQ(replay_trace(r.trace, idx, ev, ctx).to_csv(), replay_trace(r.trace, idx, ev, ctx).to_csv());
}

TEST(Vqe, ReplayValidatesInputs) {
  const ModelSpec m{TfimSpec{3, 0.5, false}};
  const Circuit c = build_ala(3, 1);
  const auto r = run_vqe(build_hamiltonian(m), c, std::nullopt, std::nullopt, small_config(10));
  ReplayContext ctx = context_for(m, c);
  const std::vector<std::size_t> ok = {0};
  const std::vector<std::size_t> past = {10};
  const std::vector<std::string> energy = {"energy"};
  const std::vector<std::string> unknown = {"entropy"};
  EXPECT_THROW(replay_trace(r.trace, ok, unknown, ctx), DomainError);
  EXPECT_THROW(replay_trace(r.trace, past, energy, ctx), DomainError);
  ctx.hr.reset();
  const std::vector<std::string> hr = {"hr"};
  EXPECT_THROW(replay_trace(r.trace, ok, hr, ctx), DomainError);
}

TEST(Vqe, RejectsMismatchedSizes) {
  EXPECT_THROW(run_vqe(build_tfim_1d({3, 0.5, false}), build_ala(4, 1), std::nullopt, std::nullopt, small_config()),
               DimensionError);
  EXPECT_THROW(run_vqe(build_tfim_1d({4, 0.5, false}), build_ala(4, 1), 0, std::nullopt, small_config()),
               DomainError);
}
