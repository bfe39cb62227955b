#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hrvqe/errors.hpp"
#include "hrvqe/expectation.hpp"
#include "hrvqe/hr.hpp"
#include "hrvqe/models.hpp"
#include "hrvqe/stats.hpp"
#include "oracles.hpp"

using namespace hrvqe;

namespace {

OperatorSum word(const std::string& letters) { return OperatorSum::from_string(PauliString::parse(letters)); }

/// Single-string basis on four qubits.
LabeledBasis string_basis() {
  const std::vector<std::string> letters = {"XIII", "IYII", "IIZI", "XXII", "IIZZ", "IYIZ"};
  std::vector<OperatorSum> ops;
  for (const auto& l : letters) ops.push_back(word(l));
  return LabeledBasis(ops, letters);
}

Eigen::MatrixXd dense_covariance(const LabeledBasis& basis, const Eigen::VectorXcd& psi) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::MatrixXcd> m;
  for (const auto& op : basis.ops) m.push_back(dense_matrix(op));
  Eigen::MatrixXd q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto a = static_cast<std::size_t>(i);
      const auto b = static_cast<std::size_t>(j);
      const double sym = psi.dot(0.5 * (m[a] * m[b] + m[b] * m[a]) * psi).real();
      q(i, j) = sym - psi.dot(m[a] * psi).real() * psi.dot(m[b] * psi).real();
    }
  }
  return q;
}

Eigen::MatrixXd random_symmetric(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (auto& x : a.reshaped()) x = g(rng);
  return 0.5 * (a + a.transpose());
}

Eigen::MatrixXd random_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
  return Eigen::HouseholderQR<Eigen::MatrixXd>(random_symmetric(n, rng)).householderQ();
}

}  // namespace

TEST(Hr, CovarianceMatchesDenseOracle) {
  const LabeledBasis menu = chain_operator_menu(4);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Eigen::VectorXcd psi = oracle::random_state(4, seed);
    const auto q = covariance_exact(menu, QuantumState::from_amplitudes(psi));
    EXPECT_LT((q.matrix - dense_covariance(menu, psi)).norm(), 1e-10);
    EXPECT_EQ(q.mode, CovarianceMode::Exact);
  }
}

TEST(Hr, CovarianceIsSymmetricPsd) {
  const LabeledBasis menu = chain_operator_menu(5);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto rho = QuantumState::from_density(oracle::random_density(5, 3, seed));
    const Eigen::MatrixXd q = covariance_exact(menu, rho).matrix;
    EXPECT_LT((q - q.transpose()).norm(), 1e-12);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q).eigenvalues()(0), -1e-10);
  }
}

TEST(Hr, EigenstatesHaveZeroDistance) {
  const ModelSpec m{TfimSpec{4, 0.5, false}};
  const HrProblem p = hr_basis_for(m);
  const auto s = exact_spectrum(m, 16);
  for (std::size_t k = 0; k < 16; ++k) {
    const auto r = reconstruct(covariance_exact(p.basis, s.state(k)), p.true_coeffs);
    EXPECT_LE(r.hr_distance, 1e-6) << "eigenstate " << k;
  }
}

TEST(Hr, DistanceStaysInRange) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index n = 2 + trial % 5;
    const Eigen::MatrixXd a = random_symmetric(n, rng);
    Eigen::VectorXd c(n);
    for (auto& x : c) x = g(rng);
    const auto r = reconstruct(a * a, c);
    EXPECT_GE(r.hr_distance, 0.0);
    EXPECT_LE(r.hr_distance, std::sqrt(2.0) + 1e-12);
    EXPECT_NEAR(r.coefficients.norm(), 1.0, 1e-12);
    EXPECT_GE(r.coefficients.dot(r.true_normalized), 0.0);
  }
}

TEST(Hr, KernelVectorIsRecovered) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd v = random_orthogonal(4, rng);
    const Eigen::Vector4d spectrum(0.0, 0.5, 1.0, 2.0);
    const Eigen::MatrixXd q = v * spectrum.asDiagonal() * v.transpose();
    const auto r = reconstruct(q, -3.0 * v.col(0));
    EXPECT_LT(r.hr_distance, 1e-10);
    EXPECT_FALSE(r.degenerate);
  }
}

TEST(Hr, DegenerateSpectrumIsFlagged) {
  const Eigen::Vector3d c(1.0, 2.0, -2.0);
  const auto r = reconstruct(Eigen::MatrixXd::Identity(3, 3), c);
  EXPECT_TRUE(r.degenerate);
  EXPECT_LT(r.hr_distance, 1e-12);
}

TEST(Hr, ReconstructRejectsBadInput) {
  EXPECT_THROW(reconstruct(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Ones(3)), DimensionError);
  EXPECT_THROW(reconstruct(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2)), DomainError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
  bad(0, 1) = std::nan("");
  EXPECT_THROW(reconstruct(bad, Eigen::VectorXd::Ones(2)), NumericalError);
}

TEST(Hr, GlobalDepolarizedMatchesDensityPath) {
  const LabeledBasis menu = chain_operator_menu(4);
  const CovariancePlan plan(menu);
  for (double p : {0.0, 0.1, 0.37, 1.0}) {
    const auto psi = QuantumState::from_amplitudes(oracle::random_state(4, 9));
    const auto shortcut = plan.exact_global_depolarized(psi, p).matrix;
    const auto full = plan.exact(depolarized_global(psi.to_mixed(), p)).matrix;
    EXPECT_LT((shortcut - full).norm(), 1e-10) << "p=" << p;
  }
}

TEST(Hr, FullyMixedStateCovariance) {
  // For the maximally mixed state Q reduces to the Pauli-word overlap Gram matrix.
  const LabeledBasis menu = chain_operator_menu(3);
  const Eigen::MatrixXd q = covariance_exact(menu, depolarized_global(QuantumState::zero_mixed(3), 1.0)).matrix;
  EXPECT_NEAR(q(menu.index_of("X"), menu.index_of("X")), 3.0, 1e-12);
  EXPECT_NEAR(q(menu.index_of("ZZ"), menu.index_of("ZZ")), 2.0, 1e-12);
  EXPECT_NEAR(q(menu.index_of("X"), menu.index_of("ZZ")), 0.0, 1e-12);
}

TEST(Hr, SampledCovarianceConverges) {
  const LabeledBasis basis = string_basis();
  const CovariancePlan plan(basis);
  const auto psi = QuantumState::from_amplitudes(oracle::random_state(4, 21));
  const Eigen::MatrixXd exact = plan.exact(psi).matrix;
  const auto dist = plan.distributions(psi);
  double previous = 1e9;
  for (std::uint64_t shots : {10'000ULL, 100'000ULL, 1'000'000ULL}) {
    std::vector<double> errors;
    for (std::uint64_t seed = 1; seed <= 9; ++seed) {
      const auto q = plan.sampled_from(dist, shots, seed);
      EXPECT_EQ(q.shots, shots);
      errors.push_back((q.matrix - exact).cwiseAbs().maxCoeff());
    }
    const double med = median(errors);
    EXPECT_LT(med, previous) << shots;
    EXPECT_LT(med, 5.0 / std::sqrt(static_cast<double>(shots)));
    previous = med;
  }
}

TEST(Hr, SampledIsDeterministic) {
  const LabeledBasis basis = string_basis();
  const auto psi = QuantumState::from_amplitudes(oracle::random_state(4, 2));
  const auto a = covariance_sampled(basis, psi, 2000, 17);
  const auto b = covariance_sampled(basis, psi, 2000, 17);
  const auto c = covariance_sampled(basis, psi, 2000, 18);
  EXPECT_EQ(a.matrix, b.matrix);
  EXPECT_NE(a.matrix, c.matrix);
  EXPECT_EQ(a.mode, CovarianceMode::Sampled);
  EXPECT_GT(a.group_count, 0u);
}

TEST(Hr, PlanProductsAreSymmetrized) {
  const LabeledBasis menu = chain_operator_menu(3);
  const CovariancePlan plan(menu);
  for (std::size_t i = 0; i < menu.size(); ++i) {
    for (std::size_t j = 0; j < menu.size(); ++j) {
      const Eigen::MatrixXcd a = dense_matrix(menu.ops[i]);
      const Eigen::MatrixXcd b = dense_matrix(menu.ops[j]);
      EXPECT_LT((dense_matrix(plan.product(i, j)) - 0.5 * (a * b + b * a)).norm(), 1e-10);
    }
  }
}

TEST(Hr, RigorousGapBound) {
  // |HR(Q + E) - HR(Q)| <= ||v' - v|| <= sqrt(2) sin(theta) <= sqrt(2) ||E|| / (gap - ||E||).
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 3 + trial % 4;
    const Eigen::MatrixXd v = random_orthogonal(n, rng);
    Eigen::VectorXd spectrum(n);
    for (auto& x : spectrum) x = u(rng);
    std::sort(spectrum.begin(), spectrum.end());
    const Eigen::MatrixXd q = v * spectrum.asDiagonal() * v.transpose();
    Eigen::VectorXd c = v.col(0);
    c += 0.2 * v.col(1);
    const Eigen::MatrixXd dq = random_symmetric(n, rng);
    const double gap = spectrum(1) - spectrum(0);
    const double eps = 0.1 * gap / spectral_norm(dq);
    const double change = std::abs(reconstruct(q + eps * dq, c).hr_distance - reconstruct(q, c).hr_distance);
    const double e = eps * spectral_norm(dq);
    EXPECT_LE(change, std::sqrt(2.0) * e / (gap - e) + 1e-12);
  }
}

TEST(Hr, PerturbationCheckOnCleanKernel) {
  std::mt19937_64 rng(4);
  int holds = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd v = random_orthogonal(4, rng);
    const Eigen::Vector4d spectrum(0.0, 0.8, 1.3, 2.5);
    const Eigen::MatrixXd q = v * spectrum.asDiagonal() * v.transpose();
    const Eigen::MatrixXd dq = random_symmetric(4, rng);
    const auto check = perturbation_bound_check(q, dq, 1e-4, v.col(0));
    EXPECT_NEAR(check.rhs, 1e-4 / 0.8 * spectral_norm(dq), 1e-12);
    holds += check.holds ? 1 : 0;
  }
  EXPECT_EQ(holds, 100);
}

TEST(Hr, PerturbationCheckRejectsDegenerateQ) {
  EXPECT_THROW(perturbation_bound_check(Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Identity(3, 3), 1e-3,
                                        Eigen::VectorXd::Ones(3)),
               DomainError);
}

TEST(Hr, SpectralNorm) {
  Eigen::Matrix2d m;
  m << 1.0, 2.0, 2.0, -3.0;
  EXPECT_NEAR(spectral_norm(m), 1.0 + std::sqrt(8.0), 1e-12);
}

TEST(Hr, HamiltonianVariance) {
  const ModelSpec m{TfimSpec{4, 0.5, false}};
  const OperatorSum h = build_hamiltonian(m);
  EXPECT_NEAR(hamiltonian_variance(h, exact_spectrum(m, 2).state(0)), 0.0, 1e-10);
  const Eigen::VectorXcd psi = oracle::random_state(4, 3);
  const Eigen::MatrixXcd d = dense_matrix(h);
  const double e = psi.dot(d * psi).real();
  EXPECT_NEAR(hamiltonian_variance(h, QuantumState::from_amplitudes(psi)), psi.dot(d * d * psi).real() - e * e, 1e-10);
}

TEST(Hr, JsonReport) {
  const HrProblem p = hr_basis_for(ModelSpec{TfimSpec{3, 0.5, false}});
  const auto q = covariance_exact(p.basis, QuantumState::zero(3));
  const auto j = reconstruction_to_json(reconstruct(q, p.true_coeffs), p.basis, p.true_coeffs, q);
  EXPECT_EQ(j["labels"].size(), 2u);
  EXPECT_EQ(j["mode"], "exact");
  EXPECT_TRUE(j.contains("hr_distance"));
}
