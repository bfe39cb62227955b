#include <random>

#include <gtest/gtest.h>

#include "hrvqe/errors.hpp"
#include "hrvqe/expectation.hpp"
#include "hrvqe/models.hpp"
#include "hrvqe/pauli.hpp"
#include "oracles.hpp"

using namespace hrvqe;

namespace {

Eigen::MatrixXcd string_dense(const PauliString& s) { return s.phase() * oracle::string_matrix(s.letters()); }

OperatorSum random_sum(std::size_t n, std::size_t terms, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  OperatorSum a(n);
  for (std::size_t t = 0; t < terms; ++t) a.add(PauliString::parse(oracle::random_letters(n, rng)), c(rng));
  return a;
}

Eigen::MatrixXcd sum_dense(const OperatorSum& a) {
  const auto d = Eigen::Index{1} << a.n_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& [w, c] : a.terms()) m += c * oracle::string_matrix(PauliString(a.n_qubits(), w).letters());
  return m;
}

}  // namespace

TEST(PauliMul, SameQubitXXIsIdentity) {
  const auto r = PauliString::parse("X") * PauliString::parse("X");
  EXPECT_EQ(r.letters(), "I");
  EXPECT_EQ(r.phase_power(), 0);
}

TEST(PauliMul, XTimesZIsMinusIY) {
  const auto r = PauliString::parse("X") * PauliString::parse("Z");
  EXPECT_EQ(r.letters(), "Y");
  EXPECT_EQ(r.phase(), std::complex<double>(0, -1));
}

TEST(PauliMul, DisjointSupportsGiveTensorProduct) {
  const auto r = PauliString::single(2, 0, Pauli::X) * PauliString::single(2, 1, Pauli::Z);
  EXPECT_EQ(r.letters(), "XZ");
  EXPECT_EQ(r.phase_power(), 0);
}

TEST(PauliMul, MismatchedQubitCountsThrow) {
  EXPECT_THROW(PauliString::parse("X") * PauliString::parse("XX"), DimensionError);
}

TEST(PauliMul, MatchesDenseProductOnRandomStrings) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const auto a = PauliString::parse(oracle::random_letters(3, rng), t % 4);
    const auto b = PauliString::parse(oracle::random_letters(3, rng), (t / 4) % 4);
    EXPECT_TRUE(string_dense(a * b).isApprox(string_dense(a) * string_dense(b), 1e-12));
  }
}

TEST(PauliMul, AssociativeOnRandomTriples) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 1000; ++t) {
    const auto a = PauliString::parse(oracle::random_letters(5, rng), t % 4);
    const auto b = PauliString::parse(oracle::random_letters(5, rng));
    const auto c = PauliString::parse(oracle::random_letters(5, rng), 3);
    EXPECT_EQ((a * b) * c, a * (b * c));
  }
}

TEST(PauliMul, IdentityIsNeutral) {
  std::mt19937_64 rng(3);
  const PauliString id(4);
  for (int t = 0; t < 50; ++t) {
    const auto a = PauliString::parse(oracle::random_letters(4, rng), t % 4);
    EXPECT_EQ(id * a, a);
    EXPECT_EQ(a * id, a);
  }
}

TEST(PauliString, CommutationMatchesDenseCommutator) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto a = PauliString::parse(oracle::random_letters(3, rng));
    const auto b = PauliString::parse(oracle::random_letters(3, rng));
    const Eigen::MatrixXcd ab = string_dense(a) * string_dense(b);
    const Eigen::MatrixXcd ba = string_dense(b) * string_dense(a);
    EXPECT_EQ(a.commutes_with(b), (ab - ba).norm() < 1e-12);
  }
}

TEST(PauliString, ParseRejectsUnknownLetters) { EXPECT_THROW(PauliString::parse("XQ"), DomainError); }

TEST(OperatorSum, PrunesZeroCoefficients) {
  OperatorSum a(2);
  a.add(PauliString::parse("XI"), 1.0);
  a.add(PauliString::parse("XI"), -1.0);
  EXPECT_TRUE(a.empty());
  a.add(PauliString::parse("ZZ"), 1e-15);
  EXPECT_TRUE(a.empty());
}

TEST(OperatorSum, NegativePhaseFoldsIntoCoefficient) {
  OperatorSum a(1);
  a.add(PauliString::parse("Z", 2), 0.5);
  EXPECT_DOUBLE_EQ(a.coefficient(PauliString::parse("Z").word()), -0.5);
}

TEST(OperatorSum, ImaginaryPhaseIsRejected) {
  EXPECT_ANY_THROW(OperatorSum::from_string(PauliString::parse("Y", 1)));
}

TEST(OperatorSum, DifferentRegistersDoNotCombine) {
  OperatorSum a(2), b(3);
  EXPECT_THROW(a += b, DimensionError);
  EXPECT_THROW(symmetrized_product(a, b), DimensionError);
}

TEST(SymmetrizedProduct, AnticommutingPairVanishes) {
  const auto x = OperatorSum::from_string(PauliString::parse("X"));
  const auto z = OperatorSum::from_string(PauliString::parse("Z"));
  EXPECT_TRUE(symmetrized_product(x, z).empty());
}

TEST(SymmetrizedProduct, DisjointSupportsMultiply) {
  const auto x0 = OperatorSum::from_string(PauliString::parse("XII"));
  const auto z12 = OperatorSum::from_string(PauliString::parse("IZZ"));
  const auto p = symmetrized_product(x0, z12);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_DOUBLE_EQ(p.coefficient(PauliString::parse("XZZ").word()), 1.0);
}

TEST(SymmetrizedProduct, FieldTimesCouplingMatchesDenseOracle) {
  const OperatorSum a = field_sum(3);
  const OperatorSum b = bond_sum(3, chain_bonds(TfimSpec{3, 1.0, false}));
  const Eigen::MatrixXcd da = sum_dense(a), db = sum_dense(b);
  const Eigen::MatrixXcd expected = 0.5 * (da * db + db * da);
  EXPECT_LT((sum_dense(symmetrized_product(a, b)) - expected).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SymmetrizedProduct, RandomSumsMatchDenseAndCommute) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 1 + t % 5;
    const auto a = random_sum(n, 6, rng), b = random_sum(n, 6, rng);
    const Eigen::MatrixXcd da = sum_dense(a), db = sum_dense(b);
    const auto p = symmetrized_product(a, b);
    EXPECT_EQ(p, symmetrized_product(b, a));
    EXPECT_LT((sum_dense(p) - 0.5 * (da * db + db * da)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(DenseMatrix, IdentityAndSingleZ) {
  EXPECT_TRUE(dense_matrix(OperatorSum::identity(3)).isApprox(Eigen::MatrixXcd::Identity(8, 8)));
  Eigen::MatrixXcd z(2, 2);
  z << 1, 0, 0, -1;
  EXPECT_TRUE(dense_matrix(OperatorSum::from_string(PauliString::parse("Z"))).isApprox(z));
}

TEST(DenseMatrix, MatchesKroneckerOracleAndIsHermitian) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_sum(4, 8, rng);
    const Eigen::MatrixXcd m = dense_matrix(a);
    EXPECT_LT((m - sum_dense(a)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(DenseMatrix, TwoQubitTfimLowestEigenvalue) {
  const auto h = build_tfim_1d(TfimSpec{2, 0.5, false});
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_matrix(h));
  EXPECT_NEAR(es.eigenvalues()(0), -std::sqrt(4.25), 1e-12);
}

TEST(DenseMatrix, RefusesLargeRegisters) {
  EXPECT_THROW(dense_matrix(OperatorSum::identity(kMaxDenseQubits + 1)), DomainError);
}

TEST(Expectation, BasicStates) {
  const auto z0 = OperatorSum::from_string(PauliString::parse("Z"));
  EXPECT_DOUBLE_EQ(expectation_exact(z0, QuantumState::zero(1)), 1.0);
  Eigen::VectorXcd plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  EXPECT_NEAR(expectation_exact(OperatorSum::from_string(PauliString::parse("X")), QuantumState::from_amplitudes(plus)),
              1.0, 1e-14);
}

TEST(Expectation, TfimGroundStateEnergy) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(oracle::tfim(2, 0.5, false));
  const auto gs = QuantumState::from_amplitudes(es.eigenvectors().col(0));
  EXPECT_NEAR(expectation_exact(build_tfim_1d(TfimSpec{2, 0.5, false}), gs), -std::sqrt(4.25), 1e-12);
}

TEST(Expectation, MatchesDenseQuadraticFormOnRandomStates) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 1 + t % 5;
    const auto a = random_sum(n, 7, rng);
    const Eigen::VectorXcd psi = oracle::random_state(n, 100 + t);
    const double dense = (psi.adjoint() * sum_dense(a) * psi)(0, 0).real();
    EXPECT_NEAR(expectation_exact(a, QuantumState::from_amplitudes(psi)), dense, 1e-10);
    const Eigen::MatrixXcd rho = oracle::random_density(n, 3, 200 + t);
    EXPECT_NEAR(expectation_exact(a, QuantumState::from_density(rho)), (rho * sum_dense(a)).trace().real(), 1e-10);
  }
}

TEST(Expectation, DimensionMismatchThrows) {
  EXPECT_THROW(expectation_exact(OperatorSum::identity(2), QuantumState::zero(3)), DimensionError);
}

TEST(Expectation, UnnormalizedStateIsRejected) {
  EXPECT_THROW(QuantumState::from_amplitudes(Eigen::VectorXcd::Ones(4)), DomainError);
}
