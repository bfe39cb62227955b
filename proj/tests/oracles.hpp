#pragma once

// Independent reference constructions for tests: dense Kronecker products,
// dense gate matrices and random states. Nothing here calls the library's
// own dense or symplectic code paths.

#include <complex>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;

inline Eigen::Matrix2cd pauli(char c) {
  Eigen::Matrix2cd m;
  switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
  }
  return m;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

/// Letters indexed by qubit; qubit q is bit q of the basis index, so the
/// highest qubit is the leftmost Kronecker factor.
inline Eigen::MatrixXcd string_matrix(const std::string& letters) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) m = kron(m, pauli(*it));
  return m;
}

/// Embeds a one-qubit matrix on qubit q of n.
inline Eigen::MatrixXcd on_qubit(const Eigen::Matrix2cd& g, std::size_t q, std::size_t n) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  for (std::size_t k = n; k-- > 0;) m = kron(m, k == q ? Eigen::MatrixXcd(g) : Eigen::MatrixXcd::Identity(2, 2));
  return m;
}

inline Eigen::Matrix2cd hadamard() {
  Eigen::Matrix2cd m;
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

inline Eigen::Matrix2cd ry(double t) {
  Eigen::Matrix2cd m;
  m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
  return m;
}

inline Eigen::MatrixXcd cnot(std::size_t control, std::size_t target, std::size_t n) {
  const auto d = Eigen::Index{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index j = (k >> control) & 1 ? k ^ (Eigen::Index{1} << target) : k;
    m(j, k) = 1.0;
  }
  return m;
}

/// Transverse-field Ising chain sum_i X_i + J sum Z_i Z_{i+1} from strings.
inline Eigen::MatrixXcd tfim(std::size_t n, double J, bool periodic) {
  const auto d = Eigen::Index{1} << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    std::string s(n, 'I');
    s[i] = 'X';
    h += string_matrix(s);
  }
  const std::size_t bonds = periodic && n > 2 ? n : n - 1;
  for (std::size_t i = 0; i < bonds; ++i) {
    std::string s(n, 'I');
    s[i] = 'Z';
    s[(i + 1) % n] = 'Z';
    h += J * string_matrix(s);
  }
  return h;
}

inline Eigen::VectorXcd random_state(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(Eigen::Index{1} << n);
  for (auto& a : v) a = cplx(g(rng), g(rng));
  return v / v.norm();
}

inline Eigen::MatrixXcd random_density(std::size_t n, std::size_t rank, std::uint64_t seed) {
  const auto d = Eigen::Index{1} << n;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  double total = 0.0;
  for (std::size_t r = 0; r < rank; ++r) {
    const Eigen::VectorXcd v = random_state(n, seed * 1000 + r);
    const double w = u(rng);
    rho += w * v * v.adjoint();
    total += w;
  }
  return rho / total;
}

inline std::string random_letters(std::size_t n, std::mt19937_64& rng, bool allow_identity = true) {
  const char* pool = allow_identity ? "IXYZ" : "XYZ";
  std::uniform_int_distribution<int> pick(0, allow_identity ? 3 : 2);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += pool[pick(rng)];
  return s;
}

}  // namespace oracle
