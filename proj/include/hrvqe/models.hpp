#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hrvqe/pauli.hpp"
#include "hrvqe/state.hpp"

namespace hrvqe {

/// 1D transverse-field Ising chain: sum_i X_i + J sum_i Z_i Z_{i+1}.
struct TfimSpec {
  std::size_t n = 2;
  double J = 0.5;
  bool periodic = false;

  void validate() const;
  friend bool operator==(const TfimSpec&, const TfimSpec&) = default;
};

/// Transverse field on a rows x cols grid with Z-Z couplings: J1 on
/// axis-aligned edges, J2 on both diagonals of every plaquette. Open
/// boundaries; qubit = row * cols + col.
struct J1J2Spec {
  std::size_t rows = 2;
  std::size_t cols = 3;
  double J1 = 0.5;
  double J2 = 0.2;

  void validate() const;
  friend bool operator==(const J1J2Spec&, const J1J2Spec&) = default;
};

using ModelSpec = std::variant<TfimSpec, J1J2Spec>;

std::size_t model_qubits(const ModelSpec& m);
std::string model_name(const ModelSpec& m);

using Bond = std::pair<std::size_t, std::size_t>;

std::vector<Bond> chain_bonds(const TfimSpec& spec);
std::vector<Bond> grid_nearest_bonds(std::size_t rows, std::size_t cols);
std::vector<Bond> grid_diagonal_bonds(std::size_t rows, std::size_t cols);

/// sum_i X_i over n qubits.
OperatorSum field_sum(std::size_t n, Pauli p = Pauli::X);
/// sum over bonds of P_i P_j.
OperatorSum bond_sum(std::size_t n, const std::vector<Bond>& bonds, Pauli p = Pauli::Z);

OperatorSum build_tfim_1d(const TfimSpec& spec);
OperatorSum build_j1j2(const J1J2Spec& spec);
OperatorSum build_hamiltonian(const ModelSpec& m);

struct SpectrumResult {
  std::vector<double> energies;          // ascending
  std::vector<Eigen::VectorXcd> vectors; // unit-norm, matching energies
  double gap_over_J = 0.0;               // |E0 - E1| / |J|, 0 when J = 0

  QuantumState state(std::size_t k) const;
};

/// Lowest k eigenpairs of the dense matrix (k >= 2). `energy_scale` is the
/// |J| used for gap_over_J.
SpectrumResult exact_spectrum(const OperatorSum& h, std::size_t k, double energy_scale = 1.0);
SpectrumResult exact_spectrum(const ModelSpec& m, std::size_t k);

/// Ordered operator basis for Hamiltonian reconstruction.
struct LabeledBasis {
  std::vector<OperatorSum> ops;
  std::vector<std::string> labels;

  LabeledBasis() = default;
  LabeledBasis(std::vector<OperatorSum> ops, std::vector<std::string> labels);

  std::size_t size() const { return ops.size(); }
  std::size_t n_qubits() const;
  std::size_t index_of(const std::string& label) const;
  /// Sub-basis with the given labels, in the given order.
  LabeledBasis select(const std::vector<std::string>& labels) const;
};

/// A basis together with the coefficients of the target Hamiltonian in it.
struct HrProblem {
  LabeledBasis basis;
  Eigen::VectorXd true_coeffs;
};

/// TFIM: {X, ZZ} with (1, J); J1-J2: {X, ZZ, ZZ_nnn} with (1, J1, J2).
HrProblem hr_basis_for(const ModelSpec& m);

/// The six global operators X, Y, Z, XX, YY, ZZ of an open n-qubit chain.
LabeledBasis chain_operator_menu(std::size_t n);

/// Coefficients of `h` in the span of `basis` by least squares over Pauli
/// terms; throws DomainError when the residual exceeds `tol`.
Eigen::VectorXd span_coefficients(const LabeledBasis& basis, const OperatorSum& h, double tol = 1e-10);

}  // namespace hrvqe
