#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hrvqe/circuit.hpp"
#include "hrvqe/pauli.hpp"

namespace hrvqe {

using cplx = std::complex<double>;

/// Pure statevector or density matrix over n qubits, little-endian basis.
///
/// Density matrices are stored column-major, so in the flattened buffer the
/// low n bits of an index select the row and the high n bits the column.
class QuantumState {
 public:
  static constexpr double kNormTolerance = 1e-8;

  /// |0...0> as a statevector.
  static QuantumState zero(std::size_t n_qubits);
  /// |0...0><0...0| as a density matrix.
  static QuantumState zero_mixed(std::size_t n_qubits);
  /// Validates the length (a power of two) and unit norm.
  static QuantumState from_amplitudes(Eigen::VectorXcd amplitudes);
  /// Validates Hermiticity, unit trace, and positivity.
  static QuantumState from_density(Eigen::MatrixXcd rho);

  bool is_pure() const { return !mixed_; }
  std::size_t n_qubits() const { return n_; }
  std::uint64_t dim() const { return std::uint64_t{1} << n_; }

  /// Throws DomainError on a mixed state.
  const Eigen::VectorXcd& amplitudes() const;
  /// Throws DomainError on a pure state.
  const Eigen::MatrixXcd& density() const;

  /// Density-matrix form of this state (a copy when already mixed).
  QuantumState to_mixed() const;

  /// Unchecked mutable access for kernels that own this state.
  Eigen::VectorXcd& amplitudes_mut();
  Eigen::MatrixXcd& density_mut();

 private:
  QuantumState() = default;

  std::size_t n_ = 0;
  bool mixed_ = false;
  Eigen::VectorXcd psi_;
  Eigen::MatrixXcd rho_;
};

/// Gate-local depolarization strengths.
struct NoiseModel {
  double p1 = 0.0;  // after every 1-qubit gate
  double p2 = 0.0;  // after every CNOT

  void validate() const;
  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

/// One of X, Y, Z per qubit.
class MeasurementBasis {
 public:
  explicit MeasurementBasis(std::vector<Pauli> letters);
  static MeasurementBasis all(std::size_t n_qubits, Pauli p);
  static MeasurementBasis parse(std::string_view letters);

  std::size_t n_qubits() const { return letters_.size(); }
  Pauli letter(std::size_t q) const { return letters_.at(q); }
  const std::vector<Pauli>& letters() const { return letters_; }
  std::string to_string() const;

  friend bool operator==(const MeasurementBasis&, const MeasurementBasis&) = default;

 private:
  std::vector<Pauli> letters_;
};

struct ShotCounts {
  MeasurementBasis basis;
  /// counts[b] = number of shots with outcome bitstring b (bit q = qubit q).
  std::vector<std::uint64_t> counts;
  std::uint64_t shots = 0;
};

/// Applies a single gate in place. `params` supplies angles of slot-bound RY
/// gates.
void apply_gate(QuantumState& state, const Gate& gate, std::span<const double> params = {});

/// Runs the circuit gate by gate. With a noise model the state is promoted to
/// a density matrix and each gate is followed by a local depolarizing channel
/// on its support (p1 for 1-qubit gates, p2 for CNOT).
QuantumState apply_circuit(QuantumState state, const Circuit& circuit,
                           std::span<const double> params,
                           const std::optional<NoiseModel>& noise = std::nullopt);

/// Convenience: U(params)|0...0>.
QuantumState prepare(const Circuit& circuit, std::span<const double> params,
                     const std::optional<NoiseModel>& noise = std::nullopt);

/// rho -> (1-p) rho + p Tr_S(rho) (x) I_S / d_S on one or two qubits S.
void depolarize_local(QuantumState& state, std::span<const std::size_t> qubits, double p);

/// rho -> (1-p) rho + p I / 2^n.
void depolarize_global(QuantumState& state, double p);
QuantumState depolarized_global(const QuantumState& state, double p);

/// Outcome distribution after rotating each qubit into `basis`
/// (X: H, Y: S^dagger then H, Z: none).
std::vector<double> outcome_probabilities(const QuantumState& state, const MeasurementBasis& basis);

/// Samples `shots` outcomes from a precomputed distribution over 2^n
/// outcomes (as returned by outcome_probabilities).
ShotCounts sample_counts(const std::vector<double>& probs, const MeasurementBasis& basis, std::uint64_t shots,
                         std::uint64_t seed);

/// Samples `shots` outcomes; deterministic for a fixed seed.
ShotCounts measure_counts(const QuantumState& state, const MeasurementBasis& basis,
                          std::uint64_t shots, std::uint64_t seed);

/// Whether `basis` measures every non-identity letter of `word` directly.
bool basis_compatible(const MeasurementBasis& basis, const PauliWord& word);

/// Empirical mean of the string's +-1 eigenvalue over the recorded shots.
double estimate_string_expectation(const ShotCounts& counts, const PauliString& string);
double estimate_word_expectation(const ShotCounts& counts, const PauliWord& word);

/// |<ref|psi>|^2 or <ref|rho|ref>.
double fidelity(const QuantumState& state, const QuantumState& reference);

}  // namespace hrvqe
