#pragma once

#include <cstdint>
#include <vector>

#include "hrvqe/pauli.hpp"
#include "hrvqe/state.hpp"

namespace hrvqe {

/// A measurement setting and the Pauli words read from its shots.
struct QwcGroup {
  MeasurementBasis basis;
  std::vector<PauliWord> words;
};

/// Greedy qubit-wise-commuting grouping. Words are visited by descending
/// weight (ties in word order) and placed in the first group whose letters
/// agree on their support; unconstrained qubits are measured in Z. The
/// identity word is skipped. Deterministic for a given input set.
std::vector<QwcGroup> group_qubit_wise_commuting(std::vector<PauliWord> words, std::size_t n_qubits);

/// Shot-based estimator for a fixed set of Pauli words.
class PauliMeasurementPlan {
 public:
  PauliMeasurementPlan(std::vector<PauliWord> words, std::size_t n_qubits);

  const std::vector<QwcGroup>& groups() const { return groups_; }
  std::size_t n_qubits() const { return n_; }

  /// Expectation of every requested word, in the order of `words()`. Each
  /// group draws `shots` samples from substream (seed, group index). The
  /// identity word estimates to exactly 1.
  std::vector<double> estimate(const QuantumState& state, std::uint64_t shots, std::uint64_t seed) const;
  /// Outcome distribution of every group; lets repeated sampling of one
  /// state skip the basis rotations.
  std::vector<std::vector<double>> distributions(const QuantumState& state) const;
  std::vector<double> estimate_from(const std::vector<std::vector<double>>& distributions, std::uint64_t shots,
                                    std::uint64_t seed) const;
  /// Exact expectation of every requested word.
  std::vector<double> exact(const QuantumState& state) const;

  const std::vector<PauliWord>& words() const { return words_; }

 private:
  std::size_t n_;
  std::vector<PauliWord> words_;
  std::vector<QwcGroup> groups_;
  // For each word: (group index, slot within group); identity -> npos.
  std::vector<std::pair<std::size_t, std::size_t>> location_;
};

/// Shot-based <H> with one measurement group per QWC basis.
class EnergyEstimator {
 public:
  explicit EnergyEstimator(const OperatorSum& h);

  double exact(const QuantumState& state) const;
  double sampled(const QuantumState& state, std::uint64_t shots, std::uint64_t seed) const;
  /// Analytic standard deviation of `sampled` at this shot count, treating
  /// the groups as independent and using exact moments.
  double sampled_stddev(const QuantumState& state, std::uint64_t shots) const;
  std::size_t group_count() const { return plan_.groups().size(); }

 private:
  OperatorSum h_;
  PauliMeasurementPlan plan_;
  std::vector<double> coeffs_;
};

}  // namespace hrvqe
