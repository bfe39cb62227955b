#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hrvqe/measurement.hpp"
#include "hrvqe/models.hpp"
#include "hrvqe/pauli.hpp"
#include "hrvqe/state.hpp"

namespace hrvqe {

enum class CovarianceMode { Exact, Sampled };

/// Q_ij = <(H_i H_j + H_j H_i)/2> - <H_i><H_j> over a labelled basis.
struct CovarianceEstimate {
  Eigen::MatrixXd matrix;
  CovarianceMode mode = CovarianceMode::Exact;
  std::uint64_t shots = 0;   // per measurement group, sampled mode only
  std::uint64_t seed = 0;
  std::size_t group_count = 0;
};

/// Precomputes the symmetrized products of a basis and the measurement
/// groups needed to estimate them, so repeated evaluations on many states
/// only pay for the expectations.
class CovariancePlan {
 public:
  explicit CovariancePlan(LabeledBasis basis);

  const LabeledBasis& basis() const { return basis_; }
  std::size_t size() const { return basis_.size(); }
  /// (H_i H_j + H_j H_i) / 2.
  const OperatorSum& product(std::size_t i, std::size_t j) const;
  const std::vector<QwcGroup>& groups() const { return plan_.groups(); }

  CovarianceEstimate exact(const QuantumState& state) const;
  /// Exact Q of the globally depolarized state p I/d + (1 - p) rho, using
  /// <P> -> (1 - p) <P> for every non-identity Pauli word.
  CovarianceEstimate exact_global_depolarized(const QuantumState& state, double p) const;
  /// Draws `shots` samples per measurement group; deterministic per seed.
  CovarianceEstimate sampled(const QuantumState& state, std::uint64_t shots, std::uint64_t seed) const;
  /// Same as sampled() from precomputed group distributions.
  std::vector<std::vector<double>> distributions(const QuantumState& state) const { return plan_.distributions(state); }
  CovarianceEstimate sampled_from(const std::vector<std::vector<double>>& distributions, std::uint64_t shots,
                                  std::uint64_t seed) const;

 private:
  Eigen::MatrixXd assemble(const std::vector<double>& word_values) const;

  LabeledBasis basis_;
  std::vector<OperatorSum> products_;  // packed upper triangle, row-major
  std::vector<PauliWord> words_;
  std::map<PauliWord, std::size_t> word_index_;
  PauliMeasurementPlan plan_;
};

CovarianceEstimate covariance_exact(const LabeledBasis& basis, const QuantumState& state);
CovarianceEstimate covariance_sampled(const LabeledBasis& basis, const QuantumState& state,
                                      std::uint64_t shots, std::uint64_t seed);

/// Lowest-eigenvalue eigenvector of Q compared with the normalized target
/// coefficients.
struct Reconstruction {
  Eigen::VectorXd coefficients;  // unit norm, <coefficients, true> >= 0
  Eigen::VectorXd true_normalized;
  Eigen::VectorXd eigenvalues;   // ascending
  bool degenerate = false;
  double hr_distance = 0.0;      // in [0, sqrt(2)]
};

/// Eigen-decomposes Q, takes the eigenvector of the smallest eigenvalue with
/// its sign fixed against the target, and returns its L2 distance to the
/// normalized target. When sigma_2 - sigma_1 < 1e-10 * max(1, sigma_N) the
/// flag is set and the vector is the unit projection of the target onto the
/// near-degenerate eigenspace.
Reconstruction reconstruct(const Eigen::MatrixXd& q, const Eigen::VectorXd& true_coeffs);
inline Reconstruction reconstruct(const CovarianceEstimate& q, const Eigen::VectorXd& true_coeffs) {
  return reconstruct(q.matrix, true_coeffs);
}

/// L2 distance between a unit vector (sign-fixed against the target) and
/// the normalized target.
double signed_distance(const Eigen::VectorXd& unit, const Eigen::VectorXd& target_normalized);

/// <H^2> - <H>^2, clamped at zero.
double hamiltonian_variance(const OperatorSum& h, const QuantumState& state);

struct PerturbationCheck {
  double lhs = 0.0;  // |HR(Q + eps dQ) - HR(Q)|
  double rhs = 0.0;  // eps / sigma_2 * ||dQ||_2
  bool holds = false;
};

/// Compares the first-order robustness bound against the actual change in
/// HR distance. Throws DomainError when Q is degenerate.
PerturbationCheck perturbation_bound_check(const Eigen::MatrixXd& q, const Eigen::MatrixXd& dq,
                                           double epsilon, const Eigen::VectorXd& true_coeffs,
                                           double slack = 0.05);

/// Spectral norm of a symmetric matrix.
double spectral_norm(const Eigen::MatrixXd& m);

nlohmann::json reconstruction_to_json(const Reconstruction& r, const LabeledBasis& basis,
                                      const Eigen::VectorXd& true_coeffs, const CovarianceEstimate& q);

std::string to_string(CovarianceMode m);

}  // namespace hrvqe
