#include "hrvqe/hr.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "hrvqe/errors.hpp"
#include "hrvqe/expectation.hpp"

namespace hrvqe {

namespace {

std::size_t packed_index(std::size_t i, std::size_t j, std::size_t n) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i + 1) / 2 + j;
}

std::vector<PauliWord> collect_words(const LabeledBasis& basis, const std::vector<OperatorSum>& products) {
  std::map<PauliWord, bool> seen;
  for (const auto& op : basis.ops) {
    for (const auto& t : op.terms()) seen.emplace(t.first, true);
  }
  for (const auto& p : products) {
    for (const auto& t : p.terms()) seen.emplace(t.first, true);
  }
  std::vector<PauliWord> out;
  out.reserve(seen.size());
  for (const auto& [w, _] : seen) out.push_back(w);
  return out;
}

std::vector<OperatorSum> packed_products(const LabeledBasis& basis) {
  std::vector<OperatorSum> out;
  const std::size_t n = basis.size();
  out.reserve(n * (n + 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) out.push_back(symmetrized_product(basis.ops[i], basis.ops[j]));
  }
  return out;
}

}  // namespace

std::string to_string(CovarianceMode m) { return m == CovarianceMode::Exact ? "exact" : "sampled"; }

CovariancePlan::CovariancePlan(LabeledBasis basis)
    : basis_(std::move(basis)),
      products_(packed_products(basis_)),
      words_(collect_words(basis_, products_)),
      plan_(words_, basis_.n_qubits()) {
  for (std::size_t k = 0; k < words_.size(); ++k) word_index_.emplace(words_[k], k);
}

const OperatorSum& CovariancePlan::product(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) throw DomainError("basis index out of range");
  return products_[packed_index(i, j, size())];
}

Eigen::MatrixXd CovariancePlan::assemble(const std::vector<double>& values) const {
  auto value_of = [&](const OperatorSum& op) {
    double acc = 0.0;
    for (const auto& [w, c] : op.terms()) acc += c * values[word_index_.at(w)];
    return acc;
  };
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::VectorXd mean(n);
  for (Eigen::Index i = 0; i < n; ++i) mean(i) = value_of(basis_.ops[static_cast<std::size_t>(i)]);
  Eigen::MatrixXd q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = value_of(product(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) -
                       mean(i) * mean(j);
      q(i, j) = v;
      q(j, i) = v;
    }
  }
  return q;
}

CovarianceEstimate CovariancePlan::exact(const QuantumState& state) const {
  if (state.n_qubits() != basis_.n_qubits()) {
    throw DimensionError(fmt::format("{}-qubit basis on a {}-qubit state", basis_.n_qubits(), state.n_qubits()));
  }
  CovarianceEstimate out;
  out.matrix = assemble(plan_.exact(state));
  out.mode = CovarianceMode::Exact;
  return out;
}

CovarianceEstimate CovariancePlan::exact_global_depolarized(const QuantumState& state, double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(fmt::format("depolarizing probability {} outside [0, 1]", p));
  if (state.n_qubits() != basis_.n_qubits()) {
    throw DimensionError(fmt::format("{}-qubit basis on a {}-qubit state", basis_.n_qubits(), state.n_qubits()));
  }
  std::vector<double> values = plan_.exact(state);
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!words_[k].is_identity()) values[k] *= 1.0 - p;
  }
  CovarianceEstimate out;
  out.matrix = assemble(values);
  out.mode = CovarianceMode::Exact;
  return out;
}

CovarianceEstimate CovariancePlan::sampled(const QuantumState& state, std::uint64_t shots,
                                           std::uint64_t seed) const {
  if (state.n_qubits() != basis_.n_qubits()) {
    throw DimensionError(fmt::format("{}-qubit basis on a {}-qubit state", basis_.n_qubits(), state.n_qubits()));
  }
  if (shots == 0) throw DomainError("shot count must be at least 1");
  return sampled_from(plan_.distributions(state), shots, seed);
}

CovarianceEstimate CovariancePlan::sampled_from(const std::vector<std::vector<double>>& dists, std::uint64_t shots,
                                                std::uint64_t seed) const {
  if (shots == 0) throw DomainError("shot count must be at least 1");
  CovarianceEstimate out;
  out.matrix = assemble(plan_.estimate_from(dists, shots, seed));
  out.mode = CovarianceMode::Sampled;
  out.shots = shots;
  out.seed = seed;
  out.group_count = plan_.groups().size();
  return out;
}

CovarianceEstimate covariance_exact(const LabeledBasis& basis, const QuantumState& state) {
  return CovariancePlan(basis).exact(state);
}

CovarianceEstimate covariance_sampled(const LabeledBasis& basis, const QuantumState& state,
                                      std::uint64_t shots, std::uint64_t seed) {
  return CovariancePlan(basis).sampled(state, shots, seed);
}

double signed_distance(const Eigen::VectorXd& unit, const Eigen::VectorXd& target) {
  const double sign = unit.dot(target) < 0.0 ? -1.0 : 1.0;
  return (sign * unit - target).norm();
}

Reconstruction reconstruct(const Eigen::MatrixXd& q, const Eigen::VectorXd& true_coeffs) {
  if (q.rows() != q.cols() || q.rows() != true_coeffs.size() || q.rows() == 0) {
    throw DimensionError("covariance matrix and coefficient vector sizes differ");
  }
  if (!q.allFinite() || !true_coeffs.allFinite()) throw NumericalError("non-finite covariance entries");
  const double c_norm = true_coeffs.norm();
  if (!(c_norm > 0.0)) throw DomainError("true coefficient vector is zero");

  Reconstruction r;
  r.true_normalized = true_coeffs / c_norm;
  const Eigen::MatrixXd sym = 0.5 * (q + q.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericalError("covariance eigensolver failed");
  r.eigenvalues = solver.eigenvalues();
  const Eigen::MatrixXd& v = solver.eigenvectors();
  const Eigen::Index n = sym.rows();

  Eigen::VectorXd chosen = v.col(0);
  if (n > 1) {
    const double tol = 1e-10 * std::max(1.0, std::abs(r.eigenvalues(n - 1)));
    if (r.eigenvalues(1) - r.eigenvalues(0) < tol) {
      r.degenerate = true;
      Eigen::Index k = 1;
      while (k < n && r.eigenvalues(k) - r.eigenvalues(0) < tol) ++k;
      const Eigen::MatrixXd space = v.leftCols(k);
      const Eigen::VectorXd proj = space * (space.transpose() * r.true_normalized);
      if (proj.norm() > 1e-12) chosen = proj / proj.norm();
    }
  }
  chosen.normalize();
  if (chosen.dot(r.true_normalized) < 0.0) chosen = -chosen;
  r.coefficients = chosen;
  r.hr_distance = (chosen - r.true_normalized).norm();
  return r;
}

double hamiltonian_variance(const OperatorSum& h, const QuantumState& state) {
  const double mean = expectation_exact(h, state);
  double second = 0.0;
  if (state.is_pure()) {
    second = apply_operator(h, state.amplitudes()).squaredNorm();
  } else {
    second = expectation_exact(symmetrized_product(h, h), state);
  }
  const double var = second - mean * mean;
  if (var < -1e-8 * std::max(1.0, second)) {
    throw NumericalError(fmt::format("negative Hamiltonian variance {}", var));
  }
  return std::max(0.0, var);
}

double spectral_norm(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

PerturbationCheck perturbation_bound_check(const Eigen::MatrixXd& q, const Eigen::MatrixXd& dq,
                                           double epsilon, const Eigen::VectorXd& true_coeffs,
                                           double slack) {
  if (q.rows() != dq.rows() || q.cols() != dq.cols()) throw DimensionError("Q and dQ differ in shape");
  if (q.rows() < 2) throw DomainError("perturbation bound needs at least two basis operators");
  const Reconstruction base = reconstruct(q, true_coeffs);
  const double sigma1 = base.eigenvalues(0);
  const double sigma2 = base.eigenvalues(1);
  if (!(sigma2 - sigma1 > 1e-8) || !(sigma2 > 0.0)) {
    throw DomainError(fmt::format("covariance matrix is degenerate (sigma1={}, sigma2={})", sigma1, sigma2));
  }
  const Reconstruction moved = reconstruct(q + epsilon * dq, true_coeffs);
  PerturbationCheck out;
  out.lhs = std::abs(moved.hr_distance - base.hr_distance);
  out.rhs = epsilon / sigma2 * spectral_norm(dq);
  out.holds = out.lhs <= out.rhs * (1.0 + slack);
  return out;
}

nlohmann::json reconstruction_to_json(const Reconstruction& r, const LabeledBasis& basis,
                                      const Eigen::VectorXd& true_coeffs, const CovarianceEstimate& q) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json j;
  j["labels"] = basis.labels;
  j["true_coeffs"] = vec(true_coeffs);
  j["reconstructed_coeffs"] = vec(r.coefficients);
  j["eigenvalues"] = vec(r.eigenvalues);
  j["hr_distance"] = r.hr_distance;
  j["degenerate_flag"] = r.degenerate;
  j["mode"] = to_string(q.mode);
  if (q.mode == CovarianceMode::Sampled) {
    j["shots"] = q.shots;
    j["seed"] = q.seed;
    j["group_count"] = q.group_count;
  } else {
    j["shots"] = nullptr;
    j["seed"] = nullptr;
  }
  return j;
}

}  // namespace hrvqe
