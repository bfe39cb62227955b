#include "hrvqe/models.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <cmath>

#include <fmt/format.h>
#include <lapacke.h>

#include "hrvqe/errors.hpp"

namespace hrvqe {

void TfimSpec::validate() const {
  if (n < 2) throw DomainError(fmt::format("TFIM needs n >= 2, got {}", n));
  if (!std::isfinite(J)) throw DomainError("TFIM coupling must be finite");
}

void J1J2Spec::validate() const {
  if (rows == 0 || cols == 0 || rows * cols < 2) {
    throw DomainError(fmt::format("J1-J2 grid {}x{} needs at least 2 sites", rows, cols));
  }
  if (!std::isfinite(J1) || !std::isfinite(J2)) throw DomainError("J1-J2 couplings must be finite");
}

std::size_t model_qubits(const ModelSpec& m) {
  return std::visit(
      [](const auto& s) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, TfimSpec>) {
          return s.n;
        } else {
          return s.rows * s.cols;
        }
      },
      m);
}

std::string model_name(const ModelSpec& m) {
  if (const auto* t = std::get_if<TfimSpec>(&m)) {
    return fmt::format("tfim(n={}, J={}, {})", t->n, t->J, t->periodic ? "periodic" : "open");
  }
  const auto& g = std::get<J1J2Spec>(m);
  return fmt::format("j1j2({}x{}, J1={}, J2={})", g.rows, g.cols, g.J1, g.J2);
}

std::vector<Bond> chain_bonds(const TfimSpec& spec) {
  spec.validate();
  std::vector<Bond> bonds;
  const std::size_t count = spec.periodic ? spec.n : spec.n - 1;
  for (std::size_t i = 0; i < count; ++i) bonds.emplace_back(i, (i + 1) % spec.n);
  return bonds;
}

std::vector<Bond> grid_nearest_bonds(std::size_t rows, std::size_t cols) {
  std::vector<Bond> bonds;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c + 1 < cols; ++c) bonds.emplace_back(r * cols + c, r * cols + c + 1);
  }
  for (std::size_t r = 0; r + 1 < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) bonds.emplace_back(r * cols + c, (r + 1) * cols + c);
  }
  return bonds;
}

std::vector<Bond> grid_diagonal_bonds(std::size_t rows, std::size_t cols) {
  std::vector<Bond> bonds;
  for (std::size_t r = 0; r + 1 < rows; ++r) {
    for (std::size_t c = 0; c + 1 < cols; ++c) {
      bonds.emplace_back(r * cols + c, (r + 1) * cols + c + 1);
      bonds.emplace_back(r * cols + c + 1, (r + 1) * cols + c);
    }
  }
  return bonds;
}

OperatorSum field_sum(std::size_t n, Pauli p) {
  OperatorSum s(n);
  for (std::size_t q = 0; q < n; ++q) s.add(PauliString::single(n, q, p));
  return s;
}

OperatorSum bond_sum(std::size_t n, const std::vector<Bond>& bonds, Pauli p) {
  OperatorSum s(n);
  for (const auto& [i, j] : bonds) {
    if (i == j) throw DomainError("bond joins a site to itself");
    s.add(PauliString(n).with_letter(i, p).with_letter(j, p));
  }
  return s;
}

OperatorSum build_tfim_1d(const TfimSpec& spec) {
  spec.validate();
  return field_sum(spec.n) + spec.J * bond_sum(spec.n, chain_bonds(spec));
}

OperatorSum build_j1j2(const J1J2Spec& spec) {
  spec.validate();
  const std::size_t n = spec.rows * spec.cols;
  return field_sum(n) + spec.J1 * bond_sum(n, grid_nearest_bonds(spec.rows, spec.cols)) +
         spec.J2 * bond_sum(n, grid_diagonal_bonds(spec.rows, spec.cols));
}

OperatorSum build_hamiltonian(const ModelSpec& m) {
  if (const auto* t = std::get_if<TfimSpec>(&m)) return build_tfim_1d(*t);
  return build_j1j2(std::get<J1J2Spec>(m));
}

QuantumState SpectrumResult::state(std::size_t k) const {
  return QuantumState::from_amplitudes(vectors.at(k));
}

namespace {

bool is_real_operator(const OperatorSum& h) {
  // A word is a real matrix iff it has an even number of Y letters; the
  // sign of the phase i^{#Y} then stays real.
  return std::all_of(h.terms().begin(), h.terms().end(), [](const auto& t) {
    return std::popcount(t.first.x & t.first.z) % 2 == 0;
  });
}

}  // namespace

SpectrumResult exact_spectrum(const OperatorSum& h, std::size_t k, double energy_scale) {
  if (h.n_qubits() > kMaxDenseQubits) {
    throw DomainError(fmt::format("exact_spectrum limited to {} qubits", kMaxDenseQubits));
  }
  const Eigen::MatrixXcd m = dense_matrix(h);
  const auto dim = static_cast<std::size_t>(m.rows());
  k = std::clamp<std::size_t>(k, 2, dim);

  SpectrumResult out;
  if (is_real_operator(h)) {
    // LAPACK dsyevr computes only the requested lowest eigenpairs.
    Eigen::MatrixXd real = m.real();
    const auto n = static_cast<lapack_int>(dim);
    const auto kk = static_cast<lapack_int>(k);
    Eigen::VectorXd w(n);
    Eigen::MatrixXd z(n, kk);
    std::vector<lapack_int> support(2 * k);
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, real.data(), n, 0.0, 0.0, 1, kk,
                                           0.0, &found, w.data(), z.data(), n, support.data());
    if (info != 0 || found != kk) throw NumericalError(fmt::format("eigensolver failed (info {})", info));
    for (std::size_t i = 0; i < k; ++i) {
      out.energies.push_back(w(static_cast<Eigen::Index>(i)));
      out.vectors.emplace_back(z.col(static_cast<Eigen::Index>(i)).cast<cplx>());
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed");
    for (std::size_t i = 0; i < k; ++i) {
      out.energies.push_back(solver.eigenvalues()(static_cast<Eigen::Index>(i)));
      out.vectors.emplace_back(solver.eigenvectors().col(static_cast<Eigen::Index>(i)));
    }
  }
  for (auto& v : out.vectors) v.normalize();
  const double scale = std::abs(energy_scale);
  out.gap_over_J = scale > 0.0 ? std::abs(out.energies[0] - out.energies[1]) / scale : 0.0;
  return out;
}

SpectrumResult exact_spectrum(const ModelSpec& m, std::size_t k) {
  const double scale = std::holds_alternative<TfimSpec>(m) ? std::get<TfimSpec>(m).J
                                                           : std::get<J1J2Spec>(m).J1;
  return exact_spectrum(build_hamiltonian(m), k, scale);
}

LabeledBasis::LabeledBasis(std::vector<OperatorSum> o, std::vector<std::string> l)
    : ops(std::move(o)), labels(std::move(l)) {
  if (ops.empty()) throw DomainError("operator basis is empty");
  if (ops.size() != labels.size()) throw DomainError("basis needs one label per operator");
  for (const auto& op : ops) {
    if (op.n_qubits() != ops.front().n_qubits()) {
      throw DimensionError("basis operators act on different qubit counts");
    }
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      if (labels[i] == labels[j]) throw DomainError(fmt::format("duplicate basis label '{}'", labels[i]));
    }
  }
}

std::size_t LabeledBasis::n_qubits() const {
  if (ops.empty()) throw DomainError("operator basis is empty");
  return ops.front().n_qubits();
}

std::size_t LabeledBasis::index_of(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw DomainError(fmt::format("no basis operator labelled '{}'", label));
  return static_cast<std::size_t>(it - labels.begin());
}

LabeledBasis LabeledBasis::select(const std::vector<std::string>& wanted) const {
  std::vector<OperatorSum> o;
  for (const auto& l : wanted) o.push_back(ops[index_of(l)]);
  return LabeledBasis(std::move(o), wanted);
}

HrProblem hr_basis_for(const ModelSpec& m) {
  if (const auto* t = std::get_if<TfimSpec>(&m)) {
    t->validate();
    LabeledBasis b({field_sum(t->n), bond_sum(t->n, chain_bonds(*t))}, {"X", "ZZ"});
    Eigen::VectorXd c(2);
    c << 1.0, t->J;
    return {std::move(b), c};
  }
  const auto& g = std::get<J1J2Spec>(m);
  g.validate();
  const std::size_t n = g.rows * g.cols;
  LabeledBasis b({field_sum(n), bond_sum(n, grid_nearest_bonds(g.rows, g.cols)),
                  bond_sum(n, grid_diagonal_bonds(g.rows, g.cols))},
                 {"X", "ZZ", "ZZ_nnn"});
  Eigen::VectorXd c(3);
  c << 1.0, g.J1, g.J2;
  return {std::move(b), c};
}

LabeledBasis chain_operator_menu(std::size_t n) {
  const auto bonds = chain_bonds(TfimSpec{n, 0.0, false});
  return LabeledBasis({field_sum(n, Pauli::X), field_sum(n, Pauli::Y), field_sum(n, Pauli::Z),
                       bond_sum(n, bonds, Pauli::X), bond_sum(n, bonds, Pauli::Y),
                       bond_sum(n, bonds, Pauli::Z)},
                      {"X", "Y", "Z", "XX", "YY", "ZZ"});
}

Eigen::VectorXd span_coefficients(const LabeledBasis& basis, const OperatorSum& h, double tol) {
  if (basis.n_qubits() != h.n_qubits()) throw DimensionError("basis and operator differ in qubit count");
  // Rows are the distinct Pauli words appearing anywhere.
  std::map<PauliWord, Eigen::Index> rows;
  auto row_of = [&](const PauliWord& w) {
    const auto [it, inserted] = rows.emplace(w, static_cast<Eigen::Index>(rows.size()));
    return it->second;
  };
  for (const auto& op : basis.ops) {
    for (const auto& t : op.terms()) row_of(t.first);
  }
  for (const auto& t : h.terms()) row_of(t.first);
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (const auto& [w, c] : basis.ops[static_cast<std::size_t>(j)].terms()) a(rows.at(w), j) = c;
  }
  for (const auto& [w, c] : h.terms()) b(rows.at(w)) = c;
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
  const double residual = (a * x - b).norm();
  if (!(residual <= tol)) {
    throw DomainError(fmt::format("operator is not in the span of the basis (residual {:.3g})", residual));
  }
  return x;
}

}  // namespace hrvqe
