#include "hrvqe/state.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "hrvqe/errors.hpp"
#include "hrvqe/rng.hpp"

namespace hrvqe {

namespace {

using Mat2 = std::array<cplx, 4>;  // row-major 2x2

constexpr double kInvSqrt2 = 0.70710678118654752440;

Mat2 hadamard() { return {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2}; }

Mat2 ry(double theta) {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  return {c, -s, s, c};
}

// H * S^dagger: maps the Y eigenbasis onto the computational basis.
Mat2 y_to_z() {
  const cplx mi{0.0, -kInvSqrt2};
  const cplx pi{0.0, kInvSqrt2};
  return {kInvSqrt2, mi, kInvSqrt2, pi};
}

Mat2 conj(const Mat2& m) { return {std::conj(m[0]), std::conj(m[1]), std::conj(m[2]), std::conj(m[3])}; }

// Plain complex product; operator* goes through the Annex G NaN/Inf path.
inline cplx mul(const cplx& x, const cplx& y) {
  return {x.real() * y.real() - x.imag() * y.imag(), x.real() * y.imag() + x.imag() * y.real()};
}

// Applies m to bit `bit` of a flat buffer of length `size`.
void apply_mat2(cplx* data, std::uint64_t size, unsigned bit, const Mat2& m) {
  const std::uint64_t stride = std::uint64_t{1} << bit;
  for (std::uint64_t base = 0; base < size; base += 2 * stride) {
    for (std::uint64_t i = base; i < base + stride; ++i) {
      const cplx a = data[i];
      const cplx b = data[i + stride];
      data[i] = mul(m[0], a) + mul(m[1], b);
      data[i + stride] = mul(m[2], a) + mul(m[3], b);
    }
  }
}

// CNOT as a permutation on bits (control, target) of a flat buffer.
void apply_cnot_bits(cplx* data, std::uint64_t size, unsigned control, unsigned target) {
  const std::uint64_t cmask = std::uint64_t{1} << control;
  const std::uint64_t tmask = std::uint64_t{1} << target;
  const unsigned lo = std::min(control, target);
  const unsigned hi = std::max(control, target);
  // Enumerate indices with both bits clear by inserting zeros at lo and hi.
  for (std::uint64_t k = 0; k < size / 4; ++k) {
    std::uint64_t i = ((k >> lo) << (lo + 1)) | (k & ((std::uint64_t{1} << lo) - 1));
    i = ((i >> hi) << (hi + 1)) | (i & ((std::uint64_t{1} << hi) - 1));
    std::swap(data[i | cmask], data[i | cmask | tmask]);
  }
}

void apply_mat2_state(QuantumState& s, std::size_t q, const Mat2& m) {
  const auto n = static_cast<unsigned>(s.n_qubits());
  if (s.is_pure()) {
    auto& psi = s.amplitudes_mut();
    apply_mat2(psi.data(), static_cast<std::uint64_t>(psi.size()), static_cast<unsigned>(q), m);
  } else {
    auto& rho = s.density_mut();
    const std::uint64_t size = static_cast<std::uint64_t>(rho.size());
    apply_mat2(rho.data(), size, static_cast<unsigned>(q), m);
    apply_mat2(rho.data(), size, static_cast<unsigned>(q) + n, conj(m));
  }
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(fmt::format("{} probability {} outside [0, 1]", what, p));
  }
}

}  // namespace

QuantumState QuantumState::zero(std::size_t n_qubits) {
  if (n_qubits == 0 || n_qubits > 30) throw DomainError(fmt::format("unsupported qubit count {}", n_qubits));
  QuantumState s;
  s.n_ = n_qubits;
  s.psi_ = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s.dim()));
  s.psi_(0) = 1.0;
  return s;
}

QuantumState QuantumState::zero_mixed(std::size_t n_qubits) {
  if (n_qubits == 0 || n_qubits > 14) throw DomainError(fmt::format("unsupported qubit count {} for a density matrix", n_qubits));
  QuantumState s;
  s.n_ = n_qubits;
  s.mixed_ = true;
  const auto d = static_cast<Eigen::Index>(s.dim());
  s.rho_ = Eigen::MatrixXcd::Zero(d, d);
  s.rho_(0, 0) = 1.0;
  return s;
}

QuantumState QuantumState::from_amplitudes(Eigen::VectorXcd amplitudes) {
  const auto size = static_cast<std::uint64_t>(amplitudes.size());
  if (size < 2 || !std::has_single_bit(size)) {
    throw DimensionError(fmt::format("amplitude vector length {} is not a power of two", size));
  }
  const double norm = amplitudes.norm();
  if (!std::isfinite(norm)) throw NumericalError("non-finite amplitudes");
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw DomainError(fmt::format("state norm {} deviates from 1", norm));
  }
  QuantumState s;
  s.n_ = static_cast<std::size_t>(std::countr_zero(size));
  s.psi_ = std::move(amplitudes);
  return s;
}

QuantumState QuantumState::from_density(Eigen::MatrixXcd rho) {
  const auto size = static_cast<std::uint64_t>(rho.rows());
  if (rho.rows() != rho.cols() || size < 2 || !std::has_single_bit(size)) {
    throw DimensionError("density matrix must be square with power-of-two dimension");
  }
  if (!rho.allFinite()) throw NumericalError("non-finite density matrix");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw DomainError("density matrix is not Hermitian");
  }
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > kNormTolerance) {
    throw DomainError(fmt::format("density matrix trace {} deviates from 1", tr));
  }
  // Positivity to -1e-8: rho + 1e-8 I must admit a Cholesky factorization.
  Eigen::MatrixXcd shifted = rho;
  shifted.diagonal().array() += 1e-8;
  if (Eigen::LLT<Eigen::MatrixXcd>(shifted).info() != Eigen::Success) {
    throw DomainError("density matrix has a negative eigenvalue");
  }
  QuantumState s;
  s.n_ = static_cast<std::size_t>(std::countr_zero(size));
  s.mixed_ = true;
  s.rho_ = std::move(rho);
  return s;
}

const Eigen::VectorXcd& QuantumState::amplitudes() const {
  if (mixed_) throw DomainError("state is a density matrix, not a statevector");
  return psi_;
}

const Eigen::MatrixXcd& QuantumState::density() const {
  if (!mixed_) throw DomainError("state is a statevector, not a density matrix");
  return rho_;
}

Eigen::VectorXcd& QuantumState::amplitudes_mut() {
  if (mixed_) throw DomainError("state is a density matrix, not a statevector");
  return psi_;
}

Eigen::MatrixXcd& QuantumState::density_mut() {
  if (!mixed_) throw DomainError("state is a statevector, not a density matrix");
  return rho_;
}

QuantumState QuantumState::to_mixed() const {
  if (mixed_) return *this;
  if (n_ > 14) throw DomainError(fmt::format("unsupported qubit count {} for a density matrix", n_));
  QuantumState s;
  s.n_ = n_;
  s.mixed_ = true;
  s.rho_ = psi_ * psi_.adjoint();
  return s;
}

void NoiseModel::validate() const {
  check_probability(p1, "1-qubit depolarizing");
  check_probability(p2, "2-qubit depolarizing");
}

MeasurementBasis::MeasurementBasis(std::vector<Pauli> letters) : letters_(std::move(letters)) {
  if (letters_.empty()) throw DomainError("measurement basis needs at least one qubit");
  for (Pauli p : letters_) {
    if (p == Pauli::I) throw DomainError("measurement basis letters must be X, Y, or Z");
  }
}

MeasurementBasis MeasurementBasis::all(std::size_t n_qubits, Pauli p) {
  return MeasurementBasis(std::vector<Pauli>(n_qubits, p));
}

MeasurementBasis MeasurementBasis::parse(std::string_view letters) {
  std::vector<Pauli> out;
  for (char c : letters) out.push_back(pauli_from_char(c));
  return MeasurementBasis(std::move(out));
}

std::string MeasurementBasis::to_string() const {
  std::string s;
  for (Pauli p : letters_) s += to_char(p);
  return s;
}

void apply_gate(QuantumState& state, const Gate& gate, std::span<const double> params) {
  const std::size_t n = state.n_qubits();
  if (gate.target >= n || (gate.is_two_qubit() && gate.control >= n)) {
    throw DimensionError(fmt::format("gate qubit out of range for {} qubits", n));
  }
  switch (gate.kind) {
    case GateKind::Hadamard:
      apply_mat2_state(state, gate.target, hadamard());
      break;
    case GateKind::RY: {
      double angle = gate.angle;
      if (gate.param) {
        if (*gate.param >= params.size()) {
          throw DimensionError(fmt::format("RY reads slot {} but only {} parameters given",
                                           *gate.param, params.size()));
        }
        angle = params[*gate.param];
      }
      apply_mat2_state(state, gate.target, ry(angle));
      break;
    }
    case GateKind::CNOT: {
      if (gate.control == gate.target) throw DomainError("CNOT control equals target");
      const auto c = static_cast<unsigned>(gate.control);
      const auto t = static_cast<unsigned>(gate.target);
      if (state.is_pure()) {
        auto& psi = state.amplitudes_mut();
        apply_cnot_bits(psi.data(), static_cast<std::uint64_t>(psi.size()), c, t);
      } else {
        auto& rho = state.density_mut();
        const auto size = static_cast<std::uint64_t>(rho.size());
        const auto nn = static_cast<unsigned>(n);
        apply_cnot_bits(rho.data(), size, c, t);
        apply_cnot_bits(rho.data(), size, c + nn, t + nn);
      }
      break;
    }
  }
}

QuantumState apply_circuit(QuantumState state, const Circuit& circuit,
                           std::span<const double> params,
                           const std::optional<NoiseModel>& noise) {
  if (circuit.n_qubits() != state.n_qubits()) {
    throw DimensionError(fmt::format("{}-qubit circuit applied to {}-qubit state",
                                     circuit.n_qubits(), state.n_qubits()));
  }
  if (params.size() != param_count(circuit)) {
    throw DimensionError(fmt::format("circuit expects {} parameters, got {}",
                                     param_count(circuit), params.size()));
  }
  if (noise) {
    noise->validate();
    if (state.is_pure()) state = state.to_mixed();
  }
  for (const auto& g : circuit.gates()) {
    apply_gate(state, g, params);
    if (!noise) continue;
    if (g.is_two_qubit()) {
      if (noise->p2 > 0.0) {
        const std::array<std::size_t, 2> support{g.control, g.target};
        depolarize_local(state, support, noise->p2);
      }
    } else if (noise->p1 > 0.0) {
      const std::array<std::size_t, 1> support{g.target};
      depolarize_local(state, support, noise->p1);
    }
  }
  return state;
}

QuantumState prepare(const Circuit& circuit, std::span<const double> params,
                     const std::optional<NoiseModel>& noise) {
  return apply_circuit(QuantumState::zero(circuit.n_qubits()), circuit, params, noise);
}

void depolarize_local(QuantumState& state, std::span<const std::size_t> qubits, double p) {
  check_probability(p, "depolarizing");
  if (qubits.empty() || qubits.size() > 2) throw DomainError("local depolarization acts on 1 or 2 qubits");
  const std::size_t n = state.n_qubits();
  for (auto q : qubits) {
    if (q >= n) throw DimensionError(fmt::format("qubit {} out of range for {} qubits", q, n));
  }
  if (qubits.size() == 2 && qubits[0] == qubits[1]) throw DomainError("repeated qubit in depolarizing support");
  if (p == 0.0) return;

  auto& rho = state.density_mut();
  cplx* data = rho.data();
  const auto size = static_cast<std::uint64_t>(rho.size());

  // Offsets of the local row/column patterns; local index s has row bits
  // row_off[s] and column bits col_off[s].
  const std::size_t k = qubits.size();
  const std::size_t d_local = std::size_t{1} << k;
  std::array<std::uint64_t, 4> row_off{};
  std::array<std::uint64_t, 4> col_off{};
  std::uint64_t local_mask = 0;
  for (std::size_t s = 0; s < d_local; ++s) {
    for (std::size_t j = 0; j < k; ++j) {
      if ((s >> j) & 1U) {
        row_off[s] |= std::uint64_t{1} << qubits[j];
        col_off[s] |= std::uint64_t{1} << (qubits[j] + n);
      }
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    local_mask |= (std::uint64_t{1} << qubits[j]) | (std::uint64_t{1} << (qubits[j] + n));
  }

  const double keep = 1.0 - p;
  const double mix = p / static_cast<double>(d_local);
  for (std::uint64_t base = 0; base < size; ++base) {
    if (base & local_mask) continue;
    cplx trace{0.0, 0.0};
    for (std::size_t s = 0; s < d_local; ++s) trace += data[base | row_off[s] | col_off[s]];
    for (std::size_t a = 0; a < d_local; ++a) {
      for (std::size_t b = 0; b < d_local; ++b) {
        cplx& v = data[base | row_off[a] | col_off[b]];
        v *= keep;
        if (a == b) v += mix * trace;
      }
    }
  }
}

void depolarize_global(QuantumState& state, double p) {
  check_probability(p, "depolarizing");
  auto& rho = state.density_mut();
  rho *= (1.0 - p);
  rho.diagonal().array() += p / static_cast<double>(state.dim());
}

QuantumState depolarized_global(const QuantumState& state, double p) {
  QuantumState out = state.to_mixed();
  depolarize_global(out, p);
  return out;
}

std::vector<double> outcome_probabilities(const QuantumState& state, const MeasurementBasis& basis) {
  if (basis.n_qubits() != state.n_qubits()) {
    throw DimensionError(fmt::format("{}-qubit basis for a {}-qubit state", basis.n_qubits(),
                                     state.n_qubits()));
  }
  QuantumState rotated = state;
  for (std::size_t q = 0; q < basis.n_qubits(); ++q) {
    switch (basis.letter(q)) {
      case Pauli::X: apply_mat2_state(rotated, q, hadamard()); break;
      case Pauli::Y: apply_mat2_state(rotated, q, y_to_z()); break;
      default: break;
    }
  }
  const auto d = static_cast<std::size_t>(state.dim());
  std::vector<double> probs(d);
  if (rotated.is_pure()) {
    const auto& psi = rotated.amplitudes();
    for (std::size_t i = 0; i < d; ++i) probs[i] = std::norm(psi(static_cast<Eigen::Index>(i)));
  } else {
    const auto& rho = rotated.density();
    for (std::size_t i = 0; i < d; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      probs[i] = std::max(0.0, rho(ii, ii).real());
    }
  }
  return probs;
}

ShotCounts sample_counts(const std::vector<double>& probs, const MeasurementBasis& basis, std::uint64_t shots,
                         std::uint64_t seed) {
  if (shots == 0) throw DomainError("shot count must be at least 1");
  if (probs.size() != (std::size_t{1} << basis.n_qubits())) {
    throw DimensionError("outcome distribution does not match the basis width");
  }
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  if (!(acc > 0.0) || !std::isfinite(acc)) throw NumericalError("outcome distribution has no mass");

  ShotCounts out{basis, std::vector<std::uint64_t>(probs.size(), 0), shots};
  Rng rng(seed);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = uniform01(rng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    // Rounding can land past the last outcome with mass; step back to it.
    auto idx = static_cast<std::size_t>(it - cdf.begin());
    while (probs[idx] == 0.0 && idx > 0) --idx;
    ++out.counts[idx];
  }
  return out;
}

ShotCounts measure_counts(const QuantumState& state, const MeasurementBasis& basis,
                          std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw DomainError("shot count must be at least 1");
  return sample_counts(outcome_probabilities(state, basis), basis, shots, seed);
}

bool basis_compatible(const MeasurementBasis& basis, const PauliWord& word) {
  std::uint64_t support = word.support();
  while (support != 0) {
    const auto q = static_cast<std::size_t>(std::countr_zero(support));
    support &= support - 1;
    if (q >= basis.n_qubits() || word.letter(q) != basis.letter(q)) return false;
  }
  return true;
}

double estimate_word_expectation(const ShotCounts& counts, const PauliWord& word) {
  if (!basis_compatible(counts.basis, word)) {
    throw DomainError(fmt::format("Pauli word {} is not diagonal in basis {}",
                                  PauliString(counts.basis.n_qubits(), word).letters(),
                                  counts.basis.to_string()));
  }
  if (counts.shots == 0) throw DomainError("no shots recorded");
  const std::uint64_t support = word.support();
  std::int64_t sum = 0;
  for (std::uint64_t b = 0; b < counts.counts.size(); ++b) {
    const auto c = static_cast<std::int64_t>(counts.counts[b]);
    if (c == 0) continue;
    sum += (std::popcount(b & support) & 1) ? -c : c;
  }
  return static_cast<double>(sum) / static_cast<double>(counts.shots);
}

double estimate_string_expectation(const ShotCounts& counts, const PauliString& string) {
  if (string.n_qubits() != counts.basis.n_qubits()) {
    throw DimensionError("Pauli string and measurement basis differ in qubit count");
  }
  if (string.phase_power() % 2 != 0) throw DomainError("string with imaginary phase is not an observable");
  const double v = estimate_word_expectation(counts, string.word());
  return string.phase_power() == 0 ? v : -v;
}

double fidelity(const QuantumState& state, const QuantumState& reference) {
  if (state.n_qubits() != reference.n_qubits()) {
    throw DimensionError(fmt::format("fidelity between {}- and {}-qubit states", state.n_qubits(),
                                     reference.n_qubits()));
  }
  const auto& ref = reference.amplitudes();
  if (state.is_pure()) return std::norm(ref.dot(state.amplitudes()));
  const cplx v = ref.dot(state.density() * ref);
  return std::clamp(v.real(), 0.0, 1.0);
}

}  // namespace hrvqe
