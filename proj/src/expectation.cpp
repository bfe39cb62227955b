#include "hrvqe/expectation.hpp"

#include <cmath>

#include <fmt/format.h>

#include "hrvqe/errors.hpp"

namespace hrvqe {

namespace {

void check_normalized(const QuantumState& state) {
  const double norm = state.is_pure() ? state.amplitudes().squaredNorm()
                                      : state.density().trace().real();
  if (std::abs(norm - 1.0) > QuantumState::kNormTolerance) {
    throw DomainError(fmt::format("state is not normalized (norm {})", norm));
  }
}

}  // namespace

cplx word_expectation(const PauliWord& w, const QuantumState& state) {
  const std::uint64_t d = state.dim();
  cplx acc{0.0, 0.0};
  if (state.is_pure()) {
    const cplx* psi = state.amplitudes().data();
    for (std::uint64_t k = 0; k < d; ++k) {
      acc += std::conj(psi[k ^ w.x]) * i_power(word_action_power(w, k)) * psi[k];
    }
  } else {
    // Tr(rho P) = sum_k <k|rho P|k> = sum_k phase(k) rho(k, k ^ x).
    const auto& rho = state.density();
    for (std::uint64_t k = 0; k < d; ++k) {
      acc += i_power(word_action_power(w, k)) *
             rho(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k ^ w.x));
    }
  }
  return acc;
}

double expectation_exact(const OperatorSum& a, const QuantumState& state) {
  if (a.n_qubits() != state.n_qubits()) {
    throw DimensionError(fmt::format("{}-qubit operator on a {}-qubit state", a.n_qubits(),
                                     state.n_qubits()));
  }
  check_normalized(state);
  cplx total{0.0, 0.0};
  for (const auto& [w, c] : a.terms()) {
    total += c * (w.is_identity() ? cplx{1.0, 0.0} : word_expectation(w, state));
  }
  double scale = 1.0;
  for (const auto& [w, c] : a.terms()) scale += std::abs(c);
  if (std::abs(total.imag()) > kImaginaryTolerance * scale) {
    throw NumericalError(fmt::format("expectation has imaginary residue {}", total.imag()));
  }
  return total.real();
}

Eigen::VectorXcd apply_operator(const OperatorSum& a, const Eigen::VectorXcd& psi) {
  const auto d = static_cast<std::uint64_t>(psi.size());
  if (d != (std::uint64_t{1} << a.n_qubits())) {
    throw DimensionError("operator and vector dimensions differ");
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  cplx* o = out.data();
  const cplx* in = psi.data();
  for (const auto& [w, c] : a.terms()) {
    for (std::uint64_t k = 0; k < d; ++k) {
      o[k ^ w.x] += c * i_power(word_action_power(w, k)) * in[k];
    }
  }
  return out;
}

}  // namespace hrvqe
