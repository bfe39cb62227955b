#pragma once

#include <Eigen/Dense>

#include "hrvqe/pauli.hpp"
#include "hrvqe/state.hpp"

namespace hrvqe {

/// Residual imaginary part tolerated before an expectation is declared
/// non-real.
inline constexpr double kImaginaryTolerance = 1e-10;

/// <P> for a phase-free word.
cplx word_expectation(const PauliWord& word, const QuantumState& state);

/// <A> = <psi|A|psi> or Tr(rho A). Throws DimensionError on mismatched
/// registers, DomainError on a state whose norm or trace is off by more than
/// 1e-8, and NumericalError when the imaginary residue exceeds 1e-10.
double expectation_exact(const OperatorSum& a, const QuantumState& state);

/// A|psi> without forming the dense matrix.
Eigen::VectorXcd apply_operator(const OperatorSum& a, const Eigen::VectorXcd& psi);

}  // namespace hrvqe
