#pragma once

#include <bit>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hrvqe {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char to_char(Pauli p);
Pauli pauli_from_char(char c);

/// Largest register a Pauli word can address (one bit per qubit per mask).
inline constexpr std::size_t kMaxQubits = 64;

/// Phase-free tensor product of single-qubit Paulis in symplectic form.
/// Qubit q is bit q of both masks: X -> x only, Z -> z only, Y -> both.
struct PauliWord {
  std::uint64_t x = 0;
  std::uint64_t z = 0;

  bool is_identity() const { return x == 0 && z == 0; }
  std::uint64_t support() const { return x | z; }
  int weight() const;
  Pauli letter(std::size_t q) const;

  friend bool operator==(const PauliWord&, const PauliWord&) = default;
  friend auto operator<=>(const PauliWord&, const PauliWord&) = default;
};

/// A Pauli word with one of the four unit phases {+1, +i, -1, -i}.
///
/// The phase is stored as a power of i. Letters are indexed by qubit, so
/// `PauliString::parse("XZ")` is X on qubit 0 and Z on qubit 1.
class PauliString {
 public:
  explicit PauliString(std::size_t n_qubits);
  PauliString(std::size_t n_qubits, PauliWord word, int phase_power = 0);

  static PauliString parse(std::string_view letters, int phase_power = 0);
  static PauliString single(std::size_t n_qubits, std::size_t qubit, Pauli p);

  std::size_t n_qubits() const { return n_; }
  const PauliWord& word() const { return word_; }
  Pauli letter(std::size_t q) const { return word_.letter(q); }
  /// Phase as a power of i, in [0, 4).
  int phase_power() const { return phase_; }
  std::complex<double> phase() const;

  PauliString with_letter(std::size_t q, Pauli p) const;
  std::string letters() const;
  std::string to_string() const;

  bool commutes_with(const PauliString& other) const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  std::size_t n_;
  PauliWord word_;
  int phase_ = 0;
};

/// Qubit-wise product with phase tracking. Throws DimensionError when the
/// qubit counts differ.
PauliString pauli_mul(const PauliString& a, const PauliString& b);
inline PauliString operator*(const PauliString& a, const PauliString& b) {
  return pauli_mul(a, b);
}

/// Product of two phase-free words: returns the word of a*b and the power
/// of i picked up.
std::pair<PauliWord, int> word_product(const PauliWord& a, const PauliWord& b);

bool words_commute(const PauliWord& a, const PauliWord& b);

/// Hermitian operator: real-weighted sum of phase-free Pauli words.
///
/// Coefficients below kPruneThreshold in magnitude are dropped, so every
/// stored term is real and nonzero. Terms are kept in word order, which
/// makes iteration deterministic.
class OperatorSum {
 public:
  static constexpr double kPruneThreshold = 1e-14;

  explicit OperatorSum(std::size_t n_qubits);

  static OperatorSum identity(std::size_t n_qubits, double coeff = 1.0);
  /// Single term; the string's phase must be real (+1 or -1).
  static OperatorSum from_string(const PauliString& s, double coeff = 1.0);

  std::size_t n_qubits() const { return n_; }
  const std::map<PauliWord, double>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  double coefficient(const PauliWord& w) const;

  OperatorSum& add(const PauliWord& w, double coeff);
  OperatorSum& add(const PauliString& s, double coeff = 1.0);
  OperatorSum& operator+=(const OperatorSum& other);
  OperatorSum& operator*=(double s);

  friend OperatorSum operator+(OperatorSum a, const OperatorSum& b) {
    a += b;
    return a;
  }
  friend OperatorSum operator*(double s, OperatorSum a) {
    a *= s;
    return a;
  }
  friend bool operator==(const OperatorSum&, const OperatorSum&) = default;

  std::string to_string() const;

 private:
  void check_same(const OperatorSum& other) const;

  std::size_t n_;
  std::map<PauliWord, double> terms_;
};

/// (AB + BA) / 2. The anticommuting parts cancel, so the result is again
/// Hermitian with real coefficients.
OperatorSum symmetrized_product(const OperatorSum& a, const OperatorSum& b);

/// Largest register dense_matrix will expand.
inline constexpr std::size_t kMaxDenseQubits = 12;

/// Dense 2^n x 2^n matrix in the little-endian computational basis
/// (qubit q is bit q of the basis index).
Eigen::MatrixXcd dense_matrix(const OperatorSum& a);

/// Power of i in the basis-state action P|k> = i^m |k ^ x> of a phase-free
/// word: one factor i per Y, one factor -1 per Y or Z acting on a set bit.
inline int word_action_power(const PauliWord& w, std::uint64_t k) {
  const int n_y = std::popcount(w.x & w.z);
  const int n_minus = std::popcount(k & w.z);
  return (n_y + 2 * n_minus) & 3;
}

/// i^power for power in [0, 4).
inline std::complex<double> i_power(int power) {
  switch (power & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace hrvqe
