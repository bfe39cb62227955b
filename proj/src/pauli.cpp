#include "hrvqe/pauli.hpp"

#include <bit>
#include <cmath>
#include <fmt/format.h>

#include "hrvqe/errors.hpp"

namespace hrvqe {

namespace {

Pauli letter_of(bool x, bool z) {
  if (x && z) return Pauli::Y;
  if (x) return Pauli::X;
  if (z) return Pauli::Z;
  return Pauli::I;
}

// Power of i in the single-qubit product a*b for non-identity a != b:
// cyclic order X->Y->Z gives +i, the reverse gives -i.
int letter_product_power(Pauli a, Pauli b) {
  if (a == Pauli::I || b == Pauli::I || a == b) return 0;
  const int ia = static_cast<int>(a);
  const int ib = static_cast<int>(b);
  return ((ib - ia + 3) % 3 == 1) ? 1 : 3;
}

void check_qubits(std::size_t n) {
  if (n == 0 || n > kMaxQubits) {
    throw DomainError(fmt::format("qubit count {} outside [1, {}]", n, kMaxQubits));
  }
}

std::uint64_t full_mask(std::size_t n) {
  return n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
}

}  // namespace

char to_char(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': case 'i': return Pauli::I;
    case 'X': case 'x': return Pauli::X;
    case 'Y': case 'y': return Pauli::Y;
    case 'Z': case 'z': return Pauli::Z;
    default: throw DomainError(fmt::format("not a Pauli letter: '{}'", c));
  }
}

int PauliWord::weight() const { return std::popcount(support()); }

Pauli PauliWord::letter(std::size_t q) const {
  return letter_of((x >> q) & 1U, (z >> q) & 1U);
}

PauliString::PauliString(std::size_t n_qubits) : n_(n_qubits) { check_qubits(n_); }

PauliString::PauliString(std::size_t n_qubits, PauliWord word, int phase_power)
    : n_(n_qubits), word_(word), phase_(phase_power & 3) {
  check_qubits(n_);
  if ((word_.support() & ~full_mask(n_)) != 0) {
    throw DimensionError("Pauli word acts outside the register");
  }
}

PauliString PauliString::parse(std::string_view letters, int phase_power) {
  PauliWord w;
  for (std::size_t q = 0; q < letters.size(); ++q) {
    const Pauli p = pauli_from_char(letters[q]);
    if (p == Pauli::X || p == Pauli::Y) w.x |= std::uint64_t{1} << q;
    if (p == Pauli::Z || p == Pauli::Y) w.z |= std::uint64_t{1} << q;
  }
  return PauliString(letters.size(), w, phase_power);
}

PauliString PauliString::single(std::size_t n_qubits, std::size_t qubit, Pauli p) {
  if (qubit >= n_qubits) {
    throw DimensionError(fmt::format("qubit {} out of range for {} qubits", qubit, n_qubits));
  }
  return PauliString(n_qubits).with_letter(qubit, p);
}

std::complex<double> PauliString::phase() const { return i_power(phase_); }

PauliString PauliString::with_letter(std::size_t q, Pauli p) const {
  if (q >= n_) throw DimensionError(fmt::format("qubit {} out of range for {} qubits", q, n_));
  PauliWord w = word_;
  const std::uint64_t bit = std::uint64_t{1} << q;
  w.x &= ~bit;
  w.z &= ~bit;
  if (p == Pauli::X || p == Pauli::Y) w.x |= bit;
  if (p == Pauli::Z || p == Pauli::Y) w.z |= bit;
  return PauliString(n_, w, phase_);
}

std::string PauliString::letters() const {
  std::string s(n_, 'I');
  for (std::size_t q = 0; q < n_; ++q) s[q] = to_char(letter(q));
  return s;
}

std::string PauliString::to_string() const {
  static constexpr const char* kPhases[] = {"+", "+i", "-", "-i"};
  return kPhases[phase_] + letters();
}

bool PauliString::commutes_with(const PauliString& other) const {
  return words_commute(word_, other.word_);
}

bool words_commute(const PauliWord& a, const PauliWord& b) {
  // Symplectic form: the strings anticommute on an odd number of qubits.
  return (std::popcount((a.x & b.z) ^ (a.z & b.x)) & 1) == 0;
}

std::pair<PauliWord, int> word_product(const PauliWord& a, const PauliWord& b) {
  int power = 0;
  std::uint64_t overlap = a.support() & b.support();
  while (overlap != 0) {
    const int q = std::countr_zero(overlap);
    overlap &= overlap - 1;
    power += letter_product_power(a.letter(q), b.letter(q));
  }
  return {PauliWord{a.x ^ b.x, a.z ^ b.z}, power & 3};
}

PauliString pauli_mul(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw DimensionError(fmt::format("cannot multiply Pauli strings on {} and {} qubits",
                                     a.n_qubits(), b.n_qubits()));
  }
  const auto [w, power] = word_product(a.word(), b.word());
  return PauliString(a.n_qubits(), w, a.phase_power() + b.phase_power() + power);
}

OperatorSum::OperatorSum(std::size_t n_qubits) : n_(n_qubits) { check_qubits(n_); }

OperatorSum OperatorSum::identity(std::size_t n_qubits, double coeff) {
  OperatorSum s(n_qubits);
  s.add(PauliWord{}, coeff);
  return s;
}

OperatorSum OperatorSum::from_string(const PauliString& str, double coeff) {
  OperatorSum s(str.n_qubits());
  s.add(str, coeff);
  return s;
}

double OperatorSum::coefficient(const PauliWord& w) const {
  const auto it = terms_.find(w);
  return it == terms_.end() ? 0.0 : it->second;
}

OperatorSum& OperatorSum::add(const PauliWord& w, double coeff) {
  if (!std::isfinite(coeff)) throw NumericalError("non-finite operator coefficient");
  if ((w.support() & ~full_mask(n_)) != 0) {
    throw DimensionError("Pauli word acts outside the register");
  }
  const double updated = coefficient(w) + coeff;
  if (std::abs(updated) < kPruneThreshold) {
    terms_.erase(w);
  } else {
    terms_[w] = updated;
  }
  return *this;
}

OperatorSum& OperatorSum::add(const PauliString& s, double coeff) {
  if (s.n_qubits() != n_) {
    throw DimensionError(fmt::format("cannot add a {}-qubit string to a {}-qubit sum",
                                     s.n_qubits(), n_));
  }
  if (s.phase_power() % 2 != 0) {
    throw DomainError("imaginary string phase would break Hermiticity");
  }
  return add(s.word(), s.phase_power() == 0 ? coeff : -coeff);
}

OperatorSum& OperatorSum::operator+=(const OperatorSum& other) {
  check_same(other);
  for (const auto& [w, c] : other.terms_) add(w, c);
  return *this;
}

OperatorSum& OperatorSum::operator*=(double s) {
  if (!std::isfinite(s)) throw NumericalError("non-finite scale factor");
  std::map<PauliWord, double> scaled;
  for (const auto& [w, c] : terms_) {
    if (std::abs(c * s) >= kPruneThreshold) scaled.emplace(w, c * s);
  }
  terms_ = std::move(scaled);
  return *this;
}

std::string OperatorSum::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [w, c] : terms_) {
    if (!out.empty()) out += " + ";
    out += fmt::format("{:g}*{}", c, PauliString(n_, w).letters());
  }
  return out;
}

void OperatorSum::check_same(const OperatorSum& other) const {
  if (other.n_ != n_) {
    throw DimensionError(fmt::format("operator sums on {} and {} qubits do not combine",
                                     n_, other.n_));
  }
}

OperatorSum symmetrized_product(const OperatorSum& a, const OperatorSum& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw DimensionError(fmt::format("symmetrized product of {}- and {}-qubit sums",
                                     a.n_qubits(), b.n_qubits()));
  }
  // Commuting pairs contribute their full product (AB and BA agree), while
  // anticommuting pairs cancel. A commuting product of two phase-free
  // words always carries a real phase.
  std::map<PauliWord, double> acc;
  for (const auto& [wa, ca] : a.terms()) {
    for (const auto& [wb, cb] : b.terms()) {
      if (!words_commute(wa, wb)) continue;
      const auto [w, power] = word_product(wa, wb);
      if (power % 2 != 0) {
        throw NumericalError("internal error: commuting Pauli product with imaginary phase");
      }
      acc[w] += (power == 0 ? 1.0 : -1.0) * ca * cb;
    }
  }
  OperatorSum out(a.n_qubits());
  for (const auto& [w, c] : acc) out.add(w, c);
  return out;
}

Eigen::MatrixXcd dense_matrix(const OperatorSum& a) {
  const std::size_t n = a.n_qubits();
  if (n > kMaxDenseQubits) {
    throw DomainError(fmt::format("dense_matrix limited to {} qubits, got {}", kMaxDenseQubits, n));
  }
  const std::uint64_t dim = std::uint64_t{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [w, c] : a.terms()) {
    for (std::uint64_t k = 0; k < dim; ++k) {
      m(k ^ w.x, k) += c * i_power(word_action_power(w, k));
    }
  }
  return m;
}

}  // namespace hrvqe
