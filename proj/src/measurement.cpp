#include "hrvqe/measurement.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>

#include "hrvqe/errors.hpp"
#include "hrvqe/expectation.hpp"
#include "hrvqe/rng.hpp"

namespace hrvqe {

namespace {

constexpr std::size_t kNoGroup = std::numeric_limits<std::size_t>::max();

struct OpenGroup {
  std::vector<std::optional<Pauli>> letters;
  std::vector<PauliWord> words;

  bool accepts(const PauliWord& w) const {
    std::uint64_t support = w.support();
    while (support != 0) {
      const int q = std::countr_zero(support);
      support &= support - 1;
      const auto& have = letters[static_cast<std::size_t>(q)];
      if (have && *have != w.letter(static_cast<std::size_t>(q))) return false;
    }
    return true;
  }

  void add(const PauliWord& w) {
    std::uint64_t support = w.support();
    while (support != 0) {
      const int q = std::countr_zero(support);
      support &= support - 1;
      letters[static_cast<std::size_t>(q)] = w.letter(static_cast<std::size_t>(q));
    }
    words.push_back(w);
  }
};

}  // namespace

std::vector<QwcGroup> group_qubit_wise_commuting(std::vector<PauliWord> words, std::size_t n_qubits) {
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  std::stable_sort(words.begin(), words.end(),
                   [](const PauliWord& a, const PauliWord& b) { return a.weight() > b.weight(); });

  std::vector<OpenGroup> open;
  for (const auto& w : words) {
    if (w.is_identity()) continue;
    if ((w.support() >> n_qubits) != 0 && n_qubits < 64) {
      throw DimensionError("Pauli word acts outside the register");
    }
    auto it = std::find_if(open.begin(), open.end(), [&](const OpenGroup& g) { return g.accepts(w); });
    if (it == open.end()) {
      open.push_back(OpenGroup{std::vector<std::optional<Pauli>>(n_qubits), {}});
      it = std::prev(open.end());
    }
    it->add(w);
  }

  std::vector<QwcGroup> out;
  out.reserve(open.size());
  for (auto& g : open) {
    std::vector<Pauli> letters(n_qubits, Pauli::Z);
    for (std::size_t q = 0; q < n_qubits; ++q) {
      if (g.letters[q]) letters[q] = *g.letters[q];
    }
    out.push_back(QwcGroup{MeasurementBasis(std::move(letters)), std::move(g.words)});
  }
  return out;
}

PauliMeasurementPlan::PauliMeasurementPlan(std::vector<PauliWord> words, std::size_t n_qubits)
    : n_(n_qubits), words_(std::move(words)), groups_(group_qubit_wise_commuting(words_, n_qubits)) {
  location_.reserve(words_.size());
  for (const auto& w : words_) {
    if (w.is_identity()) {
      location_.emplace_back(kNoGroup, 0);
      continue;
    }
    bool found = false;
    for (std::size_t g = 0; g < groups_.size() && !found; ++g) {
      const auto& gw = groups_[g].words;
      const auto it = std::find(gw.begin(), gw.end(), w);
      if (it != gw.end()) {
        location_.emplace_back(g, static_cast<std::size_t>(it - gw.begin()));
        found = true;
      }
    }
    if (!found) throw NumericalError("internal error: word missing from measurement groups");
  }
}

std::vector<std::vector<double>> PauliMeasurementPlan::distributions(const QuantumState& state) const {
  if (state.n_qubits() != n_) throw DimensionError("measurement plan and state differ in qubit count");
  std::vector<std::vector<double>> out;
  out.reserve(groups_.size());
  for (const auto& g : groups_) out.push_back(outcome_probabilities(state, g.basis));
  return out;
}

std::vector<double> PauliMeasurementPlan::estimate_from(const std::vector<std::vector<double>>& dists,
                                                        std::uint64_t shots, std::uint64_t seed) const {
  if (dists.size() != groups_.size()) throw DimensionError("one outcome distribution per group required");
  std::vector<std::vector<double>> per_group(groups_.size());
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const ShotCounts counts = sample_counts(dists[g], groups_[g].basis, shots, substream_seed(seed, g));
    per_group[g].reserve(groups_[g].words.size());
    for (const auto& w : groups_[g].words) per_group[g].push_back(estimate_word_expectation(counts, w));
  }
  std::vector<double> out;
  out.reserve(words_.size());
  for (const auto& [g, slot] : location_) out.push_back(g == kNoGroup ? 1.0 : per_group[g][slot]);
  return out;
}

std::vector<double> PauliMeasurementPlan::estimate(const QuantumState& state, std::uint64_t shots,
                                                   std::uint64_t seed) const {
  if (shots == 0) throw DomainError("shot count must be at least 1");
  return estimate_from(distributions(state), shots, seed);
}

std::vector<double> PauliMeasurementPlan::exact(const QuantumState& state) const {
  if (state.n_qubits() != n_) throw DimensionError("measurement plan and state differ in qubit count");
  std::vector<double> out;
  out.reserve(words_.size());
  for (const auto& w : words_) out.push_back(w.is_identity() ? 1.0 : word_expectation(w, state).real());
  return out;
}

namespace {

std::vector<PauliWord> words_of(const OperatorSum& h) {
  std::vector<PauliWord> w;
  for (const auto& t : h.terms()) w.push_back(t.first);
  return w;
}

std::vector<double> coeffs_of(const OperatorSum& h) {
  std::vector<double> c;
  for (const auto& t : h.terms()) c.push_back(t.second);
  return c;
}

}  // namespace

EnergyEstimator::EnergyEstimator(const OperatorSum& h)
    : h_(h), plan_(words_of(h), h.n_qubits()), coeffs_(coeffs_of(h)) {}

double EnergyEstimator::exact(const QuantumState& state) const { return expectation_exact(h_, state); }

double EnergyEstimator::sampled(const QuantumState& state, std::uint64_t shots, std::uint64_t seed) const {
  const std::vector<double> est = plan_.estimate(state, shots, seed);
  double e = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) e += coeffs_[i] * est[i];
  return e;
}

double EnergyEstimator::sampled_stddev(const QuantumState& state, std::uint64_t shots) const {
  if (shots == 0) throw DomainError("shot count must be at least 1");
  double variance = 0.0;
  for (const auto& g : plan_.groups()) {
    OperatorSum f(h_.n_qubits());
    for (const auto& w : g.words) f.add(w, h_.coefficient(w));
    const double mean = expectation_exact(f, state);
    const double second = expectation_exact(symmetrized_product(f, f), state);
    variance += std::max(0.0, second - mean * mean);
  }
  return std::sqrt(variance / static_cast<double>(shots));
}

}  // namespace hrvqe
