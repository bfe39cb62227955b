#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hrvqe {

enum class GateKind { Hadamard, RY, CNOT };

/// One gate of a circuit. RY either reads its angle from a parameter slot
/// or carries a fixed angle (radians).
struct Gate {
  GateKind kind = GateKind::Hadamard;
  std::size_t target = 0;
  std::size_t control = 0;  // CNOT only
  std::optional<std::size_t> param;
  double angle = 0.0;

  static Gate h(std::size_t q) { return {GateKind::Hadamard, q, 0, std::nullopt, 0.0}; }
  static Gate ry(std::size_t q, double angle) { return {GateKind::RY, q, 0, std::nullopt, angle}; }
  static Gate ry_param(std::size_t q, std::size_t slot) { return {GateKind::RY, q, 0, slot, 0.0}; }
  static Gate cnot(std::size_t control, std::size_t target) {
    return {GateKind::CNOT, target, control, std::nullopt, 0.0};
  }

  bool is_two_qubit() const { return kind == GateKind::CNOT; }
  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Ordered gate list with named parameter slots.
class Circuit {
 public:
  explicit Circuit(std::size_t n_qubits);

  std::size_t n_qubits() const { return n_; }
  const std::vector<Gate>& gates() const { return gates_; }
  const std::vector<std::string>& param_slots() const { return slots_; }

  void add_h(std::size_t q);
  void add_cnot(std::size_t control, std::size_t target);
  /// Appends an RY bound to a fresh slot; returns the slot index.
  std::size_t add_ry(std::size_t q, std::string slot_name = {});
  void add_ry_fixed(std::size_t q, double angle);
  void append(const Gate& g);

  std::size_t cnot_count() const;

  /// Line format: "QUBITS n", then one gate per line as "H 3",
  /// "RY 4 theta_12", "RY 4 0.5" (fixed angle), or "CNOT 2 3".
  std::string to_text() const;
  static Circuit from_text(std::string_view text);

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  void check_qubit(std::size_t q) const;

  std::size_t n_;
  std::vector<Gate> gates_;
  std::vector<std::string> slots_;
};

/// Number of free parameters (RY slots).
inline std::size_t param_count(const Circuit& c) { return c.param_slots().size(); }

/// Alternating layered ansatz: a Hadamard wall, then per layer one RY per
/// qubit followed by a CNOT brick on pairs (0,1),(2,3),... for odd layers
/// and (1,2),(3,4),... for even layers.
Circuit build_ala(std::size_t n_qubits, std::size_t layers);

/// YY ansatz: per layer one RY per qubit, then a CNOT ladder (i, i+1) with
/// an RY on each CNOT target. Extra layers repeat the block with fresh slots.
Circuit build_yy(std::size_t n_qubits, std::size_t layers);

enum class AnsatzKind { ALA, YY };

struct AnsatzSpec {
  AnsatzKind kind = AnsatzKind::ALA;
  std::size_t layers = 3;
  friend bool operator==(const AnsatzSpec&, const AnsatzSpec&) = default;
};

std::string to_string(AnsatzKind k);
AnsatzKind ansatz_kind_from_string(std::string_view name);
Circuit build_ansatz(const AnsatzSpec& spec, std::size_t n_qubits);

}  // namespace hrvqe
