#include "hrvqe/circuit.hpp"

#include <charconv>
#include <sstream>

#include <fmt/format.h>

#include "hrvqe/errors.hpp"

namespace hrvqe {

Circuit::Circuit(std::size_t n_qubits) : n_(n_qubits) {
  if (n_ == 0) throw DomainError("circuit needs at least one qubit");
}

void Circuit::check_qubit(std::size_t q) const {
  if (q >= n_) throw DimensionError(fmt::format("qubit {} out of range for {} qubits", q, n_));
}

void Circuit::add_h(std::size_t q) {
  check_qubit(q);
  gates_.push_back(Gate::h(q));
}

void Circuit::add_cnot(std::size_t control, std::size_t target) {
  check_qubit(control);
  check_qubit(target);
  if (control == target) throw DomainError("CNOT control equals target");
  gates_.push_back(Gate::cnot(control, target));
}

std::size_t Circuit::add_ry(std::size_t q, std::string slot_name) {
  check_qubit(q);
  const std::size_t slot = slots_.size();
  slots_.push_back(slot_name.empty() ? fmt::format("theta_{}", slot) : std::move(slot_name));
  gates_.push_back(Gate::ry_param(q, slot));
  return slot;
}

void Circuit::add_ry_fixed(std::size_t q, double angle) {
  check_qubit(q);
  gates_.push_back(Gate::ry(q, angle));
}

void Circuit::append(const Gate& g) {
  switch (g.kind) {
    case GateKind::Hadamard: add_h(g.target); break;
    case GateKind::CNOT: add_cnot(g.control, g.target); break;
    case GateKind::RY:
      if (g.param) {
        add_ry(g.target);
      } else {
        add_ry_fixed(g.target, g.angle);
      }
      break;
  }
}

std::size_t Circuit::cnot_count() const {
  std::size_t count = 0;
  for (const auto& g : gates_) count += g.kind == GateKind::CNOT ? 1 : 0;
  return count;
}

std::string Circuit::to_text() const {
  std::string out = fmt::format("QUBITS {}\n", n_);
  for (const auto& g : gates_) {
    switch (g.kind) {
      case GateKind::Hadamard: out += fmt::format("H {}\n", g.target); break;
      case GateKind::CNOT: out += fmt::format("CNOT {} {}\n", g.control, g.target); break;
      case GateKind::RY:
        if (g.param) {
          out += fmt::format("RY {} {}\n", g.target, slots_[*g.param]);
        } else {
          out += fmt::format("RY {} {:.17g}\n", g.target, g.angle);
        }
        break;
    }
  }
  return out;
}

namespace {

std::size_t parse_index(const std::string& tok, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw DomainError(fmt::format("circuit line {}: bad qubit index '{}'", line, tok));
  }
  return v;
}

}  // namespace

Circuit Circuit::from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  std::optional<Circuit> circuit;
  while (std::getline(in, raw)) {
    ++line_no;
    std::istringstream line(raw);
    std::string op;
    if (!(line >> op) || op.starts_with('#')) continue;
    std::vector<std::string> args;
    for (std::string tok; line >> tok;) args.push_back(tok);
    if (op == "QUBITS") {
      if (circuit || args.size() != 1) {
        throw DomainError(fmt::format("circuit line {}: misplaced QUBITS header", line_no));
      }
      circuit.emplace(parse_index(args[0], line_no));
      continue;
    }
    if (!circuit) throw DomainError("circuit text must start with a QUBITS header");
    if (op == "H" && args.size() == 1) {
      circuit->add_h(parse_index(args[0], line_no));
    } else if (op == "CNOT" && args.size() == 2) {
      circuit->add_cnot(parse_index(args[0], line_no), parse_index(args[1], line_no));
    } else if (op == "RY" && args.size() == 2) {
      const std::size_t q = parse_index(args[0], line_no);
      double angle = 0.0;
      const auto& a = args[1];
      const auto [ptr, ec] = std::from_chars(a.data(), a.data() + a.size(), angle);
      if (ec == std::errc{} && ptr == a.data() + a.size()) {
        circuit->add_ry_fixed(q, angle);
      } else {
        circuit->add_ry(q, a);
      }
    } else {
      throw DomainError(fmt::format("circuit line {}: cannot parse '{}'", line_no, raw));
    }
  }
  if (!circuit) throw DomainError("empty circuit text");
  return *std::move(circuit);
}

Circuit build_ala(std::size_t n_qubits, std::size_t layers) {
  if (n_qubits < 2 || layers < 1) {
    throw DomainError(fmt::format("ALA needs n >= 2 and layers >= 1 (got n={}, layers={})",
                                  n_qubits, layers));
  }
  Circuit c(n_qubits);
  for (std::size_t q = 0; q < n_qubits; ++q) c.add_h(q);
  for (std::size_t layer = 1; layer <= layers; ++layer) {
    for (std::size_t q = 0; q < n_qubits; ++q) c.add_ry(q);
    const std::size_t offset = (layer % 2 == 1) ? 0 : 1;
    for (std::size_t q = offset; q + 1 < n_qubits; q += 2) c.add_cnot(q, q + 1);
  }
  return c;
}

Circuit build_yy(std::size_t n_qubits, std::size_t layers) {
  if (n_qubits < 2 || layers < 1) {
    throw DomainError(fmt::format("YY ansatz needs n >= 2 and layers >= 1 (got n={}, layers={})",
                                  n_qubits, layers));
  }
  Circuit c(n_qubits);
  for (std::size_t layer = 0; layer < layers; ++layer) {
    for (std::size_t q = 0; q < n_qubits; ++q) c.add_ry(q);
    for (std::size_t q = 0; q + 1 < n_qubits; ++q) {
      c.add_cnot(q, q + 1);
      c.add_ry(q + 1);
    }
  }
  return c;
}

std::string to_string(AnsatzKind k) { return k == AnsatzKind::ALA ? "ala" : "yy"; }

AnsatzKind ansatz_kind_from_string(std::string_view name) {
  if (name == "ala") return AnsatzKind::ALA;
  if (name == "yy") return AnsatzKind::YY;
  throw DomainError(fmt::format("unknown ansatz '{}' (expected ala or yy)", name));
}

Circuit build_ansatz(const AnsatzSpec& spec, std::size_t n_qubits) {
  return spec.kind == AnsatzKind::ALA ? build_ala(n_qubits, spec.layers) : build_yy(n_qubits, spec.layers);
}

}  // namespace hrvqe
