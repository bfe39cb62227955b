#include "hrvqe/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "hrvqe/errors.hpp"

namespace hrvqe {

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

std::size_t VqeTrace::append(std::vector<double> params, double energy) {
  if (!records_.empty() && params.size() != records_.front().params.size()) {
    throw DimensionError("trace records must share a parameter count");
  }
  TraceRecord r;
  r.iter = records_.empty() ? 0 : records_.back().iter + 1;
  r.params = std::move(params);
  r.energy = energy;
  records_.push_back(std::move(r));
  return records_.size() - 1;
}

void VqeTrace::add_iterate(std::size_t record_index) {
  if (record_index >= records_.size()) throw DomainError("iterate index past the end of the trace");
  iterates_.push_back(record_index);
}

std::vector<double> VqeTrace::best_so_far() const {
  std::vector<double> out;
  out.reserve(records_.size());
  double best = INFINITY;
  for (const auto& r : records_) {
    best = std::min(best, r.energy);
    out.push_back(best);
  }
  return out;
}

std::vector<double> VqeTrace::energies() const {
  std::vector<double> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.energy);
  return out;
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DomainError(fmt::format("trace CSV line {}: bad number '{}'", line, s));
  }
  return v;
}

std::optional<double> parse_optional(const std::string& s, std::size_t line) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, line);
}

}  // namespace

std::string VqeTrace::to_csv() const {
  const std::size_t p = param_count();
  std::string out = "iter";
  for (std::size_t i = 0; i < p; ++i) out += fmt::format(",theta_{}", i);
  out += ",energy";
  for (auto c : kEnrichmentColumns) out += fmt::format(",{}", c);
  out += '\n';
  for (const auto& r : records_) {
    out += std::to_string(r.iter);
    for (double t : r.params) out += "," + format_double(t);
    out += "," + format_double(r.energy);
    for (const auto* v : {&r.exact_energy, &r.hr_distance, &r.fidelity_gs, &r.fidelity_fe, &r.variance}) {
      out += "," + cell(*v);
    }
    out += '\n';
  }
  return out;
}

VqeTrace VqeTrace::from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw DomainError("empty trace CSV");
  const auto header = split_csv_line(line);
  constexpr std::size_t kExtra = std::size(kEnrichmentColumns);
  if (header.size() < 2 + kExtra || header.front() != "iter") {
    throw DomainError("trace CSV header does not match the trace schema");
  }
  const std::size_t p = header.size() - 2 - kExtra;
  if (header[1 + p] != "energy") throw DomainError("trace CSV header is missing the energy column");
  for (std::size_t i = 0; i < p; ++i) {
    if (header[1 + i] != fmt::format("theta_{}", i)) throw DomainError("trace CSV theta columns out of order");
  }
  for (std::size_t k = 0; k < kExtra; ++k) {
    if (header[2 + p + k] != kEnrichmentColumns[k]) throw DomainError("trace CSV enrichment columns out of order");
  }

  VqeTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DomainError(fmt::format("trace CSV line {}: expected {} cells, got {}", line_no, header.size(), cells.size()));
    }
    TraceRecord r;
    r.iter = static_cast<std::size_t>(parse_double(cells[0], line_no));
    for (std::size_t i = 0; i < p; ++i) r.params.push_back(parse_double(cells[1 + i], line_no));
    r.energy = parse_double(cells[1 + p], line_no);
    r.exact_energy = parse_optional(cells[2 + p], line_no);
    r.hr_distance = parse_optional(cells[3 + p], line_no);
    r.fidelity_gs = parse_optional(cells[4 + p], line_no);
    r.fidelity_fe = parse_optional(cells[5 + p], line_no);
    r.variance = parse_optional(cells[6 + p], line_no);
    if (!trace.records_.empty() && r.iter <= trace.records_.back().iter) {
      throw DomainError(fmt::format("trace CSV line {}: iteration indices must increase", line_no));
    }
    trace.records_.push_back(std::move(r));
  }
  return trace;
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
  if (window == 0) throw DomainError("moving-average window must be at least 1");
  const std::size_t n = series.size();
  const std::size_t left = window / 2;
  const std::size_t right = window - 1 - left;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= left ? i - left : 0;
    const std::size_t hi = std::min(n - 1, i + right);
    double acc = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) acc += series[k];
    out[i] = acc / static_cast<double>(hi - lo + 1);
  }
  return out;
}

std::vector<std::size_t> tail_weighted_indices(std::size_t size, std::size_t count) {
  if (size == 0 || count == 0) return {};
  count = std::min(count, size);
  std::vector<std::size_t> out;
  if (count == 1) return {size - 1};
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(count - 1);
    const double u = 1.0 - (1.0 - t) * (1.0 - t);
    out.push_back(static_cast<std::size_t>(std::lround(u * static_cast<double>(size - 1))));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  // Fill gaps left by collisions with unused indices from the end.
  for (std::size_t idx = size; out.size() < count && idx-- > 0;) {
    if (!std::binary_search(out.begin(), out.end(), idx)) {
      out.insert(std::upper_bound(out.begin(), out.end(), idx), idx);
    }
  }
  return out;
}

}  // namespace hrvqe
