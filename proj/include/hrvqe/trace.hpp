#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hrvqe {

/// One objective evaluation of a VQE run plus optional offline enrichment.
struct TraceRecord {
  std::size_t iter = 0;
  std::vector<double> params;
  double energy = 0.0;

  std::optional<double> exact_energy;
  std::optional<double> hr_distance;
  std::optional<double> fidelity_gs;
  std::optional<double> fidelity_fe;
  std::optional<double> variance;
};

/// Every evaluation of an optimizer run, in order. `iterates` lists the
/// record index of the incumbent after each optimizer iteration.
class VqeTrace {
 public:
  static constexpr std::string_view kEnrichmentColumns[] = {
      "exact_energy", "hr_distance", "fidelity_gs", "fidelity_fe", "variance"};

  const std::vector<TraceRecord>& records() const { return records_; }
  std::vector<TraceRecord>& records_mut() { return records_; }
  const std::vector<std::size_t>& iterates() const { return iterates_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::size_t param_count() const { return records_.empty() ? 0 : records_.front().params.size(); }

  /// Appends with iter = previous iter + 1 (0 for the first record).
  std::size_t append(std::vector<double> params, double energy);
  void add_iterate(std::size_t record_index);

  /// Minimum energy over records [0, i] for every i.
  std::vector<double> best_so_far() const;
  std::vector<double> energies() const;

  /// Fixed columns: iter, theta_0..theta_{p-1}, energy, then the five
  /// enrichment columns (empty cells when absent). Doubles use 17
  /// significant digits.
  std::string to_csv() const;
  static VqeTrace from_csv(std::string_view text);

 private:
  std::vector<TraceRecord> records_;
  std::vector<std::size_t> iterates_;
};

/// Centered moving average truncated at the edges. Position i averages
/// indices [i - w/2, i + (w - 1) - w/2] clipped to the series, matching a
/// centered rolling mean with min_periods = 1.
std::vector<double> moving_average(std::span<const double> series, std::size_t window = 14);

/// `count` distinct record indices in [0, size), denser toward the end
/// (quadratic spacing), always including the first and last record.
std::vector<std::size_t> tail_weighted_indices(std::size_t size, std::size_t count);

std::string format_double(double v);

}  // namespace hrvqe
