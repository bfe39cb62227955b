#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hrvqe/circuit.hpp"
#include "hrvqe/models.hpp"
#include "hrvqe/optimizer.hpp"
#include "hrvqe/state.hpp"
#include "hrvqe/vqe.hpp"

namespace hrvqe {

using nlohmann::json;

json to_json(const ModelSpec& m);
json to_json(const AnsatzSpec& a);
json to_json(const NoiseModel& n);
json to_json(const OptimizerConfig& c);
json shots_to_json(const ShotSetting& s);

struct ExecutionSection {
  ShotSetting shots;                 // energy estimation; nullopt = exact
  ShotSetting hr_shots;              // HR covariance; nullopt = exact
  double p1 = 0.0;
  double p2 = 0.0;
  std::uint64_t seed = 1;
  std::size_t threads = 0;           // 0 = all hardware threads
  friend bool operator==(const ExecutionSection&, const ExecutionSection&) = default;

  std::optional<NoiseModel> noise() const;
};

struct ReplaySection {
  std::size_t points = 58;
  std::vector<std::string> evaluators{"energy", "hr", "fidelity", "fidelity_excited", "variance"};
  friend bool operator==(const ReplaySection&, const ReplaySection&) = default;
};

/// Study parameters; unset fields fall back to the study's defaults.
struct StudySection {
  std::optional<std::size_t> count;
  std::optional<double> threshold;
  std::optional<std::string> mode;
  std::optional<std::vector<double>> p_grid;
  std::optional<std::vector<double>> p1_grid;
  std::optional<std::vector<double>> p2_grid;
  std::optional<std::vector<double>> J_values;
  std::optional<std::vector<std::uint64_t>> shot_grid;
  std::optional<std::size_t> repeats;
  std::optional<std::size_t> window;
  std::optional<std::size_t> max_attempts;
  std::optional<double> tail_fraction;
  friend bool operator==(const StudySection&, const StudySection&) = default;
};

struct RunConfig {
  std::optional<ModelSpec> model;
  std::optional<AnsatzSpec> ansatz;
  ExecutionSection execution;
  std::optional<OptimizerConfig> optimizer;
  std::string output_dir = "runs";
  ReplaySection replay;
  StudySection study;
  friend bool operator==(const RunConfig&, const RunConfig&);

  /// Optimizer settings with the execution seed and thread count applied.
  OptimizerConfig optimizer_or(const OptimizerConfig& fallback) const;
  std::size_t threads() const;
};

/// Parses a JSON config document. Schema violations throw ConfigError whose
/// field is the dotted key and whose message carries the source line.
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {},
                       std::optional<std::uint64_t> seed_override = std::nullopt);
RunConfig config_from_json(const json& doc);
json to_json(const RunConfig& c);
std::string serialize_config(const RunConfig& c);

/// Applies "section.key=value" to a config document. The value is read as
/// JSON when it parses, otherwise as a string.
void apply_override(json& doc, std::string_view assignment);

/// Seed from the HRVQE_SEED environment variable, if set.
std::optional<std::uint64_t> seed_from_environment();

}  // namespace hrvqe
