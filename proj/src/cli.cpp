#include "hrvqe/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hrvqe/errors.hpp"
#include "hrvqe/hr.hpp"
#include "hrvqe/measurement.hpp"
#include "hrvqe/study_io.hpp"
#include "hrvqe/trace.hpp"
#include "hrvqe/vqe.hpp"

namespace hrvqe {

namespace fs = std::filesystem;

const std::vector<std::string>& study_names() {
  static const std::vector<std::string> names{"operator-sets", "noise-grid", "depolarization",
                                              "gap",           "shot-std",   "plateau"};
  return names;
}

namespace {

TfimSpec tfim_or(const RunConfig& c, const TfimSpec& fallback, const std::string& study) {
  if (!c.model) return fallback;
  if (const auto* t = std::get_if<TfimSpec>(&*c.model)) return *t;
  throw ConfigError("model.kind", fmt::format("study {} needs a tfim model", study));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const ModelSpec& require_model(const RunConfig& c) {
  if (!c.model) throw ConfigError("model", "this command needs a model section");
  return *c.model;
}

AnsatzSpec ansatz_or_default(const RunConfig& c) { return c.ansatz.value_or(AnsatzSpec{}); }

std::vector<double> parse_params(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--params", fmt::format("'{}' is not a number", item));
    }
  }
  return out;
}

ReplayContext replay_context(const RunConfig& c, const std::vector<std::string>& evaluators) {
  const ModelSpec& model = require_model(c);
  ReplayContext ctx;
  ctx.hamiltonian = build_hamiltonian(model);
  ctx.circuit = build_ansatz(ansatz_or_default(c), model_qubits(model));
  ctx.noise = c.execution.noise();
  ctx.hr_shots = c.execution.hr_shots;
  ctx.seed = c.execution.seed;
  ctx.threads = c.threads();
  auto wants = [&](const char* name) { return std::find(evaluators.begin(), evaluators.end(), name) != evaluators.end(); };
  if (wants("hr")) ctx.hr = hr_basis_for(model);
  if (wants("fidelity") || wants("fidelity_excited")) {
    const SpectrumResult s = exact_spectrum(model, 2);
    ctx.ground = s.state(0);
    ctx.first_excited = s.state(1);
  }
  return ctx;
}

json run_manifest(const RunConfig& c, const std::string& command) {
  json m;
  m["command"] = command;
  if (c.model) m["model"] = to_json(*c.model);
  if (c.ansatz || c.model) m["ansatz"] = to_json(ansatz_or_default(c));
  m["shots"] = shots_to_json(c.execution.shots);
  m["hr_shots"] = shots_to_json(c.execution.hr_shots);
  m["noise"] = c.execution.noise() ? to_json(*c.execution.noise()) : json(nullptr);
  m["seed"] = c.execution.seed;
  m["config"] = to_json(c);
  return m;
}

void write_common(const fs::path& dir, const RunConfig& c, const json& manifest, double seconds) {
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  write_text(dir / "config.json", serialize_config(c));
  write_text(dir / "timing.json", json{{"wall_seconds", seconds}}.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Commands

int cmd_diag(const RunConfig& c, std::size_t levels, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelSpec& model = require_model(c);
  if (levels < 2) throw ConfigError("--levels", "must be at least 2");
  const OperatorSum h = build_hamiltonian(model);
  double scale = 1.0;
  if (const auto* t = std::get_if<TfimSpec>(&model)) scale = t->J;
  if (const auto* g = std::get_if<J1J2Spec>(&model)) scale = g->J1;
  const SpectrumResult s = exact_spectrum(h, levels, scale);

  out << fmt::format("model   {}\n", model_name(model));
  for (std::size_t k = 0; k < s.energies.size(); ++k) out << fmt::format("E{}      {}\n", k, format_double(s.energies[k]));
  out << fmt::format("gap/|J| {}\n", format_double(s.gap_over_J));

  const fs::path dir = make_run_directory(c.output_dir, "diag");
  json m = run_manifest(c, "diag");
  m["energies"] = s.energies;
  m["gap_over_J"] = s.gap_over_J;
  std::string gs = "index,re,im\n";
  const Eigen::VectorXcd& v = s.vectors[0];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    gs += fmt::format("{},{},{}\n", i, format_double(v(i).real()), format_double(v(i).imag()));
  }
  write_text(dir / "ground_state.csv", gs);
  write_common(dir, c, m, seconds_since(t0));
  out << fmt::format("wrote   {}\n", dir.string());
  return kExitOk;
}

/// Merges enriched records back into the full trace by iteration index.
VqeTrace merge_enrichment(VqeTrace trace, const VqeTrace& enriched) {
  auto& recs = trace.records_mut();
  for (const auto& e : enriched.records()) {
    auto it = std::find_if(recs.begin(), recs.end(), [&](const TraceRecord& r) { return r.iter == e.iter; });
    if (it != recs.end()) *it = e;
  }
  return trace;
}

int cmd_vqe(const RunConfig& c, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelSpec& model = require_model(c);
  const OperatorSum h = build_hamiltonian(model);
  const AnsatzSpec ansatz = ansatz_or_default(c);
  const Circuit circuit = build_ansatz(ansatz, model_qubits(model));
  const OptimizerConfig oc = c.optimizer_or(OptimizerConfig{});
  const ImfilResult run = run_vqe(h, circuit, c.execution.shots, c.execution.noise(), oc);

  const auto indices = tail_weighted_indices(run.trace.size(), std::min(c.replay.points, run.trace.size()));
  VqeTrace trace = run.trace;
  if (!c.replay.evaluators.empty() && !indices.empty()) {
    const ReplayContext ctx = replay_context(c, c.replay.evaluators);
    trace = merge_enrichment(std::move(trace), replay_trace(run.trace, indices, c.replay.evaluators, ctx));
  }

  const fs::path dir = make_run_directory(c.output_dir, "vqe");
  json m = run_manifest(c, "vqe");
  m["optimizer"] = to_json(oc);
  m["energy_group_count"] = EnergyEstimator(h).group_count();
  m["hr_group_count"] = CovariancePlan(hr_basis_for(model).basis).groups().size();
  m["parameters"] = param_count(circuit);
  m["evaluations"] = run.trace.size();
  m["iterations"] = run.iterations;
  m["termination"] = to_string(run.termination);
  m["final_scale"] = run.final_scale;
  m["best_energy"] = run.best_value;
  m["best_params"] = run.best_x;
  m["replay"] = {{"indices", indices}, {"evaluators", c.replay.evaluators}};
  write_text(dir / "trace.csv", trace.to_csv());
  write_common(dir, c, m, seconds_since(t0));

  out << fmt::format("evaluations {}\ntermination {}\nbest_energy {}\nwrote {}\n", run.trace.size(),
                     to_string(run.termination), format_double(run.best_value), dir.string());
  return kExitOk;
}

int cmd_replay(const RunConfig& c, const std::string& trace_path, bool all, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const VqeTrace trace = VqeTrace::from_csv(read_file(trace_path));
  std::vector<std::size_t> indices;
  if (all) {
    for (std::size_t i = 0; i < trace.size(); ++i) indices.push_back(i);
  } else {
    indices = tail_weighted_indices(trace.size(), std::min(c.replay.points, trace.size()));
  }
  const ReplayContext ctx = replay_context(c, c.replay.evaluators);
  if (trace.param_count() != param_count(ctx.circuit)) {
    throw ConfigError("ansatz", fmt::format("trace has {} parameters but the configured circuit takes {}",
                                            trace.param_count(), param_count(ctx.circuit)));
  }
  const VqeTrace enriched = replay_trace(trace, indices, c.replay.evaluators, ctx);

  const fs::path dir = make_run_directory(c.output_dir, "replay");
  json m = run_manifest(c, "replay");
  m["source_trace"] = trace_path;
  m["indices"] = indices;
  m["evaluators"] = c.replay.evaluators;
  write_text(dir / "trace.csv", enriched.to_csv());
  write_common(dir, c, m, seconds_since(t0));
  out << fmt::format("replayed {} records\nwrote {}\n", enriched.size(), dir.string());
  return kExitOk;
}

int cmd_hr(const RunConfig& c, const std::optional<std::string>& params, const std::optional<std::string>& trace_path,
           std::optional<std::size_t> record, std::optional<std::size_t> eigenstate, std::ostream& out) {
  const ModelSpec& model = require_model(c);
  const int sources = int(params.has_value()) + int(trace_path.has_value()) + int(eigenstate.has_value());
  if (sources != 1) throw ConfigError("hr", "give exactly one of --params, --trace or --eigenstate");
  if (trace_path.has_value() != record.has_value()) throw ConfigError("--record", "--trace and --record go together");

  std::optional<QuantumState> state;
  if (eigenstate) {
    if (c.execution.noise()) throw ConfigError("execution.p1", "noise applies to circuit states, not --eigenstate");
    state = exact_spectrum(model, std::max<std::size_t>(2, *eigenstate + 1)).state(*eigenstate);
  } else {
    const Circuit circuit = build_ansatz(ansatz_or_default(c), model_qubits(model));
    std::vector<double> theta;
    if (params) {
      theta = parse_params(*params);
    } else {
      const VqeTrace trace = VqeTrace::from_csv(read_file(*trace_path));
      if (*record >= trace.size()) throw ConfigError("--record", fmt::format("trace has {} records", trace.size()));
      theta = trace.records()[*record].params;
    }
    if (theta.size() != param_count(circuit)) {
      throw ConfigError("--params", fmt::format("circuit takes {} parameters, got {}", param_count(circuit), theta.size()));
    }
    state = prepare(circuit, theta, c.execution.noise());
  }

  const HrProblem problem = hr_basis_for(model);
  const CovariancePlan plan(problem.basis);
  const CovarianceEstimate q = c.execution.hr_shots ? plan.sampled(*state, *c.execution.hr_shots, c.execution.seed)
                                                    : plan.exact(*state);
  const Reconstruction r = reconstruct(q, problem.true_coeffs);
  out << reconstruction_to_json(r, problem.basis, problem.true_coeffs, q).dump(2) << "\n";
  return kExitOk;
}

void print_checks(const StudyResult& r, std::ostream& out) {
  for (const auto& ch : r.checks) {
    out << fmt::format("  {} {} = {} (expected {})\n", ch.passed ? "PASS" : "FAIL", ch.name, format_double(ch.measured),
                       ch.expected);
  }
}

int cmd_study(const RunConfig& c, const std::string& name, bool selfcheck, std::ostream& out) {
  const StudyResult r = run_study(name, c);
  const fs::path dir = write_study(r, c.output_dir, to_json(c));
  out << fmt::format("study {} finished in {:.1f} s\nwrote {}\n", r.name, r.wall_seconds, dir.string());
  print_checks(r, out);
  return selfcheck && !r.all_passed() ? kExitAssertion : kExitOk;
}

int cmd_selfcheck_all(const RunConfig& c, std::ostream& out) {
  RunConfig base;
  base.execution = c.execution;
  base.output_dir = c.output_dir;
  bool ok = true;
  for (const auto& name : study_names()) {
    const StudyResult r = run_study(name, base);
    const fs::path dir = write_study(r, base.output_dir, to_json(base));
    out << fmt::format("{} {} ({:.1f} s) {}\n", r.all_passed() ? "PASS" : "FAIL", name, r.wall_seconds, dir.string());
    print_checks(r, out);
    ok = ok && r.all_passed();
  }
  return ok ? kExitOk : kExitAssertion;
}

}  // namespace

StudyResult run_study(const std::string& name, const RunConfig& c) {
  const auto& st = c.study;
  const std::size_t threads = c.threads();
  if (name == "operator-sets") {
    OperatorSetConfig s;
    s.model = tfim_or(c, s.model, name);
    s.count = st.count.value_or(s.count);
    s.threshold = st.threshold.value_or(s.threshold);
    s.seed = c.execution.seed;
    s.threads = threads;
    return operator_set_study(s);
  }
  if (name == "noise-grid") {
    NoiseGridConfig s;
    if (c.model) s.model = *c.model;
    s.ansatz = c.ansatz.value_or(s.ansatz);
    s.p1_grid = st.p1_grid.value_or(s.p1_grid);
    s.p2_grid = st.p2_grid.value_or(s.p2_grid);
    s.optimizer = c.optimizer_or(s.optimizer);
    s.tail_fraction = st.tail_fraction.value_or(s.tail_fraction);
    s.threads = threads;
    return noise_grid_study(s);
  }
  if (name == "depolarization") {
    DepolarizationConfig s;
    s.model = tfim_or(c, s.model, name);
    if (st.mode) s.mode = depolarization_mode_from_string(*st.mode);
    s.p_grid = st.p_grid.value_or(s.p_grid);
    s.count = st.count.value_or(s.count);
    s.threshold = st.threshold.value_or(s.threshold);
    s.seed = c.execution.seed;
    s.threads = threads;
    return depolarization_study(s);
  }
  if (name == "gap") {
    GapConfig s;
    s.n = tfim_or(c, TfimSpec{s.n, 0.5, true}, name).n;
    s.J_values = st.J_values.value_or(s.J_values);
    s.ansatz = c.ansatz.value_or(s.ansatz);
    s.energy_shots = c.execution.shots.value_or(s.energy_shots);
    s.hr_shots = c.execution.hr_shots.value_or(s.hr_shots);
    s.optimizer = c.optimizer_or(s.optimizer);
    s.tail_fraction = st.tail_fraction.value_or(s.tail_fraction);
    s.threads = threads;
    return gap_study(s);
  }
  if (name == "shot-std") {
    ShotStdConfig s;
    if (c.model) s.targets = {{*c.model, c.ansatz.value_or(AnsatzSpec{})}};
    s.shot_grid = st.shot_grid.value_or(s.shot_grid);
    s.repeats = st.repeats.value_or(s.repeats);
    if (const auto noise = c.execution.noise()) s.noise = *noise;
    s.optimizer = c.optimizer_or(s.optimizer);
    s.threads = threads;
    return shot_std_study(s);
  }
  if (name == "plateau") {
    PlateauConfig s;
    s.model = tfim_or(c, s.model, name);
    s.ansatz = c.ansatz.value_or(s.ansatz);
    s.optimizer = c.optimizer_or(s.optimizer);
    s.window = st.window.value_or(s.window);
    s.max_attempts = st.max_attempts.value_or(s.max_attempts);
    return plateau_demo(s);
  }
  throw ConfigError("study", fmt::format("unknown study '{}' (expected one of: {})", name, fmt::join(study_names(), ", ")));
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hamiltonian-reconstruction distance toolkit for VQE", "hrvqe"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::size_t> threads;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "Override a config value: section.key=value")->take_all();
  app.add_option("--threads", threads, "Worker threads (default: all cores)");
  app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
  app.add_option("--seed", seed, "Master seed (overrides HRVQE_SEED and execution.seed)");

  auto* diag = app.add_subcommand("diag", "Exact spectrum of the configured model");
  std::size_t levels = 2;
  diag->add_option("--levels", levels, "Number of lowest eigenpairs");

  app.add_subcommand("vqe", "Run VQE and write the enriched trace");

  auto* replay = app.add_subcommand("replay", "Re-evaluate records of a saved trace");
  std::string trace_path;
  bool replay_all = false;
  replay->add_option("trace", trace_path, "trace.csv from a vqe run")->required()->check(CLI::ExistingFile);
  replay->add_flag("--all", replay_all, "Replay every record instead of replay.points tail-weighted ones");

  auto* hr = app.add_subcommand("hr", "HR distance of one state");
  std::optional<std::string> hr_params, hr_trace;
  std::optional<std::size_t> hr_record, hr_eigen;
  hr->add_option("--params", hr_params, "Comma-separated circuit parameters");
  hr->add_option("--trace", hr_trace, "trace.csv to take parameters from")->check(CLI::ExistingFile);
  hr->add_option("--record", hr_record, "Record index within --trace");
  hr->add_option("--eigenstate", hr_eigen, "Use the k-th exact eigenstate");

  auto* study = app.add_subcommand("study", "Run a named study");
  std::string study_name;
  bool selfcheck = false;
  study->add_option("name", study_name, "Study name")->required()->check(CLI::IsMember(study_names()));
  study->add_flag("--selfcheck", selfcheck, "Exit with code 2 when an assertion fails");

  app.add_subcommand("selfcheck-all", "Run every study with its self-check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const std::string text = config_path.empty() ? std::string{} : read_file(config_path);
    std::optional<std::uint64_t> seed_override = seed ? seed : seed_from_environment();
    std::vector<std::string> all_overrides = overrides;
    if (threads) all_overrides.push_back(fmt::format("execution.threads={}", *threads));
    if (out_dir) all_overrides.push_back("output.dir=" + json(*out_dir).dump());
    const RunConfig config = parse_config(text, all_overrides, seed_override);

    if (diag->parsed()) return cmd_diag(config, levels, out);
    if (app.got_subcommand("vqe")) return cmd_vqe(config, out);
    if (replay->parsed()) return cmd_replay(config, trace_path, replay_all, out);
    if (hr->parsed()) return cmd_hr(config, hr_params, hr_trace, hr_record, hr_eigen, out);
    if (study->parsed()) return cmd_study(config, study_name, selfcheck, out);
    return cmd_selfcheck_all(config, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace hrvqe
