#include "hrvqe/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>

#include <fmt/format.h>

#include "hrvqe/errors.hpp"
#include "hrvqe/parallel.hpp"

namespace hrvqe {

json to_json(const ModelSpec& m) {
  if (const auto* t = std::get_if<TfimSpec>(&m)) {
    return {{"kind", "tfim"}, {"n", t->n}, {"J", t->J}, {"periodic", t->periodic}};
  }
  const auto& g = std::get<J1J2Spec>(m);
  return {{"kind", "j1j2"}, {"rows", g.rows}, {"cols", g.cols}, {"J1", g.J1}, {"J2", g.J2}};
}

json to_json(const AnsatzSpec& a) { return {{"kind", to_string(a.kind)}, {"layers", a.layers}}; }

json to_json(const NoiseModel& n) { return {{"p1", n.p1}, {"p2", n.p2}}; }

json to_json(const OptimizerConfig& c) {
  json j = {{"lo", c.default_bounds.lo},
            {"hi", c.default_bounds.hi},
            {"initial_scale", c.initial_scale},
            {"scale_shrink", c.scale_shrink},
            {"min_scale", c.min_scale},
            {"max_evals", c.max_evals},
            {"seed", c.seed}};
  return j;
}

json shots_to_json(const ShotSetting& s) { return s ? json(*s) : json("exact"); }

std::optional<NoiseModel> ExecutionSection::noise() const {
  if (p1 == 0.0 && p2 == 0.0) return std::nullopt;
  return NoiseModel{p1, p2};
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.model == b.model && a.ansatz == b.ansatz && a.execution == b.execution && a.optimizer == b.optimizer &&
         a.output_dir == b.output_dir && a.replay == b.replay && a.study == b.study;
}

OptimizerConfig RunConfig::optimizer_or(const OptimizerConfig& fallback) const {
  OptimizerConfig c = optimizer.value_or(fallback);
  c.seed = execution.seed;
  c.threads = threads();
  return c;
}

std::size_t RunConfig::threads() const { return execution.threads == 0 ? default_threads() : execution.threads; }

namespace {

std::size_t line_at(std::string_view text, std::size_t pos) {
  return static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(std::min(pos, text.size())), '\n')) + 1;
}

/// Walks a parsed document with the dotted field path and source text at
/// hand, so every schema error names its field and line.
class Reader {
 public:
  Reader(const json& doc, std::string_view text) : doc_(doc), text_(text) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& what) const {
    const std::string field = key.empty() ? section : section + "." + key;
    const std::size_t line = find_line(section, key);
    throw ConfigError(field, line ? fmt::format("line {}: {}", line, what) : what);
  }

  const json* section(const std::string& name) const {
    if (!doc_.contains(name)) return nullptr;
    const json& s = doc_.at(name);
    if (!s.is_object()) fail(name, "", "must be an object");
    return &s;
  }

  void allow_keys(const std::string& name, const json& s, const std::set<std::string>& keys) const {
    for (const auto& [k, _] : s.items()) {
      if (!keys.contains(k)) fail(name, k, "unknown key");
    }
  }

  double number(const std::string& sec, const json& s, const std::string& key, double fallback) const {
    if (!s.contains(key)) return fallback;
    const json& v = s.at(key);
    if (!v.is_number()) fail(sec, key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(sec, key, "must be finite");
    return d;
  }

  std::uint64_t unsigned_int(const std::string& sec, const json& s, const std::string& key,
                             std::uint64_t fallback) const {
    if (!s.contains(key)) return fallback;
    const json& v = s.at(key);
    if (!v.is_number_unsigned()) fail(sec, key, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& sec, const json& s, const std::string& key, bool fallback) const {
    if (!s.contains(key)) return fallback;
    const json& v = s.at(key);
    if (!v.is_boolean()) fail(sec, key, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& sec, const json& s, const std::string& key, const std::string& fallback) const {
    if (!s.contains(key)) return fallback;
    const json& v = s.at(key);
    if (!v.is_string()) fail(sec, key, "expected a string");
    return v.get<std::string>();
  }

  ShotSetting shots(const std::string& sec, const json& s, const std::string& key) const {
    if (!s.contains(key)) return std::nullopt;
    const json& v = s.at(key);
    if (v.is_string() && v.get<std::string>() == "exact") return std::nullopt;
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) fail(sec, key, "expected \"exact\" or a positive integer");
    return v.get<std::uint64_t>();
  }

  template <typename T>
  std::optional<std::vector<T>> list(const std::string& sec, const json& s, const std::string& key) const {
    if (!s.contains(key)) return std::nullopt;
    const json& v = s.at(key);
    if (!v.is_array() || v.empty()) fail(sec, key, "expected a non-empty array");
    std::vector<T> out;
    for (const auto& e : v) {
      if constexpr (std::is_same_v<T, double>) {
        if (!e.is_number()) fail(sec, key, "expected an array of numbers");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!e.is_string()) fail(sec, key, "expected an array of strings");
      } else {
        if (!e.is_number_unsigned()) fail(sec, key, "expected an array of non-negative integers");
      }
      out.push_back(e.get<T>());
    }
    return out;
  }

 private:
  std::size_t find_line(const std::string& section, const std::string& key) const {
    const std::size_t s = text_.find("\"" + section + "\"");
    if (s == std::string_view::npos) return 0;
    if (key.empty()) return line_at(text_, s);
    const std::size_t k = text_.find("\"" + key + "\"", s);
    return k == std::string_view::npos ? line_at(text_, s) : line_at(text_, k);
  }

  const json& doc_;
  std::string_view text_;
};

RunConfig read_config(const json& doc, std::string_view text) {
  Reader r(doc, text);
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  const std::set<std::string> sections = {"model", "ansatz", "execution", "optimizer", "output", "replay", "study"};
  for (const auto& [k, _] : doc.items()) {
    if (!sections.contains(k)) r.fail(k, "", "unknown section");
  }

  RunConfig c;
  if (const json* m = r.section("model")) {
    const std::string kind = r.string("model", *m, "kind", "tfim");
    if (kind == "tfim") {
      r.allow_keys("model", *m, {"kind", "n", "J", "periodic"});
      TfimSpec t;
      t.n = r.unsigned_int("model", *m, "n", t.n);
      t.J = r.number("model", *m, "J", t.J);
      t.periodic = r.boolean("model", *m, "periodic", t.periodic);
      if (t.n < 2) r.fail("model", "n", "must be at least 2");
      if (t.n > kMaxDenseQubits) r.fail("model", "n", fmt::format("must be at most {}", kMaxDenseQubits));
      c.model = t;
    } else if (kind == "j1j2") {
      r.allow_keys("model", *m, {"kind", "rows", "cols", "J1", "J2"});
      J1J2Spec g;
      g.rows = r.unsigned_int("model", *m, "rows", g.rows);
      g.cols = r.unsigned_int("model", *m, "cols", g.cols);
      g.J1 = r.number("model", *m, "J1", g.J1);
      g.J2 = r.number("model", *m, "J2", g.J2);
      if (g.rows * g.cols < 2) r.fail("model", "rows", "grid needs at least 2 sites");
      if (g.rows * g.cols > kMaxDenseQubits) r.fail("model", "rows", fmt::format("grid exceeds {} sites", kMaxDenseQubits));
      c.model = g;
    } else {
      r.fail("model", "kind", fmt::format("unknown model '{}' (expected tfim or j1j2)", kind));
    }
  }

  if (const json* a = r.section("ansatz")) {
    r.allow_keys("ansatz", *a, {"kind", "layers"});
    AnsatzSpec spec;
    const std::string kind = r.string("ansatz", *a, "kind", "ala");
    if (kind != "ala" && kind != "yy") r.fail("ansatz", "kind", fmt::format("unknown ansatz '{}' (expected ala or yy)", kind));
    spec.kind = ansatz_kind_from_string(kind);
    spec.layers = r.unsigned_int("ansatz", *a, "layers", spec.layers);
    if (spec.layers < 1) r.fail("ansatz", "layers", "must be at least 1");
    c.ansatz = spec;
  }

  if (const json* e = r.section("execution")) {
    r.allow_keys("execution", *e, {"shots", "hr_shots", "p1", "p2", "seed", "threads"});
    auto& x = c.execution;
    x.shots = r.shots("execution", *e, "shots");
    x.hr_shots = r.shots("execution", *e, "hr_shots");
    x.p1 = r.number("execution", *e, "p1", x.p1);
    x.p2 = r.number("execution", *e, "p2", x.p2);
    if (x.p1 < 0.0 || x.p1 > 1.0) r.fail("execution", "p1", "must lie in [0, 1]");
    if (x.p2 < 0.0 || x.p2 > 1.0) r.fail("execution", "p2", "must lie in [0, 1]");
    x.seed = r.unsigned_int("execution", *e, "seed", x.seed);
    x.threads = r.unsigned_int("execution", *e, "threads", x.threads);
  }

  if (const json* o = r.section("optimizer")) {
    r.allow_keys("optimizer", *o, {"lo", "hi", "initial_scale", "scale_shrink", "min_scale", "max_evals", "seed"});
    OptimizerConfig oc;
    oc.default_bounds.lo = r.number("optimizer", *o, "lo", oc.default_bounds.lo);
    oc.default_bounds.hi = r.number("optimizer", *o, "hi", oc.default_bounds.hi);
    oc.initial_scale = r.number("optimizer", *o, "initial_scale", oc.initial_scale);
    oc.scale_shrink = r.number("optimizer", *o, "scale_shrink", oc.scale_shrink);
    oc.min_scale = r.number("optimizer", *o, "min_scale", oc.min_scale);
    oc.max_evals = r.unsigned_int("optimizer", *o, "max_evals", oc.max_evals);
    if (o->contains("seed")) r.fail("optimizer", "seed", "set the seed in execution.seed");
    if (!(oc.default_bounds.lo < oc.default_bounds.hi)) r.fail("optimizer", "hi", "needs lo < hi");
    if (!(oc.initial_scale > 0.0 && oc.initial_scale <= 1.0)) r.fail("optimizer", "initial_scale", "must lie in (0, 1]");
    if (!(oc.scale_shrink > 0.0 && oc.scale_shrink < 1.0)) r.fail("optimizer", "scale_shrink", "must lie in (0, 1)");
    if (!(oc.min_scale > 0.0)) r.fail("optimizer", "min_scale", "must be positive");
    if (oc.max_evals == 0) r.fail("optimizer", "max_evals", "must be at least 1");
    c.optimizer = oc;
  }

  if (const json* o = r.section("output")) {
    r.allow_keys("output", *o, {"dir"});
    c.output_dir = r.string("output", *o, "dir", c.output_dir);
    if (c.output_dir.empty()) r.fail("output", "dir", "must not be empty");
  }

  if (const json* p = r.section("replay")) {
    r.allow_keys("replay", *p, {"points", "evaluators"});
    c.replay.points = r.unsigned_int("replay", *p, "points", c.replay.points);
    if (auto ev = r.list<std::string>("replay", *p, "evaluators")) {
      for (const auto& name : *ev) {
        if (std::find(std::begin(kReplayEvaluators), std::end(kReplayEvaluators), name) == std::end(kReplayEvaluators)) {
          r.fail("replay", "evaluators", fmt::format("unknown evaluator '{}'", name));
        }
      }
      c.replay.evaluators = *ev;
    }
  }

  if (const json* s = r.section("study")) {
    r.allow_keys("study", *s, {"count", "threshold", "mode", "p_grid", "p1_grid", "p2_grid", "J_values", "shot_grid",
                               "repeats", "window", "max_attempts", "tail_fraction"});
    auto& st = c.study;
    auto opt_uint = [&](const char* key) -> std::optional<std::size_t> {
      if (!s->contains(key)) return std::nullopt;
      return r.unsigned_int("study", *s, key, 0);
    };
    auto opt_num = [&](const char* key) -> std::optional<double> {
      if (!s->contains(key)) return std::nullopt;
      return r.number("study", *s, key, 0.0);
    };
    st.count = opt_uint("count");
    st.threshold = opt_num("threshold");
    if (s->contains("mode")) {
      st.mode = r.string("study", *s, "mode", "");
      if (*st.mode != "ground_state_sweep" && *st.mode != "ensemble_sweep") {
        r.fail("study", "mode", "expected ground_state_sweep or ensemble_sweep");
      }
    }
    st.p_grid = r.list<double>("study", *s, "p_grid");
    st.p1_grid = r.list<double>("study", *s, "p1_grid");
    st.p2_grid = r.list<double>("study", *s, "p2_grid");
    for (const char* key : {"p_grid", "p1_grid", "p2_grid"}) {
      const auto& g = std::string(key) == "p_grid" ? st.p_grid : std::string(key) == "p1_grid" ? st.p1_grid : st.p2_grid;
      if (g && std::any_of(g->begin(), g->end(), [](double p) { return p < 0.0 || p > 1.0; })) {
        r.fail("study", key, "probabilities must lie in [0, 1]");
      }
    }
    st.J_values = r.list<double>("study", *s, "J_values");
    st.shot_grid = r.list<std::uint64_t>("study", *s, "shot_grid");
    if (st.shot_grid && std::find(st.shot_grid->begin(), st.shot_grid->end(), 0u) != st.shot_grid->end()) {
      r.fail("study", "shot_grid", "shot counts must be positive");
    }
    st.repeats = opt_uint("repeats");
    st.window = opt_uint("window");
    st.max_attempts = opt_uint("max_attempts");
    st.tail_fraction = opt_num("tail_fraction");
    if (st.tail_fraction && !(*st.tail_fraction > 0.0 && *st.tail_fraction <= 1.0)) {
      r.fail("study", "tail_fraction", "must lie in (0, 1]");
    }
  }
  return c;
}

}  // namespace

RunConfig config_from_json(const json& doc) { return read_config(doc, {}); }

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq || dot == 0 || dot + 1 == eq) {
    throw ConfigError("", fmt::format("override '{}' is not of the form section.key=value", assignment));
  }
  const std::string section(assignment.substr(0, dot));
  const std::string key(assignment.substr(dot + 1, eq - dot - 1));
  const std::string raw(assignment.substr(eq + 1));
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  if (!doc.is_object()) doc = json::object();
  if (!doc.contains(section)) doc[section] = json::object();
  if (!doc[section].is_object()) throw ConfigError(section, "must be an object");
  doc[section][key] = std::move(value);
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* v = std::getenv("HRVQE_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  std::uint64_t seed = 0;
  const std::string_view s(v);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError("HRVQE_SEED", fmt::format("'{}' is not a non-negative integer", s));
  }
  return seed;
}

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides,
                       std::optional<std::uint64_t> seed_override) {
  json doc;
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    doc = json::object();
  } else {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("", fmt::format("line {}: malformed JSON ({})", line_at(text, e.byte == 0 ? 0 : e.byte - 1),
                                        e.what()));
    }
  }
  for (const auto& o : overrides) apply_override(doc, o);
  if (seed_override) {
    if (!doc.contains("execution")) doc["execution"] = json::object();
    doc["execution"]["seed"] = *seed_override;
  }
  return read_config(doc, text);
}

json to_json(const RunConfig& c) {
  json j = json::object();
  if (c.model) j["model"] = to_json(*c.model);
  if (c.ansatz) j["ansatz"] = to_json(*c.ansatz);
  j["execution"] = {{"shots", shots_to_json(c.execution.shots)},
                    {"hr_shots", shots_to_json(c.execution.hr_shots)},
                    {"p1", c.execution.p1},
                    {"p2", c.execution.p2},
                    {"seed", c.execution.seed},
                    {"threads", c.execution.threads}};
  if (c.optimizer) {
    json o = to_json(*c.optimizer);
    o.erase("seed");
    j["optimizer"] = o;
  }
  j["output"] = {{"dir", c.output_dir}};
  j["replay"] = {{"points", c.replay.points}, {"evaluators", c.replay.evaluators}};
  json s = json::object();
  const auto& st = c.study;
  auto put = [&](const char* key, const auto& v) {
    if (v) s[key] = *v;
  };
  put("count", st.count);
  put("threshold", st.threshold);
  put("mode", st.mode);
  put("p_grid", st.p_grid);
  put("p1_grid", st.p1_grid);
  put("p2_grid", st.p2_grid);
  put("J_values", st.J_values);
  put("shot_grid", st.shot_grid);
  put("repeats", st.repeats);
  put("window", st.window);
  put("max_attempts", st.max_attempts);
  put("tail_fraction", st.tail_fraction);
  j["study"] = s;
  return j;
}

std::string serialize_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

}  // namespace hrvqe
