#include <cstdlib>

#include <gtest/gtest.h>

#include "hrvqe/config.hpp"
#include "hrvqe/errors.hpp"

using namespace hrvqe;

namespace {

constexpr const char* kFull = R"({
  "model": {"kind": "j1j2", "rows": 2, "cols": 3, "J1": 0.5, "J2": 0.2},
  "ansatz": {"kind": "yy", "layers": 2},
  "execution": {"shots": 1000, "hr_shots": "exact", "p1": 0.01, "p2": 0.04, "seed": 9, "threads": 2},
  "optimizer": {"lo": 0.0, "hi": 3.0, "initial_scale": 0.5, "scale_shrink": 0.5, "min_scale": 0.001, "max_evals": 77},
  "output": {"dir": "out"},
  "replay": {"points": 12, "evaluators": ["energy", "hr"]},
  "study": {"count": 10, "p_grid": [0.0, 0.1], "shot_grid": [100, 200], "mode": "ground_state_sweep"}
})";

ConfigError config_error(std::string_view text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a ConfigError";
  return ConfigError("", "");
}

}  // namespace

TEST(Config, ParsesEverySection) {
  const RunConfig c = parse_config(kFull);
  ASSERT_TRUE(c.model);
  EXPECT_EQ(std::get<J1J2Spec>(*c.model), (J1J2Spec{2, 3, 0.5, 0.2}));
  EXPECT_EQ(*c.ansatz, (AnsatzSpec{AnsatzKind::YY, 2}));
  EXPECT_EQ(c.execution.shots, ShotSetting{1000});
  EXPECT_FALSE(c.execution.hr_shots);
  EXPECT_EQ(*c.execution.noise(), (NoiseModel{0.01, 0.04}));
  EXPECT_EQ(c.execution.seed, 9u);
  EXPECT_EQ(c.optimizer->max_evals, 77u);
  EXPECT_EQ(c.output_dir, "out");
  EXPECT_EQ(c.replay.points, 12u);
  EXPECT_EQ(*c.study.count, 10u);
  EXPECT_EQ(*c.study.shot_grid, (std::vector<std::uint64_t>{100, 200}));
}

TEST(Config, EmptyDocumentUsesDefaults) {
  const RunConfig c = parse_config("  \n");
  EXPECT_FALSE(c.model);
  EXPECT_FALSE(c.execution.shots);
  EXPECT_EQ(c.execution.seed, 1u);
  EXPECT_FALSE(c.execution.noise());
  EXPECT_EQ(c.replay.points, 58u);
}

TEST(Config, SerializationRoundTrips) {
  const RunConfig c = parse_config(kFull);
  const RunConfig back = parse_config(serialize_config(c));
  EXPECT_TRUE(back == c);
  EXPECT_EQ(serialize_config(back), serialize_config(c));
}

TEST(Config, UnknownKeysNameFieldAndLine) {
  const auto e = config_error("{\n  \"model\": {\n    \"kind\": \"tfim\",\n    \"nn\": 4\n  }\n}");
  EXPECT_EQ(e.field(), "model.nn");
  EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  EXPECT_EQ(config_error(R"({"modle": {}})").field(), "modle");
}

TEST(Config, TypeAndRangeErrors) {
  EXPECT_EQ(config_error(R"({"model": {"n": -3}})").field(), "model.n");
  EXPECT_EQ(config_error(R"({"model": {"n": 40}})").field(), "model.n");
  EXPECT_EQ(config_error(R"({"model": {"kind": "heisenberg"}})").field(), "model.kind");
  EXPECT_EQ(config_error(R"({"ansatz": {"kind": "hea"}})").field(), "ansatz.kind");
  EXPECT_EQ(config_error(R"({"execution": {"p1": 1.5}})").field(), "execution.p1");
  EXPECT_EQ(config_error(R"({"execution": {"shots": 0}})").field(), "execution.shots");
  EXPECT_EQ(config_error(R"({"optimizer": {"lo": 2, "hi": 1}})").field(), "optimizer.hi");
  EXPECT_EQ(config_error(R"({"replay": {"evaluators": ["entropy"]}})").field(), "replay.evaluators");
  EXPECT_EQ(config_error(R"({"study": {"p_grid": []}})").field(), "study.p_grid");
  EXPECT_EQ(config_error(R"({"model": 3})").field(), "model");
}

TEST(Config, OptimizerSeedIsRejected) {
  EXPECT_EQ(config_error(R"({"optimizer": {"seed": 3}})").field(), "optimizer.seed");
}

TEST(Config, MalformedJsonReportsLine) {
  const auto e = config_error("{\n  \"model\": {\n    \"n\": 4,,\n  }\n}");
  EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
}

TEST(Config, OverridesApplyBeforeValidation) {
  const RunConfig c = parse_config(kFull, {"execution.seed=17", "model.J1=0.25", "output.dir=elsewhere"});
  EXPECT_EQ(c.execution.seed, 17u);
  EXPECT_DOUBLE_EQ(std::get<J1J2Spec>(*c.model).J1, 0.25);
  EXPECT_EQ(c.output_dir, "elsewhere");
  const RunConfig fresh = parse_config("", {"model.kind=tfim", "model.n=5"});
  EXPECT_EQ(std::get<TfimSpec>(*fresh.model).n, 5u);
  EXPECT_THROW(parse_config("", {"noequals"}), ConfigError);
  EXPECT_EQ(config_error("", {"execution.sed=3"}).field(), "execution.sed");
}

TEST(Config, SeedOverrideWins) {
  EXPECT_EQ(parse_config(kFull, {"execution.seed=17"}, 5).execution.seed, 5u);
}

TEST(Config, SeedFromEnvironment) {
  ::setenv("HRVQE_SEED", "123", 1);
  EXPECT_EQ(seed_from_environment(), std::optional<std::uint64_t>{123});
  ::setenv("HRVQE_SEED", "abc", 1);
  EXPECT_THROW(seed_from_environment(), ConfigError);
  ::unsetenv("HRVQE_SEED");
  EXPECT_FALSE(seed_from_environment());
}

TEST(Config, OptimizerOrAppliesExecution) {
  const RunConfig c = parse_config(kFull);
  const OptimizerConfig o = c.optimizer_or(OptimizerConfig{});
  EXPECT_EQ(o.seed, 9u);
  EXPECT_EQ(o.threads, 2u);
  EXPECT_EQ(o.max_evals, 77u);
  const RunConfig bare = parse_config("");
  OptimizerConfig fallback;
  fallback.max_evals = 5;
  EXPECT_EQ(bare.optimizer_or(fallback).max_evals, 5u);
  EXPECT_GE(bare.threads(), 1u);
}
