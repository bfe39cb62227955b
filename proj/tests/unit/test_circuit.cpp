#include <gtest/gtest.h>

#include "hrvqe/circuit.hpp"
#include "hrvqe/errors.hpp"
#include "hrvqe/expectation.hpp"
#include "hrvqe/models.hpp"

using namespace hrvqe;

TEST(Ala, ElevenQubitsThreeLayers) {
  const Circuit c = build_ala(11, 3);
  EXPECT_EQ(param_count(c), 33u);
  EXPECT_EQ(c.cnot_count(), 15u);
}

TEST(Ala, SixQubitsThreeLayers) {
  const Circuit c = build_ala(6, 3);
  EXPECT_EQ(param_count(c), 18u);
  EXPECT_EQ(c.cnot_count(), 8u);
}

TEST(Ala, SmallestBrick) {
  const Circuit c = build_ala(2, 1);
  EXPECT_EQ(param_count(c), 2u);
  EXPECT_EQ(c.cnot_count(), 1u);
}

TEST(Ala, StartsWithHadamardWallAndAlternatesBricks) {
  const Circuit c = build_ala(5, 2);
  for (std::size_t q = 0; q < 5; ++q) EXPECT_EQ(c.gates()[q], Gate::h(q));
  std::vector<std::pair<std::size_t, std::size_t>> cnots;
  for (const auto& g : c.gates()) {
    if (g.kind == GateKind::CNOT) cnots.emplace_back(g.control, g.target);
  }
  const std::vector<std::pair<std::size_t, std::size_t>> expected{{0, 1}, {2, 3}, {1, 2}, {3, 4}};
  EXPECT_EQ(cnots, expected);
}

TEST(Ala, ZeroParametersGiveFieldEnergy) {
  for (std::size_t n : {3, 4, 6}) {
    const Circuit c = build_ala(n, 3);
    const auto s = prepare(c, std::vector<double>(param_count(c), 0.0));
    EXPECT_NEAR(expectation_exact(build_tfim_1d(TfimSpec{n, 0.5, false}), s), static_cast<double>(n), 1e-12);
  }
}

TEST(Yy, CountsFollowLayoutRule) {
  const Circuit a = build_yy(4, 1);
  EXPECT_EQ(param_count(a), 7u);
  EXPECT_EQ(a.cnot_count(), 3u);
  const Circuit b = build_yy(11, 2);
  EXPECT_EQ(param_count(b), 42u);
  EXPECT_EQ(b.cnot_count(), 20u);
}

TEST(Yy, SecondLayerRepeatsFirstWithFreshSlots) {
  const Circuit one = build_yy(5, 1), two = build_yy(5, 2);
  const std::size_t k = one.gates().size();
  ASSERT_EQ(two.gates().size(), 2 * k);
  const std::size_t p = param_count(one);
  for (std::size_t i = 0; i < k; ++i) {
    Gate expected = one.gates()[i];
    if (expected.param) *expected.param += p;
    EXPECT_EQ(two.gates()[i + k], expected);
    EXPECT_EQ(two.gates()[i], one.gates()[i]);
  }
}

TEST(Circuit, TextRoundTrip) {
  Circuit c = build_ala(4, 2);
  c.add_ry_fixed(1, 0.5);
  const Circuit back = Circuit::from_text(c.to_text());
  EXPECT_EQ(back, c);
  EXPECT_NE(c.to_text().find("CNOT 0 1"), std::string::npos);
}

TEST(Circuit, InvalidSizesThrow) {
  EXPECT_THROW(build_ala(1, 1), DomainError);
  EXPECT_THROW(build_ala(3, 0), DomainError);
  EXPECT_THROW(build_yy(1, 2), DomainError);
  Circuit c(2);
  EXPECT_THROW(c.add_cnot(0, 0), DomainError);
  EXPECT_THROW(c.add_h(2), DimensionError);
}

TEST(Circuit, AnsatzSpecDispatch) {
  EXPECT_EQ(build_ansatz({AnsatzKind::YY, 2}, 5), build_yy(5, 2));
  EXPECT_EQ(build_ansatz({AnsatzKind::ALA, 3}, 5), build_ala(5, 3));
  EXPECT_EQ(ansatz_kind_from_string("yy"), AnsatzKind::YY);
  EXPECT_THROW(ansatz_kind_from_string("qaoa"), DomainError);
}
