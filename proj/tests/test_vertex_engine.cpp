#include <gtest/gtest.h>

#include <random>

#include "oracle/mode_oracle.hpp"
#include "voxfact/vertex_engine.hpp"

using namespace voxfact;

namespace {

VAPreset preset_by_index(int i) {
  switch (i) {
    case 0: return VAPreset::heisenberg();
    case 1: return VAPreset::virasoro(GaussianRational(Rational(1, 2)));
    default: return VAPreset::affine_sl2(GaussianRational(1));
  }
}

Monomial mono(const VertexEngine& e, std::vector<std::string> tokens) {
  std::vector<PBWFactor> f;
  for (const auto& t : tokens) f.push_back(e.parse_token(t));
  return Monomial(f);
}

}  // namespace

TEST(Preset, GeneratorTables) {
  auto h = VAPreset::heisenberg();
  EXPECT_EQ(h.generator_count(), 1);
  EXPECT_EQ(h.weight(0), 1);
  auto v = VAPreset::virasoro(GaussianRational(Rational(1, 2)));
  EXPECT_EQ(v.symbol(0), "L");
  EXPECT_EQ(v.weight(0), 2);
  auto s = VAPreset::from_name("affine_sl2", "1/2", "3");
  EXPECT_EQ(s.generator_count(), 3);
  EXPECT_EQ(s.parameter(), GaussianRational(3));
  EXPECT_THROW(VAPreset::from_name("w3"), ParseError);
}

TEST(Preset, BracketsAreAntisymmetric) {
  for (int p = 0; p < 3; ++p) {
    auto preset = preset_by_index(p);
    for (int g = 0; g < preset.generator_count(); ++g)
      for (int h = 0; h < preset.generator_count(); ++h)
        for (int m = -3; m <= 3; ++m)
          for (int n = -3; n <= 3; ++n) {
            auto x = preset.bracket(g, m, h, n), y = preset.bracket(h, n, g, m);
            EXPECT_EQ(x.central, -y.central);
            GradedVector a, b;
            for (const auto& t : x.terms) a.add_term(Monomial({PBWFactor{static_cast<std::uint8_t>(t.gen), 5}}), t.coeff);
            for (const auto& t : y.terms) b.add_term(Monomial({PBWFactor{static_cast<std::uint8_t>(t.gen), 5}}), -t.coeff);
            EXPECT_EQ(a, b);
          }
  }
}

TEST(Basis, SizesMatchPartitionCounts) {
  VertexEngine h(VAPreset::heisenberg());
  const std::size_t partitions[] = {1, 1, 2, 3, 5, 7, 11, 15};
  for (int d = 0; d < 8; ++d) EXPECT_EQ(h.basis(d).size(), partitions[d]);
  VertexEngine v(VAPreset::virasoro(GaussianRational(Rational(1, 2))));
  const std::size_t parts_ge2[] = {1, 0, 1, 1, 2, 2, 4, 4};
  for (int d = 0; d < 8; ++d) EXPECT_EQ(v.basis(d).size(), parts_ge2[d]);
  VertexEngine s(VAPreset::affine_sl2(GaussianRational(1)));
  const std::size_t coloured[] = {1, 3, 9, 22, 51, 108, 221};
  for (int d = 0; d < 7; ++d) EXPECT_EQ(s.basis(d).size(), coloured[d]);
}

TEST(GeneratorModes, BosonExamples) {
  VertexEngine e(VAPreset::heisenberg());
  GradedVector a = e.generator_state(0);
  EXPECT_EQ(e.generator_mode_apply("a", 1, a), GradedVector(Monomial()));
  EXPECT_TRUE(e.generator_mode_apply("a", 0, a).is_zero());
  EXPECT_TRUE(e.generator_mode_apply("a", 0, GradedVector(mono(e, {"a-3", "a-1"}))).is_zero());
  EXPECT_THROW(e.generator_mode_apply("x", 1, a), std::invalid_argument);
}

TEST(GeneratorModes, DegreeBoundForcesAnnihilation) {
  for (int p = 0; p < 3; ++p) {
    VertexEngine e(preset_by_index(p));
    for (const auto& b : e.basis_up_to(0, 4))
      for (int g = 0; g < e.preset().generator_count(); ++g) {
        int n = 1 + b.degree() + e.preset().weight(g);
        EXPECT_TRUE(e.generator_mode_apply(g, n, GradedVector(b)).is_zero());
      }
  }
}

TEST(StateMode, BosonExamples) {
  VertexEngine e(VAPreset::heisenberg());
  Monomial a = mono(e, {"a-1"});
  EXPECT_EQ(e.state_mode(a, 1, a), GradedVector(Monomial()));
  for (int n = 2; n < 6; ++n) EXPECT_TRUE(e.state_mode(a, n, a).is_zero());
  EXPECT_TRUE(e.state_mode(a, 0, a).is_zero());
  EXPECT_EQ(e.state_mode(a, -1, a), GradedVector(mono(e, {"a-1", "a-1"})));
  // (a-1 a-1)_(-1) (a-1 a-1) = a-1^4 + 4 a-3 a-1 by hand
  Monomial aa = mono(e, {"a-1", "a-1"});
  GradedVector expect(mono(e, {"a-1", "a-1", "a-1", "a-1"}));
  expect.add_term(mono(e, {"a-3", "a-1"}), 4);
  EXPECT_EQ(e.state_mode(aa, -1, aa), expect);
  EXPECT_EQ(e.state_mode(aa, 3, aa), GradedVector(Monomial(), 2));
}

TEST(StateMode, VirasoroExamples) {
  GaussianRational c(Rational(1, 2));
  VertexEngine e(VAPreset::virasoro(c));
  Monomial w = mono(e, {"L-2"});
  EXPECT_EQ(e.state_mode(w, 3, w), GradedVector(Monomial(), c * GaussianRational(Rational(1, 2))));
  EXPECT_EQ(e.state_mode(w, 1, w), GradedVector(w, 2));
  EXPECT_EQ(e.state_mode(w, 0, w), GradedVector(mono(e, {"L-3"})));
  EXPECT_TRUE(e.state_mode(w, 2, w).is_zero());
  VertexEngine e7(VAPreset::virasoro(GaussianRational(7)));
  EXPECT_EQ(e7.state_mode(w, 3, w), GradedVector(Monomial(), GaussianRational(Rational(7, 2))));
}

TEST(StateMode, AffineExamples) {
  VertexEngine e(VAPreset::affine_sl2(GaussianRational(1)));
  Monomial E = mono(e, {"e-1"}), F = mono(e, {"f-1"}), H = mono(e, {"h-1"});
  EXPECT_EQ(e.state_mode(E, 0, F), GradedVector(H));
  EXPECT_EQ(e.state_mode(E, 1, F), GradedVector(Monomial()));
  EXPECT_EQ(e.state_mode(H, 1, H), GradedVector(Monomial(), 2));
  EXPECT_EQ(e.state_mode(H, 0, E), GradedVector(E, 2));
}

TEST(StateMode, VacuumAxioms) {
  for (int p = 0; p < 3; ++p) {
    VertexEngine e(preset_by_index(p));
    for (const auto& a : e.basis_up_to(0, 4)) {
      for (int n = 0; n < 6; ++n) EXPECT_TRUE(e.state_mode(a, n, Monomial()).is_zero());
      EXPECT_EQ(e.state_mode(Monomial(), -1, a), GradedVector(a));
      EXPECT_TRUE(e.state_mode(Monomial(), 0, a).is_zero());
    }
  }
}

TEST(StateMode, AgreesWithOracleAtLowDegree) {
  for (int p = 0; p < 3; ++p) {
    auto preset = preset_by_index(p);
    VertexEngine e(preset);
    auto oracle = oracle::ModeOracle::for_preset(preset);
    auto basis = e.basis_up_to(0, 3);
    for (const auto& a : basis)
      for (const auto& b : basis)
        for (int n = -2; n <= a.degree() + b.degree(); ++n)
          ASSERT_EQ(e.state_mode(a, n, b), oracle.mode(a, n, b))
              << preset.name() << " " << e.format(a) << " (" << n << ") " << e.format(b);
  }
}

TEST(StateMode, DegreeRule) {
  std::mt19937 rng(3);
  for (int p = 0; p < 3; ++p) {
    VertexEngine e(preset_by_index(p));
    auto basis = e.basis_up_to(0, 4);
    std::uniform_int_distribution<std::size_t> pick(0, basis.size() - 1);
    std::uniform_int_distribution<int> mode(-3, 6);
    for (int t = 0; t < 300; ++t) {
      const auto& a = basis[pick(rng)];
      const auto& b = basis[pick(rng)];
      int n = mode(rng);
      const auto& r = e.state_mode(a, n, b);
      if (!r.is_zero()) {
        ASSERT_TRUE(r.is_homogeneous());
        EXPECT_EQ(r.degree(), a.degree() + b.degree() - n - 1);
      }
    }
  }
}

TEST(StateMode, BosonSkewSymmetry) {
  VertexEngine e(VAPreset::heisenberg());
  auto basis = e.basis_up_to(0, 4);
  for (const auto& a : basis)
    for (const auto& b : basis)
      for (int n = -2; n <= a.degree() + b.degree(); ++n) {
        GradedVector rhs;
        for (int i = 0; n + i <= a.degree() + b.degree(); ++i) {
          GaussianRational sign((n + 1 + i) % 2 == 0 ? 1 : -1);
          rhs.add_scaled(e.divided_translate(e.state_mode(b, n + i, a), i), sign);
        }
        ASSERT_EQ(e.state_mode(a, n, b), rhs) << e.format(a) << " (" << n << ") " << e.format(b);
      }
}

TEST(Translate, Examples) {
  VertexEngine e(VAPreset::heisenberg());
  EXPECT_TRUE(e.translate(GradedVector(Monomial())).is_zero());
  EXPECT_EQ(e.translate(e.generator_state(0)), GradedVector(mono(e, {"a-2"})));
  for (const auto& b : e.basis_up_to(1, 5)) {
    auto t = e.translate(GradedVector(b));
    ASSERT_FALSE(t.is_zero());
    EXPECT_EQ(t.degree(), b.degree() + 1);
  }
}

TEST(Translate, MatchesOmegaZeroForVirasoro) {
  VertexEngine e(VAPreset::virasoro(GaussianRational(Rational(1, 2))));
  Monomial w({PBWFactor{0, 2}});
  for (const auto& b : e.basis_up_to(0, 7)) EXPECT_EQ(e.translate(GradedVector(b)), e.state_mode(w, 0, b));
}

TEST(Translate, IsDerivationOfModes) {
  std::mt19937 rng(5);
  for (int p = 0; p < 3; ++p) {
    VertexEngine e(preset_by_index(p));
    auto basis = e.basis_up_to(0, 3);
    std::uniform_int_distribution<std::size_t> pick(0, basis.size() - 1);
    std::uniform_int_distribution<int> mode(-2, 5);
    for (int t = 0; t < 150; ++t) {
      GradedVector a(basis[pick(rng)]), b(basis[pick(rng)]);
      int n = mode(rng);
      GradedVector ta = e.translate(a), tb = e.translate(b);
      GradedVector lhs = e.translate(e.state_mode(a, n, b));
      EXPECT_EQ(lhs, e.state_mode(ta, n, b) + e.state_mode(a, n, tb));
      EXPECT_EQ(e.state_mode(ta, n, b), e.state_mode(a, n - 1, b) * GaussianRational(-n));
    }
  }
}

TEST(PoleBound, Examples) {
  VertexEngine h(VAPreset::heisenberg());
  EXPECT_EQ(h.pole_bound(h.generator_state(0), h.generator_state(0)), 2);
  EXPECT_EQ(h.pole_bound(GradedVector(Monomial()), h.generator_state(0)), 0);
  VertexEngine v(VAPreset::virasoro(GaussianRational(Rational(1, 2))));
  EXPECT_EQ(v.pole_bound(v.generator_state(0), v.generator_state(0)), 4);
  VertexEngine v0(VAPreset::virasoro(GaussianRational(0)));
  EXPECT_EQ(v0.pole_bound(v0.generator_state(0), v0.generator_state(0)), 2);
}

TEST(Tokens, ParseAndFormat) {
  VertexEngine e(VAPreset::affine_sl2(GaussianRational(1)));
  Monomial m = mono(e, {"f-1", "e-2", "h-1"});
  EXPECT_EQ(e.format(m), "e-2 h-1 f-1 |0>");
  EXPECT_THROW(e.parse_token("e0"), ParseError);
  EXPECT_THROW(e.parse_token("q-1"), ParseError);
  EXPECT_THROW(e.parse_token("e"), ParseError);
}
