#include <gtest/gtest.h>

#include <random>

#include "voxfact/factorization_checks.hpp"

using namespace voxfact;

namespace {

GaussianRational q(long n, long d = 1) { return GaussianRational(Rational(n, d)); }
GaussianRational g(long a, long b, long c, long d) { return GaussianRational(Rational(a, b), Rational(c, d)); }
OpenSet disc(GaussianRational c, Rational r) { return OpenSet::disc(std::move(c), std::move(r)); }

struct Boson {
  VertexEngine e{VAPreset::heisenberg()};
  GeometricMu mu{e};
  FunctionalEvaluator fe{mu};
  ExpressionEvaluator ev{fe};
  GradedVector a = e.generator_state(0);

  GradedVector st(std::vector<std::string> tokens) const {
    std::vector<PBWFactor> f;
    for (const auto& t : tokens) f.push_back(e.parse_token(t));
    return GradedVector(Monomial(f));
  }
};

Expression point(const OpenSet& u, const GaussianRational& p, const GradedVector& s) { return delta_expression(u, {Scalar(p)}, {s}); }

}  // namespace

TEST(OpenSets, Geometry) {
  OpenSet d1 = disc(q(0), 1), d2 = disc(q(0), 2), ann = OpenSet::annulus(q(0), 1, 2);
  EXPECT_TRUE(d1.contains_point(g(1, 2, 1, 2)));
  EXPECT_FALSE(d1.contains_point(q(1)));
  EXPECT_TRUE(ann.contains_point(q(3, 2)));
  EXPECT_FALSE(ann.contains_point(q(1, 2)));
  EXPECT_TRUE(d1.subset_of(d2));
  EXPECT_TRUE(ann.subset_of(d2));
  EXPECT_FALSE(d2.subset_of(d1));
  EXPECT_TRUE(ann.disjoint_from(d1));
  EXPECT_FALSE(d1.disjoint_from(disc(q(3, 2), Rational(1, 2) + Rational(1, 100))));
  EXPECT_TRUE(d1.disjoint_from(disc(q(3, 2), Rational(1, 2))));
  EXPECT_EQ(d1.affine_image(q(2), q(1)), disc(q(1), 2));
  EXPECT_TRUE(OpenSet::union_of({disc(q(-2), 1), disc(q(2), 1)}).contains_point(q(2)));
  EXPECT_THROW(OpenSet::disc(q(0), 0), std::invalid_argument);
}

TEST(Expressions, ValidationAndNormalization) {
  Boson b;
  OpenSet d1 = disc(q(0), 1);
  EXPECT_THROW(point(d1, q(2), b.a), DomainViolation);
  EXPECT_THROW(delta_expression(d1, {Scalar(q(0)), Scalar(q(0))}, {b.a, b.a}), DomainViolation);
  Expression xy = delta_expression(d1, {Scalar(q(1, 2)), Scalar(q(-1, 2))}, {b.a, b.st({"a-2"})});
  Expression yx = delta_expression(d1, {Scalar(q(-1, 2)), Scalar(q(1, 2))}, {b.st({"a-2"}), b.a});
  EXPECT_EQ(xy, yx);
  Expression twice = point(d1, q(0), b.a) + point(d1, q(0), b.a) * Scalar(q(-2));
  EXPECT_EQ(twice, point(d1, q(0), b.a) * Scalar(q(-1)));
}

TEST(Expressions, Extend) {
  Boson b;
  OpenSet d1 = disc(q(0), 1), d2 = disc(q(0), 2), ann = OpenSet::annulus(q(0), 1, 2);
  Expression x = point(d1, q(1, 3), b.a);
  Expression big = extend(x, d2);
  EXPECT_EQ(big.carrier(), d2);
  EXPECT_EQ(big.terms(), x.terms());
  EXPECT_EQ(extend(x, d1), x);
  Expression m = Expression::make(ann, Functional::atom({moment(Scalar(q(0)), Scalar(q(3, 2)), 1)}), {b.a});
  EXPECT_EQ(extend(m, d2).terms(), m.terms());
  EXPECT_THROW(extend(big, d1), NotASubset);
}

TEST(Expressions, MultiplyLaws) {
  Boson b;
  OpenSet u = disc(q(-2), 1), v = disc(q(2), 1), t = disc(g(0, 1, 3, 1), 1), w = disc(q(0), 5);
  Expression x = point(u, q(-2), b.a) + point(u, q(-3, 2), b.st({"a-2"}));
  Expression y = point(v, q(2), b.st({"a-1", "a-1"}));
  Expression z = Expression::make(t, Functional::atom({moment(Scalar(g(0, 1, 3, 1)), Scalar(q(1, 2)), -1)}), {b.a});
  auto r = check_multiplication_axioms(x, y, z, w);
  EXPECT_TRUE(r.pass) << r.notes.size();
  Expression xy = multiply(point(u, q(-2), b.a), point(v, q(2), b.st({"a-2"})), w);
  EXPECT_EQ(xy, delta_expression(w, {Scalar(q(-2)), Scalar(q(2))}, {b.a, b.st({"a-2"})}));
  OpenSet far = disc(q(10), 1), both = OpenSet::union_of({u, far});
  EXPECT_EQ(multiply(Expression::unit(far), x, both), extend(x, both));
  EXPECT_THROW(multiply(x, x, w), NotDisjoint);
  EXPECT_THROW(multiply(x, y, disc(q(0), 2)), NotASubset);
}

TEST(Expressions, AffineAction) {
  Boson b;
  OpenSet d2 = disc(q(0), 2);
  Expression x = point(d2, q(1), b.a);
  EXPECT_EQ(affine_act(Scalar(1), Scalar(0), x), x);
  EXPECT_EQ(affine_act(Scalar(q(2)), Scalar(0), x), point(disc(q(0), 4), q(2), b.a * q(2)));
  Expression y = point(d2, q(0), b.a);
  EXPECT_EQ(affine_act(Scalar(1), Scalar(g(1, 2, 1, 1)), y), point(disc(g(1, 2, 1, 1), 2), g(1, 2, 1, 1), b.a));
}

TEST(Evaluation, Examples) {
  Boson b;
  OpenSet d1 = disc(q(0), 1);
  EXPECT_EQ(b.ev.evaluate_exact(point(d1, q(0), b.a), DegreeWindow(0, 3)), ProductVector::from_vector(b.a, DegreeWindow(0, 3)));
  // e^{zT} a_{-1}|0> = sum_j z^j a_{-1-j}|0>
  ProductVector p = b.ev.evaluate_exact(point(d1, q(1, 2), b.a), DegreeWindow(0, 4));
  for (int k = 1; k <= 4; ++k) EXPECT_EQ(p.component(k), b.st({"a-" + std::to_string(k)}) * pow(q(1, 2), k - 1));
}

TEST(Evaluation, EquivariantUnderAffineMaps) {
  Boson b;
  Expression x = delta_expression(disc(q(0), 2), {Scalar(q(1, 2)), Scalar(g(-1, 3, 1, 4))}, {b.a, b.st({"a-2"})});
  x += Expression::make(disc(q(0), 2), Functional::atom({moment(Scalar(q(0)), Scalar(q(1)), 1), delta(Scalar(q(3, 2)), 0)}), {b.a, b.a});
  for (auto [lambda, w] : std::vector<std::pair<GaussianRational, GaussianRational>>{{g(3, 5, 4, 5), q(0)}, {q(2), g(1, 1, -1, 2)}, {q(1), q(1, 3)}}) {
    auto r = check_evaluation_equivariance(b.ev, x, lambda, w, DegreeWindow(0, 5));
    EXPECT_TRUE(r.pass) << lambda.str() << " " << w.str();
  }
}

TEST(Counterexample, Boson) {
  Boson b;
  auto r = run_counterexample(b.ev, b.a, 1);
  EXPECT_TRUE(r.pass);
  const auto& table = r.witness.at("table");
  ASSERT_EQ(table.size(), 2u);
  EXPECT_EQ(table[0].at("set").get<std::string>(), "annulus");
  EXPECT_EQ(table[0].at("value").get<std::string>(), "0");
  EXPECT_EQ(table[1].at("value").get<std::string>(), b.e.format(GradedVector::vacuum()));
  auto zero = run_counterexample(b.ev, b.a, 0);
  EXPECT_FALSE(zero.pass);
  EXPECT_FALSE(zero.notes.empty());
}

TEST(Counterexample, VirasoroStressTensor) {
  VertexEngine e(VAPreset::virasoro(q(1, 2)));
  GeometricMu mu(e);
  FunctionalEvaluator fe(mu);
  ExpressionEvaluator ev(fe);
  auto r = run_counterexample(ev, e.generator_state(0), 3);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.witness.at("table")[1].at("value").get<std::string>(), e.format(GradedVector::vacuum() * q(1, 4)));
}

TEST(Relations, Kernel) {
  Boson b;
  OpenSet d1 = disc(q(0), 1);
  DegreeWindow w(0, 3);
  EXPECT_TRUE(relation_kernel(b.ev, {point(d1, q(0), b.a)}, w).empty());
  auto k = relation_kernel(b.ev, {point(d1, q(0), b.a), point(d1, q(0), b.a) * Scalar(q(2))}, w);
  ASSERT_EQ(k.size(), 1u);
  EXPECT_EQ(k[0][0], q(-2) * k[0][1]);
  OpenSet ann = OpenSet::annulus(q(0), 1, 2);
  Expression x = Expression::make(ann, Functional::atom({moment(Scalar(q(0)), Scalar(q(3, 2)), 1)}), {b.a});
  EXPECT_EQ(relation_kernel(b.ev, {x}, w).size(), 1u);
}

TEST(Relations, KernelVectorsEvaluateToZero) {
  Boson b;
  OpenSet d = disc(q(0), 1);
  DegreeWindow w(0, 3);
  std::vector<Expression> fam;
  for (auto p : {q(0), q(1, 4), g(0, 1, 1, 3), q(-1, 2)}) fam.push_back(point(d, p, b.a));
  for (auto s : {"a-2", "a-3"}) fam.push_back(point(d, q(0), b.st({s})));
  fam.push_back(Expression::make(d, Functional::atom({moment(Scalar(q(0)), Scalar(q(1, 2)), 0)}), {b.a}));
  auto k = relation_kernel(b.ev, fam, w);
  EXPECT_FALSE(k.empty());
  EXPECT_EQ(k.size() + matrix_rank(evaluation_matrix(b.ev, fam, w), fam.size()), fam.size());
  for (const auto& c : k) EXPECT_TRUE(b.ev.evaluate_exact(combine(fam, c), w).is_zero());
}

TEST(Relations, ConcentricDensity) {
  Boson b;
  OpenSet half = disc(q(0), Rational(1, 2));
  DegreeWindow w(0, 2);
  auto zero = concentric_density_check(b.ev, q(0), 1, Rational(1, 8), Expression(half), {q(1, 4), q(1, 2), q(1)}, w);
  EXPECT_TRUE(zero.pass);
  Expression diff = point(half, q(0), b.a) + point(half, q(0), b.a) * Scalar(q(-1));
  EXPECT_TRUE(diff.is_zero());
  std::vector<Expression> fam{point(half, q(1, 4), b.a), point(half, q(0), b.a), point(half, q(0), b.st({"a-2"}))};
  auto k = relation_kernel(b.ev, fam, w);
  ASSERT_EQ(k.size(), 1u);
  auto r = concentric_density_check(b.ev, q(0), 1, Rational(1, 8), combine(fam, k[0]), {q(1, 4), q(1, 2), q(1)}, w);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.cases, 3u);
  EXPECT_FALSE(r.notes.empty());
}

TEST(Multiplicativity, DisjointDiscs) {
  Boson b;
  OpenSet u = disc(q(-2), 1), v = disc(q(2), 1);
  EXPECT_TRUE(multiplicativity_check(u, v, {}, {}, {}).pass);
  std::vector<Expression> xs, ys;
  for (const auto& m : b.e.basis_up_to(1, 3)) {
    xs.push_back(point(u, q(-2), GradedVector(m)));
    ys.push_back(point(v, g(5, 2, 0, 1), GradedVector(m)));
  }
  Expression z = delta_expression(OpenSet::union_of({u, v}), {Scalar(q(-2)), Scalar(q(2))}, {b.a, b.st({"a-2"})});
  auto r = multiplicativity_check(u, v, xs, ys, {z});
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.truncation.at("rank_products").get<std::size_t>(), xs.size() * ys.size());
  EXPECT_THROW(multiplicativity_check(u, disc(q(-1), 1), xs, ys, {}), NotDisjoint);
}

TEST(Weiss, ConcentricCoverAccepted) {
  Boson b;
  OpenSet x = disc(q(0), 1);
  std::vector<OpenSet> cover;
  for (int j = 1; j <= 12; ++j) cover.push_back(disc(q(0), 1 - Rational(1, 1L << j)));
  std::vector<Expression> exprs{point(x, q(9, 10), b.a), delta_expression(x, {Scalar(q(0)), Scalar(g(0, 1, -99, 100))}, {b.a, b.a})};
  auto r = weiss_cover_check(b.ev, x, cover, exprs, DegreeWindow(0, 3));
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.truncation.at("weiss").get<bool>());
}

TEST(Weiss, StraddlingExpressionRejected) {
  Boson b;
  OpenSet x = disc(q(0), 3);
  std::vector<OpenSet> cover{disc(q(-1), 2), disc(q(1), 2)};
  Expression straddle = delta_expression(x, {Scalar(q(-5, 2)), Scalar(q(5, 2))}, {b.a, b.a});
  auto r = weiss_cover_check(b.ev, x, cover, {straddle}, DegreeWindow(0, 2));
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.truncation.at("weiss").get<bool>());
}

TEST(Weiss, GridCoverSupportSearch) {
  Boson b;
  std::vector<OpenSet> cover;
  for (int i = -4; i <= 4; ++i)
    for (int j = -4; j <= 4; ++j) cover.push_back(disc(g(i, 2, j, 2), Rational(9, 10)));
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coord(-30, 30), jitter(-6, 6);
  OpenSet x = OpenSet::plane();
  for (int t = 0; t < 20; ++t) {
    GaussianRational c = g(coord(rng), 20, coord(rng), 20);
    std::vector<Scalar> pts;
    std::vector<GaussianRational> raw;
    while (raw.size() < 3) {
      GaussianRational p = c + g(jitter(rng), 30, jitter(rng), 30);
      if (std::find(raw.begin(), raw.end(), p) != raw.end()) continue;
      raw.push_back(p);
      pts.push_back(Scalar(p));
    }
    // oracle: some grid disc holds all three points
    bool held = false;
    for (const auto& d : cover) held = held || std::all_of(raw.begin(), raw.end(), [&](const auto& p) { return d.contains_point(p); });
    ASSERT_TRUE(held);
    Expression e3 = delta_expression(x, pts, {b.a, GradedVector::vacuum(), GradedVector::vacuum()});
    auto r = weiss_cover_check(b.ev, x, cover, {e3}, DegreeWindow(0, 2));
    EXPECT_TRUE(r.pass) << t;
  }
}

TEST(WeightProjection, Examples) {
  Boson b;
  OpenSet d1 = disc(q(0), 1);
  DegreeWindow w(0, 4);
  Expression y = point(d1, q(0), b.st({"a-1", "a-1"}));
  for (int k = 0; k <= 4; ++k) {
    WeightProjection p = weight_project(b.ev, y, k, 1, 2, w, 28);
    double expect = k == 2 ? 1.0 : 0.0;
    EXPECT_NEAR(std::abs(p.value.coefficient(Monomial({b.e.parse_token("a-1"), b.e.parse_token("a-1")})) - expect), 0.0, 1e-12) << k;
    if (k != 2) EXPECT_LT(p.value.norm_inf(), 1e-12);
  }
  // p_k mu(a, z) = z^{k-1} a_{-k}
  Complex z(0.5, 0.25);
  Expression x = point(d1, g(1, 2, 1, 4), b.a);
  for (int k = 1; k <= 4; ++k) {
    WeightProjection p = weight_project(b.ev, x, k, 1, 2, w, 28);
    Monomial m({b.e.parse_token("a-" + std::to_string(k))});
    EXPECT_NEAR(std::abs(p.value.coefficient(m) - std::pow(z, k - 1)), 0.0, 1e-12) << k;
  }
  EXPECT_THROW(weight_project(b.ev, point(disc(q(0), 2), q(3, 2), b.a), 1, 1, 2, w), DomainViolation);
}

TEST(WeightProjection, CheckAndHomomorphism) {
  Boson b;
  OpenSet d1 = disc(q(0), 1);
  Expression x = delta_expression(d1, {Scalar(q(1, 2)), Scalar(g(0, 1, -1, 3))}, {b.a, b.st({"a-2"})});
  auto r = check_weight_projection(b.ev, x, 1, 2, DegreeWindow(0, 6), 28, 1e-9);
  EXPECT_TRUE(r.pass) << r.max_err;
  auto h = homomorphism_check(b.ev, {b.a, b.a}, {q(3, 2), q(0)}, 2, DegreeWindow(0, 4));
  EXPECT_TRUE(h.pass) << h.max_err;
}

TEST(Roundtrip, PresetsThroughDegreeFive) {
  for (auto p : {VAPreset::heisenberg(), VAPreset::virasoro(q(1, 2))}) {
    VertexEngine e(p);
    GeometricMu mu(e);
    FunctionalEvaluator fe(mu);
    ExpressionEvaluator ev(fe);
    auto r = roundtrip_check(ev, DegreeWindow(0, 5));
    EXPECT_TRUE(r.pass) << p.name();
    EXPECT_EQ(r.cases, e.basis_up_to(0, 5).size());
  }
}
