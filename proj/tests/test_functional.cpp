#include <gtest/gtest.h>

#include "voxfact/functional.hpp"

using namespace voxfact;

namespace {

GaussianRational q(long n, long d = 1) { return GaussianRational(Rational(n, d)); }
GaussianRational g(long a, long b, long c, long d) { return GaussianRational(Rational(a, b), Rational(c, d)); }

GaussianRational binom(long n, long k) {
  if (k < 0) return q(0);
  GaussianRational out(1);
  for (long i = 0; i < k; ++i) out = out * q(n - i, i + 1);
  return out;
}

// alpha(z^j) straight from the definitions: Taylor coefficients for jets,
// residues (1/2 pi i) \oint (z - c)^n z^j dz for moments with |c| < r.
GaussianRational direct(const AtomFactor& f, long j) {
  if (const auto* d = std::get_if<DeltaJet>(&f)) {
    if (j - d->d < 0) return q(0);
    return binom(j, d->d) * pow(d->p.exact(), j - d->d);
  }
  const auto& m = std::get<CircleMoment>(f);
  if (j >= 0) {
    long k = -m.n - 1;
    if (k < 0 || k > j) return q(0);
    return binom(j, k) * pow(m.c.exact(), j - k);
  }
  return m.c.exact().is_zero() && m.n + j == -1 ? q(1) : q(0);
}

GaussianRational direct(const Functional& a, long j) {
  GaussianRational out(0);
  for (const auto& [atom, c] : a.terms()) out = out + direct(atom.factors[0], j) * c.exact();
  return out;
}

// (lambda z + w)^j expanded in z
std::map<long, GaussianRational> affine_power(const GaussianRational& lambda, const GaussianRational& w, long j) {
  std::map<long, GaussianRational> out;
  for (long i = 0; i <= j; ++i) out[i] = binom(j, i) * pow(lambda, i) * pow(w, j - i);
  return out;
}

GaussianRational laurent_value(const Functional& a, const std::map<long, GaussianRational>& coeff) {
  LaurentSeries s;
  for (const auto& [j, c] : coeff) s.coeff[static_cast<int>(j)] = GradedVector::vacuum() * c;
  GradedVector v = evaluate_laurent(a, s);
  return v.coefficient(Monomial());
}

Functional sample_functional() {
  Functional a = Functional::atom({delta(Scalar(g(1, 2, 1, 3)), 2)}, Scalar(q(3)));
  a += Functional::atom({delta(Scalar(q(-1)), 0)}, Scalar(g(0, 1, 1, 1)));
  a += Functional::atom({moment(Scalar(g(1, 4, 0, 1)), Scalar(q(2)), -3)}, Scalar(q(-1, 2)));
  a += Functional::atom({moment(Scalar(q(0)), Scalar(q(1)), -1)});
  return a;
}

}  // namespace

TEST(Quadrature, MonomialMoments) {
  auto z2 = [](Complex z) { return z * z; };
  EXPECT_NEAR(std::abs(quadrature_moment(z2, Complex(0, 0), 1.0, -3, 16) - 1.0), 0.0, 1e-14);
  auto zm2 = [](Complex z) { return 1.0 / (z * z); };
  EXPECT_NEAR(std::abs(quadrature_moment(zm2, Complex(0, 0), 1.0, 1, 16) - 1.0), 0.0, 1e-14);
  auto series = [](Complex z) {
    Complex s(0, 0);
    for (int j = 0; j <= 6; ++j) s += static_cast<double>(j) * std::pow(z, j);
    return s;
  };
  for (int j = 0; j <= 6; ++j) EXPECT_NEAR(std::abs(quadrature_moment(series, Complex(0, 0), 0.5, -j - 1, 16) - static_cast<double>(j)), 0.0, 1e-12) << j;
  EXPECT_THROW(quadrature_moment(z2, Complex(0, 0), 1.0, 0, 0), std::invalid_argument);
}

TEST(Quadrature, OffCenterCircle) {
  // (1/2 pi i) \oint_{|z-1|=1/2} (z-1)^{-2} z^3 dz = 3
  auto z3 = [](Complex z) { return z * z * z; };
  EXPECT_NEAR(std::abs(quadrature_moment(z3, Complex(1, 0), 0.5, -2, 16) - 3.0), 0.0, 1e-13);
}

TEST(Atoms, MomentRadiusMustBePositive) {
  EXPECT_THROW(moment(Scalar(q(0)), Scalar(q(-1)), 0), std::invalid_argument);
  EXPECT_THROW(moment(Scalar(q(0)), Scalar(g(0, 1, 1, 1)), 0), std::invalid_argument);
}

TEST(Atoms, LaurentEvaluationMatchesDefinition) {
  Functional a = sample_functional();
  for (long j = 0; j <= 8; ++j) EXPECT_EQ(laurent_value(a, {{j, q(1)}}), direct(a, j)) << j;
  Functional m = Functional::atom({moment(Scalar(q(0)), Scalar(q(1)), 1)});
  EXPECT_EQ(laurent_value(m, {{-2, q(1)}}), q(1));
  EXPECT_EQ(laurent_value(m, {{-3, q(1)}}), q(0));
}

TEST(Atoms, DomainMismatch) {
  LaurentSeries s;
  s.inner = Rational(1);
  s.coeff[-1] = GradedVector::vacuum();
  EXPECT_THROW(evaluate_laurent(Functional::atom({delta(Scalar(q(1, 2)), 0)}), s), ExpansionDomainMismatch);
  EXPECT_THROW(evaluate_laurent(Functional::atom({moment(Scalar(q(1)), Scalar(q(1, 4)), 0)}), s), ExpansionDomainMismatch);
  EXPECT_NO_THROW(evaluate_laurent(Functional::atom({moment(Scalar(q(0)), Scalar(q(2)), 0)}), s));
}

TEST(Pushforward, AgreesWithPrecompositionOnMonomials) {
  Functional a = sample_functional();
  std::vector<std::pair<GaussianRational, GaussianRational>> maps{{q(2), q(0)}, {g(3, 5, 4, 5), g(1, 3, -1, 2)}, {q(-1, 2), q(5)}, {g(0, 1, 1, 1), q(0)}};
  for (const auto& [lambda, w] : maps) {
    Functional pushed = pushforward_affine(Scalar(lambda), Scalar(w), a);
    for (long j = 0; j <= 8; ++j) {
      GaussianRational expect(0);
      for (const auto& [i, c] : affine_power(lambda, w, j)) expect = expect + c * direct(a, i);
      EXPECT_EQ(direct(pushed, j), expect) << lambda.str() << " " << w.str() << " " << j;
    }
  }
}

TEST(Pushforward, Functorial) {
  Functional a = sample_functional();
  GaussianRational l1 = g(3, 5, 4, 5), w1 = g(1, 2, 0, 1), l2 = q(-2), w2 = g(0, 1, 1, 3);
  Functional twice = pushforward_affine(Scalar(l2), Scalar(w2), pushforward_affine(Scalar(l1), Scalar(w1), a));
  Functional once = pushforward_affine(Scalar(l2 * l1), Scalar(l2 * w1 + w2), a);
  EXPECT_EQ(twice, once);
  EXPECT_EQ(pushforward_affine(Scalar(1), Scalar(0), a), a);
  EXPECT_THROW(pushforward_affine(Scalar(0), Scalar(0), a), std::domain_error);
}

TEST(Products, ExternalProductAndPermutation) {
  Functional x = Functional::atom({delta(Scalar(q(1)), 1)}, Scalar(q(2)));
  Functional y = Functional::atom({moment(Scalar(q(0)), Scalar(q(1, 2)), -1)}) + Functional::atom({delta(Scalar(q(3)), 0)});
  Functional xy = external_product(x, y);
  EXPECT_EQ(xy.arity(), 2u);
  EXPECT_EQ(xy.terms().size(), 2u);
  EXPECT_EQ(permute(permute(xy, {1, 0}), {1, 0}), xy);
  EXPECT_EQ(permute(xy, {1, 0}), external_product(y, x));
  EXPECT_EQ(external_product(Functional::unit(), x), x);
}

TEST(Evaluation, TwoPointResidues) {
  VertexEngine e(VAPreset::heisenberg());
  GeometricMu mu(e);
  FunctionalEvaluator ev(mu);
  GradedVector a = e.generator_state(0);
  // (1/2 pi i) \oint_{|z|=1} z^n * z^{-2} dz on the vacuum part
  for (int n = -1; n <= 3; ++n) {
    Functional f = Functional::atom({moment(Scalar(q(0)), Scalar(q(1)), n), delta(Scalar(q(0)), 0)});
    ProductVector p = ev.evaluate_exact(f, {a, a}, DegreeWindow(0, 0));
    EXPECT_EQ(p.component(0), n == 1 ? GradedVector::vacuum() : GradedVector()) << n;
  }
  // delta at a point reproduces mu there
  Functional d = Functional::atom({delta(Scalar(q(3, 2)), 0), delta(Scalar(q(-1, 4)), 0)});
  EXPECT_EQ(ev.evaluate_exact(d, {a, a}, DegreeWindow(0, 4)), mu.mu_exact({a, a}, {q(3, 2), q(-1, 4)}, DegreeWindow(0, 4)));
}

TEST(Evaluation, JetOnPoleRejected) {
  VertexEngine e(VAPreset::heisenberg());
  GeometricMu mu(e);
  FunctionalEvaluator ev(mu);
  GradedVector a = e.generator_state(0);
  Functional f = Functional::atom({delta(Scalar(q(0)), 0), delta(Scalar(q(0)), 0)});
  EXPECT_THROW(ev.evaluate_exact(f, {a, a}, DegreeWindow(0, 0)), DomainViolation);
}

TEST(Evaluation, BraidingSwapsStatesAndCoordinates) {
  VertexEngine e(VAPreset::virasoro(q(1, 2)));
  GeometricMu mu(e);
  FunctionalEvaluator ev(mu);
  GradedVector w = e.generator_state(0), b(Monomial({e.parse_token("L-3")}));
  Functional f = Functional::atom({moment(Scalar(q(0)), Scalar(q(2)), 3), delta(Scalar(q(1, 2)), 1)}) +
                 Functional::atom({delta(Scalar(g(1, 1, 1, 1)), 0), moment(Scalar(q(0)), Scalar(q(1, 2)), 0)}, Scalar(q(-3)));
  ProductVector x = ev.evaluate_exact(f, {w, b}, DegreeWindow(0, 6));
  ProductVector y = ev.evaluate_exact(permute(f, {1, 0}), {b, w}, DegreeWindow(0, 6));
  EXPECT_EQ(x, y);
  EXPECT_FALSE(x.is_zero());
}

TEST(Evaluation, QuadratureAgreesWithResidues) {
  VertexEngine e(VAPreset::heisenberg());
  GeometricMu mu(e);
  FunctionalEvaluator ev(mu);
  GradedVector a = e.generator_state(0), b(Monomial({e.parse_token("a-2")}));
  Functional f = Functional::atom({moment(Scalar(q(0)), Scalar(q(2)), 2), delta(Scalar(q(1, 2)), 0)}) +
                 Functional::atom({moment(Scalar(q(1, 4)), Scalar(q(1)), -1), moment(Scalar(q(0)), Scalar(q(3)), 0)}, Scalar(g(1, 2, 1, 2)));
  DegreeWindow w(0, 5);
  NumericProductVector exact = to_numeric(ev.evaluate_exact(f, {a, b}, w));
  EvalOptions opt;
  opt.force_quadrature = true;
  opt.quad_n = 28;
  NumericProductVector quad = ev.evaluate_numeric(f, {a, b}, w, opt);
  EXPECT_LE(relative_error(exact, quad), 1e-9);
}
