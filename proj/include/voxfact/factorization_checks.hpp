#pragma once

// Executable checks for the prefactorization algebra of expressions:
// the quotient counterexample, multiplicativity, Weiss covers, weight
// projections and the round trip through the vertex algebra.

#include <optional>
#include <string>
#include <vector>

#include "voxfact/check_report.hpp"
#include "voxfact/mu_checks.hpp"
#include "voxfact/relations.hpp"

namespace voxfact {

namespace labels {
inline constexpr const char* kExpressions = "prefactorization-algebra-of-expressions";
inline constexpr const char* kEquivariantEvaluation = "equivariant-evaluation";
inline constexpr const char* kQuotientCounterexample = "quotient-counterexample";
inline constexpr const char* kWeightSplitting = "weight-projection-splitting";
inline constexpr const char* kRoundtrip = "vertex-algebra-roundtrip";
inline constexpr const char* kHomomorphism = "roundtrip-homomorphism";
inline constexpr const char* kMultiplicative = "multiplicative";
inline constexpr const char* kDiscRelations = "disc-relations-closure";
inline constexpr const char* kWeissCosheaf = "weiss-cosheaf";
}  // namespace labels

inline Expression delta_expression(const OpenSet& u, const std::vector<Scalar>& points, const std::vector<GradedVector>& states) {
  std::vector<AtomFactor> f;
  for (const auto& p : points) f.push_back(delta(p));
  return Expression::make(u, Functional::atom(f), states);
}

inline nlohmann::json expression_json(VertexEngine& e, const Expression& x) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [key, c] : x.terms()) {
    nlohmann::json slots = nlohmann::json::array();
    for (const auto& s : key.slots) {
      std::string atom;
      if (const auto* j = std::get_if<DeltaJet>(&s.factor)) atom = "delta(" + j->p.str() + "," + std::to_string(j->d) + ")";
      else {
        const auto& m = std::get<CircleMoment>(s.factor);
        atom = "moment(" + m.c.str() + "," + m.r.str() + "," + std::to_string(m.n) + ")";
      }
      slots.push_back({{"atom", atom}, {"state", e.format(s.state)}});
    }
    terms.push_back({{"coeff", c.str()}, {"slots", slots}});
  }
  return {{"carrier", x.carrier().str()}, {"terms", terms}};
}

/// x = [moment(0, 3/2, m) (x) a] on B_2(0) minus closed B_1(0), y = [delta_0 (x) a] on B_1(0):
/// ev(x) = 0 while ev(x . y) = a_(m) a on B_2(0).
inline CheckReport run_counterexample(ExpressionEvaluator& ev, const GradedVector& a, int m) {
  CheckReport r("counterexample", labels::kQuotientCounterexample, 0.0);
  auto& e = ev.functionals().mu().engine();
  OpenSet u1 = OpenSet::annulus(GaussianRational(0), Rational(1), Rational(2));
  OpenSet u2 = OpenSet::disc(GaussianRational(0), Rational(1));
  OpenSet w = OpenSet::disc(GaussianRational(0), Rational(2));
  Expression x = Expression::make(u1, Functional::atom({moment(Scalar(0), Scalar(GaussianRational(Rational(3, 2))), m)}), {a});
  Expression y = Expression::make(u2, Functional::atom({delta(Scalar(0))}), {a});
  DegreeWindow win(0, std::max(0, 2 * a.max_degree()));
  ProductVector ev_x = ev.evaluate_exact(x, win);
  ProductVector ev_xy = ev.evaluate_exact(multiply(x, y, w), win);
  GradedVector expected = e.state_mode(a, m, a);
  nlohmann::json table = nlohmann::json::array();
  table.push_back({{"set", "annulus"}, {"value", e.format(ev_x.flatten())}});
  table.push_back({{"set", "disc"}, {"value", e.format(ev_xy.flatten())}});
  r.witness = {{"a", e.format(a)}, {"m", m}, {"table", table}};
  r.truncation = {{"window", {win.lo, win.hi}}};
  ++r.cases;
  if (!ev_x.is_zero()) r.fail("annulus expression does not evaluate to 0", r.witness);
  if (!(ev_xy.flatten() == expected)) r.fail("product evaluation differs from a_(m) a", r.witness);
  if (ev_xy.is_zero()) r.fail("a_(m) a = 0: the witness fails for this m", r.witness);
  if (r.pass) r.witness["value"] = e.format(expected);
  return r;
}

/// Structural axioms of multiplication on pairwise disjoint carriers:
/// associativity, symmetry, and the unit acting as extension.
inline CheckReport check_multiplication_axioms(const Expression& x, const Expression& y, const Expression& z, const OpenSet& w) {
  CheckReport r("multiplication-axioms", labels::kExpressions, 0.0);
  OpenSet xy = OpenSet::union_of({x.carrier(), y.carrier()});
  OpenSet yz = OpenSet::union_of({y.carrier(), z.carrier()});
  Expression left = multiply(multiply(x, y, xy), z, w);
  Expression right = multiply(x, multiply(y, z, yz), w);
  r.record(left == right ? 0.0 : 1.0, {{"axiom", "associativity"}});
  r.record(multiply(x, y, w) == multiply(y, x, w) ? 0.0 : 1.0, {{"axiom", "symmetry"}});
  OpenSet empty_side = OpenSet::union_of({y.carrier(), z.carrier()});
  Expression unit = Expression::unit(empty_side);
  r.record(multiply(x, unit, w) == extend(x, w) ? 0.0 : 1.0, {{"axiom", "unit"}});
  return r;
}

/// Splits every term of z by which of the disjoint sets u, v holds each slot.
/// Returns nullopt if some slot lies in neither.
inline std::optional<std::vector<std::pair<Expression, Expression>>> factor_by_support(const Expression& z, const OpenSet& u, const OpenSet& v) {
  std::vector<std::pair<Expression, Expression>> out;
  for (const auto& [key, c] : z.terms()) {
    TermKey ku, kv;
    for (const auto& s : key.slots) {
      TermKey probe{{s}};
      bool in_u = Expression::term_supported_in(probe, u), in_v = Expression::term_supported_in(probe, v);
      if (in_u == in_v) return std::nullopt;
      (in_u ? ku : kv).slots.push_back(s);
    }
    Expression x(u), y(v);
    x.add_key(std::move(ku), c);
    y.add_key(std::move(kv), Scalar(1));
    out.emplace_back(std::move(x), std::move(y));
  }
  return out;
}

/// Coordinates of expressions in the free space spanned by their symmetric terms.
inline std::vector<std::vector<GaussianRational>> term_matrix(const std::vector<Expression>& xs) {
  std::map<TermKey, std::vector<GaussianRational>> rows;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (const auto& [key, c] : xs[i].terms()) {
      auto& row = rows[key];
      row.resize(xs.size());
      row[i] = c.exact();
    }
  std::vector<std::vector<GaussianRational>> out;
  for (auto& [k, row] : rows) {
    row.resize(xs.size());
    out.push_back(std::move(row));
  }
  return out;
}

/// Multiplication E(U) (x) E(V) -> E(U u V) on finite exact families: products of
/// independent families stay independent, and expressions on U u V factor by support.
inline CheckReport multiplicativity_check(const OpenSet& u, const OpenSet& v, const std::vector<Expression>& xs, const std::vector<Expression>& ys,
                                          const std::vector<Expression>& zs) {
  CheckReport r("multiplicativity", labels::kMultiplicative, 0.0);
  if (!u.disjoint_from(v)) throw NotDisjoint(u.str() + " meets " + v.str());
  OpenSet w = OpenSet::union_of({u, v});
  std::vector<Expression> prods;
  for (const auto& x : xs)
    for (const auto& y : ys) prods.push_back(multiply(x, y, w));
  std::size_t rx = matrix_rank(term_matrix(xs), xs.size()), ry = matrix_rank(term_matrix(ys), ys.size());
  std::size_t rp = matrix_rank(term_matrix(prods), prods.size());
  r.truncation = {{"rank_u", rx}, {"rank_v", ry}, {"rank_products", rp}};
  ++r.cases;
  if (rp != rx * ry) r.fail("multiplication is not injective on the tested families");
  std::vector<Expression> targets = prods;
  targets.insert(targets.end(), zs.begin(), zs.end());
  for (const auto& z : targets) {
    auto parts = factor_by_support(z, u, v);
    if (!parts) {
      r.fail("a support point lies outside U u V", {{"carrier", z.carrier().str()}});
      continue;
    }
    Expression back(w);
    for (const auto& [x, y] : *parts) back += multiply(x, y, w);
    Expression zw(w);
    zw += z;
    r.record(back == zw ? 0.0 : 1.0, {{"carrier", z.carrier().str()}, {"terms", z.terms().size()}});
  }
  return r;
}

/// Orbit of a relation x' on a disc centred at z0 under dilations about z0:
/// every sample evaluates to 0, and small q land in relations on B_delta(z0).
inline CheckReport concentric_density_check(ExpressionEvaluator& ev, const GaussianRational& z0, const Rational& r_outer, const Rational& delta_r,
                                            const Expression& relation, const std::vector<GaussianRational>& qs, DegreeWindow win) {
  CheckReport r("concentric-density", labels::kDiscRelations, 0.0);
  auto& e = ev.functionals().mu().engine();
  if (!relation.carrier().subset_of(OpenSet::disc(z0, r_outer))) throw NotASubset("relation is not on a smaller concentric disc");
  OpenSet small = OpenSet::disc(z0, delta_r);
  for (const auto& q : qs) {
    if (q.is_zero()) throw std::invalid_argument("dilation factor must be nonzero");
    Expression moved = affine_act(Scalar(q), Scalar(z0 - q * z0), relation);
    ProductVector val = ev.evaluate_exact(moved, win);
    nlohmann::json input{{"q", q.str()}, {"relation", expression_json(e, relation)}};
    r.record(exact_distance(val, ProductVector(win)), input);
    if (moved.supported_in(small)) r.note("q = " + q.str() + " lands in B_" + delta_r.get_str() + "(" + z0.str() + ")");
  }
  return r;
}

/// 0 for equal exact values, else the relative numeric distance.
inline double value_distance(const ExpressionValue& a, const ExpressionValue& b) {
  if (a.exact && b.exact) return a.exact_value == b.exact_value ? 0.0 : std::max(1.0, exact_distance(a.exact_value, b.exact_value));
  return relative_error(a.numeric(), b.numeric());
}

/// Finite shadow of the Weiss cosheaf property for a cover of x; values off the
/// exact path are compared to relative 1e-9.
inline CheckReport weiss_cover_check(ExpressionEvaluator& ev, const OpenSet& x, const std::vector<OpenSet>& cover, const std::vector<Expression>& exprs,
                                     DegreeWindow win) {
  CheckReport r("weiss-cover", labels::kWeissCosheaf, ExpressionEvaluator::exact_path_all(exprs) ? 0.0 : 1e-9);
  auto& e = ev.functionals().mu().engine();
  bool weiss = true;
  std::size_t lifted = 0;
  for (const auto& expr : exprs) {
    Expression on_x = extend(expr, x);
    std::vector<std::size_t> holders;
    // two liftings are enough to compare
    for (std::size_t i = 0; i < cover.size() && holders.size() < 2; ++i)
      if (on_x.supported_in(cover[i]) && cover[i].subset_of(x)) holders.push_back(i);
    if (holders.empty()) {
      // the finite point set of some term lies in no single element
      weiss = false;
      r.fail("Weiss property fails: no cover element holds the support", expression_json(e, on_x));
      continue;
    }
    ExpressionValue target = ev.evaluate(on_x, win);
    std::optional<ExpressionValue> first;
    for (auto i : holders) {
      Expression lift(cover[i]);
      lift += on_x;
      lift.validate();
      Expression back = extend(lift, x);
      ExpressionValue val = ev.evaluate(back, win);
      double err = back == on_x ? value_distance(val, target) : 1.0;
      r.record(err, {{"cover_element", cover[i].str()}, {"expression", expression_json(e, on_x)}});
      if (first && value_distance(*first, val) > r.tol) r.fail("two liftings differ modulo relations");
      if (!first) first = val;
    }
    ++lifted;
  }
  r.truncation = {{"weiss", weiss}, {"lifted", lifted}, {"cover_size", cover.size()}};
  return r;
}

/// The degree-k weight projection of x matches p_k ev(x); the projections sum to
/// ev(x) over the window; projecting [delta_0 (x) l_k x] again is idempotent and
/// orthogonal.
inline CheckReport check_weight_projection(ExpressionEvaluator& ev, const Expression& x, const Rational& r_in, const Rational& R, DegreeWindow win,
                                           int N = 0, double tol = 1e-9, bool idempotence = true) {
  CheckReport r("weight-projection", labels::kWeightSplitting, tol);
  auto& e = ev.functionals().mu().engine();
  NumericProductVector exact = to_numeric(ev.evaluate_exact(x, win));
  double scale = std::max(1.0, exact.norm_inf());
  NumericProductVector sum(win);
  nlohmann::json input = expression_json(e, x);
  for (int k = std::max(win.lo, 0); k <= win.hi; ++k) {
    WeightProjection p = weight_project(ev, x, k, r_in, R, win, N);
    r.record(std::max(distance_inf(p.value, exact.component(k)), p.leakage) / scale, {{"k", k}, {"expression", input}});
    sum.set_component(k, p.value);
    if (!idempotence) continue;
    Expression again(OpenSet::disc(GaussianRational(0), r_in));
    for (const auto& [m, c] : p.value.terms()) again.add_key(TermKey{{Slot{delta(Scalar(0)), m}}}, Scalar(c));
    int other = k == win.hi ? win.lo : k + 1;
    WeightProjection twice = weight_project(ev, again, k, r_in, R, win, N);
    WeightProjection cross = weight_project(ev, again, other, r_in, R, win, N);
    r.record(std::max(distance_inf(twice.value, p.value), twice.leakage) / scale, {{"k", k}, {"idempotence", true}});
    if (other != k) r.record(cross.value.norm_inf() / scale, {{"k", k}, {"orthogonal_to", other}});
  }
  r.record(relative_error(exact, sum), {{"reconstruction", true}, {"expression", input}});
  r.truncation = {{"nodes", N > 0 ? N : 2 * win.hi + 16}, {"t", (1.0 + r_in.get_d() / R.get_d()) / 2.0}};
  return r;
}

/// ev(sigma_(lambda, w) x) = (lambda, w) . ev(x): dilation by lambda^{L_0}, translation by e^{wT}.
inline CheckReport check_evaluation_equivariance(ExpressionEvaluator& ev, const Expression& x, const GaussianRational& lambda,
                                                 const GaussianRational& w, DegreeWindow win) {
  CheckReport r("evaluation-equivariance", labels::kEquivariantEvaluation, 0.0);
  auto& e = ev.functionals().mu().engine();
  Rational modulus;
  OpenSet image = exact_sqrt(lambda.norm2(), modulus) ? x.carrier().affine_image(lambda, w) : OpenSet::plane();
  ProductVector lhs = ev.evaluate_exact(affine_act(Scalar(lambda), Scalar(w), x, &image), win);
  ProductVector base = grading_act(lambda, ev.evaluate_exact(x, DegreeWindow(0, win.hi)));
  ProductVector rhs(win);
  for (int k = std::max(win.lo, 0); k <= win.hi; ++k) {
    GradedVector comp;
    GaussianRational wj(1);
    for (int j = 0; j <= k; ++j) {
      comp.add_scaled(e.divided_translate(base.component(k - j), j), wj);
      wj = wj * w;
    }
    rhs.set_component(k, std::move(comp));
  }
  r.record(lhs == rhs ? 0.0 : exact_distance(lhs, rhs), {{"lambda", lambda.str()}, {"w", w.str()}, {"expression", expression_json(e, x)}});
  return r;
}

/// ev([delta_0 (x) a]) = a for every basis state of degree in the window.
inline CheckReport roundtrip_check(ExpressionEvaluator& ev, DegreeWindow win) {
  CheckReport r("roundtrip", labels::kRoundtrip, 0.0);
  auto& e = ev.functionals().mu().engine();
  OpenSet d = OpenSet::disc(GaussianRational(0), Rational(1));
  for (const auto& m : e.basis_up_to(std::max(win.lo, 0), win.hi)) {
    GradedVector a(m);
    ProductVector val = ev.evaluate_exact(delta_expression(d, {Scalar(0)}, {a}), win);
    r.record(val == ProductVector::from_vector(a, win) ? 0.0 : 1.0, {{"state", e.format(m)}});
  }
  return r;
}

/// Contour of sigma_q [delta_z (x) a ...] against p_k mu(a, z, ...).
inline CheckReport homomorphism_check(ExpressionEvaluator& ev, const std::vector<GradedVector>& states, const std::vector<GaussianRational>& z, int k,
                                      DegreeWindow win, double tol = 1e-9) {
  CheckReport r("homomorphism-square", labels::kHomomorphism, tol);
  auto& e = ev.functionals().mu().engine();
  Rational reach = 0;
  for (const auto& p : z) reach = std::max(reach, p.norm2());
  Rational r_in = 1;
  while (r_in * r_in <= reach) r_in *= 2;
  OpenSet d = OpenSet::disc(GaussianRational(0), r_in);
  std::vector<Scalar> pts(z.begin(), z.end());
  Expression x = delta_expression(d, pts, states);
  WeightProjection p = weight_project(ev, x, k, r_in, 2 * r_in, win);
  GradedVector expected = ev.functionals().mu().mu_exact(states, z, DegreeWindow(k, k)).component(k);
  double scale = std::max(1.0, to_numeric(expected).norm_inf());
  r.record(std::max(distance_inf(p.value, to_numeric(expected)), p.leakage) / scale,
           {{"states", states_json(e, states)}, {"points", points_json(z)}, {"k", k}});
  return r;
}

}  // namespace voxfact
