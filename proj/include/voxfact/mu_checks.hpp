#pragma once

// Axiom checks for the geometric vertex algebra maps mu.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "voxfact/check_report.hpp"
#include "voxfact/geometric_mu.hpp"

namespace voxfact {

namespace labels {
inline constexpr const char* kGeometricVertexAlgebra = "geometric-vertex-algebra";
inline constexpr const char* kMeromorphic = "bounded-below-meromorphic";
inline constexpr const char* kHolomorphicComponents = "holomorphic-components";
}  // namespace labels

inline std::string point_str(const Complex& z) { return std::to_string(z.real()) + (z.imag() < 0 ? "" : "+") + std::to_string(z.imag()) + "i"; }

inline nlohmann::json states_json(VertexEngine& e, const std::vector<GradedVector>& s) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& v : s) j.push_back(e.format(v));
  return j;
}

inline nlohmann::json points_json(const std::vector<GaussianRational>& z) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& p : z) j.push_back(p.str());
  return j;
}

inline nlohmann::json points_json(const std::vector<Complex>& z) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& p : z) j.push_back(point_str(p));
  return j;
}

/// Sup-norm distance between exact product vectors, as a double.
inline double exact_distance(const ProductVector& a, const ProductVector& b) { return (to_numeric(a) - to_numeric(b)).norm_inf(); }

/// mu(a, 0) = a for every basis state of degree in the window.
inline CheckReport check_insertion_at_zero(GeometricMu& mu, DegreeWindow w) {
  CheckReport r("insertion-at-zero", labels::kGeometricVertexAlgebra, 0.0);
  auto& e = mu.engine();
  for (const auto& m : e.basis_up_to(std::max(w.lo, 0), w.hi)) {
    GradedVector a(m);
    ProductVector got = mu.mu_exact({a}, {GaussianRational(0)}, w);
    r.record(exact_distance(got, ProductVector::from_vector(a, w)), {{"state", e.format(m)}});
  }
  if (w.hi < 1) r.note("window holds the vacuum only");
  return r;
}

/// Numeric mu at the default cap, retried once at twice the cap; the retry is noted in r.
inline NumericProductVector mu_numeric_escalated(GeometricMu& mu, const std::vector<NumericVector>& states, const std::vector<Complex>& z,
                                                 DegreeWindow w, MuOptions opt, CheckReport& r, bool recenter = true) {
  auto run = [&](const MuOptions& o) { return recenter ? mu.mu_numeric_auto(states, z, w, o).value : mu.mu_numeric(states, z, w, o).value; };
  try {
    return run(opt);
  } catch (const NonConvergent&) {
    MuOptions wide = opt;
    wide.d_max = 2 * (opt.d_max > 0 ? opt.d_max : 4 * (std::max(w.hi, 0) + 1) + 16);
    r.truncation["d_max_retry"] = wide.d_max;
    return run(wide);
  }
}

inline std::vector<NumericVector> numeric_states(const std::vector<GradedVector>& s) {
  std::vector<NumericVector> out;
  for (const auto& v : s) out.push_back(to_numeric(v));
  return out;
}

/// mu(q.a_1, q z_1, ...) = q.mu(a_1, z_1, ...): exact for exact data of arity <= 2, numeric otherwise.
inline CheckReport check_equivariance(GeometricMu& mu, const Scalar& q, const std::vector<GradedVector>& states, const std::vector<Scalar>& z,
                                      DegreeWindow w, double tol = 1e-8, MuOptions opt = {}) {
  CheckReport r("equivariance", labels::kGeometricVertexAlgebra, 0.0);
  if (q.is_zero()) throw std::invalid_argument("equivariance needs q != 0");
  auto& e = mu.engine();
  PointConfiguration cfg(z);
  bool exact = q.is_exact() && cfg.exact() && states.size() <= 2;
  std::vector<GradedVector> qs;
  for (const auto& s : states) qs.push_back(exact ? grading_act(q, s) : s);
  nlohmann::json input{{"q", q.str()}, {"states", states_json(e, states)}};
  if (exact) {
    std::vector<GaussianRational> pz, qz;
    for (const auto& p : z) {
      pz.push_back(p.exact());
      qz.push_back(q.exact() * p.exact());
    }
    ProductVector lhs = mu.mu_exact(qs, qz, w);
    ProductVector rhs = grading_act(q.exact(), mu.mu_exact(states, pz, w));
    input["points"] = points_json(pz);
    r.record(lhs == rhs ? 0.0 : exact_distance(lhs, rhs), input);
    return r;
  }
  r.tol = tol;
  std::vector<NumericVector> ns, nqs;
  std::vector<Complex> pz = cfg.numeric(), qz;
  for (const auto& s : states) {
    ns.push_back(to_numeric(s));
    nqs.push_back(grading_act(q.approx(), to_numeric(s)));
  }
  for (const auto& p : pz) qz.push_back(q.approx() * p);
  NumericProductVector lhs = mu_numeric_escalated(mu, nqs, qz, w, opt, r);
  NumericProductVector rhs = grading_act(q.approx(), mu_numeric_escalated(mu, ns, pz, w, opt, r));
  input["points"] = points_json(pz);
  r.record(relative_error(rhs, lhs), input);
  return r;
}

/// Numeric mu is independent of the order in which (state, point) pairs are listed.
inline CheckReport check_permutation_invariance(GeometricMu& mu, const std::vector<GradedVector>& states, const std::vector<Complex>& z,
                                                const std::vector<std::size_t>& perm, DegreeWindow w, double tol = 1e-9) {
  CheckReport r("permutation-invariance", labels::kGeometricVertexAlgebra, tol);
  std::vector<GradedVector> ps;
  std::vector<Complex> pz;
  for (auto i : perm) {
    ps.push_back(states.at(i));
    pz.push_back(z.at(i));
  }
  auto a = mu_numeric_escalated(mu, numeric_states(states), z, w, {}, r, false);
  auto b = mu_numeric_escalated(mu, numeric_states(ps), pz, w, {}, r, false);
  r.record(relative_error(a, b), {{"states", states_json(mu.engine(), states)}, {"points", points_json(z)}});
  return r;
}

/// Exact skew-symmetry transport: mu(a, z, b, 0) = e^{zT} mu(b, -z, a, 0).
inline CheckReport check_skew_symmetry(GeometricMu& mu, const GradedVector& a, const GradedVector& b, const GaussianRational& z,
                                       DegreeWindow w) {
  CheckReport r("permutation-invariance", labels::kGeometricVertexAlgebra, 0.0);
  auto& e = mu.engine();
  DegreeWindow full(0, w.hi);
  ProductVector lhs = mu.mu_exact({a, b}, {z, GaussianRational(0)}, w);
  ProductVector swapped = mu.mu_exact({b, a}, {-z, GaussianRational(0)}, full);
  ProductVector rhs(w);
  for (int k = std::max(w.lo, 0); k <= w.hi; ++k) {
    GradedVector comp;
    GaussianRational zj(1);
    for (int j = 0; j <= k; ++j) {
      comp.add_scaled(e.divided_translate(swapped.component(k - j), j), zj);
      zj = zj * z;
    }
    rhs.set_component(k, std::move(comp));
  }
  r.record(lhs == rhs ? 0.0 : exact_distance(lhs, rhs), {{"a", e.format(a)}, {"b", e.format(b)}, {"z", z.str()}});
  return r;
}

/// mu(b_1, w_1 + t, ...) = e^{tT} mu(b_1, w_1, ...): associativity with no outer insertions.
inline CheckReport check_translation(GeometricMu& mu, const std::vector<GradedVector>& states, const std::vector<Complex>& z, Complex t,
                                     DegreeWindow w, double tol = 1e-9) {
  CheckReport r("translation", labels::kGeometricVertexAlgebra, tol);
  std::vector<NumericVector> ns;
  for (const auto& s : states) ns.push_back(to_numeric(s));
  std::vector<Complex> moved;
  for (const auto& p : z) moved.push_back(p + t);
  auto lhs = mu_numeric_escalated(mu, ns, moved, w, {}, r);
  auto base = mu_numeric_escalated(mu, ns, z, DegreeWindow(0, w.hi), {}, r);
  NumericProductVector rhs(w);
  for (int k = std::max(w.lo, 0); k <= w.hi; ++k) {
    NumericVector comp;
    Complex tj(1.0, 0.0);
    for (int j = 0; j <= k; ++j) {
      comp.add_scaled(mu.divided_translate_numeric(base.component(k - j), j), tj);
      tj *= t;
    }
    rhs.set_component(k, std::move(comp));
  }
  r.record(relative_error(lhs, rhs), {{"states", states_json(mu.engine(), states)}, {"points", points_json(z)}, {"t", point_str(t)}});
  return r;
}

struct AssociativityInput {
  std::vector<GradedVector> a;       // outer states
  std::vector<GaussianRational> z;   // their points
  GaussianRational center;           // z_{m+1}
  std::vector<GradedVector> b;       // inner states
  std::vector<GaussianRational> w;   // their points relative to the center
};

/// mu(a, z, b, w + z_{m+1}) against sum_k mu(a, z, p_k mu(b, w), z_{m+1}),
/// summing k until the geometric tail bound drops below tol.
inline CheckReport check_associativity(GeometricMu& mu, const AssociativityInput& in, DegreeWindow win, double tol = 1e-8,
                                       int max_terms = 400) {
  CheckReport r("associativity", labels::kGeometricVertexAlgebra, tol);
  auto& e = mu.engine();
  if (in.a.size() != in.z.size() || in.b.size() != in.w.size()) throw std::invalid_argument("states and points differ in length");
  if (in.b.size() > 2) throw std::invalid_argument("associativity check supports at most two inner states");
  Rational wmax2 = 0, zmin2 = -1;
  for (const auto& p : in.w) wmax2 = std::max(wmax2, p.norm2());
  for (const auto& p : in.z) {
    Rational d = dist2(p, in.center);
    if (sgn(zmin2) < 0 || d < zmin2) zmin2 = d;
  }
  if (sgn(zmin2) >= 0 && !(wmax2 < zmin2)) throw DomainViolation("max |w_j| must be below min |z_i - z_{m+1}|");
  double rho = sgn(zmin2) < 0 ? 0.0 : std::sqrt(wmax2.get_d() / zmin2.get_d());

  std::vector<GradedVector> all = in.a;
  all.insert(all.end(), in.b.begin(), in.b.end());
  std::vector<GaussianRational> pts = in.z;
  for (const auto& p : in.w) pts.push_back(p + in.center);
  NumericProductVector lhs;
  if (all.size() <= 2) {
    lhs = to_numeric(mu.mu_exact(all, pts, win));
  } else {
    std::vector<NumericVector> ns;
    std::vector<Complex> nz;
    for (const auto& s : all) ns.push_back(to_numeric(s));
    for (const auto& p : pts) nz.push_back(p.to_complex());
    MuOptions opt;
    opt.tol = std::min(1e-10, tol / 100);
    lhs = mu_numeric_escalated(mu, ns, nz, win, opt, r);
  }

  nlohmann::json input{{"a", states_json(e, in.a)}, {"z", points_json(in.z)}, {"center", in.center.str()}, {"b", states_json(e, in.b)},
                       {"w", points_json(in.w)}};
  NumericProductVector sum(win);
  double last_term = 0.0, err = 0.0, bound = 0.0;
  int k = 0, last_k = 0;
  for (; k < max_terms; ++k) {
    // p_k mu(b, w)
    GradedVector inner = mu.mu_exact(in.b, in.w, DegreeWindow(k, k)).component(k);
    NumericProductVector term(win);
    if (!inner.is_zero()) {
      std::vector<GradedVector> outer = in.a;
      outer.push_back(inner);
      std::vector<GaussianRational> oz = in.z;
      oz.push_back(in.center);
      if (outer.size() <= 2) {
        term = to_numeric(mu.mu_exact(outer, oz, win));
      } else {
        std::vector<Complex> nz;
        for (const auto& p : oz) nz.push_back(p.to_complex());
        MuOptions opt;
        opt.tol = std::min(1e-10, tol / 100);
        term = mu_numeric_escalated(mu, numeric_states(outer), nz, win, opt, r, false);
      }
    }
    sum += term;
    double tn = term.norm_inf();
    err = relative_error(lhs, sum);
    if (tn > 0.0) {
      last_term = tn;
      last_k = k;
      r.curve.push_back({k + 1, err});
    }
    // geometric tail from the last nonzero term
    bound = rho < 1.0 ? last_term * std::pow(rho, k - last_k + 1) / (1.0 - rho) / std::max(1.0, lhs.norm_inf()) : INFINITY;
    if (k >= win.hi && bound < tol / 10 && err <= tol) break;
  }
  r.record(err, input);
  r.truncation = {{"terms", k + 1}, {"tail_bound", bound}, {"rho", rho}, {"max_terms", max_terms}};
  if (k == max_terms) r.note("term cap reached before the tail bound fell below tol");
  return r;
}

/// Fitted per-term ratio of a convergence curve, over the points above floor.
inline double curve_ratio(const std::vector<std::pair<int, double>>& curve, double floor) {
  std::vector<std::pair<int, double>> pts;
  for (const auto& p : curve)
    if (p.second > floor) pts.push_back(p);
  if (pts.size() < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    double ly = std::log(y);
    sx += x;
    sy += ly;
    sxx += double(x) * x;
    sxy += x * ly;
  }
  double n = static_cast<double>(pts.size());
  return std::exp((n * sxy - sx * sy) / (n * sxx - sx * sx));
}

inline bool curve_decreasing(const std::vector<std::pair<int, double>>& curve, double floor) {
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (curve[i - 1].second > floor && !(curve[i].second < curve[i - 1].second)) return false;
  return true;
}

/// pole_bound(a, b) <= deg a + deg b + 1 over all basis pairs with degrees in the
/// window; for pairs of total degree <= monomial_total, every singular component
/// p_k mu(a, z, b, 0) is also checked to be a single Laurent monomial.
inline CheckReport check_meromorphicity(GeometricMu& mu, DegreeWindow w, int monomial_total = 6) {
  CheckReport r("meromorphicity", labels::kMeromorphic, 0.0);
  auto& e = mu.engine();
  auto basis = e.basis_up_to(std::max(w.lo, 0), w.hi);
  int worst = 0;
  std::size_t monomial_pairs = 0;
  for (const auto& ma : basis)
    for (const auto& mb : basis) {
      GradedVector a(ma), b(mb);
      int total = ma.degree() + mb.degree();
      int bound = e.pole_bound(a, b);
      worst = std::max(worst, bound);
      nlohmann::json input{{"a", e.format(ma)}, {"b", e.format(mb)}, {"pole_bound", bound}};
      if (bound > total + 1) {
        r.fail("pole bound above deg a + deg b + 1", input);
        continue;
      }
      bool monomial = true;
      if (total <= monomial_total) {
        ++monomial_pairs;
        for (int k = std::max(0, total - bound); k < total && monomial; ++k) {
          int at_zero = 0;
          for (const auto& t : mu.correlator_terms({a, b}, k))
            if (t.powers[1] == 0) ++at_zero;
          monomial = at_zero <= 1;
        }
      }
      if (!monomial) r.fail("component is not a single Laurent monomial", input);
      else r.record(0.0, input);
    }
  r.truncation = {{"max_pole_bound", worst}, {"monomial_total", monomial_total}, {"monomial_pairs", monomial_pairs}};
  return r;
}

/// Samples p_k mu(a, z, b, 0) numerically on |z| = radius and checks that the
/// discrete Fourier spectrum sits in the band of exponents the pole bound allows.
inline CheckReport check_holomorphy_fft(GeometricMu& mu, const GradedVector& a, const GradedVector& b, int k, double radius, int N = 64,
                                        double tol = 1e-9) {
  CheckReport r("holomorphy-proxy", labels::kHolomorphicComponents, tol);
  auto& e = mu.engine();
  int lo = -(a.degree() + b.degree() + 1), hi = k;
  if (hi - lo + 1 > N) throw std::invalid_argument("FFT size below the Laurent band width");
  std::vector<NumericVector> samples;
  for (int j = 0; j < N; ++j) {
    Complex z = std::polar(radius, 2.0 * std::numbers::pi * j / N);
    samples.push_back(mu.mu_numeric({a, b}, {z, Complex(0.0, 0.0)}, DegreeWindow(k, k)).value.component(k));
  }
  double inband = 0.0, outband = 0.0;
  for (int s = -N / 2; s < N / 2; ++s) {
    NumericVector c;
    for (int j = 0; j < N; ++j) c.add_scaled(samples[static_cast<std::size_t>(j)], std::polar(1.0, -2.0 * std::numbers::pi * j * s / N) / double(N));
    double norm = c.norm_inf() / std::pow(radius, s);
    if (s >= lo && s <= hi) inband = std::max(inband, norm);
    else outband = std::max(outband, norm);
  }
  r.record(outband / std::max(1.0, inband), {{"a", e.format(a)}, {"b", e.format(b)}, {"k", k}, {"radius", radius}, {"N", N}});
  r.truncation = {{"band", {lo, hi}}};
  return r;
}

}  // namespace voxfact
