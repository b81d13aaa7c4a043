#pragma once

// Finite-rank analytic functionals: linear combinations of products of
// delta-jets and circle moments, one factor per coordinate.
//
//   DeltaJet{p, d}        f |-> f^(d)(p) / d!
//   CircleMoment{c, r, n} f |-> (1/2 pi i) \oint_{|z-c|=r} (z-c)^n f(z) dz

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

#include "voxfact/geometric_mu.hpp"
#include "voxfact/geometry.hpp"
#include "voxfact/graded.hpp"

namespace voxfact {

class ExpansionDomainMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergentQuadrature : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DeltaJet {
  Scalar p;
  int d = 0;
};

struct CircleMoment {
  Scalar c;
  Scalar r;  // real and positive
  int n = 0;
};

using AtomFactor = std::variant<DeltaJet, CircleMoment>;

inline int compare(const AtomFactor& a, const AtomFactor& b) {
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  if (const auto* x = std::get_if<DeltaJet>(&a)) {
    const auto& y = std::get<DeltaJet>(b);
    if (int c = compare(x->p, y.p)) return c;
    return (x->d > y.d) - (x->d < y.d);
  }
  const auto& x = std::get<CircleMoment>(a);
  const auto& y = std::get<CircleMoment>(b);
  if (int c = compare(x.c, y.c)) return c;
  if (int c = compare(x.r, y.r)) return c;
  return (x.n > y.n) - (x.n < y.n);
}

/// One product of per-coordinate atoms.
struct AtomicFunctional {
  std::vector<AtomFactor> factors;

  std::size_t arity() const { return factors.size(); }

  friend int compare(const AtomicFunctional& a, const AtomicFunctional& b) {
    if (a.factors.size() != b.factors.size()) return a.factors.size() < b.factors.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.factors.size(); ++i)
      if (int c = compare(a.factors[i], b.factors[i])) return c;
    return 0;
  }
  friend bool operator<(const AtomicFunctional& a, const AtomicFunctional& b) { return compare(a, b) < 0; }
  friend bool operator==(const AtomicFunctional& a, const AtomicFunctional& b) { return compare(a, b) == 0; }
};

inline AtomFactor delta(Scalar p, int d = 0) { return DeltaJet{std::move(p), d}; }
inline AtomFactor moment(Scalar c, Scalar r, int n) {
  if (r.is_exact() ? !(r.exact().is_real() && sgn(r.exact().re()) > 0) : !(r.approx().real() > 0.0))
    throw std::invalid_argument("moment radius must be real and positive");
  return CircleMoment{std::move(c), std::move(r), n};
}

/// Finite linear combination of atoms of one arity, stored canonically.
class Functional {
 public:
  explicit Functional(std::size_t arity = 0) : arity_(arity) {}

  static Functional unit() {
    Functional f(0);
    f.add(AtomicFunctional{}, Scalar(1));
    return f;
  }

  static Functional atom(std::vector<AtomFactor> factors, Scalar coeff = Scalar(1)) {
    Functional f(factors.size());
    f.add(AtomicFunctional{std::move(factors)}, std::move(coeff));
    return f;
  }

  std::size_t arity() const { return arity_; }
  const std::map<AtomicFunctional, Scalar>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(const AtomicFunctional& a, const Scalar& c) {
    if (a.arity() != arity_) throw std::invalid_argument("atom arity differs from functional arity");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(a, c);
    if (!inserted) {
      it->second = it->second + c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Functional& operator+=(const Functional& o) {
    if (o.arity_ != arity_ && !o.is_zero()) throw std::invalid_argument("adding functionals of different arity");
    for (const auto& [a, c] : o.terms_) add(a, c);
    return *this;
  }
  Functional& operator*=(const Scalar& s) {
    if (s.is_zero()) terms_.clear();
    for (auto& [a, c] : terms_) c = c * s;
    return *this;
  }
  friend Functional operator+(Functional a, const Functional& b) { return a += b; }
  friend Functional operator*(Functional a, const Scalar& s) { return a *= s; }
  friend bool operator==(const Functional& a, const Functional& b) { return a.arity_ == b.arity_ && a.terms_ == b.terms_; }

 private:
  std::size_t arity_;
  std::map<AtomicFunctional, Scalar> terms_;
};

/// alpha x beta: f |-> alpha(z |-> beta(w |-> f(z, w))).
inline Functional external_product(const Functional& a, const Functional& b) {
  Functional out(a.arity() + b.arity());
  for (const auto& [x, cx] : a.terms())
    for (const auto& [y, cy] : b.terms()) {
      AtomicFunctional z = x;
      z.factors.insert(z.factors.end(), y.factors.begin(), y.factors.end());
      out.add(z, cx * cy);
    }
  return out;
}

/// Pushforward along x |-> lambda x + w applied to every coordinate; g_* alpha (f) = alpha(f o g).
inline Functional pushforward_affine(const Scalar& lambda, const Scalar& w, const Functional& a) {
  if (lambda.is_zero()) throw std::domain_error("affine map needs lambda != 0");
  Scalar abs_lambda = modulus(lambda);
  Functional out(a.arity());
  for (const auto& [atom, c] : a.terms()) {
    AtomicFunctional moved;
    Scalar scale = c;
    for (const auto& f : atom.factors) {
      if (const auto* j = std::get_if<DeltaJet>(&f)) {
        moved.factors.push_back(DeltaJet{lambda * j->p + w, j->d});
        scale = scale * pow(lambda, j->d);
      } else {
        const auto& m = std::get<CircleMoment>(f);
        moved.factors.push_back(CircleMoment{lambda * m.c + w, abs_lambda * m.r, m.n});
        scale = scale * pow(lambda, -m.n - 1);
      }
    }
    out.add(moved, scale);
  }
  return out;
}

/// Pushforward along the coordinate permutation (z_1..z_m) |-> (z_perm[0]..z_perm[m-1]).
/// Factor i of the result is factor perm^{-1}(i) of the input.
inline Functional permute(const Functional& a, const std::vector<std::size_t>& perm) {
  if (perm.size() != a.arity()) throw std::invalid_argument("permutation length differs from arity");
  Functional out(a.arity());
  for (const auto& [atom, c] : a.terms()) {
    AtomicFunctional moved;
    moved.factors.resize(atom.arity());
    for (std::size_t i = 0; i < perm.size(); ++i) moved.factors[i] = atom.factors[perm[i]];
    out.add(moved, c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Residue calculus on products of linear factors.

/// A factor (z_var - anchor)^exp; the anchor is another variable or a constant.
template <class K>
struct LinFactor {
  int var = 0;
  int other = -1;  // variable index, or -1 for the constant point
  K point{};
  int exp = 0;
};

template <class K>
struct PoleTerm {
  K coeff{1};
  std::vector<LinFactor<K>> factors;
};

namespace detail {

inline int compare_k(const GaussianRational& a, const GaussianRational& b) { return compare(a, b); }
inline int compare_k(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real() ? -1 : 1;
  if (a.imag() != b.imag()) return a.imag() < b.imag() ? -1 : 1;
  return 0;
}

template <class K>
int compare_factor_key(const LinFactor<K>& a, const LinFactor<K>& b) {
  if (a.var != b.var) return a.var < b.var ? -1 : 1;
  if (a.other != b.other) return a.other < b.other ? -1 : 1;
  if (a.other >= 0) return 0;
  return compare_k(a.point, b.point);
}

/// Orients variable pairs as (z_hi - z_lo), sorts and merges factors.
template <class K>
void canonicalize(PoleTerm<K>& t) {
  for (auto& f : t.factors)
    if (f.other > f.var) {
      std::swap(f.other, f.var);
      if (f.exp % 2 != 0) t.coeff = -t.coeff;
    }
  std::sort(t.factors.begin(), t.factors.end(), [](const auto& a, const auto& b) { return compare_factor_key(a, b) < 0; });
  std::vector<LinFactor<K>> merged;
  for (const auto& f : t.factors) {
    if (!merged.empty() && compare_factor_key(merged.back(), f) == 0) merged.back().exp += f.exp;
    else merged.push_back(f);
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(), [](const auto& f) { return f.exp == 0; }), merged.end());
  t.factors = std::move(merged);
}

template <class K>
std::vector<PoleTerm<K>> merge_terms(std::vector<PoleTerm<K>> terms) {
  for (auto& t : terms) canonicalize(t);
  auto less = [](const PoleTerm<K>& a, const PoleTerm<K>& b) {
    if (a.factors.size() != b.factors.size()) return a.factors.size() < b.factors.size();
    for (std::size_t i = 0; i < a.factors.size(); ++i) {
      int c = compare_factor_key(a.factors[i], b.factors[i]);
      if (c) return c < 0;
      if (a.factors[i].exp != b.factors[i].exp) return a.factors[i].exp < b.factors[i].exp;
    }
    return false;
  };
  std::sort(terms.begin(), terms.end(), less);
  std::vector<PoleTerm<K>> out;
  for (auto& t : terms) {
    if (!out.empty() && !less(out.back(), t) && !less(t, out.back())) out.back().coeff += t.coeff;
    else out.push_back(std::move(t));
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const auto& t) { return FieldTraits<K>::is_zero(t.coeff); }), out.end());
  return out;
}

/// Anchor seen from the eliminated variable: (z_x - anchor)^exp.
template <class K>
struct XFactor {
  int other;  // -1 constant
  K point;
  int exp;
};

template <class K>
bool same_anchor(const XFactor<K>& a, int other, const K& point) {
  return a.other == other && (other >= 0 || compare_k(a.point, point) == 0);
}

/// Splits the factors of t into those involving variable x (rewritten as
/// (z_x - anchor)^e) and the rest; anchors are merged.
template <class K>
std::vector<XFactor<K>> split(const PoleTerm<K>& t, int x, PoleTerm<K>& rest) {
  std::vector<XFactor<K>> xf;
  rest.coeff = t.coeff;
  rest.factors.clear();
  for (const auto& f : t.factors) {
    XFactor<K> g{-1, K{}, f.exp};
    if (f.var == x) {
      g.other = f.other;
      g.point = f.point;
    } else if (f.other == x) {
      g.other = f.var;
      if (f.exp % 2 != 0) rest.coeff = -rest.coeff;
    } else {
      rest.factors.push_back(f);
      continue;
    }
    auto it = std::find_if(xf.begin(), xf.end(), [&](const auto& h) { return same_anchor(h, g.other, g.point); });
    if (it == xf.end()) xf.push_back(g);
    else it->exp += g.exp;
  }
  return xf;
}

/// Coefficient of t^order in rest * prod_f (P + t - A_f)^{e_f}, where P is the
/// expansion point (variable p_var, or constant p when p_var < 0) and no
/// anchor equals P.
template <class K>
std::vector<PoleTerm<K>> taylor_coefficient(const PoleTerm<K>& rest, const std::vector<XFactor<K>>& xf, int p_var, const K& p,
                                            int order) {
  using T = FieldTraits<K>;
  if (order < 0) return {};
  std::vector<std::vector<PoleTerm<K>>> series(static_cast<std::size_t>(order + 1));
  series[0].push_back(rest);
  for (const auto& f : xf) {
    std::vector<std::vector<PoleTerm<K>>> next(series.size());
    for (int o = 0; o <= order; ++o)
      for (const auto& term : series[static_cast<std::size_t>(o)])
        for (int j = 0; o + j <= order; ++j) {
          K binom = T::from_rational(binomial(f.exp, j));
          if (T::is_zero(binom)) continue;
          PoleTerm<K> nt = term;
          nt.coeff *= binom;
          int e = f.exp - j;
          if (p_var < 0 && f.other < 0) {
            nt.coeff *= T::power(p - f.point, e);
          } else if (p_var < 0) {
            // (p - z_y)^e = (-1)^e (z_y - p)^e
            if (e % 2 != 0) nt.coeff = -nt.coeff;
            nt.factors.push_back(LinFactor<K>{f.other, -1, p, e});
          } else {
            nt.factors.push_back(LinFactor<K>{p_var, f.other, f.point, e});
          }
          next[static_cast<std::size_t>(o + j)].push_back(std::move(nt));
        }
    for (auto& level : next) level = merge_terms(std::move(level));
    series = std::move(next);
  }
  return series[static_cast<std::size_t>(order)];
}

/// -1 inside, 0 on the circle, +1 outside.
inline int point_vs_circle(const GaussianRational& p, const GaussianRational& c, const GaussianRational& r) {
  Rational d2 = dist2(p, c), r2 = r.re() * r.re();
  return d2 < r2 ? -1 : (d2 == r2 ? 0 : 1);
}
inline int point_vs_circle(const Complex& p, const Complex& c, const Complex& r) {
  double d = std::abs(p - c), rr = r.real();
  if (std::abs(d - rr) <= 1e-12 * std::max(1.0, rr)) return 0;
  return d < rr ? -1 : 1;
}

/// Whether circle y sits inside the disc of circle x (-1), outside it (+1), or meets it (0).
inline int circle_vs_circle(const GaussianRational& cy, const GaussianRational& ry, const GaussianRational& cx, const GaussianRational& rx) {
  Circle y{cy, ry.re()}, x{cx, rx.re()};
  if (closed_disc_inside(y, x)) return -1;
  if (closed_discs_disjoint(y, x) || closed_disc_inside(x, y)) return 1;
  return 0;
}
inline int circle_vs_circle(const Complex& cy, const Complex& ry, const Complex& cx, const Complex& rx) {
  double d = std::abs(cy - cx), a = ry.real(), b = rx.real(), eps = 1e-12 * std::max({1.0, a, b});
  if (d + a < b - eps) return -1;
  if (d > a + b + eps || d + b < a - eps) return 1;
  return 0;
}

}  // namespace detail

/// Exact (K = GaussianRational) or floating (K = Complex) evaluation of an
/// atomic functional against a product of linear factors in m variables.
template <class K>
class PoleCalculus {
 public:
  using T = FieldTraits<K>;

  explicit PoleCalculus(const AtomicFunctional& atom) : atom_(atom) {
    for (const auto& f : atom.factors) {
      if (const auto* j = std::get_if<DeltaJet>(&f)) {
        points_.push_back(T::from(j->p));
        radii_.push_back(K{});
      } else {
        const auto& m = std::get<CircleMoment>(f);
        points_.push_back(T::from(m.c));
        radii_.push_back(T::from(m.r));
      }
    }
  }

  K apply(std::vector<PoleTerm<K>> terms) const {
    terms = detail::merge_terms(std::move(terms));
    const int m = static_cast<int>(atom_.arity());
    for (int x = 0; x < m; ++x)
      if (const auto* j = std::get_if<DeltaJet>(&atom_.factors[static_cast<std::size_t>(x)])) terms = eliminate_jet(terms, x, j->d);
    for (int x = m; x-- > 0;)
      if (const auto* mo = std::get_if<CircleMoment>(&atom_.factors[static_cast<std::size_t>(x)])) terms = eliminate_moment(terms, x, mo->n);
    K total{};
    for (const auto& t : terms) {
      if (!t.factors.empty()) throw std::logic_error("residue calculus left free variables");
      total += t.coeff;
    }
    return total;
  }

 private:
  std::vector<PoleTerm<K>> eliminate_jet(const std::vector<PoleTerm<K>>& terms, int x, int d) const {
    const K& p = points_[static_cast<std::size_t>(x)];
    std::vector<PoleTerm<K>> out;
    for (const auto& t : terms) {
      PoleTerm<K> rest;
      auto xf = detail::split(t, x, rest);
      int e_at_p = 0;
      std::vector<detail::XFactor<K>> others;
      for (const auto& f : xf) {
        if (f.other < 0 && detail::compare_k(f.point, p) == 0) e_at_p += f.exp;
        else others.push_back(f);
      }
      if (e_at_p < 0) throw DomainViolation("delta-jet placed on a pole of the integrand");
      auto part = detail::taylor_coefficient(rest, others, -1, p, d - e_at_p);
      out.insert(out.end(), part.begin(), part.end());
    }
    return detail::merge_terms(std::move(out));
  }

  std::vector<PoleTerm<K>> eliminate_moment(const std::vector<PoleTerm<K>>& terms, int x, int n) const {
    const K& c = points_[static_cast<std::size_t>(x)];
    const K& r = radii_[static_cast<std::size_t>(x)];
    std::vector<PoleTerm<K>> out;
    for (const auto& t : terms) {
      PoleTerm<K> rest;
      auto xf = detail::split(t, x, rest);
      auto it = std::find_if(xf.begin(), xf.end(), [&](const auto& h) { return detail::same_anchor(h, -1, c); });
      if (it == xf.end()) xf.push_back({-1, c, n});
      else it->exp += n;
      for (std::size_t i = 0; i < xf.size(); ++i) {
        const auto& pole = xf[i];
        if (pole.exp >= 0) continue;
        int where;
        if (pole.other < 0) {
          where = detail::point_vs_circle(pole.point, c, r);
        } else {
          const auto& f = atom_.factors[static_cast<std::size_t>(pole.other)];
          if (!std::holds_alternative<CircleMoment>(f)) throw std::logic_error("jet variable survived elimination");
          where = detail::circle_vs_circle(points_[static_cast<std::size_t>(pole.other)], radii_[static_cast<std::size_t>(pole.other)], c, r);
        }
        if (where == 0) throw DomainViolation("integration circle passes through a pole");
        if (where > 0) continue;
        std::vector<detail::XFactor<K>> others;
        for (std::size_t j = 0; j < xf.size(); ++j)
          if (j != i) others.push_back(xf[j]);
        auto part = detail::taylor_coefficient(rest, others, pole.other, pole.point, -pole.exp - 1);
        out.insert(out.end(), part.begin(), part.end());
      }
    }
    return detail::merge_terms(std::move(out));
  }

  const AtomicFunctional& atom_;
  std::vector<K> points_;
  std::vector<K> radii_;
};

template <class K>
PoleTerm<K> correlator_shape(const CorrelatorTerm& t) {
  PoleTerm<K> p;
  for (std::size_t i = 0; i < t.powers.size(); ++i)
    if (t.powers[i] != 0) p.factors.push_back(LinFactor<K>{static_cast<int>(i), -1, K{}, t.powers[i]});
  if (t.cross != 0) p.factors.push_back(LinFactor<K>{0, 1, K{}, t.cross});
  return p;
}

inline bool exact_atom(const AtomicFunctional& a) {
  for (const auto& f : a.factors) {
    if (const auto* j = std::get_if<DeltaJet>(&f)) {
      if (!j->p.is_exact()) return false;
    } else {
      const auto& m = std::get<CircleMoment>(f);
      if (!m.c.is_exact() || !m.r.is_exact()) return false;
    }
  }
  return true;
}

inline bool exact_functional(const Functional& f) {
  for (const auto& [a, c] : f.terms())
    if (!c.is_exact() || !exact_atom(a)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Quadrature.

/// Trapezoid rule for (1/2 pi i) \oint_{|z-c|=r} (z-c)^n f(z) dz on N nodes.
inline Complex quadrature_moment(const std::function<Complex(Complex)>& f, Complex c, double r, int n, int N) {
  if (N <= 0) throw std::invalid_argument("quadrature needs N > 0");
  Complex sum(0.0, 0.0);
  for (int j = 0; j < N; ++j) {
    Complex u = std::polar(r, 2.0 * std::numbers::pi * j / N);
    sum += ipow(u, n + 1) * f(c + u);
  }
  return sum / static_cast<double>(N);
}

/// Vector-valued version; f returns one NumericProductVector per node.
inline NumericProductVector quadrature_moment_vector(const std::function<NumericProductVector(Complex)>& f, Complex c, double r, int n,
                                                     int N) {
  NumericProductVector sum;
  bool first = true;
  for (int j = 0; j < N; ++j) {
    Complex u = std::polar(r, 2.0 * std::numbers::pi * j / N);
    NumericProductVector v = f(c + u);
    v *= ipow(u, n + 1) / static_cast<double>(N);
    if (first) sum = std::move(v);
    else sum += v;
    first = false;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Laurent data on an annulus.

/// sum_j coeff[j] (z - center)^j, valid on inner < |z - center| < outer (outer < 0 means infinity).
struct LaurentSeries {
  GaussianRational center;
  Rational inner = 0;
  Rational outer = -1;
  std::map<int, GradedVector> coeff;

  bool circle_inside_domain(const GaussianRational& c, const Rational& r) const {
    Rational d2 = dist2(c, center);
    bool within_outer = sgn(outer) < 0 || (sgn(outer - r) > 0 && d2 < (outer - r) * (outer - r));
    bool off_hole = (d2 > (inner + r) * (inner + r)) || (sgn(r - inner) > 0 && d2 < (r - inner) * (r - inner));
    return within_outer && off_hole;
  }
  bool point_inside_domain(const GaussianRational& p) const {
    Rational d2 = dist2(p, center);
    return d2 > inner * inner && (sgn(outer) < 0 || d2 < outer * outer);
  }
};

/// Arity-one functional against Laurent data; exact.
inline GradedVector evaluate_laurent(const Functional& alpha, const LaurentSeries& f) {
  if (alpha.arity() != 1) throw std::invalid_argument("Laurent evaluation needs an arity-one functional");
  GradedVector out;
  for (const auto& [atom, c] : alpha.terms()) {
    if (!c.is_exact() || !exact_atom(atom)) throw std::invalid_argument("Laurent evaluation needs exact functionals");
    const auto& factor = atom.factors[0];
    if (const auto* j = std::get_if<DeltaJet>(&factor)) {
      if (!f.point_inside_domain(j->p.exact())) throw ExpansionDomainMismatch("jet point outside the Laurent annulus");
    } else {
      const auto& m = std::get<CircleMoment>(factor);
      if (!m.r.exact().is_real() || !f.circle_inside_domain(m.c.exact(), m.r.exact().re()))
        throw ExpansionDomainMismatch("moment circle leaves the Laurent annulus");
    }
    PoleCalculus<GaussianRational> calc(atom);
    for (const auto& [j, v] : f.coeff) {
      PoleTerm<GaussianRational> t;
      if (j != 0) t.factors.push_back(LinFactor<GaussianRational>{0, -1, f.center, j});
      GaussianRational value = calc.apply({t});
      if (!value.is_zero()) out.add_scaled(v, value * c.exact());
    }
  }
  return out;
}

/// Laurent data of p_k mu(a, z, b, 0) around 0, valid on the punctured plane.
inline LaurentSeries two_point_series(GeometricMu& mu, const GradedVector& a, const GradedVector& b, int k) {
  LaurentSeries s;
  for (const auto& t : mu.two_point_exact(a, b, DegreeWindow(k, k))) s.coeff[t.exponent] += t.coeff;
  return s;
}

// ---------------------------------------------------------------------------
// Evaluation of functionals on mu.

struct EvalOptions {
  int quad_n = 0;        // 0 selects 2*hi + 16
  bool force_quadrature = false;
  double tol = 1e-9;     // agreement required between N and 2N quadrature
  MuOptions mu;
};

/// alpha(mu(states)) per degree. Arity <= 2 uses the residue calculus on the
/// closed form of mu (exact when all data are exact); higher arity uses
/// numeric mu and quadrature.
class FunctionalEvaluator {
 public:
  explicit FunctionalEvaluator(GeometricMu& mu) : mu_(mu) {}

  GeometricMu& mu() { return mu_; }

  bool exact_path(const Functional& alpha, const std::vector<GradedVector>& states) const {
    return alpha.arity() == states.size() && states.size() <= 2 && exact_functional(alpha);
  }

  ProductVector evaluate_exact(const Functional& alpha, const std::vector<GradedVector>& states, DegreeWindow w) {
    if (!exact_path(alpha, states)) throw std::invalid_argument("exact evaluation needs exact data of arity <= 2");
    ProductVector out(w);
    for (int k = std::max(w.lo, 0); k <= w.hi; ++k) {
      auto corr = mu_.correlator_terms(states, k);
      GradedVector comp;
      for (const auto& [atom, c] : alpha.terms()) {
        PoleCalculus<GaussianRational> calc(atom);
        for (const auto& t : corr) {
          GaussianRational v = calc.apply({correlator_shape<GaussianRational>(t)});
          if (!v.is_zero()) comp.add_scaled(t.coeff, v * c.exact());
        }
      }
      out.set_component(k, std::move(comp));
    }
    return out;
  }

  NumericProductVector evaluate_numeric(const Functional& alpha, const std::vector<GradedVector>& states, DegreeWindow w,
                                        const EvalOptions& opt = {}) {
    if (alpha.arity() != states.size()) throw std::invalid_argument("functional arity differs from the number of states");
    if (!opt.force_quadrature && states.size() <= 2) return residue_numeric(alpha, states, w);
    std::vector<NumericVector> ns;
    for (const auto& s : states) ns.push_back(to_numeric(s));
    auto f = [&](const std::vector<Complex>& z) {
      if (states.size() <= 2) return mu_.mu_closed_form(states, z, w);
      return mu_.mu_numeric_auto(ns, z, w, opt.mu).value;
    };
    return quadrature(alpha, f, w, opt);
  }

  /// Quadrature evaluation of alpha against an arbitrary vector-valued callable.
  NumericProductVector quadrature(const Functional& alpha, const std::function<NumericProductVector(const std::vector<Complex>&)>& f,
                                  DegreeWindow w, const EvalOptions& opt = {}) {
    int N = opt.quad_n > 0 ? opt.quad_n : 2 * w.hi + 16;
    NumericProductVector coarse = quadrature_once(alpha, f, w, N);
    if (needs_nodes(alpha)) {
      NumericProductVector fine = quadrature_once(alpha, f, w, 2 * N);
      if (relative_error(coarse, fine) > opt.tol)
        throw NonConvergentQuadrature("quadrature with N and 2N nodes disagree by " + std::to_string(relative_error(coarse, fine)));
      return fine;
    }
    return coarse;
  }

  NumericProductVector quadrature_once(const Functional& alpha, const std::function<NumericProductVector(const std::vector<Complex>&)>& f,
                                       DegreeWindow w, int N) {
    NumericProductVector out(w);
    for (const auto& [atom, c] : alpha.terms()) {
      std::vector<Complex> z(atom.arity());
      std::vector<std::vector<std::pair<Complex, Complex>>> nodes;  // (point, weight) per coordinate
      for (std::size_t i = 0; i < atom.arity(); ++i) nodes.push_back(coordinate_nodes(atom, i, N));
      std::vector<std::size_t> idx(atom.arity(), 0);
      while (true) {
        Complex weight = c.approx();
        for (std::size_t i = 0; i < idx.size(); ++i) {
          z[i] = nodes[i][idx[i]].first;
          weight *= nodes[i][idx[i]].second;
        }
        NumericProductVector v = f(z);
        v *= weight;
        out += v;
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == nodes[i].size()) idx[i++] = 0;
        if (i == idx.size()) break;
      }
    }
    return out;
  }

 private:
  static bool needs_nodes(const Functional& alpha) {
    for (const auto& [atom, c] : alpha.terms())
      for (const auto& f : atom.factors) {
        if (std::holds_alternative<CircleMoment>(f)) return true;
        if (std::get<DeltaJet>(f).d > 0) return true;
      }
    return false;
  }

  /// Nodes and weights realizing coordinate i's atom by the trapezoid rule.
  static std::vector<std::pair<Complex, Complex>> coordinate_nodes(const AtomicFunctional& atom, std::size_t i, int N) {
    std::vector<std::pair<Complex, Complex>> out;
    Complex c;
    double r;
    int n;
    if (const auto* j = std::get_if<DeltaJet>(&atom.factors[i])) {
      if (j->d == 0) return {{j->p.approx(), Complex(1.0, 0.0)}};
      // Cauchy formula on a circle a third of the way to the nearest other support point
      c = j->p.approx();
      r = 1.0;
      for (std::size_t k = 0; k < atom.arity(); ++k) {
        if (k == i) continue;
        if (const auto* o = std::get_if<DeltaJet>(&atom.factors[k])) r = std::min(r, std::abs(o->p.approx() - c) / 3.0);
        else {
          const auto& m = std::get<CircleMoment>(atom.factors[k]);
          r = std::min(r, std::abs(std::abs(m.c.approx() - c) - m.r.approx().real()) / 3.0);
        }
      }
      n = -j->d - 1;
    } else {
      const auto& m = std::get<CircleMoment>(atom.factors[i]);
      c = m.c.approx();
      r = m.r.approx().real();
      n = m.n;
    }
    for (int k = 0; k < N; ++k) {
      Complex u = std::polar(r, 2.0 * std::numbers::pi * k / N);
      out.push_back({c + u, ipow(u, n + 1) / static_cast<double>(N)});
    }
    return out;
  }

  NumericProductVector residue_numeric(const Functional& alpha, const std::vector<GradedVector>& states, DegreeWindow w) {
    NumericProductVector out(w);
    for (int k = std::max(w.lo, 0); k <= w.hi; ++k) {
      auto corr = mu_.correlator_terms(states, k);
      NumericVector comp;
      for (const auto& [atom, c] : alpha.terms()) {
        PoleCalculus<Complex> calc(atom);
        for (const auto& t : corr) {
          Complex v = calc.apply({correlator_shape<Complex>(t)});
          if (v != Complex(0.0, 0.0)) comp.add_scaled(to_numeric(t.coeff), v * c.approx());
        }
      }
      out.set_component(k, std::move(comp));
    }
    return out;
  }

  GeometricMu& mu_;
};

}  // namespace voxfact
