#pragma once

// The n-point multiplication maps mu(a_1,z_1,...,a_m,z_m) = Y(a_1,z_1)...Y(a_m,z_m)|0>.
//
// Arity <= 2 has an exact closed form per degree: every component is a
// finite sum of Laurent monomials in z_2 and (z_1 - z_2). Any arity can be
// evaluated numerically for radially separated points.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "voxfact/geometry.hpp"
#include "voxfact/graded.hpp"
#include "voxfact/vertex_engine.hpp"

namespace voxfact {

class EqualModuli : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// m pairwise distinct points of the plane.
struct PointConfiguration {
  std::vector<Scalar> points;

  PointConfiguration() = default;
  explicit PointConfiguration(std::vector<Scalar> pts) : points(std::move(pts)) { validate(); }

  void validate() const {
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j) {
        const Scalar& a = points[i];
        const Scalar& b = points[j];
        if (a.is_exact() && b.is_exact()) {
          if (a.exact() == b.exact()) throw std::invalid_argument("configuration points must be pairwise distinct");
        } else if (std::abs(a.approx() - b.approx()) < 1e-12) {
          throw std::invalid_argument("configuration points closer than 1e-12");
        }
      }
  }

  bool exact() const {
    return std::all_of(points.begin(), points.end(), [](const Scalar& s) { return s.is_exact(); });
  }

  std::vector<Complex> numeric() const {
    std::vector<Complex> out;
    for (const auto& p : points) out.push_back(p.approx());
    return out;
  }
};

/// Closed discs B_{r_i}(z_i), pairwise disjoint and inside B_R(0).
struct DiscConfiguration {
  std::vector<GaussianRational> centers;
  std::vector<Rational> radii;
  Rational outer;

  bool valid() const {
    if (centers.size() != radii.size()) return false;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      if (sgn(radii[i]) <= 0) return false;
      if (!closed_disc_inside(Circle{centers[i], radii[i]}, Circle{GaussianRational(0), outer})) return false;
      for (std::size_t j = i + 1; j < centers.size(); ++j)
        if (!closed_discs_disjoint(Circle{centers[i], radii[i]}, Circle{centers[j], radii[j]})) return false;
    }
    return true;
  }
};

/// coeff * z^exponent
struct LaurentTerm {
  int degree = 0;
  GradedVector coeff;
  int exponent = 0;
};

/// coeff * prod_i z_i^{powers[i]} * (z_1 - z_2)^cross, the last factor only for arity 2.
struct CorrelatorTerm {
  GradedVector coeff;
  std::vector<int> powers;
  int cross = 0;

  template <class K>
  K shape_value(const std::vector<K>& z) const {
    using T = FieldTraits<K>;
    K v(1);
    for (std::size_t i = 0; i < powers.size(); ++i)
      if (powers[i] != 0) v *= T::power(z[i], powers[i]);
    if (cross != 0) v *= T::power(z[0] - z[1], cross);
    return v;
  }
};

struct MuOptions {
  double tol = 1e-10;
  int d_max = -1;  // -1 selects 4*(hi+1)+16
};

struct MuDiagnostics {
  std::vector<int> caps;  // input-degree cap per level, outermost first
  double tail = 0.0;      // largest relative tail estimate over the levels
  int attempts = 0;
  int d_max = 0;
};

struct MuNumericResult {
  NumericProductVector value;
  MuDiagnostics diag;
};

/// Geometric vertex-algebra maps over one VertexEngine; not thread-safe.
class GeometricMu {
 public:
  explicit GeometricMu(VertexEngine& engine) : engine_(engine) {}

  VertexEngine& engine() { return engine_; }

  /// p_k mu(a,z,b,0) = (a_(n) b) z^{-n-1} with n = |a| + |b| - k - 1.
  std::vector<LaurentTerm> two_point_exact(const GradedVector& a, const GradedVector& b, DegreeWindow w) {
    std::vector<LaurentTerm> out;
    if (a.is_zero() || b.is_zero()) return out;
    if (!a.is_homogeneous() || !b.is_homogeneous()) throw std::invalid_argument("two-point exact data needs homogeneous states");
    for (int k = w.lo; k <= w.hi; ++k) {
      int n = a.degree() + b.degree() - k - 1;
      GradedVector c = engine_.state_mode(a, n, b);
      if (!c.is_zero()) out.push_back(LaurentTerm{k, std::move(c), -n - 1});
    }
    return out;
  }

  /// Exact closed form of p_k mu for arity <= 2, valid at all distinct points.
  std::vector<CorrelatorTerm> correlator_terms(const std::vector<GradedVector>& states, int k) {
    std::vector<CorrelatorTerm> out;
    if (states.size() > 2) throw std::invalid_argument("exact correlators are limited to arity <= 2");
    if (states.empty()) {
      if (k == 0) out.push_back(CorrelatorTerm{GradedVector(Monomial()), {}, 0});
      return out;
    }
    if (states.size() == 1) {
      for (const auto& [m, c] : states[0].terms()) {
        int j = k - m.degree();
        if (j < 0) continue;
        GradedVector v = engine_.divided_translate(m, j);
        if (!v.is_zero()) out.push_back(CorrelatorTerm{v * c, {j}, 0});
      }
      return merge(out);
    }
    // e^{z_2 T} Y(a, z_1 - z_2) b
    for (const auto& [ma, ca] : states[0].terms())
      for (const auto& [mb, cb] : states[1].terms())
        for (int j = 0; j <= k; ++j) {
          int n = ma.degree() + mb.degree() - (k - j) - 1;
          const GradedVector& x = engine_.state_mode(ma, n, mb);
          if (x.is_zero()) continue;
          GradedVector v = engine_.divided_translate(x, j);
          if (!v.is_zero()) out.push_back(CorrelatorTerm{v * (ca * cb), {0, j}, -n - 1});
        }
    return merge(out);
  }

  /// Exact mu at exact points for arity <= 2.
  ProductVector mu_exact(const std::vector<GradedVector>& states, const std::vector<GaussianRational>& z, DegreeWindow w) {
    if (states.size() != z.size()) throw std::invalid_argument("states and points differ in length");
    if (z.size() == 2 && z[0] == z[1]) throw std::invalid_argument("configuration points must be pairwise distinct");
    ProductVector out(w);
    for (int k = w.lo; k <= w.hi; ++k) {
      if (k < 0) continue;
      GradedVector comp;
      for (const auto& t : correlator_terms(states, k)) comp.add_scaled(t.coeff, t.shape_value(z));
      out.set_component(k, std::move(comp));
    }
    return out;
  }

  /// Same closed form evaluated in floating point; arity <= 2.
  NumericProductVector mu_closed_form(const std::vector<GradedVector>& states, const std::vector<Complex>& z, DegreeWindow w) {
    NumericProductVector out(w);
    for (int k = std::max(w.lo, 0); k <= w.hi; ++k) {
      NumericVector comp;
      for (const auto& t : correlator_terms(states, k)) comp.add_scaled(to_numeric(t.coeff), t.shape_value(z));
      out.set_component(k, std::move(comp));
    }
    return out;
  }

  MuNumericResult mu_numeric(const std::vector<GradedVector>& states, const std::vector<Complex>& z, DegreeWindow w, MuOptions opt = {}) {
    std::vector<NumericVector> ns;
    for (const auto& s : states) ns.push_back(to_numeric(s));
    return mu_numeric(ns, z, w, opt);
  }

  /// Right-to-left evaluation of the radially ordered product of fields.
  MuNumericResult mu_numeric(const std::vector<NumericVector>& states, const std::vector<Complex>& z, DegreeWindow w, MuOptions opt = {}) {
    if (states.size() != z.size()) throw std::invalid_argument("states and points differ in length");
    MuNumericResult res;
    res.value = NumericProductVector(w);
    const int d_max = opt.d_max > 0 ? opt.d_max : 4 * (w.hi + 1) + 16;
    res.diag.d_max = d_max;
    const std::size_t m = states.size();
    if (m == 0) {
      if (w.contains(0)) res.value.set_component(0, NumericVector(Monomial()));
      return res;
    }
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        if (std::abs(z[i] - z[j]) < 1e-12) throw std::invalid_argument("configuration points closer than 1e-12");

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return std::abs(z[x]) > std::abs(z[y]); });
    std::vector<NumericVector> s;
    std::vector<Complex> p;
    for (auto i : order) {
      s.push_back(states[i]);
      p.push_back(z[i]);
    }
    for (std::size_t i = 0; i + 1 < m; ++i) {
      double a = std::abs(p[i]), b = std::abs(p[i + 1]);
      if (a - b <= 1e-12 * std::max(1.0, a)) throw EqualModuli("two insertion points share the same modulus");
    }

    // margins[i]: extra input degrees summed at level i (applying Y(s_i, p_i))
    // first guess allows for polynomial growth of degree ~ half the inner state degrees
    std::vector<int> margins(m, 0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
      double ratio = std::abs(p[i + 1]) / std::abs(p[i]);
      if (ratio == 0.0) continue;
      double inner_degree = 0.0;
      for (std::size_t j = i + 1; j < m; ++j) inner_degree += s[j].is_zero() ? 0 : s[j].max_degree();
      double base = std::max(2.0, std::log(opt.tol) / std::log(ratio));
      double guess = (std::log(opt.tol) - 0.5 * inner_degree * std::log(base)) / std::log(ratio);
      margins[i] = static_cast<int>(std::ceil(guess)) + 2;
    }
    const int hi = std::max(w.hi, 0);
    for (int attempt = 1;; ++attempt) {
      std::vector<int> caps(m + 1, 0);
      caps[0] = hi;
      for (std::size_t i = 0; i < m; ++i) caps[i + 1] = caps[i] + margins[i];
      if (m > 1 && caps[m - 1] > d_max) {
        // clamp the first guess; the tail test decides whether D_max suffices
        int excess = caps[m - 1] - d_max;
        for (std::size_t i = m - 1; i-- > 0 && excess > 0;) {
          int cut = std::min(excess, margins[i]);
          margins[i] -= cut;
          excess -= cut;
        }
        --attempt;
        continue;
      }

      // innermost: Y(s_m, p_m)|0> = e^{p_m T} s_m
      std::vector<NumericVector> v = innermost(s[m - 1], p[m - 1], caps[m - 1]);
      bool finite = p[m - 1] == Complex(0.0, 0.0);
      double tail = 0.0;
      std::size_t worst_level = m;
      for (std::size_t i = m - 1; i-- > 0;) {
        double damp = i == 0 ? 0.0 : std::abs(p[i]) / std::abs(p[i - 1]);
        double level_tail = 0.0;
        v = apply_level(s[i], p[i], v, caps[i], i == 0 ? 0 : caps[i - 1], damp, finite ? nullptr : &level_tail);
        finite = false;
        if (level_tail > tail) {
          tail = level_tail;
          worst_level = i;
        }
      }
      res.diag.caps.assign(caps.begin() + 1, caps.end());
      res.diag.tail = tail;
      res.diag.attempts = attempt;
      if (tail <= opt.tol || m == 1) {
        for (int k = w.lo; k <= w.hi; ++k)
          if (k >= 0 && static_cast<std::size_t>(k) < v.size()) res.value.set_component(k, v[static_cast<std::size_t>(k)]);
        return res;
      }
      if (caps[m - 1] >= d_max)
        throw NonConvergent("tail estimate " + std::to_string(tail) + " above tolerance at D_max " + std::to_string(d_max));
      margins[worst_level] += std::min(std::max(3, margins[worst_level] / 4), d_max - caps[m - 1]);
    }
  }

  /// mu at points shifted by t, transported back with e^{tT}; handles configurations whose moduli tie.
  MuNumericResult mu_numeric_recentered(const std::vector<NumericVector>& states, const std::vector<Complex>& z, Complex t,
                                        DegreeWindow w, MuOptions opt = {}) {
    std::vector<Complex> shifted;
    for (const auto& x : z) shifted.push_back(x - t);
    MuNumericResult inner = mu_numeric(states, shifted, DegreeWindow(0, std::max(w.hi, 0)), opt);
    MuNumericResult out;
    out.diag = inner.diag;
    out.value = NumericProductVector(w);
    for (int k = std::max(w.lo, 0); k <= w.hi; ++k) {
      NumericVector comp;
      Complex tj(1.0, 0.0);
      for (int j = 0; j <= k; ++j) {
        comp.add_scaled(divided_translate_numeric(inner.value.component(k - j), j), tj);
        tj *= t;
      }
      out.value.set_component(k, std::move(comp));
    }
    return out;
  }

  /// Chooses a recentering point with the best radial separation.
  MuNumericResult mu_numeric_auto(const std::vector<NumericVector>& states, const std::vector<Complex>& z, DegreeWindow w, MuOptions opt = {}) {
    std::vector<Complex> candidates{Complex(0.0, 0.0)};
    for (std::size_t i = 0; i < z.size(); ++i) {
      candidates.push_back(z[i]);
      for (std::size_t j = i + 1; j < z.size(); ++j) candidates.push_back((z[i] + z[j]) / 2.0);
    }
    Complex best(0.0, 0.0);
    double best_score = std::numeric_limits<double>::infinity();
    for (const auto& t : candidates) {
      std::vector<double> mods;
      for (const auto& x : z) mods.push_back(std::abs(x - t));
      std::sort(mods.rbegin(), mods.rend());
      double score = 0.0;
      for (std::size_t i = 0; i + 1 < mods.size(); ++i) {
        if (mods[i] - mods[i + 1] <= 1e-9 * std::max(1.0, mods[i])) score = std::numeric_limits<double>::infinity();
        else score = std::max(score, mods[i + 1] / mods[i]);
      }
      if (score < best_score - 1e-12) {
        best_score = score;
        best = t;
      }
    }
    if (best == Complex(0.0, 0.0)) return mu_numeric(states, z, w, opt);
    return mu_numeric_recentered(states, z, best, w, opt);
  }

  const NumericVector& mode_numeric(const Monomial& a, int n, const Monomial& b) {
    Key key{a, n, b};
    if (auto it = mode_cache_.find(key); it != mode_cache_.end()) return it->second;
    return mode_cache_.emplace(std::move(key), to_numeric(engine_.state_mode(a, n, b))).first->second;
  }

  NumericVector divided_translate_numeric(const NumericVector& v, int j) {
    NumericVector out;
    for (const auto& [m, c] : v.terms()) out.add_scaled(divided_numeric(m, j), c);
    return out;
  }

 private:
  struct Key {
    Monomial a;
    int n;
    Monomial b;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return (k.a.hash() * 1000003u) ^ (k.b.hash() * 7919u) ^ static_cast<std::size_t>(k.n + (1 << 20));
    }
  };

  static std::vector<CorrelatorTerm> merge(std::vector<CorrelatorTerm> terms) {
    std::vector<CorrelatorTerm> out;
    for (auto& t : terms) {
      auto it = std::find_if(out.begin(), out.end(), [&](const CorrelatorTerm& o) { return o.powers == t.powers && o.cross == t.cross; });
      if (it == out.end()) out.push_back(std::move(t));
      else it->coeff += t.coeff;
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const CorrelatorTerm& t) { return t.coeff.is_zero(); }), out.end());
    return out;
  }

  const NumericVector& divided_numeric(const Monomial& m, int j) {
    Key key{m, j, Monomial()};
    if (auto it = divided_cache_.find(key); it != divided_cache_.end()) return it->second;
    return divided_cache_.emplace(std::move(key), to_numeric(engine_.divided_translate(m, j))).first->second;
  }

  /// Degree components 0..cap of e^{zT} s.
  std::vector<NumericVector> innermost(const NumericVector& s, Complex z, int cap) {
    std::vector<NumericVector> v(static_cast<std::size_t>(std::max(cap, s.is_zero() ? 0 : s.max_degree()) + 1));
    for (const auto& [m, c] : s.terms()) {
      if (z == Complex(0.0, 0.0)) {
        v[static_cast<std::size_t>(m.degree())].add_term(m, c);
        continue;
      }
      Complex zj(1.0, 0.0);
      for (int j = 0; m.degree() + j <= cap; ++j) {
        v[static_cast<std::size_t>(m.degree() + j)].add_scaled(divided_numeric(m, j), c * zj);
        zj *= z;
      }
    }
    return v;
  }

  /// Output components 0..out_cap of Y(a, z) applied to sum_d v[d].
  /// The tail of the input-degree sum is estimated from its last three
  /// nonzero terms; output degrees above next_cap are weighted by damp^(k - next_cap).
  std::vector<NumericVector> apply_level(const NumericVector& a, Complex z, const std::vector<NumericVector>& v, int out_cap,
                                         int next_cap, double damp, double* tail) {
    std::vector<NumericVector> out(static_cast<std::size_t>(out_cap + 1));
    std::vector<double> term_norm(v.size(), 0.0);
    for (std::size_t d = 0; d < v.size(); ++d) {
      if (v[d].is_zero()) continue;
      for (int k = 0; k <= out_cap; ++k) {
        NumericVector contrib;
        for (const auto& [ma, ca] : a.terms()) {
          int n = ma.degree() + static_cast<int>(d) - k - 1;
          Complex zp = ipow(z, -n - 1) * ca;
          for (const auto& [mb, cb] : v[d].terms()) {
            const NumericVector& x = mode_numeric(ma, n, mb);
            if (!x.is_zero()) contrib.add_scaled(x, zp * cb);
          }
        }
        double weight = k > next_cap ? std::pow(damp, k - next_cap) : 1.0;
        term_norm[d] = std::max(term_norm[d], contrib.norm_inf() * weight);
        out[static_cast<std::size_t>(k)] += contrib;
      }
    }
    if (tail) {
      double scale = 1e-300;
      for (int k = 0; k <= out_cap; ++k) {
        double weight = k > next_cap ? std::pow(damp, k - next_cap) : 1.0;
        scale = std::max(scale, out[static_cast<std::size_t>(k)].norm_inf() * weight);
      }
      *tail = geometric_tail(term_norm) / scale;
    }
    return out;
  }

  /// Tail of a series from a geometric fit to its last three nonzero terms.
  static double geometric_tail(const std::vector<double>& t) {
    std::vector<double> nz;
    std::size_t last = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] > 0.0) {
        nz.push_back(t[i]);
        last = i;
      }
    if (nz.empty() || t.size() - 1 - last >= 4) return 0.0;
    if (nz.size() < 3) return std::numeric_limits<double>::infinity();
    double t1 = nz[nz.size() - 3], t2 = nz[nz.size() - 2], t3 = nz.back();
    double r = std::max(t3 / t2, t2 / t1);
    if (r >= 1.0) return std::numeric_limits<double>::infinity();
    return t3 * r / (1.0 - r);
  }

  VertexEngine& engine_;
  std::unordered_map<Key, NumericVector, KeyHash> mode_cache_;
  std::unordered_map<Key, NumericVector, KeyHash> divided_cache_;
};

}  // namespace voxfact
