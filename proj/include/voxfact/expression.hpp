#pragma once

// Expressions on an open set U: finite sums of [alpha (x) a_1 (x) ... (x) a_m]
// with alpha an analytic functional on U^m minus the diagonal. Terms are
// stored fully expanded over atoms and PBW monomials, with the (factor,
// monomial) pairs sorted so that permuted copies coincide.

#include <algorithm>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "voxfact/functional.hpp"
#include "voxfact/open_set.hpp"

namespace voxfact {

/// One coordinate of a symmetric basis term: its atom and its state.
struct Slot {
  AtomFactor factor;
  Monomial state;

  friend int compare(const Slot& a, const Slot& b) {
    if (int c = compare(a.factor, b.factor)) return c;
    if (a.state < b.state) return -1;
    if (b.state < a.state) return 1;
    return 0;
  }
};

struct TermKey {
  std::vector<Slot> slots;

  friend bool operator<(const TermKey& a, const TermKey& b) {
    if (a.slots.size() != b.slots.size()) return a.slots.size() < b.slots.size();
    for (std::size_t i = 0; i < a.slots.size(); ++i)
      if (int c = compare(a.slots[i], b.slots[i])) return c < 0;
    return false;
  }
  friend bool operator==(const TermKey& a, const TermKey& b) { return !(a < b) && !(b < a); }

  std::size_t arity() const { return slots.size(); }
  AtomicFunctional atom() const {
    AtomicFunctional a;
    for (const auto& s : slots) a.factors.push_back(s.factor);
    return a;
  }
  std::vector<GradedVector> states() const {
    std::vector<GradedVector> v;
    for (const auto& s : slots) v.emplace_back(s.state);
    return v;
  }
};

class Expression {
 public:
  explicit Expression(OpenSet carrier = OpenSet::plane()) : carrier_(std::move(carrier)) {}

  /// The unit: the scalar 1 in arity zero.
  static Expression unit(OpenSet carrier) {
    Expression e(std::move(carrier));
    e.add_key(TermKey{}, Scalar(1));
    return e;
  }

  /// [alpha (x) a_1 (x) ... (x) a_m], validated against the carrier.
  static Expression make(OpenSet carrier, const Functional& alpha, const std::vector<GradedVector>& states) {
    Expression e(std::move(carrier));
    e.add(alpha, states);
    e.validate();
    return e;
  }

  const OpenSet& carrier() const { return carrier_; }
  const std::map<TermKey, Scalar>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(const Functional& alpha, const std::vector<GradedVector>& states, const Scalar& scale = Scalar(1)) {
    if (alpha.arity() != states.size()) throw std::invalid_argument("functional arity differs from the number of states");
    for (const auto& [atom, c] : alpha.terms()) expand(atom, states, 0, {}, c * scale);
  }

  void add_key(TermKey key, const Scalar& c) {
    if (c.is_zero()) return;
    std::sort(key.slots.begin(), key.slots.end(), [](const Slot& a, const Slot& b) { return compare(a, b) < 0; });
    auto [it, inserted] = terms_.try_emplace(std::move(key), c);
    if (!inserted) {
      it->second = it->second + c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Expression& operator+=(const Expression& o) {
    for (const auto& [k, c] : o.terms_) add_key(k, c);
    return *this;
  }
  Expression& operator*=(const Scalar& s) {
    if (s.is_zero()) terms_.clear();
    for (auto& [k, c] : terms_) c = c * s;
    return *this;
  }
  friend Expression operator+(Expression a, const Expression& b) { return a += b; }
  friend Expression operator*(Expression a, const Scalar& s) { return a *= s; }

  /// Structural equality of symmetry-normalized data on the same carrier.
  friend bool operator==(const Expression& a, const Expression& b) { return a.carrier_ == b.carrier_ && a.terms_ == b.terms_; }

  /// Every jet point and moment circle lies in the carrier, and coordinates
  /// of one term are kept apart: distinct points, circles missing points and
  /// each other.
  void validate() const {
    for (const auto& [key, c] : terms_) {
      for (std::size_t i = 0; i < key.slots.size(); ++i) {
        const auto& f = key.slots[i].factor;
        if (!factor_exact(f)) continue;
        if (const auto* j = std::get_if<DeltaJet>(&f)) {
          if (!carrier_.contains_point(j->p.exact())) throw DomainViolation("jet point " + j->p.str() + " outside " + carrier_.str());
        } else {
          const auto& m = std::get<CircleMoment>(f);
          if (!carrier_.contains_circle(circle_of(m))) throw DomainViolation("moment circle outside " + carrier_.str());
        }
        for (std::size_t k = i + 1; k < key.slots.size(); ++k) {
          const auto& g = key.slots[k].factor;
          if (factor_exact(g) && !separated(f, g)) throw DomainViolation("term coordinates meet the diagonal");
        }
      }
    }
  }

  /// Support points of the jets and circle centers, for cover searches.
  std::vector<GaussianRational> support_points(const TermKey& key) const {
    std::vector<GaussianRational> pts;
    for (const auto& s : key.slots)
      if (const auto* j = std::get_if<DeltaJet>(&s.factor)) pts.push_back(j->p.exact());
    return pts;
  }

  /// Whether the support of one term lies in the open set u.
  static bool term_supported_in(const TermKey& key, const OpenSet& u) {
    for (const auto& s : key.slots) {
      if (!factor_exact(s.factor)) return false;
      if (const auto* j = std::get_if<DeltaJet>(&s.factor)) {
        if (!u.contains_point(j->p.exact())) return false;
      } else if (!u.contains_circle(circle_of(std::get<CircleMoment>(s.factor)))) {
        return false;
      }
    }
    return true;
  }

  bool supported_in(const OpenSet& u) const {
    return std::all_of(terms_.begin(), terms_.end(), [&](const auto& t) { return term_supported_in(t.first, u); });
  }

  static Circle circle_of(const CircleMoment& m) { return Circle{m.c.exact(), m.r.exact().re()}; }

  static bool factor_exact(const AtomFactor& f) {
    if (const auto* j = std::get_if<DeltaJet>(&f)) return j->p.is_exact();
    const auto& m = std::get<CircleMoment>(f);
    return m.c.is_exact() && m.r.is_exact();
  }

  static bool separated(const AtomFactor& f, const AtomFactor& g) {
    const auto* jf = std::get_if<DeltaJet>(&f);
    const auto* jg = std::get_if<DeltaJet>(&g);
    if (jf && jg) return jf->p.exact() != jg->p.exact();
    if (jf) return !on_circle(jf->p.exact(), circle_of(std::get<CircleMoment>(g)));
    if (jg) return !on_circle(jg->p.exact(), circle_of(std::get<CircleMoment>(f)));
    return circles_disjoint(circle_of(std::get<CircleMoment>(f)), circle_of(std::get<CircleMoment>(g)));
  }

 private:
  void expand(const AtomicFunctional& atom, const std::vector<GradedVector>& states, std::size_t i, std::vector<Slot> slots, Scalar c) {
    if (i == states.size()) {
      add_key(TermKey{std::move(slots)}, c);
      return;
    }
    for (const auto& [m, v] : states[i].terms()) {
      auto next = slots;
      next.push_back(Slot{atom.factors[i], m});
      expand(atom, states, i + 1, std::move(next), c * Scalar(v));
    }
  }

  OpenSet carrier_;
  std::map<TermKey, Scalar> terms_;
};

/// Relabels the carrier as a larger open set.
inline Expression extend(const Expression& x, const OpenSet& v) {
  if (!x.carrier().subset_of(v)) throw NotASubset(x.carrier().str() + " is not contained in " + v.str());
  Expression out(v);
  out += x;
  out.validate();
  return out;
}

/// [alpha (x) a] . [beta (x) b] = [alpha x beta (x) a (x) b] on W.
inline Expression multiply(const Expression& x, const Expression& y, const OpenSet& w) {
  if (!x.carrier().disjoint_from(y.carrier())) throw NotDisjoint(x.carrier().str() + " meets " + y.carrier().str());
  if (!x.carrier().subset_of(w) || !y.carrier().subset_of(w)) throw NotASubset("factors are not contained in " + w.str());
  Expression out(w);
  for (const auto& [kx, cx] : x.terms())
    for (const auto& [ky, cy] : y.terms()) {
      TermKey k = kx;
      k.slots.insert(k.slots.end(), ky.slots.begin(), ky.slots.end());
      out.add_key(std::move(k), cx * cy);
    }
  return out;
}

/// sigma_(lambda, w): pushforward of the functionals and lambda^{L_0} on every state.
/// The carrier is mapped when possible; pass one explicitly for inexact lambda.
inline Expression affine_act(const Scalar& lambda, const Scalar& w, const Expression& x, const OpenSet* carrier = nullptr) {
  if (lambda.is_zero()) throw std::domain_error("affine action needs lambda != 0");
  OpenSet image = carrier ? *carrier : x.carrier().affine_image(lambda.exact(), w.exact());
  Expression out(image);
  for (const auto& [key, c] : x.terms()) {
    Functional alpha = pushforward_affine(lambda, w, Functional::atom(key.atom().factors));
    Scalar scale = c;
    for (const auto& s : key.slots) scale = scale * pow(lambda, s.state.degree());
    for (const auto& [atom, a] : alpha.terms()) {
      TermKey k;
      for (std::size_t i = 0; i < key.slots.size(); ++i) k.slots.push_back(Slot{atom.factors[i], key.slots[i].state});
      out.add_key(std::move(k), scale * a);
    }
  }
  return out;
}

struct ExpressionValue {
  bool exact = true;
  ProductVector exact_value;
  NumericProductVector numeric_value;

  NumericProductVector numeric() const { return exact ? to_numeric(exact_value) : numeric_value; }
};

/// ev_U([alpha (x) a]) = alpha(mu(a)), per degree in the window.
class ExpressionEvaluator {
 public:
  explicit ExpressionEvaluator(FunctionalEvaluator& f) : f_(f) {}

  FunctionalEvaluator& functionals() { return f_; }

  static bool exact_path(const Expression& x) {
    for (const auto& [key, c] : x.terms()) {
      if (!c.is_exact() || key.arity() > 2) return false;
      for (const auto& s : key.slots)
        if (!Expression::factor_exact(s.factor)) return false;
    }
    return true;
  }

  static bool exact_path_all(const std::vector<Expression>& xs) {
    return std::all_of(xs.begin(), xs.end(), [](const Expression& x) { return exact_path(x); });
  }

  ExpressionValue evaluate(const Expression& x, DegreeWindow w, const EvalOptions& opt = {}) {
    ExpressionValue v;
    v.exact = exact_path(x) && !opt.force_quadrature;
    if (v.exact) v.exact_value = evaluate_exact(x, w);
    else v.numeric_value = evaluate_numeric(x, w, opt);
    return v;
  }

  ProductVector evaluate_exact(const Expression& x, DegreeWindow w) {
    ProductVector out(w);
    for (const auto& [key, c] : x.terms()) {
      ProductVector t = f_.evaluate_exact(Functional::atom(key.atom().factors), key.states(), w);
      t *= c.exact();
      out += t;
    }
    return out;
  }

  NumericProductVector evaluate_numeric(const Expression& x, DegreeWindow w, const EvalOptions& opt = {}) {
    NumericProductVector out(w);
    for (const auto& [key, c] : x.terms()) {
      NumericProductVector t = f_.evaluate_numeric(Functional::atom(key.atom().factors), key.states(), w, opt);
      t *= c.approx();
      out += t;
    }
    return out;
  }

 private:
  FunctionalEvaluator& f_;
};

}  // namespace voxfact
