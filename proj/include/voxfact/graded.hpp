#pragma once

// PBW monomials, graded vectors, degree windows and truncated products of
// weight spaces.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "voxfact/scalar.hpp"

namespace voxfact {

/// One creation factor g_{-n} of a PBW monomial: generator index and the
/// degree n > 0 it raises.
struct PBWFactor {
  std::uint8_t gen = 0;
  std::int32_t degree = 0;

  friend bool operator==(const PBWFactor&, const PBWFactor&) = default;
};

/// Canonical factor order: larger degree first, ties by generator index.
inline bool canonical_before(const PBWFactor& a, const PBWFactor& b) {
  if (a.degree != b.degree) return a.degree > b.degree;
  return a.gen < b.gen;
}

/// Ordered product of creation modes applied to the vacuum. The empty
/// monomial is the vacuum itself.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<PBWFactor> factors) : factors_(std::move(factors)) {
    std::stable_sort(factors_.begin(), factors_.end(), canonical_before);
    for (const auto& f : factors_) {
      if (f.degree <= 0) throw std::invalid_argument("PBW factor degree must be positive");
      degree_ += f.degree;
    }
  }

  static Monomial vacuum() { return {}; }

  const std::vector<PBWFactor>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  bool is_vacuum() const { return factors_.empty(); }
  int degree() const { return degree_; }

  /// The monomial with its first (outermost) factor removed.
  Monomial tail() const {
    Monomial m;
    m.factors_.assign(factors_.begin() + 1, factors_.end());
    m.degree_ = degree_ - factors_.front().degree;
    return m;
  }

  /// Prepends a factor that is already canonically first.
  Monomial prepend(const PBWFactor& f) const {
    Monomial m;
    m.factors_.reserve(factors_.size() + 1);
    m.factors_.push_back(f);
    m.factors_.insert(m.factors_.end(), factors_.begin(), factors_.end());
    m.degree_ = degree_ + f.degree;
    return m;
  }

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.factors_ == b.factors_; }
  friend bool operator!=(const Monomial& a, const Monomial& b) { return !(a == b); }

  /// Basis order: degree, then length, then factors lexicographically.
  friend bool operator<(const Monomial& a, const Monomial& b) {
    if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
    if (a.factors_.size() != b.factors_.size()) return a.factors_.size() < b.factors_.size();
    for (std::size_t i = 0; i < a.factors_.size(); ++i) {
      const auto& x = a.factors_[i];
      const auto& y = b.factors_[i];
      if (x.degree != y.degree) return x.degree > y.degree;
      if (x.gen != y.gen) return x.gen < y.gen;
    }
    return false;
  }

  std::size_t hash() const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (const auto& f : factors_)
      h ^= (static_cast<std::size_t>(f.gen) << 20 | static_cast<std::size_t>(f.degree)) + 0x9e3779b9 + (h << 6) + (h >> 2);
    return h;
  }

 private:
  std::vector<PBWFactor> factors_;
  int degree_ = 0;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

/// Closed range [lo, hi] of degrees.
struct DegreeWindow {
  int lo = 0;
  int hi = 0;

  DegreeWindow() = default;
  DegreeWindow(int l, int h) : lo(l), hi(h) {
    if (lo > hi) throw std::invalid_argument("degree window requires lo <= hi");
  }
  bool contains(int k) const { return lo <= k && k <= hi; }
  int size() const { return hi - lo + 1; }
  friend bool operator==(const DegreeWindow&, const DegreeWindow&) = default;
};

/// Parses "lo:hi".
inline DegreeWindow parse_window(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw ParseError("window must look like lo:hi, got '" + text + "'");
  try {
    return DegreeWindow(std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1)));
  } catch (const std::invalid_argument&) {
    throw ParseError("window must look like lo:hi, got '" + text + "'");
  }
}

/// Finite linear combination of PBW monomials over the field K, kept with
/// no zero coefficients and terms sorted by basis order.
template <class K>
class GradedVectorT {
 public:
  using Traits = FieldTraits<K>;
  using Map = std::map<Monomial, K>;

  GradedVectorT() = default;
  explicit GradedVectorT(const Monomial& m, K c = K(1)) {
    if (!Traits::is_zero(c)) terms_.emplace(m, std::move(c));
  }

  static GradedVectorT vacuum() { return GradedVectorT(Monomial::vacuum()); }

  const Map& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  K coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? K(0) : it->second;
  }

  void add_term(const Monomial& m, const K& c) {
    if (Traits::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (Traits::is_zero(it->second)) terms_.erase(it);
    }
  }

  void add_scaled(const GradedVectorT& o, const K& c) {
    if (Traits::is_zero(c)) return;
    for (const auto& [m, v] : o.terms_) add_term(m, v * c);
  }

  GradedVectorT& operator+=(const GradedVectorT& o) {
    for (const auto& [m, v] : o.terms_) add_term(m, v);
    return *this;
  }
  GradedVectorT& operator-=(const GradedVectorT& o) {
    for (const auto& [m, v] : o.terms_) add_term(m, -v);
    return *this;
  }
  GradedVectorT& operator*=(const K& c) {
    if (Traits::is_zero(c)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
  }

  friend GradedVectorT operator+(GradedVectorT a, const GradedVectorT& b) { return a += b; }
  friend GradedVectorT operator-(GradedVectorT a, const GradedVectorT& b) { return a -= b; }
  friend GradedVectorT operator*(GradedVectorT a, const K& c) { return a *= c; }
  friend GradedVectorT operator*(const K& c, GradedVectorT a) { return a *= c; }
  friend GradedVectorT operator-(GradedVectorT a) { return a *= K(-1); }
  friend bool operator==(const GradedVectorT& a, const GradedVectorT& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const GradedVectorT& a, const GradedVectorT& b) { return !(a == b); }

  /// True when all terms share one degree (the zero vector counts).
  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    int d = terms_.begin()->first.degree();
    return std::all_of(terms_.begin(), terms_.end(), [d](const auto& t) { return t.first.degree() == d; });
  }

  /// Degree of a nonzero homogeneous vector.
  int degree() const {
    if (terms_.empty() || !is_homogeneous()) throw std::logic_error("degree of a non-homogeneous or zero vector");
    return terms_.begin()->first.degree();
  }

  int min_degree() const { return terms_.empty() ? 0 : terms_.begin()->first.degree(); }
  int max_degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first.degree(); }

  double norm_inf() const {
    double m = 0.0;
    for (const auto& [mono, v] : terms_) m = std::max(m, Traits::magnitude(v));
    return m;
  }

 private:
  Map terms_;
};

using GradedVector = GradedVectorT<GaussianRational>;
using NumericVector = GradedVectorT<Complex>;

inline NumericVector to_numeric(const GradedVector& v) {
  NumericVector out;
  for (const auto& [m, c] : v.terms()) out.add_term(m, c.to_complex());
  return out;
}

/// Sup-norm of the difference of two numeric vectors.
inline double distance_inf(const NumericVector& a, const NumericVector& b) { return (a - b).norm_inf(); }

/// Degree-k part p_k(v).
template <class K>
GradedVectorT<K> project_degree(const GradedVectorT<K>& v, int k) {
  GradedVectorT<K> out;
  for (const auto& [m, c] : v.terms())
    if (m.degree() == k) out.add_term(m, c);
  return out;
}

/// Splits a vector into homogeneous parts keyed by degree.
template <class K>
std::map<int, GradedVectorT<K>> homogeneous_parts(const GradedVectorT<K>& v) {
  std::map<int, GradedVectorT<K>> parts;
  for (const auto& [m, c] : v.terms()) parts[m.degree()].add_term(m, c);
  return parts;
}

/// q^{L_0}: scales each degree-d part by q^d.
template <class K>
GradedVectorT<K> grading_act(const K& q, const GradedVectorT<K>& v) {
  if (FieldTraits<K>::is_zero(q)) throw std::domain_error("grading action requires a nonzero scalar");
  GradedVectorT<K> out;
  std::map<int, K> powers;
  for (const auto& [m, c] : v.terms()) {
    auto it = powers.find(m.degree());
    if (it == powers.end()) it = powers.emplace(m.degree(), FieldTraits<K>::power(q, m.degree())).first;
    out.add_term(m, c * it->second);
  }
  return out;
}

inline GradedVector grading_act(const Scalar& q, const GradedVector& v) {
  if (q.is_zero()) throw std::domain_error("grading action requires a nonzero scalar");
  return grading_act<GaussianRational>(q.exact(), v);
}

/// Element of the product of weight spaces truncated to a degree window:
/// one homogeneous component per degree.
template <class K>
class ProductVectorT {
 public:
  ProductVectorT() = default;
  explicit ProductVectorT(DegreeWindow w) : window_(w), components_(static_cast<std::size_t>(w.size())) {}

  /// Keeps the parts of v whose degree lies in the window; reports whether
  /// anything was dropped.
  static ProductVectorT from_vector(const GradedVectorT<K>& v, DegreeWindow w, bool* truncated = nullptr) {
    ProductVectorT p(w);
    bool dropped = false;
    for (const auto& [m, c] : v.terms()) {
      if (w.contains(m.degree())) p.components_[m.degree() - w.lo].add_term(m, c);
      else dropped = true;
    }
    if (truncated) *truncated = dropped;
    return p;
  }

  const DegreeWindow& window() const { return window_; }

  const GradedVectorT<K>& component(int k) const {
    static const GradedVectorT<K> zero;
    if (!window_.contains(k)) return zero;
    return components_[k - window_.lo];
  }

  /// Sets component k; must be homogeneous of degree k or zero.
  void set_component(int k, GradedVectorT<K> v) {
    if (!window_.contains(k)) return;
    for (const auto& [m, c] : v.terms())
      if (m.degree() != k) throw std::invalid_argument("product component has wrong degree");
    components_[k - window_.lo] = std::move(v);
  }
  void add_to_component(int k, const GradedVectorT<K>& v, const K& scale = K(1)) {
    if (!window_.contains(k)) return;
    for (const auto& [m, c] : v.terms())
      if (m.degree() != k) throw std::invalid_argument("product component has wrong degree");
    components_[k - window_.lo].add_scaled(v, scale);
  }

  /// Sum of the window components as a single graded vector.
  GradedVectorT<K> flatten() const {
    GradedVectorT<K> out;
    for (const auto& c : components_) out += c;
    return out;
  }

  bool is_zero() const {
    return std::all_of(components_.begin(), components_.end(), [](const auto& c) { return c.is_zero(); });
  }

  ProductVectorT& operator+=(const ProductVectorT& o) {
    check_window(o);
    for (std::size_t i = 0; i < components_.size(); ++i) components_[i] += o.components_[i];
    return *this;
  }
  ProductVectorT& operator-=(const ProductVectorT& o) {
    check_window(o);
    for (std::size_t i = 0; i < components_.size(); ++i) components_[i] -= o.components_[i];
    return *this;
  }
  ProductVectorT& operator*=(const K& c) {
    for (auto& comp : components_) comp *= c;
    return *this;
  }
  friend ProductVectorT operator+(ProductVectorT a, const ProductVectorT& b) { return a += b; }
  friend ProductVectorT operator-(ProductVectorT a, const ProductVectorT& b) { return a -= b; }
  friend ProductVectorT operator*(ProductVectorT a, const K& c) { return a *= c; }
  friend bool operator==(const ProductVectorT& a, const ProductVectorT& b) {
    return a.window_ == b.window_ && a.components_ == b.components_;
  }

  double norm_inf() const {
    double m = 0.0;
    for (const auto& c : components_) m = std::max(m, c.norm_inf());
    return m;
  }

 private:
  void check_window(const ProductVectorT& o) const {
    if (!(o.window_ == window_)) throw std::invalid_argument("product vectors over different windows");
  }

  DegreeWindow window_;
  std::vector<GradedVectorT<K>> components_;
};

using ProductVector = ProductVectorT<GaussianRational>;
using NumericProductVector = ProductVectorT<Complex>;

inline NumericProductVector to_numeric(const ProductVector& p) {
  NumericProductVector out(p.window());
  for (int k = p.window().lo; k <= p.window().hi; ++k) out.set_component(k, to_numeric(p.component(k)));
  return out;
}

template <class K>
GradedVectorT<K> project_degree(const ProductVectorT<K>& v, int k) {
  return v.component(k);
}

template <class K>
ProductVectorT<K> grading_act(const K& q, const ProductVectorT<K>& v) {
  ProductVectorT<K> out(v.window());
  for (int k = v.window().lo; k <= v.window().hi; ++k) out.set_component(k, grading_act(q, v.component(k)));
  return out;
}

/// Largest componentwise deviation, relative to max(1, |a|).
inline double relative_error(const NumericProductVector& a, const NumericProductVector& b) {
  double scale = std::max(1.0, a.norm_inf());
  return (a - b).norm_inf() / scale;
}

}  // namespace voxfact
