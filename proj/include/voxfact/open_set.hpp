#pragma once

// Round open subsets of the plane with exact rational data: discs, annuli
// with a closed hole, the whole plane, and disjoint finite unions.

#include <stdexcept>
#include <string>
#include <vector>

#include "voxfact/geometry.hpp"

namespace voxfact {

class NotASubset : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotDisjoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OpenSet {
 public:
  enum class Kind { disc, annulus, plane, finite_union };

  static OpenSet disc(GaussianRational center, Rational radius) {
    if (sgn(radius) <= 0) throw std::invalid_argument("disc radius must be positive");
    OpenSet s(Kind::disc);
    s.center_ = std::move(center);
    s.outer_ = std::move(radius);
    return s;
  }

  /// {z : inner < |z - center| < outer}; inner = 0 punctures the disc.
  static OpenSet annulus(GaussianRational center, Rational inner, Rational outer) {
    if (sgn(inner) < 0 || inner >= outer) throw std::invalid_argument("annulus needs 0 <= inner < outer");
    OpenSet s(Kind::annulus);
    s.center_ = std::move(center);
    s.inner_ = std::move(inner);
    s.outer_ = std::move(outer);
    return s;
  }

  static OpenSet plane() { return OpenSet(Kind::plane); }

  static OpenSet union_of(const std::vector<OpenSet>& parts) {
    OpenSet s(Kind::finite_union);
    for (const auto& p : parts) {
      if (p.kind_ == Kind::finite_union) s.parts_.insert(s.parts_.end(), p.parts_.begin(), p.parts_.end());
      else s.parts_.push_back(p);
    }
    for (std::size_t i = 0; i < s.parts_.size(); ++i)
      for (std::size_t j = i + 1; j < s.parts_.size(); ++j)
        if (!s.parts_[i].disjoint_from(s.parts_[j])) throw NotDisjoint("union members must be pairwise disjoint");
    if (s.parts_.size() == 1) return s.parts_.front();
    return s;
  }

  Kind kind() const { return kind_; }
  const GaussianRational& center() const { return center_; }
  const Rational& inner() const { return inner_; }
  const Rational& outer() const { return outer_; }
  const Rational& radius() const { return outer_; }
  const std::vector<OpenSet>& parts() const { return parts_; }
  bool is_disc() const { return kind_ == Kind::disc; }

  bool contains_point(const GaussianRational& p) const {
    switch (kind_) {
      case Kind::plane: return true;
      case Kind::disc: return dist_lt(p, center_, outer_);
      case Kind::annulus: return dist_gt(p, center_, inner_) && dist_lt(p, center_, outer_);
      case Kind::finite_union:
        for (const auto& q : parts_)
          if (q.contains_point(p)) return true;
        return false;
    }
    return false;
  }

  /// The circle as a curve lies in the set.
  bool contains_circle(const Circle& c) const {
    switch (kind_) {
      case Kind::plane: return true;
      case Kind::disc: return closed_disc_inside(c, Circle{center_, outer_});
      case Kind::annulus: {
        if (!closed_disc_inside(c, Circle{center_, outer_})) return false;
        // avoid the closed hole: outside it, or surrounding it
        return dist_gt(c.center, center_, c.radius + inner_) || dist_lt(c.center, center_, c.radius - inner_);
      }
      case Kind::finite_union:
        for (const auto& q : parts_)
          if (q.contains_circle(c)) return true;
        return false;
    }
    return false;
  }

  bool subset_of(const OpenSet& v) const {
    if (kind_ == Kind::finite_union) {
      for (const auto& p : parts_)
        if (!p.subset_of(v)) return false;
      return true;
    }
    if (v.kind_ == Kind::plane) return true;
    if (kind_ == Kind::plane) return false;
    if (v.kind_ == Kind::finite_union) {
      for (const auto& q : v.parts_)
        if (subset_of(q)) return true;
      return false;
    }
    // this is a disc or annulus, v a disc or annulus
    if (!dist_le(center_, v.center_, v.outer_ - outer_)) return false;
    if (v.kind_ == Kind::disc) return true;
    if (kind_ == Kind::disc) return dist_ge(center_, v.center_, outer_ + v.inner_);
    // annulus in annulus: v's hole sits in this hole, or beyond this outer circle
    return dist_le(center_, v.center_, inner_ - v.inner_) || dist_ge(center_, v.center_, outer_ + v.inner_);
  }

  bool disjoint_from(const OpenSet& v) const {
    if (kind_ == Kind::finite_union) {
      for (const auto& p : parts_)
        if (!p.disjoint_from(v)) return false;
      return true;
    }
    if (v.kind_ == Kind::finite_union) return v.disjoint_from(*this);
    if (kind_ == Kind::plane || v.kind_ == Kind::plane) return false;
    if (dist_ge(center_, v.center_, outer_ + v.outer_)) return true;
    // one set inside the other's hole
    if (v.kind_ == Kind::annulus && dist_le(center_, v.center_, v.inner_ - outer_)) return true;
    if (kind_ == Kind::annulus && dist_le(v.center_, center_, inner_ - v.outer_)) return true;
    return false;
  }

  /// Image under z |-> lambda z + w; needs a rational |lambda|.
  OpenSet affine_image(const GaussianRational& lambda, const GaussianRational& w) const {
    Rational scale;
    if (!exact_sqrt(lambda.norm2(), scale)) throw std::invalid_argument("affine image needs |lambda| rational");
    switch (kind_) {
      case Kind::plane: return *this;
      case Kind::disc: return disc(lambda * center_ + w, scale * outer_);
      case Kind::annulus: return annulus(lambda * center_ + w, scale * inner_, scale * outer_);
      case Kind::finite_union: {
        std::vector<OpenSet> parts;
        for (const auto& p : parts_) parts.push_back(p.affine_image(lambda, w));
        return union_of(parts);
      }
    }
    return *this;
  }

  std::string str() const {
    switch (kind_) {
      case Kind::plane: return "C";
      case Kind::disc: return "B(" + center_.str() + ", " + outer_.get_str() + ")";
      case Kind::annulus: return "A(" + center_.str() + ", " + inner_.get_str() + ", " + outer_.get_str() + ")";
      case Kind::finite_union: {
        std::string s;
        for (const auto& p : parts_) s += (s.empty() ? "" : " u ") + p.str();
        return s;
      }
    }
    return "?";
  }

  friend bool operator==(const OpenSet& a, const OpenSet& b) {
    return a.kind_ == b.kind_ && a.center_ == b.center_ && a.inner_ == b.inner_ && a.outer_ == b.outer_ && a.parts_ == b.parts_;
  }

 private:
  explicit OpenSet(Kind k) : kind_(k) {}

  Kind kind_;
  GaussianRational center_;
  Rational inner_ = 0;
  Rational outer_ = 0;
  std::vector<OpenSet> parts_;
};

}  // namespace voxfact
