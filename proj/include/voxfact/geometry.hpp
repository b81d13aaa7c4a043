#pragma once

// Exact plane geometry over Gaussian-rational points and rational radii.
// Distances are never square-rooted: every test compares squared lengths.

#include <stdexcept>

#include "voxfact/scalar.hpp"

namespace voxfact {

inline Rational dist2(const GaussianRational& a, const GaussianRational& b) { return (a - b).norm2(); }

/// |a - b| < r
inline bool dist_lt(const GaussianRational& a, const GaussianRational& b, const Rational& r) {
  return sgn(r) > 0 && dist2(a, b) < r * r;
}

/// |a - b| <= r
inline bool dist_le(const GaussianRational& a, const GaussianRational& b, const Rational& r) {
  return sgn(r) >= 0 && dist2(a, b) <= r * r;
}

/// |a - b| > r
inline bool dist_gt(const GaussianRational& a, const GaussianRational& b, const Rational& r) {
  return sgn(r) < 0 || dist2(a, b) > r * r;
}

/// |a - b| >= r
inline bool dist_ge(const GaussianRational& a, const GaussianRational& b, const Rational& r) {
  return sgn(r) <= 0 || dist2(a, b) >= r * r;
}

/// A circle |z - center| = radius with rational radius.
struct Circle {
  GaussianRational center;
  Rational radius;
};

/// Closed disc of the first circle inside the open disc of the second.
inline bool closed_disc_inside(const Circle& inner, const Circle& outer) {
  return dist_lt(inner.center, outer.center, outer.radius - inner.radius);
}

/// Closed discs do not meet.
inline bool closed_discs_disjoint(const Circle& a, const Circle& b) {
  return dist_gt(a.center, b.center, a.radius + b.radius);
}

/// The two circles (as curves) do not meet.
inline bool circles_disjoint(const Circle& a, const Circle& b) {
  return closed_discs_disjoint(a, b) || closed_disc_inside(a, b) || closed_disc_inside(b, a);
}

/// Point strictly inside the circle's disc.
inline bool inside(const GaussianRational& p, const Circle& c) { return dist_lt(p, c.center, c.radius); }

/// Point on the circle itself.
inline bool on_circle(const GaussianRational& p, const Circle& c) { return dist2(p, c.center) == c.radius * c.radius; }

inline Rational real_part_checked(const Scalar& s, const char* what) {
  if (!s.is_exact() || !s.exact().is_real()) throw std::invalid_argument(std::string(what) + " must be an exact real rational");
  return s.exact().re();
}

}  // namespace voxfact
