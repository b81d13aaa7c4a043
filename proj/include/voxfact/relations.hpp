#pragma once

// Relations (the kernel of evaluation) and weight projections.

#include <map>
#include <vector>

#include "voxfact/expression.hpp"

namespace voxfact {

/// Basis of the right null space of a dense matrix over Q(i), via reduced row echelon form.
inline std::vector<std::vector<GaussianRational>> null_space(std::vector<std::vector<GaussianRational>> rows, std::size_t cols) {
  std::vector<int> pivot_of_col(cols, -1);
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && rows[p][c].is_zero()) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    GaussianRational inv = rows[r][c].reciprocal();
    for (auto& v : rows[r]) v = v * inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c].is_zero()) continue;
      GaussianRational f = rows[i][c];
      for (std::size_t j = c; j < cols; ++j) rows[i][j] = rows[i][j] - f * rows[r][j];
    }
    pivot_of_col[c] = static_cast<int>(r);
    ++r;
  }
  std::vector<std::vector<GaussianRational>> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (pivot_of_col[free] >= 0) continue;
    std::vector<GaussianRational> v(cols);
    v[free] = GaussianRational(1);
    for (std::size_t c = 0; c < cols; ++c)
      if (pivot_of_col[c] >= 0) v[c] = -rows[static_cast<std::size_t>(pivot_of_col[c])][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

inline std::size_t matrix_rank(const std::vector<std::vector<GaussianRational>>& rows, std::size_t cols) {
  return cols - null_space(rows, cols).size();
}

/// Evaluation matrix: one row per (degree, monomial) coordinate, one column per expression.
inline std::vector<std::vector<GaussianRational>> evaluation_matrix(ExpressionEvaluator& ev, const std::vector<Expression>& exprs,
                                                                    DegreeWindow w) {
  std::map<Monomial, std::vector<GaussianRational>> coords;
  for (std::size_t i = 0; i < exprs.size(); ++i) {
    GradedVector v = ev.evaluate_exact(exprs[i], w).flatten();
    for (const auto& [m, c] : v.terms()) {
      auto& row = coords[m];
      row.resize(exprs.size());
      row[i] = c;
    }
  }
  std::vector<std::vector<GaussianRational>> rows;
  for (auto& [m, row] : coords) {
    row.resize(exprs.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Exact basis of coefficient vectors c with sum_i c_i ev(x_i) = 0 in every window degree.
inline std::vector<std::vector<GaussianRational>> relation_kernel(ExpressionEvaluator& ev, const std::vector<Expression>& exprs,
                                                                  DegreeWindow w) {
  return null_space(evaluation_matrix(ev, exprs, w), exprs.size());
}

/// sum_i c_i x_i on the common carrier.
inline Expression combine(const std::vector<Expression>& exprs, const std::vector<GaussianRational>& c) {
  if (exprs.empty()) throw std::invalid_argument("combine needs at least one expression");
  Expression out(exprs.front().carrier());
  for (std::size_t i = 0; i < exprs.size(); ++i) {
    if (!(exprs[i].carrier() == out.carrier())) throw std::invalid_argument("combined expressions must share a carrier");
    out += exprs[i] * Scalar(c[i]);
  }
  return out;
}

struct WeightProjection {
  NumericVector value;  // degree-k part of the contour integral
  double leakage = 0;   // largest norm found in any other degree
  double t = 0;
  int nodes = 0;
};

/// l_k(x) = (1/2 pi i) \oint_{|q|=t} q^{-k-1} ev(sigma_(q,0) x) dq with
/// t = (1 + r/R)/2, for x supported in B_r(0).
inline WeightProjection weight_project(ExpressionEvaluator& ev, const Expression& x, int k, const Rational& r, const Rational& R,
                                       DegreeWindow w, int N = 0) {
  if (!(sgn(r) > 0 && r < R)) throw std::invalid_argument("weight projection needs 0 < r < R");
  if (!x.supported_in(OpenSet::disc(GaussianRational(0), r))) throw DomainViolation("expression not supported in B_r(0)");
  WeightProjection out;
  out.t = (1.0 + r.get_d() / R.get_d()) / 2.0;
  out.nodes = N > 0 ? N : 2 * w.hi + 16;
  EvalOptions opt;
  auto sample = [&](Complex q) {
    Expression moved = affine_act(Scalar(q), Scalar(0), x, &x.carrier());
    return ev.evaluate_numeric(moved, w, opt);
  };
  NumericProductVector total = quadrature_moment_vector(sample, Complex(0.0, 0.0), out.t, -k - 1, out.nodes);
  for (int j = w.lo; j <= w.hi; ++j) {
    if (j == k) out.value = total.component(j);
    else out.leakage = std::max(out.leakage, total.component(j).norm_inf());
  }
  return out;
}

}  // namespace voxfact
