#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "discq/rational.hpp"

namespace discq {

inline Rat dot(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: size mismatch");
  Rat s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline RatVec add(const RatVec& a, const RatVec& b) {
  RatVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline RatVec sub(const RatVec& a, const RatVec& b) {
  RatVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline RatVec scale(const Rat& c, const RatVec& a) {
  RatVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = c * a[i];
  return out;
}

inline RatVec neg(const RatVec& a) { return scale(Rat(-1), a); }

inline Rat norm1(const RatVec& a) {
  Rat s(0);
  for (const Rat& x : a) s += abs(x);
  return s;
}

inline Rat norm_sq(const RatVec& a) { return dot(a, a); }

/// Row-reduction workhorse. Rows are modified in place; returns pivot columns.
inline std::vector<std::size_t> rref(RatMat& rows) {
  std::vector<std::size_t> pivots;
  if (rows.empty()) return pivots;
  std::size_t ncol = rows[0].size(), r = 0;
  for (std::size_t c = 0; c < ncol && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && rows[p][c] == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[r], rows[p]);
    Rat inv = 1 / rows[r][c];
    for (auto& x : rows[r]) x *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      Rat f = rows[i][c];
      for (std::size_t j = 0; j < ncol; ++j) rows[i][j] -= f * rows[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  rows.resize(r, RatVec(ncol, Rat(0)));
  return pivots;
}

inline std::size_t rank_exact(const RatMat& vectors) {
  RatMat rows = vectors;
  return rref(rows).size();
}

inline bool linearly_independent(const RatMat& vectors) {
  return rank_exact(vectors) == vectors.size();
}

/// Basis of {x : rows·x = 0}, exact.
inline RatMat nullspace(const RatMat& rows_in, std::size_t dim) {
  RatMat rows = rows_in;
  for (auto& r : rows)
    if (r.size() != dim) throw DimensionMismatch("nullspace: row size");
  std::vector<std::size_t> pivots = rref(rows);
  std::vector<bool> is_pivot(dim, false);
  for (std::size_t c : pivots) is_pivot[c] = true;
  RatMat basis;
  for (std::size_t c = 0; c < dim; ++c) {
    if (is_pivot[c]) continue;
    RatVec v(dim, Rat(0));
    v[c] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -rows[r][c];
    basis.push_back(v);
  }
  return basis;
}

/// Solves rows·x = rhs; returns nullopt when inconsistent. Underdetermined
/// systems get the particular solution with free variables at zero.
inline std::optional<RatVec> solve_linear(const RatMat& rows_in, const RatVec& rhs,
                                          std::size_t dim) {
  RatMat aug = rows_in;
  for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(rhs[i]);
  std::vector<std::size_t> pivots = rref(aug);
  for (std::size_t r = 0; r < pivots.size(); ++r)
    if (pivots[r] == dim) return std::nullopt;  // pivot in rhs column
  RatVec x(dim, Rat(0));
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug[r][dim];
  return x;
}

/// Coordinates of v in the span of basis, or nullopt when v is outside it.
inline std::optional<RatVec> coordinates_in_span(const RatMat& basis, const RatVec& v) {
  if (basis.empty()) return is_zero(v) ? std::optional<RatVec>(RatVec{}) : std::nullopt;
  std::size_t dim = v.size();
  RatMat cols(dim, RatVec(basis.size(), Rat(0)));
  for (std::size_t j = 0; j < basis.size(); ++j)
    for (std::size_t i = 0; i < dim; ++i) cols[i][j] = basis[j][i];
  return solve_linear(cols, v, basis.size());
}

inline bool in_span(const RatMat& basis, const RatVec& v) {
  return coordinates_in_span(basis, v).has_value();
}

/// Reduces v modulo the row space of basis (basis in RREF): canonical coset
/// representative used when normalizing rays against a lineality space.
inline RatVec reduce_mod_rowspace(RatMat basis, const RatVec& v) {
  std::vector<std::size_t> pivots = rref(basis);
  RatVec out = v;
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    Rat f = out[pivots[r]];
    if (f == 0) continue;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] -= f * basis[r][j];
  }
  return out;
}

inline Eigen::MatrixXd to_eigen(const std::vector<std::vector<double>>& cols) {
  if (cols.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd M(cols[0].size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < cols[j].size(); ++i) M(i, j) = cols[j][i];
  return M;
}

/// Numerical rank: column-pivoted QR, threshold relative to the largest pivot.
inline std::size_t rank_double(const std::vector<std::vector<double>>& vectors,
                               double tol = 1e-8) {
  if (vectors.empty()) return 0;
  Eigen::MatrixXd M = to_eigen(vectors);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  Eigen::VectorXd diag = qr.matrixQR().diagonal().cwiseAbs();
  if (diag.size() == 0) return 0;
  double top = diag.maxCoeff();
  if (top == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(diag.size(), M.cols()); ++i)
    if (diag(i) > tol * top) ++r;
  return r;
}

}  // namespace discq
