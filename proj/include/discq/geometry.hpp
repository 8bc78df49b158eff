#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "discq/linalg.hpp"
#include "discq/lp.hpp"
#include "discq/rational.hpp"

namespace discq {

// H-representation of one convex polyhedral piece:
//   <normals[j], x> <= rhs[j]   (is_eq[j] == false)
//   <normals[j], x>  = rhs[j]   (is_eq[j] == true)
struct Polyhedron {
  RatMat normals;
  RatVec rhs;
  std::vector<bool> is_eq;

  Polyhedron() = default;
  Polyhedron(RatMat n, RatVec r, std::vector<bool> eq)
      : normals(std::move(n)), rhs(std::move(r)), is_eq(std::move(eq)) {
    if (normals.size() != rhs.size() || normals.size() != is_eq.size())
      throw DimensionMismatch("Polyhedron: row count mismatch");
    for (const RatVec& row : normals) {
      if (row.size() != dim()) throw DimensionMismatch("Polyhedron: mixed row dims");
      if (is_zero(row)) throw DimensionMismatch("Polyhedron: zero normal row");
    }
  }

  std::size_t dim() const { return normals.empty() ? 0 : normals[0].size(); }
  std::size_t rows() const { return normals.size(); }

  void add_le(RatVec n, Rat r) {
    normals.push_back(std::move(n));
    rhs.push_back(std::move(r));
    is_eq.push_back(false);
  }
  void add_eq(RatVec n, Rat r) {
    normals.push_back(std::move(n));
    rhs.push_back(std::move(r));
    is_eq.push_back(true);
  }

  /// Box [lo1,hi1]x...x[lod,hid]; unbounded sides passed as nullopt.
  static Polyhedron box(const std::vector<std::pair<std::optional<Rat>, std::optional<Rat>>>& b) {
    Polyhedron P;
    std::size_t d = b.size();
    for (std::size_t j = 0; j < d; ++j) {
      RatVec ej(d, Rat(0));
      ej[j] = 1;
      if (b[j].first && b[j].second && *b[j].first == *b[j].second) {
        P.add_eq(ej, *b[j].first);
        continue;
      }
      if (b[j].second) P.add_le(ej, *b[j].second);
      if (b[j].first) P.add_le(neg(ej), -*b[j].first);
    }
    return P;
  }

  Rat max_violation(const RatVec& x) const {
    Rat worst(0);
    for (std::size_t j = 0; j < rows(); ++j) {
      Rat v = dot(normals[j], x) - rhs[j];
      if (is_eq[j]) v = abs(v);
      if (v > worst) worst = v;
    }
    return worst;
  }

  bool contains(const RatVec& x, const Rat& tol = Rat(0)) const {
    return max_violation(x) <= tol;
  }

  bool empty() const {
    LpProblem lp;
    for (std::size_t v = 0; v < dim(); ++v) lp.add_var(LpProblem::Sign::Free);
    for (std::size_t j = 0; j < rows(); ++j)
      lp.add_row(normals[j], is_eq[j] ? LpProblem::Rel::EQ : LpProblem::Rel::LE, rhs[j]);
    return !lp.feasible();
  }
};

// Pair (rays, lines) carrying cone(rays) + span(lines); the universal normal
// cone representation. `independent` marks that rays ∪ lines is linearly
// independent (the reduced-generator case).
struct ConeGenerators {
  RatMat rays;
  RatMat lines;
  std::size_t dim = 0;
  bool independent = false;

  bool trivial() const { return rays.empty() && lines.empty(); }
};

/// Indices of inequality rows active at x (equality rows are always active
/// for feasible x and tracked separately downstream).
inline std::vector<std::size_t> active_set(const Polyhedron& C, const RatVec& x,
                                           const Rat& tol = Rat(0)) {
  if (x.size() != C.dim()) throw DimensionMismatch("active_set: point dim");
  if (!C.contains(x, tol)) throw InfeasiblePoint("active_set: point outside polyhedron");
  std::vector<std::size_t> act;
  for (std::size_t j = 0; j < C.rows(); ++j) {
    if (C.is_eq[j]) continue;
    if (abs(dot(C.normals[j], x) - C.rhs[j]) <= tol) act.push_back(j);
  }
  return act;
}

namespace detail {

/// Extreme rays of the pointed cone {z : rows·z <= 0} in R^k via facial
/// enumeration: an extreme ray is pinned by k-1 linearly independent active
/// rows. Assumes pointedness (callers quotient out the lineality first).
inline RatMat pointed_extreme_rays(const RatMat& rows, std::size_t k) {
  RatMat out;
  if (k == 0) return out;
  auto in_cone = [&](const RatVec& d) {
    for (const RatVec& r : rows)
      if (dot(r, d) > 0) return false;
    return true;
  };
  if (k == 1) {
    RatVec d{Rat(1)};
    if (in_cone(d)) out.push_back(primitive(d));
    RatVec dn{Rat(-1)};
    if (in_cone(dn)) out.push_back(primitive(dn));
    return out;
  }
  std::size_t nr = rows.size();
  if (nr + 1 < k) return out;  // pointed cone needs >= k-1 facets through 0
  // iterate over (k-1)-subsets of rows
  std::vector<std::size_t> comb;
  comb.reserve(k - 1);
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (comb.size() == k - 1) {
      RatMat sel;
      for (std::size_t i : comb) sel.push_back(rows[i]);
      RatMat ns = nullspace(sel, k);
      if (ns.size() == 1) {
        RatVec d = primitive(ns[0]);
        if (in_cone(d))
          out.push_back(d);
        else {
          RatVec dn = neg(d);
          if (in_cone(dn)) out.push_back(dn);
        }
      }
      return;
    }
    for (std::size_t i = start; i < nr; ++i) {
      comb.push_back(i);
      self(self, i + 1);
      comb.pop_back();
    }
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end(), lex_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline RatMat mat_mul(const RatMat& A, const RatMat& B_cols) {
  // A: r x s (rows), B_cols: list of s-dim columns; result rows r over columns
  RatMat out(A.size(), RatVec(B_cols.size(), Rat(0)));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < B_cols.size(); ++j) out[i][j] = dot(A[i], B_cols[j]);
  return out;
}

inline RatVec combine(const RatMat& basis, const RatVec& coeffs) {
  RatVec v(basis.empty() ? 0 : basis[0].size(), Rat(0));
  for (std::size_t i = 0; i < basis.size(); ++i) v = add(v, scale(coeffs[i], basis[i]));
  return v;
}

}  // namespace detail

/// Homogeneous H-rep -> minimal generator pair: extreme rays plus a lineality
/// basis, exact. Input cone {v : <c,v> <= 0 for ineq rows, <c,v> = 0 for eq}.
inline ConeGenerators hrep_to_generators(const RatMat& ineq, const RatMat& eq, std::size_t dim) {
  ConeGenerators g;
  g.dim = dim;
  RatMat all = ineq;
  all.insert(all.end(), eq.begin(), eq.end());
  RatMat lineality = nullspace(all, dim);  // {v : Av = 0, Bv = 0}
  // parametrize {Bv = 0}
  RatMat N = eq.empty() ? RatMat() : nullspace(eq, dim);
  if (eq.empty()) {
    N.clear();
    for (std::size_t i = 0; i < dim; ++i) {
      RatVec e(dim, Rat(0));
      e[i] = 1;
      N.push_back(e);
    }
  }
  std::size_t k = N.size();
  if (k > 0) {
    // inequality rows in y coordinates
    RatMat Ay;
    for (const RatVec& row : ineq) {
      RatVec r(k);
      for (std::size_t j = 0; j < k; ++j) r[j] = dot(row, N[j]);
      Ay.push_back(r);
    }
    // lineality in y coordinates
    RatMat Ly = nullspace(Ay, k);
    // orthogonal complement W of Ly inside R^k
    RatMat W;
    if (Ly.empty()) {
      for (std::size_t i = 0; i < k; ++i) {
        RatVec e(k, Rat(0));
        e[i] = 1;
        W.push_back(e);
      }
    } else {
      W = nullspace(Ly, k);
    }
    if (!W.empty()) {
      RatMat Az;  // inequality rows in z coordinates of W
      for (const RatVec& ry : Ay) {
        RatVec r(W.size());
        for (std::size_t j = 0; j < W.size(); ++j) r[j] = dot(ry, W[j]);
        Az.push_back(r);
      }
      RatMat zrays = detail::pointed_extreme_rays(Az, W.size());
      for (const RatVec& z : zrays) {
        RatVec y = detail::combine(W, z);
        g.rays.push_back(detail::combine(N, y));
      }
    }
  }
  g.lines = lineality;
  // canonical form: RREF-primitive lines, rays reduced mod lineality
  RatMat lr = g.lines;
  rref(lr);
  for (auto& row : lr) row = primitive(row);
  g.lines = lr;
  RatMat rays;
  for (const RatVec& r : g.rays) {
    RatVec red = primitive(reduce_mod_rowspace(g.lines, r));
    if (!is_zero(red)) rays.push_back(red);
  }
  std::sort(rays.begin(), rays.end(), lex_less);
  rays.erase(std::unique(rays.begin(), rays.end()), rays.end());
  g.rays = rays;
  RatMat joint = g.rays;
  joint.insert(joint.end(), g.lines.begin(), g.lines.end());
  g.independent = linearly_independent(joint);
  return g;
}

/// Generator pair -> homogeneous H-rep via polarity: the polar cone has
/// H-rep with the generators as normals, and its generators are the facet
/// normals of the original cone.
struct HomogeneousHRep {
  RatMat ineq;  // <c, v> <= 0
  RatMat eq;    // <c, v> =  0
};

inline HomogeneousHRep generators_to_hrep(const ConeGenerators& g) {
  ConeGenerators polar = hrep_to_generators(g.rays, g.lines, g.dim);
  return {polar.rays, polar.lines};
}

/// Round-trip canonicalization (minimal extreme rays + lineality basis).
inline ConeGenerators canonical_cone(const ConeGenerators& g) {
  HomogeneousHRep h = generators_to_hrep(g);
  return hrep_to_generators(h.ineq, h.eq, g.dim);
}

/// Exact membership v ∈ cone(rays) + span(lines), by rational LP.
inline bool cone_member(const ConeGenerators& g, const RatVec& v) {
  if (v.size() != g.dim) throw DimensionMismatch("cone_member: dim");
  LpProblem lp;
  for (std::size_t i = 0; i < g.rays.size(); ++i) lp.add_var(LpProblem::Sign::NonNeg);
  for (std::size_t i = 0; i < g.lines.size(); ++i) lp.add_var(LpProblem::Sign::Free);
  for (std::size_t d = 0; d < g.dim; ++d) {
    RatVec row;
    row.reserve(lp.num_vars());
    for (const RatVec& r : g.rays) row.push_back(r[d]);
    for (const RatVec& l : g.lines) row.push_back(l[d]);
    lp.add_row(row, LpProblem::Rel::EQ, v[d]);
  }
  return lp.feasible();
}

inline bool cone_contains(const ConeGenerators& outer, const ConeGenerators& inner) {
  for (const RatVec& r : inner.rays)
    if (!cone_member(outer, r)) return false;
  for (const RatVec& l : inner.lines)
    if (!cone_member(outer, l) || !cone_member(outer, neg(l))) return false;
  return true;
}

inline bool cone_equal(const ConeGenerators& a, const ConeGenerators& b) {
  return cone_contains(a, b) && cone_contains(b, a);
}

/// Normal cone of convex analysis at x ∈ C: cone of active inequality
/// normals plus the span of equality normals, returned in reduced form.
inline ConeGenerators normal_cone(const Polyhedron& C, const RatVec& x,
                                  const Rat& tol = Rat(0)) {
  std::vector<std::size_t> act = active_set(C, x, tol);
  ConeGenerators raw;
  raw.dim = C.dim();
  for (std::size_t j : act) raw.rays.push_back(C.normals[j]);
  for (std::size_t j = 0; j < C.rows(); ++j)
    if (C.is_eq[j]) raw.lines.push_back(C.normals[j]);
  return canonical_cone(raw);
}

struct Projection {
  RatVec point;
  Rat dist_sq;
  double distance() const { return std::sqrt(dist_sq.get_d()); }
};

/// Euclidean projection onto a polyhedron, exact: active-set enumeration over
/// linearly independent row subsets, unique KKT point wins.
inline Projection project(const Polyhedron& C, const RatVec& y) {
  if (y.size() != C.dim()) throw DimensionMismatch("project: point dim");
  if (C.contains(y)) return {y, Rat(0)};
  std::vector<std::size_t> eq_idx, ineq_idx;
  for (std::size_t j = 0; j < C.rows(); ++j)
    (C.is_eq[j] ? eq_idx : ineq_idx).push_back(j);
  // linearly independent skeleton of the equality rows
  std::vector<std::size_t> eq0;
  {
    RatMat acc;
    for (std::size_t j : eq_idx) {
      acc.push_back(C.normals[j]);
      if (rank_exact(acc) == acc.size())
        eq0.push_back(j);
      else
        acc.pop_back();
    }
  }
  std::size_t ni = ineq_idx.size();
  for (std::size_t mask = 0; mask < (std::size_t(1) << ni); ++mask) {
    std::vector<std::size_t> rows = eq0;
    for (std::size_t t = 0; t < ni; ++t)
      if (mask & (std::size_t(1) << t)) rows.push_back(ineq_idx[t]);
    RatMat A;
    for (std::size_t j : rows) A.push_back(C.normals[j]);
    if (!linearly_independent(A)) continue;
    // solve Gram system: G nu = A y - alpha ; z = y - A^T nu
    RatMat G(A.size(), RatVec(A.size(), Rat(0)));
    RatVec rhs(A.size());
    for (std::size_t i = 0; i < A.size(); ++i) {
      for (std::size_t j = 0; j < A.size(); ++j) G[i][j] = dot(A[i], A[j]);
      rhs[i] = dot(A[i], y) - C.rhs[rows[i]];
    }
    auto nu = solve_linear(G, rhs, A.size());
    if (!nu) continue;
    bool dual_ok = true;
    for (std::size_t i = eq0.size(); i < rows.size(); ++i)
      if ((*nu)[i] < 0) {
        dual_ok = false;
        break;
      }
    if (!dual_ok) continue;
    RatVec z = y;
    for (std::size_t i = 0; i < A.size(); ++i) z = sub(z, scale((*nu)[i], A[i]));
    if (!C.contains(z)) continue;
    // KKT point of a strictly convex problem: this is the projection
    return {z, norm_sq(sub(y, z))};
  }
  throw EmptyPolyhedron("project: empty polyhedron");
}

/// Numerical rank of a vector family; exact overload for rational input.
inline std::size_t rank(const RatMat& vectors) { return rank_exact(vectors); }
inline std::size_t rank(const std::vector<std::vector<double>>& vectors, double tol = 1e-8) {
  return rank_double(vectors, tol);
}

}  // namespace discq
