#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "discq/geometry.hpp"

namespace discq {

class TagMismatch : public std::runtime_error {
 public:
  explicit TagMismatch(const std::string& what) : std::runtime_error(what) {}
};

// Finite union of convex polyhedral pieces, Γ = C_1 ∪ ... ∪ C_R.
struct DisjunctiveSet {
  enum class Tag { Generic, BoxPair, OmegaE, OmegaV, OmegaS };

  std::vector<Polyhedron> pieces;
  Tag tag = Tag::Generic;

  DisjunctiveSet() = default;
  explicit DisjunctiveSet(std::vector<Polyhedron> ps, Tag t = Tag::Generic)
      : pieces(std::move(ps)), tag(t) {
    if (pieces.empty()) throw DimensionMismatch("DisjunctiveSet: no pieces");
    for (const Polyhedron& p : pieces)
      if (p.dim() != dim()) throw DimensionMismatch("DisjunctiveSet: mixed piece dims");
  }

  std::size_t dim() const { return pieces[0].dim(); }

  // R_+ x {0}  ∪  {0} x R_+
  static DisjunctiveSet omega_E() {
    Polyhedron c1, c2;
    c1.add_le(rat_vec({-1, 0}), Rat(0));
    c1.add_eq(rat_vec({0, 1}), Rat(0));
    c2.add_eq(rat_vec({1, 0}), Rat(0));
    c2.add_le(rat_vec({0, -1}), Rat(0));
    return DisjunctiveSet({c1, c2}, Tag::OmegaE);
  }

  // R_- x R_+  ∪  R x {0}
  static DisjunctiveSet omega_V() {
    Polyhedron c1, c2;
    c1.add_le(rat_vec({1, 0}), Rat(0));
    c1.add_le(rat_vec({0, -1}), Rat(0));
    c2.add_eq(rat_vec({0, 1}), Rat(0));
    return DisjunctiveSet({c1, c2}, Tag::OmegaV);
  }

  // R x {0}  ∪  {0} x R
  static DisjunctiveSet omega_S() {
    Polyhedron c1, c2;
    c1.add_eq(rat_vec({0, 1}), Rat(0));
    c2.add_eq(rat_vec({1, 0}), Rat(0));
    return DisjunctiveSet({c1, c2}, Tag::OmegaS);
  }

  static DisjunctiveSet of_tag(Tag t) {
    switch (t) {
      case Tag::OmegaE:
        return omega_E();
      case Tag::OmegaV:
        return omega_V();
      case Tag::OmegaS:
        return omega_S();
      default:
        throw TagMismatch("of_tag: generic tag has no closed form");
    }
  }
};

inline Rat dist_sq_to_piece(const Polyhedron& C, const RatVec& y) {
  return project(C, y).dist_sq;
}

/// min_r d_{C_r}(y), exact squared value.
inline Rat distance_sq(const DisjunctiveSet& G, const RatVec& y) {
  std::optional<Rat> best;
  for (const Polyhedron& C : G.pieces) {
    try {
      Rat d = dist_sq_to_piece(C, y);
      if (!best || d < *best) best = d;
    } catch (const EmptyPolyhedron&) {
    }
  }
  if (!best) throw EmptyPolyhedron("distance: all pieces empty");
  return *best;
}

inline double distance(const DisjunctiveSet& G, const RatVec& y) {
  return std::sqrt(distance_sq(G, y).get_d());
}

/// All r with d_{C_r}(x) <= tol.
inline std::vector<std::size_t> active_pieces(const DisjunctiveSet& G, const RatVec& x,
                                              const Rat& tol = Rat(0)) {
  std::vector<std::size_t> act;
  for (std::size_t r = 0; r < G.pieces.size(); ++r) {
    if (G.pieces[r].contains(x)) {
      act.push_back(r);
      continue;
    }
    if (tol > 0) {
      try {
        if (dist_sq_to_piece(G.pieces[r], x) <= tol * tol) act.push_back(r);
      } catch (const EmptyPolyhedron&) {
      }
    }
  }
  if (act.empty()) throw InfeasiblePoint("active_pieces: point not in the disjunctive set");
  return act;
}

/// Regular normal cone of the union: intersection of the active pieces'
/// normal cones, via V-rep -> H-rep concatenation -> V-rep.
inline ConeGenerators regular_nc(const DisjunctiveSet& G, const RatVec& x,
                                 const Rat& tol = Rat(0)) {
  std::vector<std::size_t> act = active_pieces(G, x, tol);
  RatMat ineq, eq;
  for (std::size_t r : act) {
    ConeGenerators nc = normal_cone(G.pieces[r], x, tol);
    HomogeneousHRep h = generators_to_hrep(nc);
    ineq.insert(ineq.end(), h.ineq.begin(), h.ineq.end());
    eq.insert(eq.end(), h.eq.begin(), h.eq.end());
  }
  return hrep_to_generators(ineq, eq, G.dim());
}

// One realizable activity pattern near the base point, together with the
// regular normal cone that is constant on it (Eq. 2.6 machinery).
struct Stratum {
  std::vector<std::size_t> occupied;
  RatVec representative;
  ConeGenerators cone;
};

struct LimitingGenerators {
  RatMat rays;   // A^I: union of stratum ray sets, canonical
  RatMat lines;  // A^E
  std::vector<Stratum> strata;
};

namespace detail {

struct PieceActivity {
  std::vector<std::size_t> active_ineq;  // rows that may flip nearby
  std::vector<std::size_t> eqs;
};

/// max t s.t. strict/equality system on u is satisfiable in the unit box;
/// returns u* when t* > 0.
inline std::optional<RatVec> strict_system_witness(const RatMat& eq_rows,
                                                   const RatMat& strict_neg_rows,
                                                   const RatMat& strict_pos_rows,
                                                   std::size_t dim) {
  LpProblem lp;
  for (std::size_t i = 0; i < dim; ++i) lp.add_var(LpProblem::Sign::Free);
  std::size_t tvar = lp.add_var(LpProblem::Sign::NonNeg);
  std::size_t nv = dim + 1;
  auto row_of = [&](const RatVec& c, const Rat& tcoef) {
    RatVec r(nv, Rat(0));
    for (std::size_t i = 0; i < dim; ++i) r[i] = c[i];
    r[tvar] = tcoef;
    return r;
  };
  for (const RatVec& c : eq_rows) lp.add_row(row_of(c, Rat(0)), LpProblem::Rel::EQ, Rat(0));
  for (const RatVec& c : strict_neg_rows)
    lp.add_row(row_of(c, Rat(1)), LpProblem::Rel::LE, Rat(0));  // <c,u> <= -t
  for (const RatVec& c : strict_pos_rows)
    lp.add_row(row_of(neg(c), Rat(1)), LpProblem::Rel::LE, Rat(0));  // <c,u> >= t
  for (std::size_t i = 0; i < dim; ++i) {
    RatVec b(nv, Rat(0));
    b[i] = 1;
    lp.add_row(b, LpProblem::Rel::LE, Rat(1));
    b[i] = -1;
    lp.add_row(b, LpProblem::Rel::LE, Rat(1));
  }
  {
    RatVec b(nv, Rat(0));
    b[tvar] = 1;
    lp.add_row(b, LpProblem::Rel::LE, Rat(1));
  }
  RatVec obj(nv, Rat(0));
  obj[tvar] = 1;
  LpSolution s = lp.solve(obj);
  if (s.status != LpStatus::Optimal || s.objective <= 0) return std::nullopt;
  RatVec u(s.x.begin(), s.x.begin() + dim);
  return u;
}

inline bool cone_gen_equal(const ConeGenerators& a, const ConeGenerators& b) {
  return a.rays == b.rays && a.lines == b.lines;  // canonical forms compare directly
}

}  // namespace detail

/// Enumerates the realizable local strata around xbar and returns the union
/// of their reduced generator pairs plus the stratum list (Eqs. 2.6/2.7).
inline LimitingGenerators limiting_nc(const DisjunctiveSet& G, const RatVec& xbar,
                                      const Rat& tol = Rat(0)) {
  std::size_t p = G.dim();
  std::vector<std::size_t> act = active_pieces(G, xbar, tol);  // throws if infeasible

  // activity data per active piece
  std::vector<detail::PieceActivity> pa(act.size());
  for (std::size_t k = 0; k < act.size(); ++k) {
    const Polyhedron& C = G.pieces[act[k]];
    for (std::size_t j = 0; j < C.rows(); ++j) {
      Rat slack = C.rhs[j] - dot(C.normals[j], xbar);
      if (C.is_eq[j])
        pa[k].eqs.push_back(j);
      else if (abs(slack) <= tol)
        pa[k].active_ineq.push_back(j);
    }
  }

  // safety radius: inactive rows stay inactive, inactive pieces stay out
  Rat delta(1);
  auto shrink = [&](const Rat& margin, const RatVec& normal) {
    Rat cand = margin / (2 * norm1(normal));
    if (cand < delta) delta = cand;
  };
  for (std::size_t k = 0; k < act.size(); ++k) {
    const Polyhedron& C = G.pieces[act[k]];
    for (std::size_t j = 0; j < C.rows(); ++j) {
      if (C.is_eq[j]) continue;
      Rat slack = C.rhs[j] - dot(C.normals[j], xbar);
      if (slack > tol) shrink(slack, C.normals[j]);
    }
  }
  for (std::size_t r = 0; r < G.pieces.size(); ++r) {
    if (std::find(act.begin(), act.end(), r) != act.end()) continue;
    const Polyhedron& C = G.pieces[r];
    Rat best(-1);
    RatVec best_normal;
    for (std::size_t j = 0; j < C.rows(); ++j) {
      Rat v = dot(C.normals[j], xbar) - C.rhs[j];
      if (C.is_eq[j]) v = abs(v);
      if (v > best) {
        best = v;
        best_normal = C.normals[j];
      }
    }
    if (best > 0) shrink(best, best_normal);
  }

  LimitingGenerators out;

  // enumerate occupancy masks and active-subset choices
  std::size_t n_act = act.size();
  for (std::size_t occ_mask = 1; occ_mask < (std::size_t(1) << n_act); ++occ_mask) {
    // unoccupied pieces need a row that can actually be violated nearby
    bool possible = true;
    std::vector<std::size_t> occupied, unoccupied;
    for (std::size_t k = 0; k < n_act; ++k) {
      if (occ_mask & (std::size_t(1) << k))
        occupied.push_back(k);
      else {
        if (pa[k].active_ineq.empty() && pa[k].eqs.empty()) possible = false;
        unoccupied.push_back(k);
      }
    }
    if (!possible) continue;

    // subset choice per occupied piece
    std::vector<std::size_t> sub_mask(occupied.size(), 0);
    std::function<void(std::size_t)> rec_subsets = [&](std::size_t pos) {
      if (pos == occupied.size()) {
        // assemble the stratum system
        RatMat eq_rows, strict_neg;
        for (std::size_t t = 0; t < occupied.size(); ++t) {
          std::size_t k = occupied[t];
          const Polyhedron& C = G.pieces[act[k]];
          for (std::size_t j : pa[k].eqs) eq_rows.push_back(C.normals[j]);
          for (std::size_t a = 0; a < pa[k].active_ineq.size(); ++a) {
            std::size_t j = pa[k].active_ineq[a];
            if (sub_mask[t] & (std::size_t(1) << a))
              eq_rows.push_back(C.normals[j]);
            else
              strict_neg.push_back(C.normals[j]);
          }
        }
        // violation branch per unoccupied piece
        std::vector<std::vector<RatVec>> options(unoccupied.size());
        for (std::size_t t = 0; t < unoccupied.size(); ++t) {
          std::size_t k = unoccupied[t];
          const Polyhedron& C = G.pieces[act[k]];
          for (std::size_t j : pa[k].active_ineq) options[t].push_back(C.normals[j]);
          for (std::size_t j : pa[k].eqs) {
            options[t].push_back(C.normals[j]);
            options[t].push_back(neg(C.normals[j]));
          }
        }
        std::vector<std::size_t> pick(unoccupied.size(), 0);
        std::optional<RatVec> witness;
        std::function<void(std::size_t)> rec_viol = [&](std::size_t vp) {
          if (witness) return;
          if (vp == unoccupied.size()) {
            RatMat strict_pos;
            for (std::size_t t = 0; t < unoccupied.size(); ++t)
              strict_pos.push_back(options[t][pick[t]]);
            witness = detail::strict_system_witness(eq_rows, strict_neg, strict_pos, p);
            return;
          }
          for (pick[vp] = 0; pick[vp] < options[vp].size(); ++pick[vp]) {
            rec_viol(vp + 1);
            if (witness) return;
          }
        };
        rec_viol(0);
        if (!witness) return;

        // regular normal cone on this stratum: intersect the occupied cones
        RatMat hi, he;
        for (std::size_t t = 0; t < occupied.size(); ++t) {
          std::size_t k = occupied[t];
          const Polyhedron& C = G.pieces[act[k]];
          ConeGenerators raw;
          raw.dim = p;
          for (std::size_t a = 0; a < pa[k].active_ineq.size(); ++a)
            if (sub_mask[t] & (std::size_t(1) << a))
              raw.rays.push_back(C.normals[pa[k].active_ineq[a]]);
          for (std::size_t j : pa[k].eqs) raw.lines.push_back(C.normals[j]);
          HomogeneousHRep h = generators_to_hrep(raw);
          hi.insert(hi.end(), h.ineq.begin(), h.ineq.end());
          he.insert(he.end(), h.eq.begin(), h.eq.end());
        }
        ConeGenerators cone = hrep_to_generators(hi, he, p);

        for (const Stratum& s : out.strata)
          if (detail::cone_gen_equal(s.cone, cone)) return;  // duplicate cone

        Stratum s;
        for (std::size_t t : occupied) s.occupied.push_back(act[t]);
        Rat tau = delta / (2 * std::max(Rat(1), norm1(*witness)));
        s.representative = add(xbar, scale(tau, *witness));
        s.cone = std::move(cone);
        out.strata.push_back(std::move(s));
        return;
      }
      std::size_t k = occupied[pos];
      std::size_t n = pa[k].active_ineq.size();
      for (sub_mask[pos] = 0; sub_mask[pos] < (std::size_t(1) << n); ++sub_mask[pos])
        rec_subsets(pos + 1);
    };
    rec_subsets(0);
  }

  std::sort(out.strata.begin(), out.strata.end(), [](const Stratum& a, const Stratum& b) {
    if (a.cone.lines != b.cone.lines) {
      return std::lexicographical_compare(a.cone.lines.begin(), a.cone.lines.end(),
                                          b.cone.lines.begin(), b.cone.lines.end(), lex_less);
    }
    return std::lexicographical_compare(a.cone.rays.begin(), a.cone.rays.end(),
                                        b.cone.rays.begin(), b.cone.rays.end(), lex_less);
  });

  for (const Stratum& s : out.strata) {
    for (const RatVec& r : s.cone.rays) out.rays.push_back(r);
    for (const RatVec& l : s.cone.lines) out.lines.push_back(l);
  }
  std::sort(out.rays.begin(), out.rays.end(), lex_less);
  out.rays.erase(std::unique(out.rays.begin(), out.rays.end()), out.rays.end());
  std::sort(out.lines.begin(), out.lines.end(), lex_less);
  out.lines.erase(std::unique(out.lines.begin(), out.lines.end()), out.lines.end());
  return out;
}

/// v ∈ N_Γ(xbar): membership in some stratum cone.
inline bool limiting_member(const DisjunctiveSet& G, const RatVec& xbar, const RatVec& v,
                            const Rat& tol = Rat(0)) {
  LimitingGenerators lim = limiting_nc(G, xbar, tol);
  for (const Stratum& s : lim.strata)
    if (cone_member(s.cone, v)) return true;
  return false;
}

inline bool limiting_member(const LimitingGenerators& lim, const RatVec& v) {
  for (const Stratum& s : lim.strata)
    if (cone_member(s.cone, v)) return true;
  return false;
}

/// cone(g) ⊆ K_1 ∪ ... ∪ K_n, exact: the complement of the union splits
/// into facet-violation patterns, each checked by one rational LP.
inline bool cone_in_union(const ConeGenerators& g, const std::vector<ConeGenerators>& cones) {
  if (g.trivial()) return !cones.empty();
  struct Option {
    RatVec normal;  // pattern demands <normal, v> >= 1
  };
  std::vector<std::vector<Option>> options;
  for (const ConeGenerators& K : cones) {
    HomogeneousHRep h = generators_to_hrep(K);
    std::vector<Option> opts;
    for (const RatVec& f : h.ineq) opts.push_back({f});
    for (const RatVec& f : h.eq) {
      opts.push_back({f});
      opts.push_back({neg(f)});
    }
    if (opts.empty()) return true;  // K = R^p swallows everything
    options.push_back(std::move(opts));
  }
  std::vector<std::size_t> pick(options.size(), 0);
  std::function<bool(std::size_t)> rec = [&](std::size_t pos) -> bool {
    if (pos == options.size()) {
      LpProblem lp;
      std::size_t nr = g.rays.size(), nl = g.lines.size();
      for (std::size_t i = 0; i < nr; ++i) lp.add_var(LpProblem::Sign::NonNeg);
      for (std::size_t i = 0; i < nl; ++i) lp.add_var(LpProblem::Sign::Free);
      for (std::size_t s = 0; s < options.size(); ++s) {
        const RatVec& f = options[s][pick[s]].normal;
        RatVec row(nr + nl);
        for (std::size_t i = 0; i < nr; ++i) row[i] = -dot(f, g.rays[i]);
        for (std::size_t i = 0; i < nl; ++i) row[nr + i] = -dot(f, g.lines[i]);
        lp.add_row(row, LpProblem::Rel::LE, Rat(-1));
      }
      return lp.feasible();  // found a cone point escaping every K
    }
    for (pick[pos] = 0; pick[pos] < options[pos].size(); ++pick[pos])
      if (rec(pos + 1)) return true;
    return false;
  };
  return !rec(0);
}

/// Closed-form stratum tables for the ortho sets (Example 5.1 and the §5.3
/// span formulas), bypassing the generic enumeration entirely.
inline LimitingGenerators closed_form_nc(DisjunctiveSet::Tag tag, const RatVec& y) {
  if (y.size() != 2) throw DimensionMismatch("closed_form_nc: ortho sets live in R^2");
  const Rat& y1 = y[0];
  const Rat& y2 = y[1];
  LimitingGenerators out;
  auto stratum = [&](std::vector<std::size_t> occ, RatVec rep, RatMat rays, RatMat lines) {
    ConeGenerators c;
    c.dim = 2;
    c.rays = std::move(rays);
    c.lines = std::move(lines);
    Stratum s{std::move(occ), std::move(rep), canonical_cone(c)};
    out.strata.push_back(std::move(s));
  };
  RatVec e1 = rat_vec({1, 0}), e2 = rat_vec({0, 1});
  RatVec me1 = rat_vec({-1, 0}), me2 = rat_vec({0, -1});
  Rat half(1, 2);

  switch (tag) {
    case DisjunctiveSet::Tag::OmegaE: {
      if (y1 > 0 && y2 == 0) {
        stratum({0}, y, {}, {e2});
      } else if (y1 == 0 && y2 > 0) {
        stratum({1}, y, {}, {e1});
      } else if (y1 == 0 && y2 == 0) {
        stratum({0, 1}, y, {me1, me2}, {});
        stratum({0}, rat_vec({1, 0}), {}, {e2});
        stratum({1}, rat_vec({0, 1}), {}, {e1});
      } else {
        throw InfeasiblePoint("closed_form_nc: point not in omega_E");
      }
      break;
    }
    case DisjunctiveSet::Tag::OmegaV: {
      if (y1 < 0 && y2 > 0) {
        stratum({0}, y, {}, {});
      } else if (y1 < 0 && y2 == 0) {
        stratum({0, 1}, y, {me2}, {});
        stratum({0}, {y1, -y1 * half}, {}, {});
      } else if (y1 == 0 && y2 > 0) {
        stratum({0}, y, {e1}, {});
        stratum({0}, {-y2 * half, y2}, {}, {});
      } else if (y1 > 0 && y2 == 0) {
        stratum({1}, y, {}, {e2});
      } else if (y1 == 0 && y2 == 0) {
        stratum({0, 1}, y, {me2}, {});
        stratum({0}, rat_vec({0, 1}), {e1}, {});
        stratum({1}, rat_vec({1, 0}), {}, {e2});
        stratum({0}, rat_vec({-1, 1}), {}, {});
      } else {
        throw InfeasiblePoint("closed_form_nc: point not in omega_V");
      }
      break;
    }
    case DisjunctiveSet::Tag::OmegaS: {
      if (y1 != 0 && y2 == 0) {
        stratum({0}, y, {}, {e2});
      } else if (y1 == 0 && y2 != 0) {
        stratum({1}, y, {}, {e1});
      } else if (y1 == 0 && y2 == 0) {
        stratum({0, 1}, y, {}, {});
        stratum({0}, rat_vec({1, 0}), {}, {e2});
        stratum({1}, rat_vec({0, 1}), {}, {e1});
      } else {
        throw InfeasiblePoint("closed_form_nc: point not in omega_S");
      }
      break;
    }
    default:
      throw TagMismatch("closed_form_nc: no closed form for this tag");
  }

  std::sort(out.strata.begin(), out.strata.end(), [](const Stratum& a, const Stratum& b) {
    if (a.cone.lines != b.cone.lines)
      return std::lexicographical_compare(a.cone.lines.begin(), a.cone.lines.end(),
                                          b.cone.lines.begin(), b.cone.lines.end(), lex_less);
    return std::lexicographical_compare(a.cone.rays.begin(), a.cone.rays.end(),
                                        b.cone.rays.begin(), b.cone.rays.end(), lex_less);
  });
  for (const Stratum& s : out.strata) {
    for (const RatVec& r : s.cone.rays) out.rays.push_back(r);
    for (const RatVec& l : s.cone.lines) out.lines.push_back(l);
  }
  std::sort(out.rays.begin(), out.rays.end(), lex_less);
  out.rays.erase(std::unique(out.rays.begin(), out.rays.end()), out.rays.end());
  std::sort(out.lines.begin(), out.lines.end(), lex_less);
  out.lines.erase(std::unique(out.lines.begin(), out.lines.end()), out.lines.end());
  return out;
}

}  // namespace discq
