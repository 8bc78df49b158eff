#pragma once

#include <string>
#include <vector>

#include "discq/model.hpp"
#include "discq/rng.hpp"

namespace support {

using namespace discq;

// Dimension-3 union from the piecewise-RCPLD counterexample program:
// C1 = R+ x R- x R+, C2 = {w : <a1,w> <= 0, <a2,w> <= 0},
// a1 = (1/2,-1/2,1/2), a2 = (-1/2,1,-1).
inline DisjunctiveSet counterexample_gamma() {
  Polyhedron c1, c2;
  c1.add_le(rat_vec({-1, 0, 0}), Rat(0));
  c1.add_le(rat_vec({0, 1, 0}), Rat(0));
  c1.add_le(rat_vec({0, 0, -1}), Rat(0));
  c2.add_le({Rat(1, 2), Rat(-1, 2), Rat(1, 2)}, Rat(0));
  c2.add_le({Rat(-1, 2), Rat(1), Rat(-1)}, Rat(0));
  return DisjunctiveSet({c1, c2});
}

// h1 = x^2+xy+x+y+z, h2 = x-3y-2z, Phi = (x^2-y+z, x+3y^2-z, -x+2y+z^2).
inline Program counterexample_program() {
  Program P;
  P.var_names = {"x", "y", "z"};
  P.h.push_back(parse_expr("x^2 + x*y + x + y + z", P.var_names));
  P.h.push_back(parse_expr("x - 3*y - 2*z", P.var_names));
  VectorFunc phi({parse_expr("x^2 - y + z", P.var_names),
                  parse_expr("x + 3*y^2 - z", P.var_names),
                  parse_expr("-x + 2*y + z^2", P.var_names)});
  P.blocks.push_back({phi, counterexample_gamma()});
  P.validate();
  return P;
}

/// Identity map into omega_E over (x1,x2); optional objective x1+x2.
inline Program mpec_toy(bool with_objective = false) {
  Program P;
  P.var_names = {"x1", "x2"};
  VectorFunc phi({parse_expr("x1", P.var_names), parse_expr("x2", P.var_names)});
  P.blocks.push_back({phi, DisjunctiveSet::omega_E()});
  if (with_objective) P.objective = parse_expr("x1 + x2", P.var_names);
  P.validate();
  return P;
}

inline RatVec rv(std::initializer_list<long> xs) { return rat_vec(xs); }

inline Rat rq(long n, long d = 1) { return make_rat(n, d); }

/// Random full-dimensional polyhedron through / near the origin.
inline Polyhedron random_polyhedron(Rng& rng, std::size_t dim, std::size_t rows) {
  Polyhedron P;
  for (std::size_t i = 0; i < rows; ++i) {
    RatVec n(dim);
    bool zero = true;
    for (auto& v : n) {
      long c = static_cast<long>(rng.raw() % 7) - 3;
      v = c;
      if (c != 0) zero = false;
    }
    if (zero) n[i % dim] = 1;
    long r = static_cast<long>(rng.raw() % 3);  // rhs in {0,1,2}: origin stays feasible
    P.add_le(n, Rat(r));
  }
  return P;
}

inline ConeGenerators random_cone(Rng& rng, std::size_t dim, std::size_t gens) {
  ConeGenerators g;
  g.dim = dim;
  for (std::size_t i = 0; i < gens; ++i) {
    RatVec v(dim);
    bool zero = true;
    for (auto& x : v) {
      long c = static_cast<long>(rng.raw() % 9) - 4;
      x = c;
      if (c != 0) zero = false;
    }
    if (zero) continue;
    if (rng.raw() % 4 == 0)
      g.lines.push_back(v);
    else
      g.rays.push_back(v);
  }
  return g;
}

// -- deterministic instance corpus --------------------------------------------

struct CorpusInstance {
  Program P;
  RatVec xbar;
  std::string name;
  bool p_le_2 = true;
};

inline Expr random_poly(Rng& rng, const std::vector<std::string>& vars, bool quadratic_ok) {
  std::size_t d = vars.size();
  Expr e = Expr::constant(Rat(0), d);
  for (std::size_t i = 0; i < d; ++i) {
    long c = static_cast<long>(rng.raw() % 5) - 2;
    if (c != 0) e = e + Expr::constant(Rat(c), d) * Expr::variable(i, d);
  }
  if (quadratic_ok) {
    std::size_t terms = rng.raw() % 3;
    for (std::size_t t = 0; t < terms; ++t) {
      long c = static_cast<long>(rng.raw() % 5) - 2;
      std::size_t i = rng.raw() % d, j = rng.raw() % d;
      if (c != 0)
        e = e + Expr::constant(Rat(c), d) * Expr::variable(i, d) * Expr::variable(j, d);
    }
  }
  return e;
}

/// Random affine/quadratic disjunctive programs, all feasible at the origin.
inline std::vector<CorpusInstance> implication_corpus(std::size_t count, std::uint64_t seed) {
  std::vector<CorpusInstance> out;
  Rng rng(seed);
  while (out.size() < count) {
    CorpusInstance inst;
    std::size_t d = 2 + rng.raw() % 2;
    std::vector<std::string> vars;
    for (std::size_t i = 0; i < d; ++i) vars.push_back("x" + std::to_string(i + 1));
    inst.P.var_names = vars;
    std::size_t m = rng.raw() % 3;
    for (std::size_t i = 0; i < m; ++i) inst.P.h.push_back(random_poly(rng, vars, true));
    if (rng.raw() % 2) {
      Expr g = random_poly(rng, vars, false);
      if (rng.raw() % 2) g = g - Expr::constant(Rat(1), d);  // inactive at 0
      inst.P.g.push_back(g);
    }
    std::size_t nblocks = 1 + rng.raw() % 2;
    for (std::size_t b = 0; b < nblocks; ++b) {
      DisjunctiveSet gamma = DisjunctiveSet::omega_E();
      switch (rng.raw() % 4) {
        case 0:
          gamma = DisjunctiveSet::omega_E();
          break;
        case 1:
          gamma = DisjunctiveSet::omega_V();
          break;
        case 2:
          gamma = DisjunctiveSet::omega_S();
          break;
        default:
          gamma = counterexample_gamma();
          inst.p_le_2 = false;
          break;
      }
      std::vector<Expr> comps;
      for (std::size_t k = 0; k < gamma.dim(); ++k)
        comps.push_back(random_poly(rng, vars, true));
      inst.P.blocks.push_back({VectorFunc(std::move(comps)), std::move(gamma)});
    }
    inst.xbar = RatVec(d, Rat(0));
    inst.P.validate();
    if (!is_feasible(inst.P, inst.xbar)) continue;
    inst.name = "corpus-" + std::to_string(out.size());
    out.push_back(std::move(inst));
  }
  return out;
}

/// Switching-constraint instances: blocks map into omega_S.
inline std::vector<CorpusInstance> mpsc_corpus(std::size_t count, std::uint64_t seed) {
  std::vector<CorpusInstance> out;
  Rng rng(seed);
  while (out.size() < count) {
    CorpusInstance inst;
    std::size_t d = 2 + rng.raw() % 2;
    std::vector<std::string> vars;
    for (std::size_t i = 0; i < d; ++i) vars.push_back("x" + std::to_string(i + 1));
    inst.P.var_names = vars;
    if (rng.raw() % 2) inst.P.h.push_back(random_poly(rng, vars, true));
    std::size_t nblocks = 1 + rng.raw() % 2;
    for (std::size_t b = 0; b < nblocks; ++b) {
      std::vector<Expr> comps{random_poly(rng, vars, true), random_poly(rng, vars, true)};
      inst.P.blocks.push_back({VectorFunc(std::move(comps)), DisjunctiveSet::omega_S()});
    }
    inst.xbar = RatVec(d, Rat(0));
    inst.P.validate();
    if (!is_feasible(inst.P, inst.xbar)) continue;
    inst.name = "mpsc-" + std::to_string(out.size());
    out.push_back(std::move(inst));
  }
  return out;
}

// -- independent oracles -----------------------------------------------------

/// Caratheodory-style membership oracle: v in cone(W) iff some linearly
/// independent subset of W carries v with nonnegative coordinates.
inline bool cone_member_oracle(const ConeGenerators& g, const RatVec& v) {
  if (is_zero(v)) return true;
  RatMat W = g.rays;
  for (const RatVec& l : g.lines) {
    W.push_back(l);
    W.push_back(neg(l));
  }
  std::size_t n = W.size(), dim = g.dim;
  std::vector<std::size_t> comb;
  std::function<bool(std::size_t)> rec = [&](std::size_t start) -> bool {
    if (!comb.empty()) {
      RatMat sub;
      for (std::size_t i : comb) sub.push_back(W[i]);
      if (linearly_independent(sub)) {
        auto coords = coordinates_in_span(sub, v);
        if (coords) {
          bool ok = true;
          for (const Rat& c : *coords)
            if (c < 0) ok = false;
          if (ok) return true;
        }
      } else {
        return false;  // adding more keeps it dependent
      }
    }
    if (comb.size() == dim) return false;
    for (std::size_t i = start; i < n; ++i) {
      comb.push_back(i);
      if (rec(i + 1)) return true;
      comb.pop_back();
    }
    return false;
  };
  return rec(0);
}

/// Kernel of the matrix whose columns are the given vectors.
inline RatMat nullspace_of_columns(const RatMat& cols) {
  if (cols.empty()) return {};
  std::size_t dim = cols[0].size();
  RatMat rows(dim, RatVec(cols.size(), Rat(0)));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < dim; ++i) rows[i][j] = cols[j][i];
  return nullspace(rows, cols.size());
}

/// Circuit-enumeration oracle for positive linear dependence: some minimal
/// dependence whose kernel vector has one-signed coefficients on the signed
/// part. Independent of the LP implementation path.
inline bool positive_linear_dependent_oracle(const RatMat& signed_vecs, const RatMat& free_vecs) {
  RatMat all = signed_vecs;
  all.insert(all.end(), free_vecs.begin(), free_vecs.end());
  std::size_t n = all.size();
  if (n == 0) return false;
  std::vector<std::size_t> comb;
  std::function<bool(std::size_t)> rec = [&](std::size_t start) -> bool {
    if (!comb.empty()) {
      RatMat sub;
      for (std::size_t i : comb) sub.push_back(all[i]);
      RatMat ker = nullspace_of_columns(sub);
      if (ker.size() == 1) {
        const RatVec& k = ker[0];
        bool full = true;
        for (const Rat& c : k)
          if (c == 0) full = false;
        if (full) {
          bool pos_ok = true, neg_ok = true;
          for (std::size_t t = 0; t < comb.size(); ++t) {
            if (comb[t] < signed_vecs.size()) {
              if (k[t] < 0) pos_ok = false;
              if (k[t] > 0) neg_ok = false;
            }
          }
          if (pos_ok || neg_ok) return true;
        }
      }
    }
    if (comb.size() == n) return false;
    for (std::size_t i = start; i < n; ++i) {
      comb.push_back(i);
      if (rec(i + 1)) return true;
      comb.pop_back();
    }
    return false;
  };
  return rec(0);
}

}  // namespace support
