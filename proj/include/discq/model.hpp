#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "discq/disjunctive.hpp"
#include "discq/expr.hpp"

namespace discq {

struct Block {
  VectorFunc phi;
  DisjunctiveSet gamma;
};

// The disjunctive program: g(x) <= 0, h(x) = 0, Phi_i(x) in Gamma_i.
struct Program {
  std::vector<std::string> var_names;
  std::vector<Expr> g;
  std::vector<Expr> h;
  std::vector<Block> blocks;
  std::optional<Expr> objective;
  // Optional nonsmooth hook: subdifferential samples of g_i at a point.
  // Defaults to the singleton {grad g_i(x)} when absent.
  std::function<std::vector<RatVec>(std::size_t, const RatVec&)> g_subdiff;

  std::size_t dim() const { return var_names.size(); }

  void validate() const {
    for (const Expr& e : g)
      if (e.dim() != dim()) throw DimensionMismatch("Program: g dimension");
    for (const Expr& e : h)
      if (e.dim() != dim()) throw DimensionMismatch("Program: h dimension");
    for (const Block& b : blocks) {
      if (b.phi.input_dim != dim()) throw DimensionMismatch("Program: block input dim");
      if (b.phi.output_dim() != b.gamma.dim())
        throw DimensionMismatch("Program: block output dim vs set dim");
    }
    if (objective && objective->dim() != dim())
      throw DimensionMismatch("Program: objective dimension");
  }
};

enum class NormKind { L1, L2, LInf };

inline double vec_norm(const std::vector<double>& v, NormKind n) {
  double out = 0;
  switch (n) {
    case NormKind::L1:
      for (double x : v) out += std::abs(x);
      return out;
    case NormKind::L2:
      for (double x : v) out += x * x;
      return std::sqrt(out);
    case NormKind::LInf:
      for (double x : v) out = std::max(out, std::abs(x));
      return out;
  }
  return out;
}

// ||g+|| + ||h|| + sum_i d_{Gamma_i}(Phi_i(x)) with the configured norm.
struct Residual {
  double g_plus_norm = 0;
  double h_norm = 0;
  std::vector<double> gamma_dists;
  double total = 0;
  NormKind norm = NormKind::L1;
};

inline Residual residual(const Program& P, const RatVec& x, NormKind norm = NormKind::L1) {
  Residual r;
  r.norm = norm;
  std::vector<double> gplus, habs;
  for (const Expr& gi : P.g) {
    Rat v = gi.eval(x);
    gplus.push_back(v > 0 ? v.get_d() : 0.0);
  }
  for (const Expr& hi : P.h) habs.push_back(hi.eval(x).get_d());
  r.g_plus_norm = vec_norm(gplus, norm);
  r.h_norm = vec_norm(habs, norm);
  for (const Block& b : P.blocks) {
    RatVec y = b.phi.eval(x);
    r.gamma_dists.push_back(distance(b.gamma, y));
  }
  r.total = r.g_plus_norm + r.h_norm;
  for (double d : r.gamma_dists) r.total += d;
  return r;
}

inline bool is_feasible(const Program& P, const RatVec& x, double tol = 1e-9) {
  return residual(P, x).total <= tol;
}

/// Indices i with |g_i(xbar)| <= tol.
inline std::vector<std::size_t> active_inequalities(const Program& P, const RatVec& xbar,
                                                    const Rat& tol = Rat(0)) {
  if (!is_feasible(P, xbar, std::max(1e-9, tol.get_d())))
    throw InfeasiblePoint("active_inequalities: infeasible point");
  std::vector<std::size_t> act;
  for (std::size_t i = 0; i < P.g.size(); ++i)
    if (abs(P.g[i].eval(xbar)) <= tol) act.push_back(i);
  return act;
}

/// One piece index per block; P_r = {i : piece[i] == r} partitions the blocks.
struct Partition {
  std::vector<std::size_t> piece;
  bool operator==(const Partition&) const = default;
};

/// All assignments with Phi_i(xbar) in the assigned piece.
inline std::vector<Partition> admissible_partitions(const Program& P, const RatVec& xbar,
                                                    const Rat& tol = Rat(0)) {
  std::vector<std::vector<std::size_t>> options;
  for (const Block& b : P.blocks) {
    RatVec y = b.phi.eval(xbar);
    std::vector<std::size_t> ok;
    for (std::size_t r = 0; r < b.gamma.pieces.size(); ++r) {
      if (b.gamma.pieces[r].contains(y)) {
        ok.push_back(r);
      } else if (tol > 0) {
        try {
          if (dist_sq_to_piece(b.gamma.pieces[r], y) <= tol * tol) ok.push_back(r);
        } catch (const EmptyPolyhedron&) {
        }
      }
    }
    if (ok.empty()) throw InfeasiblePoint("admissible_partitions: infeasible point");
    options.push_back(std::move(ok));
  }
  std::vector<Partition> out;
  Partition cur;
  cur.piece.assign(P.blocks.size(), 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == P.blocks.size()) {
      out.push_back(cur);
      return;
    }
    for (std::size_t r : options[i]) {
      cur.piece[i] = r;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

/// Same g,h; each block's set replaced by the single assigned piece.
inline Program subsystem(const Program& P, const Partition& part) {
  if (part.piece.size() != P.blocks.size()) throw DimensionMismatch("subsystem: partition size");
  Program S = P;
  for (std::size_t i = 0; i < S.blocks.size(); ++i) {
    const DisjunctiveSet& G = P.blocks[i].gamma;
    S.blocks[i].gamma = DisjunctiveSet({G.pieces.at(part.piece[i])});
  }
  return S;
}

/// Each block goes to the lowest-index piece attaining the minimal distance
/// (the P_r^x construction in the partition error-bound decomposition).
inline Partition nearest_partition(const Program& P, const RatVec& x) {
  Partition part;
  for (const Block& b : P.blocks) {
    RatVec y = b.phi.eval(x);
    std::size_t best = 0;
    std::optional<Rat> best_d;
    for (std::size_t r = 0; r < b.gamma.pieces.size(); ++r) {
      try {
        Rat d = dist_sq_to_piece(b.gamma.pieces[r], y);
        if (!best_d || d < *best_d) {
          best_d = d;
          best = r;
        }
      } catch (const EmptyPolyhedron&) {
      }
    }
    if (!best_d) throw EmptyPolyhedron("nearest_partition: all pieces empty");
    part.piece.push_back(best);
  }
  return part;
}

}  // namespace discq
