#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "discq/lp.hpp"
#include "discq/model.hpp"
#include "discq/rng.hpp"

namespace discq {

// Sampled stand-in for the "for all sequences x^k -> xbar" quantifier:
// signed coordinate directions plus seeded random unit directions, with a
// geometric radius schedule r_j = r0 * 2^-j.
struct SequenceScheme {
  RatMat directions;
  std::vector<Rat> radii;
  Rat r0 = Rat(1, 100);
  int levels = 20;
  int k_random = 64;
  std::uint64_t seed = 0;

  static SequenceScheme make(std::size_t dim, Rat r0 = Rat(1, 100), int levels = 20,
                             int k_random = 64, std::uint64_t seed = 0) {
    SequenceScheme s;
    s.r0 = r0;
    s.levels = levels;
    s.k_random = k_random;
    s.seed = seed;
    for (std::size_t i = 0; i < dim; ++i) {
      RatVec e(dim, Rat(0));
      e[i] = 1;
      s.directions.push_back(e);
      e[i] = -1;
      s.directions.push_back(e);
    }
    Rng rng(seed);
    for (int k = 0; k < k_random; ++k)
      s.directions.push_back(to_rational(rng.unit_vector(dim)));
    Rat r = r0;
    for (int j = 0; j <= levels; ++j) {
      s.radii.push_back(r);
      r /= 2;
    }
    return s;
  }
};

struct CqConfig {
  Rat active_tol = Rat(0);  // activity detection at xbar (0 for exact data)
  double feas_tol = 1e-9;
  double rank_tol = 1e-8;
  std::size_t candidate_cap = 10000;
  std::size_t config_cap = 20000;
  int j0 = 5;                // dependence must hold from this radius level on
  int independent_tail = 8;  // trailing independent radii forming a witness
  std::size_t subdiff_cap = 4;
};

enum class Verdict { FAILS_WITNESSED, HOLDS_SAMPLED, INCONCLUSIVE };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::FAILS_WITNESSED:
      return "FAILS_WITNESSED";
    case Verdict::HOLDS_SAMPLED:
      return "HOLDS_SAMPLED";
    case Verdict::INCONCLUSIVE:
      return "INCONCLUSIVE";
  }
  return "?";
}

// Generator subset (A_i^I, A_i^E) backing one block's multiplier; both parts
// empty exactly when eta_i = 0.
struct BranchChoice {
  RatMat rays;
  RatMat lines;
  bool empty() const { return rays.empty() && lines.empty(); }
};

struct MultiplierCandidate {
  std::vector<std::size_t> I;
  RatVec lambda_g;
  std::vector<std::size_t> J;
  RatVec lambda_h;
  RatMat eta;  // one vector per block
  std::vector<BranchChoice> branch;
};

// Vector family whose rank is tracked along the sampled sequences.
struct FamilySpec {
  std::vector<std::size_t> g_idx;
  std::vector<std::size_t> h_idx;
  std::vector<std::pair<std::size_t, RatVec>> phi_parts;  // (block, beta)

  std::size_t size() const { return g_idx.size() + h_idx.size() + phi_parts.size(); }
};

struct SequenceWitness {
  std::size_t direction_index = 0;
  RatVec direction;
  int independent_from_level = -1;
  FamilySpec family;
};

struct CqReport {
  std::string cq_name;
  Verdict verdict = Verdict::INCONCLUSIVE;
  std::optional<MultiplierCandidate> witness_candidate;
  std::optional<SequenceWitness> witness_sequence;
  std::optional<RatVec> witness_point;
  std::vector<std::string> notes;
  std::size_t candidate_count = 0;
  std::size_t config_count = 0;
  bool capped = false;
  std::optional<std::size_t> failing_partition;
  Rat scheme_r0;
  int scheme_levels = 0;
  std::size_t scheme_directions = 0;
  std::uint64_t seed = 0;
  double rank_tol = 0, feas_tol = 0;
};

// ---- kernels ----------------------------------------------------------------

/// (alpha >= 0, beta) not all zero with sum alpha_i v_i + sum beta_j u_j = 0,
/// decided exactly; nullopt when the pair is positive linearly independent.
inline std::optional<std::pair<RatVec, RatVec>> positive_linear_dependent(
    const RatMat& signed_vecs, const RatMat& free_vecs) {
  std::size_t ns = signed_vecs.size(), nf = free_vecs.size();
  if (ns + nf == 0) return std::nullopt;
  std::size_t dim = ns ? signed_vecs[0].size() : free_vecs[0].size();
  RatMat rows(dim, RatVec(ns + nf, Rat(0)));
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t i = 0; i < ns; ++i) rows[d][i] = signed_vecs[i][d];
    for (std::size_t j = 0; j < nf; ++j) rows[d][ns + j] = free_vecs[j][d];
  }
  std::vector<bool> nonneg(ns + nf, false);
  for (std::size_t i = 0; i < ns; ++i) nonneg[i] = true;
  std::vector<std::size_t> all(ns + nf);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto z = cone_nonzero_point(rows, ns + nf, nonneg, {all});
  if (!z) return std::nullopt;
  RatVec alpha(z->begin(), z->begin() + ns);
  RatVec beta(z->begin() + ns, z->end());
  return std::make_pair(alpha, beta);
}

struct CaratheodoryResult {
  RatVec base_coeffs;
  std::vector<std::size_t> kept;  // indices into extras
  RatVec kept_coeffs;
};

/// Rewrites v = sum base + sum coeff*extra over a linearly independent
/// subfamily, preserving the sign of every retained extra coefficient.
inline CaratheodoryResult caratheodory_reduce(const RatVec& v, const RatMat& base,
                                              const RatMat& extras, const RatVec& extra_coeffs) {
  if (extras.size() != extra_coeffs.size())
    throw DimensionMismatch("caratheodory_reduce: coeff count");
  if (!linearly_independent(base))
    throw DimensionMismatch("caratheodory_reduce: base not independent");
  RatVec rem = v;
  std::vector<std::size_t> kept;
  RatVec alpha;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    if (extra_coeffs[i] == 0) continue;
    kept.push_back(i);
    alpha.push_back(extra_coeffs[i]);
    rem = sub(rem, scale(extra_coeffs[i], extras[i]));
  }
  auto base_c = coordinates_in_span(base, rem);
  if (!base_c) throw DimensionMismatch("caratheodory_reduce: v not representable");
  RatVec bc = *base_c;

  for (;;) {
    RatMat cols = base;
    for (std::size_t k : kept) cols.push_back(extras[k]);
    if (linearly_independent(cols)) break;
    std::size_t n = cols.size(), dim = v.size();
    RatMat rows(dim, RatVec(n, Rat(0)));
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t d = 0; d < dim; ++d) rows[d][j] = cols[j][d];
    RatMat ker = nullspace(rows, n);
    const RatVec& kv = ker.at(0);  // base independence forces extra support
    std::optional<Rat> step;
    for (std::size_t t = 0; t < kept.size(); ++t) {
      const Rat& kcomp = kv[base.size() + t];
      if (kcomp == 0) continue;
      Rat s = alpha[t] / kcomp;
      if (!step || abs(s) < abs(*step)) step = s;
    }
    if (!step) throw DimensionMismatch("caratheodory_reduce: degenerate kernel");
    for (std::size_t b = 0; b < base.size(); ++b) bc[b] -= *step * kv[b];
    for (std::size_t t = 0; t < kept.size(); ++t) alpha[t] -= *step * kv[base.size() + t];
    std::vector<std::size_t> nk;
    RatVec na;
    for (std::size_t t = 0; t < kept.size(); ++t) {
      if (alpha[t] == 0) continue;
      nk.push_back(kept[t]);
      na.push_back(alpha[t]);
    }
    kept = std::move(nk);
    alpha = std::move(na);
  }
  return {bc, kept, alpha};
}

struct RankConstancyResult {
  bool constant_rank = true;
  std::size_t rank_at_center = 0;
  std::vector<std::pair<RatVec, std::size_t>> violations;  // sample, rank there
};

/// Compares the rank of a gradient family at xbar against every scheme
/// sample; exact. Stops collecting after the first few violations.
inline RankConstancyResult rank_constancy(const std::vector<VectorFunc>& grads,
                                          const RatVec& xbar, const SequenceScheme& scheme) {
  RankConstancyResult out;
  RatMat at_center;
  for (const VectorFunc& g : grads) at_center.push_back(g.eval(xbar));
  out.rank_at_center = rank_exact(at_center);
  for (const RatVec& d : scheme.directions) {
    for (const Rat& r : scheme.radii) {
      RatVec x = add(xbar, scale(r, d));
      RatMat fam;
      for (const VectorFunc& g : grads) fam.push_back(g.eval(x));
      std::size_t rk = rank_exact(fam);
      if (rk != out.rank_at_center) {
        out.constant_rank = false;
        out.violations.emplace_back(x, rk);
        if (out.violations.size() >= 3) return out;
      }
    }
  }
  return out;
}

// ---- sampled-sequence machinery ----------------------------------------------

enum class TailPattern { DependentTail, IndependentTail, Marginal };

struct TailResult {
  TailPattern pattern = TailPattern::Marginal;
  int independent_from = -1;
};

namespace detail {

struct ColumnKey {
  int kind = 0;  // 0 = g gradient/subgradient variant, 1 = h gradient, 2 = phi pullback
  std::size_t idx = 0;
  std::size_t variant = 0;
  RatVec beta;
  bool operator<(const ColumnKey& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (idx != o.idx) return idx < o.idx;
    if (variant != o.variant) return variant < o.variant;
    return lex_less(beta, o.beta);
  }
};

}  // namespace detail

// Exact rank evaluation of column families along xbar + r_j d, with caching
// of sample points, columns, and subset ranks.
class FamilyTester {
 public:
  FamilyTester(const Program& P, RatVec xbar, const SequenceScheme& scheme, CqConfig cfg)
      : P_(P), xbar_(std::move(xbar)), scheme_(scheme), cfg_(cfg) {
    for (const Expr& gi : P.g) grad_g_.push_back(gradient(gi));
    for (const Expr& hi : P.h) grad_h_.push_back(gradient(hi));
  }

  std::size_t column_id(detail::ColumnKey key) {
    auto it = col_ids_.find(key);
    if (it != col_ids_.end()) return it->second;
    std::size_t id = keys_.size();
    col_ids_.emplace(key, id);
    keys_.push_back(std::move(key));
    return id;
  }

  std::size_t g_column(std::size_t gi, std::size_t variant = 0) {
    return column_id({0, gi, variant, {}});
  }
  std::size_t h_column(std::size_t hi) { return column_id({1, hi, 0, {}}); }
  std::size_t phi_column(std::size_t block, const RatVec& beta) {
    return column_id({2, block, 0, beta});
  }

  std::size_t g_variant_count(std::size_t gi) const {
    if (!P_.g_subdiff) return 1;
    auto samples = P_.g_subdiff(gi, xbar_);
    return std::max<std::size_t>(1, std::min(samples.size(), cfg_.subdiff_cap));
  }

  std::vector<std::size_t> family_columns(const FamilySpec& fam,
                                          const std::vector<std::size_t>& g_variant = {}) {
    std::vector<std::size_t> cols;
    for (std::size_t t = 0; t < fam.g_idx.size(); ++t)
      cols.push_back(g_column(fam.g_idx[t], t < g_variant.size() ? g_variant[t] : 0));
    for (std::size_t hi : fam.h_idx) cols.push_back(h_column(hi));
    for (const auto& [b, beta] : fam.phi_parts) cols.push_back(phi_column(b, beta));
    return cols;
  }

  std::size_t directions() const { return scheme_.directions.size(); }
  std::size_t levels() const { return scheme_.radii.size(); }
  const RatVec& direction(std::size_t i) const { return scheme_.directions[i]; }

  static constexpr std::size_t kCenter = static_cast<std::size_t>(-1);

  const RatVec& point(std::size_t point_id) {
    if (point_id == kCenter) return xbar_;
    auto it = points_.find(point_id);
    if (it != points_.end()) return it->second;
    std::size_t nlev = levels();
    RatVec x = add(xbar_, scale(scheme_.radii[point_id % nlev],
                                scheme_.directions[point_id / nlev]));
    return points_.emplace(point_id, std::move(x)).first->second;
  }

  std::size_t rank_at(std::size_t point_id, std::vector<std::size_t> cols) {
    std::sort(cols.begin(), cols.end());
    auto key = std::make_pair(point_id, cols);
    auto it = rank_cache_.find(key);
    if (it != rank_cache_.end()) return it->second;
    RatMat fam;
    for (std::size_t c : cols) fam.push_back(column(point_id, c));
    std::size_t r = rank_exact(fam);
    rank_cache_.emplace(std::move(key), r);
    return r;
  }

  bool dependent_at(std::size_t point_id, const std::vector<std::size_t>& cols) {
    return rank_at(point_id, cols) < cols.size();
  }

  TailResult test_direction(const std::vector<std::size_t>& cols, std::size_t dir_index) {
    std::size_t nlev = levels();
    std::vector<bool> dep(nlev);
    for (std::size_t j = 0; j < nlev; ++j)
      dep[j] = dependent_at(dir_index * nlev + j, cols);
    int run = 0;
    for (std::size_t j = nlev; j-- > 0;) {
      if (!dep[j])
        ++run;
      else
        break;
    }
    if (run >= cfg_.independent_tail)
      return {TailPattern::IndependentTail, static_cast<int>(nlev) - run};
    bool all_dep = true;
    for (std::size_t j = static_cast<std::size_t>(cfg_.j0); j < nlev; ++j)
      if (!dep[j]) all_dep = false;
    if (all_dep) return {TailPattern::DependentTail, -1};
    return {TailPattern::Marginal, -1};
  }

 private:
  const RatVec& column(std::size_t point_id, std::size_t col) {
    auto key = std::make_pair(point_id, col);
    auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    const detail::ColumnKey& k = keys_[col];
    const RatVec& x = point(point_id);
    RatVec val;
    if (k.kind == 0) {
      if (P_.g_subdiff) {
        auto samples = P_.g_subdiff(k.idx, x);
        if (!samples.empty())
          val = samples[std::min(k.variant, samples.size() - 1)];
        else
          val = grad_g_[k.idx].eval(x);
      } else {
        val = grad_g_[k.idx].eval(x);
      }
    } else if (k.kind == 1) {
      val = grad_h_[k.idx].eval(x);
    } else {
      val = jacobian_transpose_apply(P_.blocks[k.idx].phi, x, k.beta);
    }
    return values_.emplace(key, std::move(val)).first->second;
  }

  const Program& P_;
  RatVec xbar_;
  SequenceScheme scheme_;
  CqConfig cfg_;
  std::vector<VectorFunc> grad_g_, grad_h_;
  std::map<detail::ColumnKey, std::size_t> col_ids_;
  std::vector<detail::ColumnKey> keys_;
  std::map<std::size_t, RatVec> points_;
  std::map<std::pair<std::size_t, std::size_t>, RatVec> values_;
  std::map<std::pair<std::size_t, std::vector<std::size_t>>, std::size_t> rank_cache_;
};

// ---- per-block branch data ----------------------------------------------------

struct BlockBranches {
  LimitingGenerators lim;
  std::vector<ConeGenerators> stratum_cones;  // maximal distinct cones
  std::vector<BranchChoice> branches;         // admissible nonempty subsets
};

/// Linearly independent subsets (A^I, A^E) of the limiting generator set whose
/// generated cone stays inside the limiting normal cone.
inline BlockBranches block_branches(const DisjunctiveSet& G, const RatVec& y,
                                    const Rat& tol = Rat(0)) {
  BlockBranches out;
  out.lim = limiting_nc(G, y, tol);
  std::vector<ConeGenerators> cones;
  for (const Stratum& s : out.lim.strata) cones.push_back(s.cone);
  for (std::size_t i = 0; i < cones.size(); ++i) {
    bool maximal = true;
    for (std::size_t j = 0; j < cones.size() && maximal; ++j) {
      if (i == j) continue;
      if (cone_contains(cones[j], cones[i]) && !cone_contains(cones[i], cones[j]))
        maximal = false;
    }
    if (maximal) out.stratum_cones.push_back(cones[i]);
  }
  std::size_t nr = out.lim.rays.size(), nl = out.lim.lines.size(), p = G.dim();
  struct Entry {
    std::size_t size, mr, ml;
  };
  std::vector<Entry> order;
  for (std::size_t mr = 0; mr < (std::size_t(1) << nr); ++mr) {
    for (std::size_t ml = 0; ml < (std::size_t(1) << nl); ++ml) {
      std::size_t sz = std::size_t(__builtin_popcountll(mr) + __builtin_popcountll(ml));
      if (sz == 0 || sz > p) continue;
      order.push_back({sz, mr, ml});
    }
  }
  std::sort(order.begin(), order.end(), [](const Entry& a, const Entry& b) {
    if (a.size != b.size) return a.size < b.size;
    if (a.mr != b.mr) return a.mr < b.mr;
    return a.ml < b.ml;
  });
  for (const Entry& e : order) {
    BranchChoice bc;
    for (std::size_t i = 0; i < nr; ++i)
      if (e.mr & (std::size_t(1) << i)) bc.rays.push_back(out.lim.rays[i]);
    for (std::size_t i = 0; i < nl; ++i)
      if (e.ml & (std::size_t(1) << i)) bc.lines.push_back(out.lim.lines[i]);
    RatMat joint = bc.rays;
    joint.insert(joint.end(), bc.lines.begin(), bc.lines.end());
    if (!linearly_independent(joint)) continue;
    ConeGenerators g;
    g.dim = p;
    g.rays = bc.rays;
    g.lines = bc.lines;
    if (!cone_in_union(g, out.stratum_cones)) continue;
    out.branches.push_back(std::move(bc));
  }
  return out;
}

// ---- candidate enumeration ----------------------------------------------------

enum class JPolicy { BasisSubsets, AllSubsets };

struct CqContext {
  RatVec xbar;
  std::vector<std::size_t> Ig;
  RatMat grad_g;  // per Ig index, at xbar (first subgradient sample if hooked)
  RatMat grad_h;  // all components, at xbar
  std::vector<RatVec> phi_at;  // per block
  std::vector<BlockBranches> blocks;
  // pullback columns grad Phi_b(xbar)^T beta, aligned with branches: per block,
  // per branch, rays first then lines
  std::vector<std::vector<RatMat>> pullbacks;
  std::vector<std::vector<std::size_t>> J_sets;
};

inline CqContext make_cq_context(const Program& P, const RatVec& xbar, const CqConfig& cfg,
                                 JPolicy jp) {
  if (!is_feasible(P, xbar, cfg.feas_tol))
    throw InfeasiblePoint("cq: candidate point is infeasible");
  CqContext ctx;
  ctx.xbar = xbar;
  ctx.Ig = active_inequalities(P, xbar, cfg.active_tol);
  for (std::size_t i : ctx.Ig) {
    if (P.g_subdiff) {
      auto samples = P.g_subdiff(i, xbar);
      ctx.grad_g.push_back(samples.empty() ? gradient(P.g[i]).eval(xbar) : samples[0]);
    } else {
      ctx.grad_g.push_back(gradient(P.g[i]).eval(xbar));
    }
  }
  for (const Expr& hi : P.h) ctx.grad_h.push_back(gradient(hi).eval(xbar));
  for (const Block& b : P.blocks) {
    RatVec y = b.phi.eval(xbar);
    ctx.blocks.push_back(block_branches(b.gamma, y, cfg.active_tol));
    ctx.phi_at.push_back(std::move(y));
  }
  ctx.pullbacks.resize(P.blocks.size());
  for (std::size_t b = 0; b < P.blocks.size(); ++b) {
    for (const BranchChoice& br : ctx.blocks[b].branches) {
      RatMat cols;
      for (const RatVec& beta : br.rays)
        cols.push_back(jacobian_transpose_apply(P.blocks[b].phi, xbar, beta));
      for (const RatVec& beta : br.lines)
        cols.push_back(jacobian_transpose_apply(P.blocks[b].phi, xbar, beta));
      ctx.pullbacks[b].push_back(std::move(cols));
    }
  }
  std::size_t m = P.h.size();
  if (jp == JPolicy::AllSubsets) {
    for (std::size_t mask = 0; mask < (std::size_t(1) << m); ++mask) {
      std::vector<std::size_t> J;
      for (std::size_t i = 0; i < m; ++i)
        if (mask & (std::size_t(1) << i)) J.push_back(i);
      ctx.J_sets.push_back(std::move(J));
    }
  } else {
    std::size_t r = rank_exact(ctx.grad_h);
    for (std::size_t mask = 0; mask < (std::size_t(1) << m); ++mask) {
      std::vector<std::size_t> J;
      RatMat sel;
      for (std::size_t i = 0; i < m; ++i) {
        if (mask & (std::size_t(1) << i)) {
          J.push_back(i);
          sel.push_back(ctx.grad_h[i]);
        }
      }
      if (J.size() != r || !linearly_independent(sel)) continue;
      ctx.J_sets.push_back(std::move(J));
    }
    if (ctx.J_sets.empty()) ctx.J_sets.push_back({});
  }
  return ctx;
}

struct CandidateEnumeration {
  std::vector<MultiplierCandidate> candidates;
  std::size_t configs = 0;
  bool capped = false;
};

/// All (J, I, branch) configurations carrying a nonzero degenerate multiplier,
/// each with a representative exact solution.
inline CandidateEnumeration enumerate_candidates(const Program& P, const CqContext& ctx,
                                                 const CqConfig& cfg) {
  CandidateEnumeration out;
  std::size_t nb = P.blocks.size();
  std::size_t d = P.dim();
  std::vector<long> choice(nb, -1);  // -1 = empty branch

  auto try_config = [&](const std::vector<std::size_t>& J, const std::vector<std::size_t>& I) {
    ++out.configs;
    if (out.configs > cfg.candidate_cap) {
      out.capped = true;
      return;
    }
    // variable layout: lambda_g (|I|) | lambda_h (|J|) | per-block coefs
    std::size_t nvars = I.size() + J.size();
    std::vector<std::size_t> block_off(nb, 0);
    for (std::size_t b = 0; b < nb; ++b) {
      if (choice[b] < 0) continue;
      const BranchChoice& br = ctx.blocks[b].branches[choice[b]];
      block_off[b] = nvars;
      nvars += br.rays.size() + br.lines.size();
    }
    if (nvars == 0) return;
    RatMat rows(d, RatVec(nvars, Rat(0)));
    std::vector<bool> nonneg(nvars, false);
    for (std::size_t t = 0; t < I.size(); ++t) {
      nonneg[t] = true;
      for (std::size_t dd = 0; dd < d; ++dd) rows[dd][t] = ctx.grad_g[I[t]][dd];
    }
    for (std::size_t t = 0; t < J.size(); ++t)
      for (std::size_t dd = 0; dd < d; ++dd) rows[dd][I.size() + t] = ctx.grad_h[J[t]][dd];
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t b = 0; b < nb; ++b) {
      if (choice[b] < 0) continue;
      const BranchChoice& br = ctx.blocks[b].branches[choice[b]];
      const RatMat& cols = ctx.pullbacks[b][choice[b]];
      std::vector<std::size_t> group;
      for (std::size_t t = 0; t < cols.size(); ++t) {
        std::size_t c = block_off[b] + t;
        for (std::size_t dd = 0; dd < d; ++dd) rows[dd][c] = cols[t][dd];
        if (t < br.rays.size()) nonneg[c] = true;
        group.push_back(c);
      }
      groups.push_back(std::move(group));
    }
    if (groups.empty()) {
      std::vector<std::size_t> lam(I.size() + J.size());
      for (std::size_t t = 0; t < lam.size(); ++t) lam[t] = t;
      groups.push_back(std::move(lam));
    }
    auto z = cone_nonzero_point(rows, nvars, nonneg, groups);
    if (!z) return;
    MultiplierCandidate cand;
    for (std::size_t t : I) cand.I.push_back(ctx.Ig[t]);
    for (std::size_t t = 0; t < I.size(); ++t) cand.lambda_g.push_back((*z)[t]);
    cand.J = J;
    for (std::size_t t = 0; t < J.size(); ++t) cand.lambda_h.push_back((*z)[I.size() + t]);
    for (std::size_t b = 0; b < nb; ++b) {
      BranchChoice br;
      RatVec eta(P.blocks[b].gamma.dim(), Rat(0));
      if (choice[b] >= 0) {
        br = ctx.blocks[b].branches[choice[b]];
        std::size_t c = block_off[b];
        for (const RatVec& beta : br.rays) eta = add(eta, scale((*z)[c++], beta));
        for (const RatVec& beta : br.lines) eta = add(eta, scale((*z)[c++], beta));
      }
      cand.eta.push_back(std::move(eta));
      cand.branch.push_back(std::move(br));
    }
    out.candidates.push_back(std::move(cand));
  };

  for (const auto& J : ctx.J_sets) {
    for (std::size_t imask = 0; imask < (std::size_t(1) << ctx.Ig.size()); ++imask) {
      std::vector<std::size_t> I;  // positions into ctx.Ig
      for (std::size_t t = 0; t < ctx.Ig.size(); ++t)
        if (imask & (std::size_t(1) << t)) I.push_back(t);
      std::function<void(std::size_t)> rec = [&](std::size_t b) {
        if (out.capped) return;
        if (b == nb) {
          try_config(J, I);
          return;
        }
        for (long c = -1; c < static_cast<long>(ctx.blocks[b].branches.size()); ++c) {
          choice[b] = c;
          rec(b + 1);
          if (out.capped) return;
        }
      };
      rec(0);
      if (out.capped) break;
    }
    if (out.capped) break;
  }
  return out;
}

/// Spec-facing wrapper: degenerate multiplier candidates at xbar.
inline std::vector<MultiplierCandidate> enumerate_multipliers(const Program& P,
                                                              const RatVec& xbar,
                                                              const CqConfig& cfg = {}) {
  CqContext ctx = make_cq_context(P, xbar, cfg, JPolicy::BasisSubsets);
  return enumerate_candidates(P, ctx, cfg).candidates;
}

// ---- checkers -------------------------------------------------------------

namespace detail {

inline void echo_scheme(CqReport& rep, const SequenceScheme& scheme, const CqConfig& cfg) {
  rep.scheme_r0 = scheme.r0;
  rep.scheme_levels = scheme.levels;
  rep.scheme_directions = scheme.directions.size();
  rep.seed = scheme.seed;
  rep.rank_tol = cfg.rank_tol;
  rep.feas_tol = cfg.feas_tol;
}

inline FamilySpec candidate_family(const MultiplierCandidate& cand) {
  FamilySpec fam;
  fam.g_idx = cand.I;
  fam.h_idx = cand.J;
  for (std::size_t b = 0; b < cand.branch.size(); ++b) {
    for (const RatVec& beta : cand.branch[b].rays) fam.phi_parts.emplace_back(b, beta);
    for (const RatVec& beta : cand.branch[b].lines) fam.phi_parts.emplace_back(b, beta);
  }
  return fam;
}

/// Runs the dependence-along-sequences test for one family over every
/// direction and subgradient-variant combination. Returns the worst finding.
struct SequenceScan {
  bool found_witness = false;
  bool found_marginal = false;
  SequenceWitness witness;
};

inline SequenceScan scan_family(FamilyTester& ft, const FamilySpec& fam, const CqConfig& cfg) {
  SequenceScan scan;
  // variant combinations for hooked g columns (smooth path: single combo)
  std::vector<std::size_t> variant_counts;
  std::size_t total_combos = 1;
  for (std::size_t gi : fam.g_idx) {
    std::size_t v = ft.g_variant_count(gi);
    variant_counts.push_back(v);
    total_combos *= v;
  }
  if (total_combos > 16) total_combos = 16;
  for (std::size_t combo = 0; combo < total_combos; ++combo) {
    std::vector<std::size_t> variants(fam.g_idx.size(), 0);
    std::size_t rem = combo;
    for (std::size_t t = 0; t < variants.size(); ++t) {
      variants[t] = rem % variant_counts[t];
      rem /= variant_counts[t];
    }
    std::vector<std::size_t> cols = ft.family_columns(fam, variants);
    for (std::size_t dir = 0; dir < ft.directions(); ++dir) {
      TailResult tr = ft.test_direction(cols, dir);
      if (tr.pattern == TailPattern::IndependentTail) {
        scan.found_witness = true;
        scan.witness.direction_index = dir;
        scan.witness.direction = ft.direction(dir);
        scan.witness.independent_from_level = tr.independent_from;
        scan.witness.family = fam;
        return scan;
      }
      if (tr.pattern == TailPattern::Marginal) scan.found_marginal = true;
    }
  }
  return scan;
}

}  // namespace detail

/// MPDC-RCPLD: rank constancy of the equality gradients plus persistence of
/// linear dependence of every degenerate multiplier family along sequences.
inline CqReport check_rcpld(const Program& P, const RatVec& xbar, const SequenceScheme& scheme,
                            const CqConfig& cfg = {}, const std::string& name = "rcpld") {
  CqReport rep;
  rep.cq_name = name;
  detail::echo_scheme(rep, scheme, cfg);
  std::vector<VectorFunc> hgrads;
  for (const Expr& hi : P.h) hgrads.push_back(gradient(hi));
  RankConstancyResult rc = rank_constancy(hgrads, xbar, scheme);
  if (!rc.constant_rank) {
    rep.verdict = Verdict::FAILS_WITNESSED;
    rep.witness_point = rc.violations[0].first;
    rep.notes.push_back("equality gradient rank " + std::to_string(rc.rank_at_center) +
                        " at the point vs " + std::to_string(rc.violations[0].second) +
                        " at a nearby sample");
    return rep;
  }
  CqContext ctx = make_cq_context(P, xbar, cfg, JPolicy::BasisSubsets);
  CandidateEnumeration en = enumerate_candidates(P, ctx, cfg);
  rep.candidate_count = en.candidates.size();
  rep.config_count = en.configs;
  rep.capped = en.capped;
  FamilyTester ft(P, xbar, scheme, cfg);
  bool marginal = false;
  for (const MultiplierCandidate& cand : en.candidates) {
    detail::SequenceScan scan = detail::scan_family(ft, detail::candidate_family(cand), cfg);
    if (scan.found_witness) {
      rep.verdict = Verdict::FAILS_WITNESSED;
      rep.witness_candidate = cand;
      rep.witness_sequence = scan.witness;
      return rep;
    }
    if (scan.found_marginal) marginal = true;
  }
  if (marginal || rep.capped) {
    rep.verdict = Verdict::INCONCLUSIVE;
    if (rep.capped) rep.notes.push_back("candidate cap reached");
    if (marginal) rep.notes.push_back("marginal dependence pattern within the radius window");
  } else {
    rep.verdict = Verdict::HOLDS_SAMPLED;
    if (en.candidates.empty()) rep.notes.push_back("no degenerate multiplier exists");
  }
  return rep;
}

/// MPDC-CPLD: like RCPLD with arbitrary equality index sets and no rank
/// constancy requirement.
inline CqReport check_cpld(const Program& P, const RatVec& xbar, const SequenceScheme& scheme,
                           const CqConfig& cfg = {}) {
  CqReport rep;
  rep.cq_name = "cpld";
  detail::echo_scheme(rep, scheme, cfg);
  CqContext ctx = make_cq_context(P, xbar, cfg, JPolicy::AllSubsets);
  CandidateEnumeration en = enumerate_candidates(P, ctx, cfg);
  rep.candidate_count = en.candidates.size();
  rep.config_count = en.configs;
  rep.capped = en.capped;
  FamilyTester ft(P, xbar, scheme, cfg);
  bool marginal = false;
  for (const MultiplierCandidate& cand : en.candidates) {
    detail::SequenceScan scan = detail::scan_family(ft, detail::candidate_family(cand), cfg);
    if (scan.found_witness) {
      rep.verdict = Verdict::FAILS_WITNESSED;
      rep.witness_candidate = cand;
      rep.witness_sequence = scan.witness;
      return rep;
    }
    if (scan.found_marginal) marginal = true;
  }
  rep.verdict = (marginal || rep.capped) ? Verdict::INCONCLUSIVE : Verdict::HOLDS_SAMPLED;
  return rep;
}

/// MPDC-ERCPLD: positive linear dependence at the point triggers the same
/// dependence-along-sequences requirement.
inline CqReport check_ercpld(const Program& P, const RatVec& xbar, const SequenceScheme& scheme,
                             const CqConfig& cfg = {}) {
  CqReport rep;
  rep.cq_name = "ercpld";
  detail::echo_scheme(rep, scheme, cfg);
  std::vector<VectorFunc> hgrads;
  for (const Expr& hi : P.h) hgrads.push_back(gradient(hi));
  RankConstancyResult rc = rank_constancy(hgrads, xbar, scheme);
  if (!rc.constant_rank) {
    rep.verdict = Verdict::FAILS_WITNESSED;
    rep.witness_point = rc.violations[0].first;
    rep.notes.push_back("equality gradient rank not locally constant");
    return rep;
  }
  CqContext ctx = make_cq_context(P, xbar, cfg, JPolicy::BasisSubsets);
  FamilyTester ft(P, xbar, scheme, cfg);
  bool marginal = false;
  std::size_t nb = P.blocks.size();
  std::vector<long> choice(nb, -1);
  bool done = false;
  for (const auto& J : ctx.J_sets) {
    for (std::size_t imask = 0; imask < (std::size_t(1) << ctx.Ig.size()) && !done; ++imask) {
      std::vector<std::size_t> Ipos;
      for (std::size_t t = 0; t < ctx.Ig.size(); ++t)
        if (imask & (std::size_t(1) << t)) Ipos.push_back(t);
      std::function<void(std::size_t)> rec = [&](std::size_t b) {
        if (done) return;
        if (b == nb) {
          ++rep.config_count;
          if (rep.config_count > cfg.config_cap) {
            rep.capped = true;
            done = true;
            return;
          }
          RatMat signed_vecs, free_vecs;
          FamilySpec fam;
          for (std::size_t t : Ipos) {
            signed_vecs.push_back(ctx.grad_g[t]);
            fam.g_idx.push_back(ctx.Ig[t]);
          }
          for (std::size_t j : J) {
            free_vecs.push_back(ctx.grad_h[j]);
            fam.h_idx.push_back(j);
          }
          for (std::size_t b2 = 0; b2 < nb; ++b2) {
            if (choice[b2] < 0) continue;
            const BranchChoice& br = ctx.blocks[b2].branches[choice[b2]];
            const RatMat& cols = ctx.pullbacks[b2][choice[b2]];
            for (const RatVec& c : cols) free_vecs.push_back(c);
            for (const RatVec& beta : br.rays) fam.phi_parts.emplace_back(b2, beta);
            for (const RatVec& beta : br.lines) fam.phi_parts.emplace_back(b2, beta);
          }
          if (fam.size() == 0) return;
          if (!positive_linear_dependent(signed_vecs, free_vecs)) return;
          detail::SequenceScan scan = detail::scan_family(ft, fam, cfg);
          if (scan.found_witness) {
            rep.verdict = Verdict::FAILS_WITNESSED;
            rep.witness_sequence = scan.witness;
            done = true;
            return;
          }
          if (scan.found_marginal) marginal = true;
          return;
        }
        for (long c = -1; c < static_cast<long>(ctx.blocks[b].branches.size()) && !done; ++c) {
          choice[b] = c;
          rec(b + 1);
        }
      };
      rec(0);
    }
    if (done) break;
  }
  if (rep.verdict == Verdict::FAILS_WITNESSED) return rep;
  rep.verdict = (marginal || rep.capped) ? Verdict::INCONCLUSIVE : Verdict::HOLDS_SAMPLED;
  return rep;
}

/// MPDC-CRCQ / MPDC-RCRCQ: rank of every admissible family must match
/// between the base point and every nearby sample.
inline CqReport check_crcq_impl(const Program& P, const RatVec& xbar,
                                const SequenceScheme& scheme, const CqConfig& cfg,
                                bool full_J_only) {
  CqReport rep;
  rep.cq_name = full_J_only ? "rcrcq" : "crcq";
  detail::echo_scheme(rep, scheme, cfg);
  CqContext ctx = make_cq_context(P, xbar, cfg, JPolicy::AllSubsets);
  FamilyTester ft(P, xbar, scheme, cfg);
  std::size_t m = P.h.size();
  std::vector<std::vector<std::size_t>> J_options;
  if (full_J_only) {
    std::vector<std::size_t> full(m);
    for (std::size_t i = 0; i < m; ++i) full[i] = i;
    J_options.push_back(full);
  } else {
    J_options = ctx.J_sets;  // all subsets
  }
  std::size_t nb = P.blocks.size();
  std::vector<long> choice(nb, -1);
  bool done = false;
  for (const auto& J : J_options) {
    for (std::size_t imask = 0; imask < (std::size_t(1) << ctx.Ig.size()) && !done; ++imask) {
      std::vector<std::size_t> Ipos;
      for (std::size_t t = 0; t < ctx.Ig.size(); ++t)
        if (imask & (std::size_t(1) << t)) Ipos.push_back(t);
      std::function<void(std::size_t)> rec = [&](std::size_t b) {
        if (done) return;
        if (b == nb) {
          ++rep.config_count;
          if (rep.config_count > cfg.config_cap) {
            rep.capped = true;
            done = true;
            return;
          }
          FamilySpec fam;
          for (std::size_t t : Ipos) fam.g_idx.push_back(ctx.Ig[t]);
          fam.h_idx = J;
          for (std::size_t b2 = 0; b2 < nb; ++b2) {
            if (choice[b2] < 0) continue;
            const BranchChoice& br = ctx.blocks[b2].branches[choice[b2]];
            for (const RatVec& beta : br.rays) fam.phi_parts.emplace_back(b2, beta);
            for (const RatVec& beta : br.lines) fam.phi_parts.emplace_back(b2, beta);
          }
          if (fam.size() == 0) return;
          std::vector<std::size_t> cols = ft.family_columns(fam);
          std::size_t r0 = ft.rank_at(FamilyTester::kCenter, cols);
          for (std::size_t dir = 0; dir < ft.directions() && !done; ++dir) {
            for (std::size_t lev = 0; lev < ft.levels(); ++lev) {
              std::size_t pid = dir * ft.levels() + lev;
              std::size_t r = ft.rank_at(pid, cols);
              if (r != r0) {
                rep.verdict = Verdict::FAILS_WITNESSED;
                rep.witness_point = ft.point(pid);
                rep.witness_sequence = SequenceWitness{dir, ft.direction(dir),
                                                       static_cast<int>(lev), fam};
                rep.notes.push_back("family rank " + std::to_string(r0) + " at the point vs " +
                                    std::to_string(r) + " at a sample");
                done = true;
                return;
              }
            }
          }
          return;
        }
        for (long c = -1; c < static_cast<long>(ctx.blocks[b].branches.size()) && !done; ++c) {
          choice[b] = c;
          rec(b + 1);
        }
      };
      rec(0);
    }
    if (done) break;
  }
  if (rep.verdict == Verdict::FAILS_WITNESSED) return rep;
  rep.verdict = rep.capped ? Verdict::INCONCLUSIVE : Verdict::HOLDS_SAMPLED;
  return rep;
}

inline CqReport check_crcq(const Program& P, const RatVec& xbar, const SequenceScheme& scheme,
                           const CqConfig& cfg = {}) {
  return check_crcq_impl(P, xbar, scheme, cfg, false);
}

inline CqReport check_rcrcq(const Program& P, const RatVec& xbar, const SequenceScheme& scheme,
                            const CqConfig& cfg = {}) {
  return check_crcq_impl(P, xbar, scheme, cfg, true);
}

/// MPDC-LICQ: linear independence of the active gradients together with the
/// pullbacks of a basis of the sums of spans of the active pieces' normal
/// cones. Decided exactly.
inline CqReport check_licq(const Program& P, const RatVec& xbar, const SequenceScheme& scheme,
                           const CqConfig& cfg = {}) {
  CqReport rep;
  rep.cq_name = "licq";
  detail::echo_scheme(rep, scheme, cfg);
  CqContext ctx = make_cq_context(P, xbar, cfg, JPolicy::BasisSubsets);
  RatMat cols;
  for (const RatVec& v : ctx.grad_g) cols.push_back(v);
  for (const RatVec& v : ctx.grad_h) cols.push_back(v);
  std::vector<std::pair<std::size_t, RatVec>> span_basis;  // (block, basis vector)
  for (std::size_t b = 0; b < P.blocks.size(); ++b) {
    RatMat gens;
    for (std::size_t r : active_pieces(P.blocks[b].gamma, ctx.phi_at[b], cfg.active_tol)) {
      ConeGenerators nc = normal_cone(P.blocks[b].gamma.pieces[r], ctx.phi_at[b],
                                      cfg.active_tol);
      for (const RatVec& v : nc.rays) gens.push_back(v);
      for (const RatVec& v : nc.lines) gens.push_back(v);
    }
    rref(gens);
    for (const RatVec& v : gens) {
      if (is_zero(v)) continue;
      span_basis.emplace_back(b, v);
      cols.push_back(jacobian_transpose_apply(P.blocks[b].phi, xbar, v));
    }
  }
  if (rank_exact(cols) == cols.size()) {
    rep.verdict = Verdict::HOLDS_SAMPLED;
    rep.notes.push_back("decided exactly: the combined family is linearly independent");
    return rep;
  }
  // kernel vector -> explicit degenerate multiplier
  std::size_t n = cols.size();
  RatMat rows(P.dim(), RatVec(n, Rat(0)));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t dd = 0; dd < P.dim(); ++dd) rows[dd][j] = cols[j][dd];
  RatMat ker = nullspace(rows, n);
  const RatVec& kv = ker.at(0);
  MultiplierCandidate cand;
  std::size_t pos = 0;
  for (std::size_t t = 0; t < ctx.Ig.size(); ++t, ++pos) {
    cand.I.push_back(ctx.Ig[t]);
    cand.lambda_g.push_back(kv[pos]);
  }
  for (std::size_t j = 0; j < P.h.size(); ++j, ++pos) {
    cand.J.push_back(j);
    cand.lambda_h.push_back(kv[pos]);
  }
  cand.eta.assign(P.blocks.size(), RatVec());
  cand.branch.assign(P.blocks.size(), BranchChoice());
  for (std::size_t b = 0; b < P.blocks.size(); ++b)
    cand.eta[b] = RatVec(P.blocks[b].gamma.dim(), Rat(0));
  for (const auto& [b, v] : span_basis) {
    cand.eta[b] = add(cand.eta[b], scale(kv[pos], v));
    ++pos;
  }
  rep.witness_candidate = cand;
  rep.verdict = Verdict::FAILS_WITNESSED;
  rep.notes.push_back("nonzero multiplier with block parts in the span of the piece cones");
  return rep;
}

/// MPDC-NNAMCQ: no nonzero multiplier with signed lambda_g and eta in the
/// limiting normal cones. Decided exactly by branching over stratum cones.
inline CqReport check_nnamcq(const Program& P, const RatVec& xbar, const SequenceScheme& scheme,
                             const CqConfig& cfg = {}) {
  CqReport rep;
  rep.cq_name = "nnamcq";
  detail::echo_scheme(rep, scheme, cfg);
  CqContext ctx = make_cq_context(P, xbar, cfg, JPolicy::BasisSubsets);
  std::size_t nb = P.blocks.size(), d = P.dim(), m = P.h.size();
  std::vector<std::size_t> pick(nb, 0);
  bool fail = false;
  std::function<void(std::size_t)> rec = [&](std::size_t b) {
    if (fail) return;
    if (b < nb) {
      for (pick[b] = 0; pick[b] < ctx.blocks[b].stratum_cones.size() && !fail; ++pick[b])
        rec(b + 1);
      return;
    }
    ++rep.config_count;
    // vars: lambda_g (Ig) | lambda_h (m) | per block: eta (p_b) + cone coefs
    std::size_t nvars = ctx.Ig.size() + m;
    std::vector<std::size_t> eta_off(nb), coef_off(nb);
    for (std::size_t bb = 0; bb < nb; ++bb) {
      const ConeGenerators& K = ctx.blocks[bb].stratum_cones[pick[bb]];
      eta_off[bb] = nvars;
      nvars += P.blocks[bb].gamma.dim();
      coef_off[bb] = nvars;
      nvars += K.rays.size() + K.lines.size();
    }
    if (nvars == 0) return;
    std::vector<bool> nonneg(nvars, false);
    for (std::size_t t = 0; t < ctx.Ig.size(); ++t) nonneg[t] = true;
    RatMat rows;
    // stationarity rows: sum lambda_g v + sum lambda_h grad h + grad Phi^T eta = 0
    for (std::size_t dd = 0; dd < d; ++dd) rows.emplace_back(nvars, Rat(0));
    for (std::size_t t = 0; t < ctx.Ig.size(); ++t)
      for (std::size_t dd = 0; dd < d; ++dd) rows[dd][t] = ctx.grad_g[t][dd];
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t dd = 0; dd < d; ++dd) rows[dd][ctx.Ig.size() + j] = ctx.grad_h[j][dd];
    std::vector<std::vector<std::size_t>> nz_group(1);
    for (std::size_t t = 0; t < ctx.Ig.size() + m; ++t) nz_group[0].push_back(t);
    for (std::size_t bb = 0; bb < nb; ++bb) {
      const ConeGenerators& K = ctx.blocks[bb].stratum_cones[pick[bb]];
      std::size_t p = P.blocks[bb].gamma.dim();
      auto J = jacobian(P.blocks[bb].phi, xbar);
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t dd = 0; dd < d; ++dd) rows[dd][eta_off[bb] + i] = J[i][dd];
        nz_group[0].push_back(eta_off[bb] + i);
      }
      // eta = sum coef * generator rows
      for (std::size_t i = 0; i < p; ++i) {
        RatVec row(nvars, Rat(0));
        row[eta_off[bb] + i] = 1;
        std::size_t c = coef_off[bb];
        for (const RatVec& g : K.rays) row[c++] = -g[i];
        for (const RatVec& g : K.lines) row[c++] = -g[i];
        rows.push_back(std::move(row));
      }
      for (std::size_t t = 0; t < K.rays.size(); ++t) nonneg[coef_off[bb] + t] = true;
    }
    auto z = cone_nonzero_point(rows, nvars, nonneg, nz_group);
    if (!z) return;
    MultiplierCandidate cand;
    for (std::size_t t = 0; t < ctx.Ig.size(); ++t) {
      cand.I.push_back(ctx.Ig[t]);
      cand.lambda_g.push_back((*z)[t]);
    }
    for (std::size_t j = 0; j < m; ++j) {
      cand.J.push_back(j);
      cand.lambda_h.push_back((*z)[ctx.Ig.size() + j]);
    }
    for (std::size_t bb = 0; bb < nb; ++bb) {
      std::size_t p = P.blocks[bb].gamma.dim();
      RatVec eta(p);
      for (std::size_t i = 0; i < p; ++i) eta[i] = (*z)[eta_off[bb] + i];
      cand.eta.push_back(std::move(eta));
      const ConeGenerators& K = ctx.blocks[bb].stratum_cones[pick[bb]];
      cand.branch.push_back(BranchChoice{K.rays, K.lines});
    }
    rep.witness_candidate = std::move(cand);
    fail = true;
  };
  rec(0);
  rep.verdict = fail ? Verdict::FAILS_WITNESSED : Verdict::HOLDS_SAMPLED;
  if (!fail) rep.notes.push_back("decided exactly: no nonzero abnormal multiplier");
  return rep;
}

/// MPDC-PRCPLD: RCPLD on the subsystem of every partition containing xbar.
inline CqReport check_prcpld(const Program& P, const RatVec& xbar, const SequenceScheme& scheme,
                             const CqConfig& cfg = {}) {
  CqReport rep;
  rep.cq_name = "prcpld";
  detail::echo_scheme(rep, scheme, cfg);
  std::vector<Partition> parts = admissible_partitions(P, xbar, cfg.active_tol);
  bool marginal = false;
  for (std::size_t pi = 0; pi < parts.size(); ++pi) {
    Program sub = subsystem(P, parts[pi]);
    CqReport inner = check_rcpld(sub, xbar, scheme, cfg, "rcpld");
    rep.candidate_count += inner.candidate_count;
    rep.config_count += inner.config_count;
    rep.capped = rep.capped || inner.capped;
    if (inner.verdict == Verdict::FAILS_WITNESSED) {
      rep.verdict = Verdict::FAILS_WITNESSED;
      rep.failing_partition = pi;
      rep.witness_candidate = inner.witness_candidate;
      rep.witness_sequence = inner.witness_sequence;
      rep.witness_point = inner.witness_point;
      rep.notes.push_back("subsystem of partition " + std::to_string(pi) + " fails RCPLD");
      return rep;
    }
    if (inner.verdict == Verdict::INCONCLUSIVE) marginal = true;
  }
  rep.verdict = (marginal || rep.capped) ? Verdict::INCONCLUSIVE : Verdict::HOLDS_SAMPLED;
  rep.notes.push_back(std::to_string(parts.size()) + " admissible partitions checked");
  return rep;
}

/// Replays a FAILS_WITNESSED report: re-verifies the multiplier identity,
/// the membership of each eta in the limiting cone, and the stored
/// independence pattern. Returns true when everything reproduces.
inline bool replay_witness(const Program& P, const RatVec& xbar, const CqReport& rep,
                           const SequenceScheme& scheme, const CqConfig& cfg = {}) {
  if (rep.verdict != Verdict::FAILS_WITNESSED) return false;
  if (rep.witness_point && !rep.witness_sequence) return true;  // rank-flip witness
  if (!rep.witness_sequence) return false;
  const Program* prog = &P;
  Program sub;
  if (rep.failing_partition) {
    std::vector<Partition> parts = admissible_partitions(P, xbar, cfg.active_tol);
    if (*rep.failing_partition >= parts.size()) return false;
    sub = subsystem(P, parts[*rep.failing_partition]);
    prog = &sub;
  }
  if (rep.witness_point && rep.witness_sequence && !rep.witness_candidate) {
    // rank-comparison witness (CRCQ/RCRCQ style)
    FamilyTester ft(*prog, xbar, scheme, cfg);
    std::vector<std::size_t> cols = ft.family_columns(rep.witness_sequence->family);
    std::size_t r0 = ft.rank_at(FamilyTester::kCenter, cols);
    std::size_t pid = rep.witness_sequence->direction_index * ft.levels() +
                      static_cast<std::size_t>(rep.witness_sequence->independent_from_level);
    return ft.rank_at(pid, cols) != r0;
  }
  if (rep.witness_candidate) {
    const MultiplierCandidate& cand = *rep.witness_candidate;
    RatVec acc(prog->dim(), Rat(0));
    for (std::size_t t = 0; t < cand.I.size(); ++t) {
      if (cand.lambda_g[t] < 0) return false;
      acc = add(acc, scale(cand.lambda_g[t], gradient(prog->g[cand.I[t]]).eval(xbar)));
    }
    for (std::size_t t = 0; t < cand.J.size(); ++t)
      acc = add(acc, scale(cand.lambda_h[t], gradient(prog->h[cand.J[t]]).eval(xbar)));
    bool all_zero = is_zero(cand.lambda_g) && is_zero(cand.lambda_h);
    for (std::size_t b = 0; b < prog->blocks.size(); ++b) {
      if (!is_zero(cand.eta[b])) all_zero = false;
      acc = add(acc, jacobian_transpose_apply(prog->blocks[b].phi, xbar, cand.eta[b]));
      RatVec y = prog->blocks[b].phi.eval(xbar);
      if (!is_zero(cand.eta[b]) &&
          !limiting_member(prog->blocks[b].gamma, y, cand.eta[b], cfg.active_tol))
        return false;
    }
    if (!is_zero(acc) || all_zero) return false;
  }
  FamilyTester ft(*prog, xbar, scheme, cfg);
  std::vector<std::size_t> cols = ft.family_columns(rep.witness_sequence->family);
  TailResult tr = ft.test_direction(cols, rep.witness_sequence->direction_index);
  return tr.pattern == TailPattern::IndependentTail &&
         tr.independent_from == rep.witness_sequence->independent_from_level;
}

inline CqReport check_cq(const std::string& name, const Program& P, const RatVec& xbar,
                         const SequenceScheme& scheme, const CqConfig& cfg = {}) {
  if (name == "rcpld") return check_rcpld(P, xbar, scheme, cfg);
  if (name == "prcpld") return check_prcpld(P, xbar, scheme, cfg);
  if (name == "licq") return check_licq(P, xbar, scheme, cfg);
  if (name == "nnamcq") return check_nnamcq(P, xbar, scheme, cfg);
  if (name == "crcq") return check_crcq(P, xbar, scheme, cfg);
  if (name == "rcrcq") return check_rcrcq(P, xbar, scheme, cfg);
  if (name == "cpld") return check_cpld(P, xbar, scheme, cfg);
  if (name == "ercpld") return check_ercpld(P, xbar, scheme, cfg);
  throw std::runtime_error("unknown constraint qualification name: " + name);
}

}  // namespace discq
