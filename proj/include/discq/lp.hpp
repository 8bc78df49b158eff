#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "discq/linalg.hpp"
#include "discq/rational.hpp"

namespace discq {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Rat objective;
  RatVec x;
};

// Exact rational simplex, full tableau, Bland's rule (anti-cycling, finite).
// Standard form: max c·x  s.t.  A x = b, x >= 0.
class Simplex {
 public:
  static LpSolution solve(RatMat A, RatVec b, RatVec c) {
    Simplex s(std::move(A), std::move(b), std::move(c));
    return s.run();
  }

 private:
  Simplex(RatMat A, RatVec b, RatVec c)
      : A_(std::move(A)), b_(std::move(b)), c_(std::move(c)) {}

  LpSolution run() {
    m_ = A_.size();
    n_ = c_.size();
    for (std::size_t i = 0; i < m_; ++i) {
      if (b_[i] < 0) {
        for (auto& a : A_[i]) a = -a;
        b_[i] = -b_[i];
      }
    }
    // tableau: n real cols + m artificial cols + rhs
    T_.assign(m_, RatVec(n_ + m_ + 1, Rat(0)));
    basis_.assign(m_, 0);
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) T_[i][j] = A_[i][j];
      T_[i][n_ + i] = 1;
      T_[i][n_ + m_] = b_[i];
      basis_[i] = n_ + i;
    }
    // phase 1: max -(sum of artificials)
    RatVec cost(n_ + m_, Rat(0));
    for (std::size_t j = n_; j < n_ + m_; ++j) cost[j] = -1;
    set_cost(cost);
    iterate(n_ + m_);
    if (obj_ < 0) return {LpStatus::Infeasible, Rat(0), {}};
    purge_artificials();
    // phase 2
    RatVec cost2(n_ + m_, Rat(0));
    for (std::size_t j = 0; j < n_; ++j) cost2[j] = c_[j];
    set_cost(cost2);
    if (!iterate(n_)) return {LpStatus::Unbounded, Rat(0), {}};
    LpSolution out;
    out.status = LpStatus::Optimal;
    out.objective = obj_;
    out.x.assign(n_, Rat(0));
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) out.x[basis_[i]] = T_[i].back();
    return out;
  }

  void set_cost(const RatVec& cost) {
    cr_ = cost;
    cr_.push_back(Rat(0));  // rhs slot keeps the row shape for pivoting
    obj_ = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      const Rat& cb = cost[basis_[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j <= n_ + m_; ++j) cr_[j] -= cb * T_[i][j];
      obj_ += cb * T_[i].back();
    }
  }

  // Bland: entering = lowest-index column with positive reduced cost.
  bool iterate(std::size_t allowed_cols) {
    for (;;) {
      std::size_t enter = allowed_cols;
      for (std::size_t j = 0; j < allowed_cols; ++j) {
        if (cr_[j] > 0) {
          enter = j;
          break;
        }
      }
      if (enter == allowed_cols) return true;  // optimal
      std::size_t leave = m_;
      Rat best_ratio;
      for (std::size_t i = 0; i < m_; ++i) {
        if (T_[i][enter] <= 0) continue;
        Rat ratio = T_[i].back() / T_[i][enter];
        if (leave == m_ || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == m_) return false;  // unbounded
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    Rat inv = 1 / T_[row][col];
    for (auto& x : T_[row]) x *= inv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row || T_[i][col] == 0) continue;
      Rat f = T_[i][col];
      for (std::size_t j = 0; j <= n_ + m_; ++j) T_[i][j] -= f * T_[row][j];
    }
    if (cr_[col] != 0) {
      Rat f = cr_[col];
      for (std::size_t j = 0; j <= n_ + m_; ++j) cr_[j] -= f * T_[row][j];
      obj_ += f * T_[row].back();
    }
    basis_[row] = col;
  }

  // After phase 1 artificials still in the basis sit at value zero; pivot them
  // out on any real column, or drop the (redundant) row.
  void purge_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      std::size_t j = 0;
      for (; j < n_; ++j)
        if (T_[i][j] != 0) break;
      if (j < n_) {
        pivot(i, j);
      } else {
        T_[i].assign(n_ + m_ + 1, Rat(0));  // dead row
        basis_[i] = n_ + i;
      }
    }
  }

  RatMat A_, T_;
  RatVec b_, c_, cr_;
  std::vector<std::size_t> basis_;
  Rat obj_;
  std::size_t m_ = 0, n_ = 0;
};

// Row/variable-level modeling layer over the standard-form core.
class LpProblem {
 public:
  enum class Sign { NonNeg, Free };
  enum class Rel { LE, EQ };

  std::size_t add_var(Sign s) {
    signs_.push_back(s);
    return signs_.size() - 1;
  }

  std::size_t num_vars() const { return signs_.size(); }

  void add_row(const RatVec& coeffs, Rel rel, const Rat& rhs) {
    if (coeffs.size() != signs_.size()) throw DimensionMismatch("LpProblem row size");
    rows_.push_back(coeffs);
    rels_.push_back(rel);
    rhs_.push_back(rhs);
  }

  /// max obj·vars subject to the rows. nullopt objective = pure feasibility.
  LpSolution solve(const RatVec& obj = {}) const {
    std::vector<std::size_t> col_of(signs_.size());
    std::size_t ncols = 0;
    for (std::size_t v = 0; v < signs_.size(); ++v) {
      col_of[v] = ncols;
      ncols += (signs_[v] == Sign::Free) ? 2 : 1;
    }
    std::size_t nslack = 0;
    for (Rel r : rels_)
      if (r == Rel::LE) ++nslack;
    RatMat A(rows_.size(), RatVec(ncols + nslack, Rat(0)));
    RatVec b = rhs_;
    std::size_t slack = ncols;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      for (std::size_t v = 0; v < signs_.size(); ++v) {
        A[i][col_of[v]] = rows_[i][v];
        if (signs_[v] == Sign::Free) A[i][col_of[v] + 1] = -rows_[i][v];
      }
      if (rels_[i] == Rel::LE) A[i][slack++] = 1;
    }
    RatVec c(ncols + nslack, Rat(0));
    if (!obj.empty()) {
      if (obj.size() != signs_.size()) throw DimensionMismatch("LpProblem objective size");
      for (std::size_t v = 0; v < signs_.size(); ++v) {
        c[col_of[v]] = obj[v];
        if (signs_[v] == Sign::Free) c[col_of[v] + 1] = -obj[v];
      }
    }
    LpSolution raw = Simplex::solve(std::move(A), std::move(b), std::move(c));
    if (raw.status != LpStatus::Optimal) return raw;
    LpSolution out;
    out.status = raw.status;
    out.objective = raw.objective;
    out.x.assign(signs_.size(), Rat(0));
    for (std::size_t v = 0; v < signs_.size(); ++v) {
      out.x[v] = raw.x[col_of[v]];
      if (signs_[v] == Sign::Free) out.x[v] -= raw.x[col_of[v] + 1];
    }
    return out;
  }

  bool feasible(RatVec* point = nullptr) const {
    LpSolution s = solve();
    if (s.status == LpStatus::Optimal && point) *point = s.x;
    return s.status == LpStatus::Optimal;
  }

 private:
  std::vector<Sign> signs_;
  RatMat rows_;
  std::vector<Rel> rels_;
  RatVec rhs_;
};

// Nonzero point of the polyhedral cone {z : rows·z = 0, z_i >= 0 for i in
// nonneg}, with every index group in `required_nonzero` made nonzero
// simultaneously. Solution cones are convex, so witnesses for individual
// groups combine by a positive combination; the epsilon walk below picks
// coefficients avoiding the finitely many cancellations.
inline std::optional<RatVec> cone_nonzero_point(
    const RatMat& eq_rows, std::size_t nvars, const std::vector<bool>& nonneg,
    const std::vector<std::vector<std::size_t>>& required_nonzero) {
  auto build = [&]() {
    LpProblem lp;
    for (std::size_t v = 0; v < nvars; ++v)
      lp.add_var(nonneg[v] ? LpProblem::Sign::NonNeg : LpProblem::Sign::Free);
    for (const RatVec& r : eq_rows) lp.add_row(r, LpProblem::Rel::EQ, Rat(0));
    return lp;
  };
  auto witness_for = [&](const std::vector<std::size_t>& group) -> std::optional<RatVec> {
    for (std::size_t v : group) {
      for (int dir = 0; dir < (nonneg[v] ? 1 : 2); ++dir) {
        LpProblem lp = build();
        RatVec bound(nvars, Rat(0));
        bound[v] = (dir == 0) ? 1 : -1;
        lp.add_row(bound, LpProblem::Rel::LE, Rat(1));
        LpSolution s = lp.solve(bound);
        if (s.status == LpStatus::Optimal && s.objective > 0) return s.x;
        if (s.status == LpStatus::Unbounded) {
          // bounded by construction, but be safe
          continue;
        }
      }
    }
    return std::nullopt;
  };

  std::vector<RatVec> parts;
  for (const auto& group : required_nonzero) {
    auto w = witness_for(group);
    if (!w) return std::nullopt;
    parts.push_back(*w);
  }
  if (parts.empty()) return std::nullopt;

  auto group_ok = [&](const RatVec& z, const std::vector<std::size_t>& group) {
    for (std::size_t v : group)
      if (z[v] != 0) return true;
    return false;
  };
  RatVec z = parts[0];
  for (std::size_t g = 1; g < parts.size(); ++g) {
    if (group_ok(z, required_nonzero[g])) continue;
    Rat eps(1);
    for (int attempt = 0; attempt < 64; ++attempt, eps /= 2) {
      RatVec cand = add(z, scale(eps, parts[g]));
      bool ok = true;
      for (std::size_t gg = 0; gg <= g; ++gg)
        if (!group_ok(cand, required_nonzero[gg])) {
          ok = false;
          break;
        }
      if (ok) {
        z = cand;
        break;
      }
    }
  }
  for (const auto& group : required_nonzero)
    if (!group_ok(z, group)) return std::nullopt;
  Rat n = norm1(z);
  if (n == 0) return std::nullopt;
  for (auto& x : z) x /= n;
  return z;
}

}  // namespace discq
