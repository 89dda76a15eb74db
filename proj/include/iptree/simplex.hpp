#pragma once

#include <cstddef>
#include <vector>

#include "iptree/errors.hpp"
#include "iptree/numeric.hpp"

namespace iptree {

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <class T>
struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  T objective{0};
  std::vector<T> x;
};

// Dense two-phase primal simplex with Bland's anti-cycling rule, solving
//     maximize c.x  subject to  A x <= b,  x >= 0.
// With T = Rational and tol = 0 every comparison is exact. Problem sizes in
// this library are tiny, so the tableau is recomputed-cost, not revised.
template <class T>
class SimplexSolver {
 public:
  SimplexSolver(std::vector<std::vector<T>> A, std::vector<T> b, std::vector<T> c, T tol)
      : n_(c.size()), m_(A.size()), tol_(std::move(tol)), cost_(std::move(c)) {
    rows_.resize(m_);
    rhs_.resize(m_);
    basis_.resize(m_);
    std::size_t artificials = 0;
    for (std::size_t i = 0; i < m_; ++i)
      if (b[i] < T(0)) ++artificials;
    cols_ = n_ + m_ + artificials;
    std::size_t next_art = n_ + m_;
    for (std::size_t i = 0; i < m_; ++i) {
      rows_[i].assign(cols_, T(0));
      bool flip = b[i] < T(0);
      for (std::size_t j = 0; j < n_; ++j) rows_[i][j] = flip ? -A[i][j] : A[i][j];
      rows_[i][n_ + i] = flip ? T(-1) : T(1);
      rhs_[i] = flip ? -b[i] : b[i];
      if (flip) {
        rows_[i][next_art] = T(1);
        basis_[i] = next_art++;
      } else {
        basis_[i] = n_ + i;
      }
    }
    first_artificial_ = n_ + m_;
  }

  LpResult<T> solve() {
    LpResult<T> result;
    if (first_artificial_ < cols_) {
      // Phase 1: maximize minus the sum of artificials.
      std::vector<T> phase1(cols_, T(0));
      for (std::size_t j = first_artificial_; j < cols_; ++j) phase1[j] = T(-1);
      if (!iterate(phase1, cols_)) fail(Err::UnboundedPrice, "internal: phase 1 unbounded");
      T infeasibility(0);
      for (std::size_t i = 0; i < m_; ++i)
        if (basis_[i] >= first_artificial_) infeasibility += rhs_[i];
      if (infeasibility > tol_) {
        result.status = LpStatus::Infeasible;
        return result;
      }
      expel_artificials();
    }
    std::vector<T> phase2(cols_, T(0));
    for (std::size_t j = 0; j < n_; ++j) phase2[j] = cost_[j];
    if (!iterate(phase2, first_artificial_)) {
      result.status = LpStatus::Unbounded;
      return result;
    }
    result.status = LpStatus::Optimal;
    result.x.assign(n_, T(0));
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) result.x[basis_[i]] = rhs_[i];
    result.objective = T(0);
    for (std::size_t j = 0; j < n_; ++j) result.objective += cost_[j] * result.x[j];
    return result;
  }

 private:
  // Runs simplex iterations for the given costs over columns [0, allowed).
  // Returns false on unboundedness.
  bool iterate(const std::vector<T>& cost, std::size_t allowed) {
    for (;;) {
      std::size_t entering = allowed;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (is_basic(j)) continue;
        if (reduced_cost(cost, j) > tol_) {
          entering = j;  // Bland: the lowest eligible index
          break;
        }
      }
      if (entering == allowed) return true;

      std::size_t leaving = m_;
      for (std::size_t i = 0; i < m_; ++i) {
        if (rows_[i][entering] <= tol_) continue;
        if (leaving == m_) {
          leaving = i;
          continue;
        }
        T lhs = rhs_[i] * rows_[leaving][entering];
        T rhs = rhs_[leaving] * rows_[i][entering];
        if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[leaving])) leaving = i;
      }
      if (leaving == m_) return false;
      pivot(leaving, entering);
    }
  }

  T reduced_cost(const std::vector<T>& cost, std::size_t j) const {
    T r = cost[j];
    for (std::size_t i = 0; i < m_; ++i) r -= cost[basis_[i]] * rows_[i][j];
    return r;
  }

  bool is_basic(std::size_t j) const {
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] == j) return true;
    return false;
  }

  void pivot(std::size_t row, std::size_t col) {
    T p = rows_[row][col];
    for (auto& v : rows_[row]) v /= p;
    rhs_[row] /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      T factor = rows_[i][col];
      if (factor == T(0)) continue;
      for (std::size_t j = 0; j < cols_; ++j) rows_[i][j] -= factor * rows_[row][j];
      rhs_[i] -= factor * rhs_[row];
    }
    basis_[row] = col;
  }

  // Pivots artificials that linger in the basis at level zero out of it;
  // rows with no real pivot candidate are redundant and dropped.
  void expel_artificials() {
    for (std::size_t i = 0; i < m_;) {
      if (basis_[i] < first_artificial_) {
        ++i;
        continue;
      }
      std::size_t col = first_artificial_;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        T v = rows_[i][j] < T(0) ? -rows_[i][j] : rows_[i][j];
        if (v > tol_) {
          col = j;
          break;
        }
      }
      if (col == first_artificial_) {
        rows_.erase(rows_.begin() + i);
        rhs_.erase(rhs_.begin() + i);
        basis_.erase(basis_.begin() + i);
        --m_;
      } else {
        pivot(i, col);
        ++i;
      }
    }
  }

  std::size_t n_, m_, cols_ = 0, first_artificial_ = 0;
  T tol_;
  std::vector<T> cost_;
  std::vector<std::vector<T>> rows_;
  std::vector<T> rhs_;
  std::vector<std::size_t> basis_;
};

template <class T>
LpResult<T> solve_lp(std::vector<std::vector<T>> A, std::vector<T> b, std::vector<T> c,
                     T tol = num<T>::feasibility_tol()) {
  SimplexSolver<T> solver(std::move(A), std::move(b), std::move(c), std::move(tol));
  return solver.solve();
}

// Is {x >= 0 : A x <= b} non-empty?
template <class T>
bool lp_feasible(std::vector<std::vector<T>> A, std::vector<T> b,
                 T tol = num<T>::feasibility_tol()) {
  std::vector<T> c(A.empty() ? 0 : A[0].size(), T(0));
  return solve_lp(std::move(A), std::move(b), std::move(c), std::move(tol)).status ==
         LpStatus::Optimal;
}

}  // namespace iptree
