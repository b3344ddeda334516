#pragma once

// Two-phase revised simplex over an implicitly generated column set.
//
// Solves min c.x subject to A x = b, x >= 0 with b >= 0. Columns of A are
// produced on demand by a callback, so problems with 2^20 columns never
// materialize the matrix. The basis inverse is kept dense (rows x rows).
// Entering and leaving choices follow Bland's rule, which guarantees
// termination under degeneracy in exact arithmetic.

#include "bellcompat/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bellcompat {

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static bool positive(const Rational& x, double) { return sgn(x) > 0; }
  static bool negative(const Rational& x, double) { return sgn(x) < 0; }
  static bool zero(const Rational& x, double) { return sgn(x) == 0; }
};

template <>
struct ScalarTraits<double> {
  static bool positive(double x, double eps) { return x > eps; }
  static bool negative(double x, double eps) { return x < -eps; }
  static bool zero(double x, double eps) { return std::abs(x) <= eps; }
};

template <class T>
class RevisedSimplex {
 public:
  using Entry = std::pair<std::size_t, T>;
  /// Writes the nonzeros of column j into `out` (cleared by the caller).
  using ColumnFn = std::function<void(std::size_t j, std::vector<Entry>& out)>;

  enum class Status { Optimal, Unbounded };

  struct PhaseOneResult {
    bool feasible = false;
    T infeasibility{};    // optimal sum of artificials
    std::vector<T> duals; // y with y.A_j <= 0 for all j and y.b = infeasibility
  };

  RevisedSimplex(std::size_t rows, std::size_t cols, ColumnFn column, std::vector<T> rhs,
                 double eps = 0.0, std::size_t max_iterations = 1000000)
      : rows_(rows),
        cols_(cols),
        column_(std::move(column)),
        rhs_(std::move(rhs)),
        eps_(eps),
        max_iterations_(max_iterations),
        fixed_(cols, false),
        is_basic_(cols + rows, false),
        binv_(rows, std::vector<T>(rows)),
        basis_(rows),
        xb_(rhs_) {
    if (rhs_.size() != rows_) throw std::invalid_argument("RevisedSimplex: rhs size mismatch");
    for (std::size_t i = 0; i < rows_; ++i) {
      if (Traits::negative(rhs_[i], 0.0)) {
        throw std::invalid_argument("RevisedSimplex: rhs must be nonnegative");
      }
      binv_[i][i] = T(1);
      basis_[i] = cols_ + i;
      is_basic_[cols_ + i] = true;
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t iterations() const { return iterations_; }

  /// Minimizes the sum of artificial variables. `tolerance` decides
  /// feasibility in floating point (ignored for exact scalars).
  PhaseOneResult phase_one(double tolerance = 0.0) {
    std::vector<T> cost(cols_);
    auto basic_cost = [this](std::size_t var) { return var >= cols_ ? T(1) : T(0); };
    run(cost, basic_cost, /*allow_artificial_exit=*/false);
    PhaseOneResult result;
    result.infeasibility = T(0);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] >= cols_) result.infeasibility += xb_[i];
    }
    result.duals = duals(basic_cost);
    if constexpr (std::is_same_v<T, double>) {
      result.feasible = result.infeasibility <= tolerance;
    } else {
      result.feasible = Traits::zero(result.infeasibility, 0.0);
    }
    if (result.feasible) drive_out_artificials();
    return result;
  }

  /// Minimizes `cost` (size cols) from the current feasible basis.
  Status optimize(const std::vector<T>& cost) {
    auto basic_cost = [this, &cost](std::size_t var) { return var >= cols_ ? T(0) : cost[var]; };
    return run(cost, basic_cost, /*allow_artificial_exit=*/true);
  }

  /// After an optimal solve of `cost`, excludes every nonbasic column whose
  /// reduced cost is strictly positive: such columns are zero in every
  /// optimal solution. Returns the number of columns still free to enter.
  std::size_t restrict_to_optimal_face(const std::vector<T>& cost) {
    auto basic_cost = [this, &cost](std::size_t var) { return var >= cols_ ? T(0) : cost[var]; };
    const auto y = duals(basic_cost);
    std::size_t free_columns = 0;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (fixed_[j] || is_basic_[j]) continue;
      if (Traits::positive(reduced_cost(j, cost[j], y), eps_)) {
        fixed_[j] = true;
      } else {
        ++free_columns;
      }
    }
    return free_columns;
  }

  void fix_column(std::size_t j) { fixed_.at(j) = true; }

  std::vector<T> primal() const {
    std::vector<T> x(cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < cols_) x[basis_[i]] = xb_[i];
    }
    return x;
  }

  T objective(const std::vector<T>& cost) const {
    T value(0);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < cols_) value += cost[basis_[i]] * xb_[i];
    }
    return value;
  }

 private:
  using Traits = ScalarTraits<T>;

  template <class BasicCost>
  std::vector<T> duals(BasicCost&& basic_cost) const {
    std::vector<T> y(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      T c = basic_cost(basis_[r]);
      if (Traits::zero(c, 0.0)) continue;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (!Traits::zero(binv_[r][i], 0.0)) y[i] += c * binv_[r][i];
      }
    }
    return y;
  }

  T reduced_cost(std::size_t j, const T& c, const std::vector<T>& y) const {
    scratch_.clear();
    column_(j, scratch_);
    T rc = c;
    for (const auto& [row, value] : scratch_) rc -= y[row] * value;
    return rc;
  }

  template <class BasicCost>
  Status run(const std::vector<T>& cost, BasicCost&& basic_cost, bool allow_artificial_exit) {
    std::vector<T> direction(rows_);
    while (true) {
      if (++iterations_ > max_iterations_) {
        throw std::runtime_error("RevisedSimplex: iteration limit exceeded");
      }
      const auto y = duals(basic_cost);
      std::optional<std::size_t> entering;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (fixed_[j] || is_basic_[j]) continue;
        if (Traits::negative(reduced_cost(j, cost[j], y), eps_)) {
          entering = j;
          break;
        }
      }
      if (!entering) return Status::Optimal;

      scratch_.clear();
      column_(*entering, scratch_);
      for (std::size_t i = 0; i < rows_; ++i) {
        direction[i] = T(0);
        for (const auto& [row, value] : scratch_) {
          if (!Traits::zero(binv_[i][row], 0.0)) direction[i] += binv_[i][row] * value;
        }
      }

      std::optional<std::size_t> leave;
      T best_ratio{};
      for (std::size_t i = 0; i < rows_; ++i) {
        T ratio;
        if (allow_artificial_exit && basis_[i] >= cols_ && !Traits::zero(direction[i], eps_)) {
          // A zero-level artificial on a non-redundant row: leave at ratio 0.
          ratio = T(0);
        } else if (Traits::positive(direction[i], pivot_tolerance())) {
          ratio = xb_[i] / direction[i];
        } else {
          continue;
        }
        if (!leave || better_ratio(ratio, best_ratio, basis_[i], basis_[*leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (!leave) return Status::Unbounded;
      pivot(*leave, *entering, direction);
    }
  }

  // Floating-point pivots smaller than this amplify rounding error in the
  // basis inverse without bound.
  double pivot_tolerance() const {
    if constexpr (std::is_same_v<T, double>) return std::max(eps_, 1e-9);
    return 0.0;
  }

  bool better_ratio(const T& ratio, const T& best, std::size_t var, std::size_t best_var) const {
    if constexpr (std::is_same_v<T, double>) {
      if (ratio < best - eps_) return true;
      if (ratio > best + eps_) return false;
    } else {
      if (ratio < best) return true;
      if (ratio > best) return false;
    }
    return var < best_var;
  }

  void pivot(std::size_t r, std::size_t entering, const std::vector<T>& direction) {
    const T pivot_value = direction[r];
    for (auto& v : binv_[r]) v /= pivot_value;
    xb_[r] /= pivot_value;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r || Traits::zero(direction[i], 0.0)) continue;
      const T factor = direction[i];
      for (std::size_t k = 0; k < rows_; ++k) {
        if (!Traits::zero(binv_[r][k], 0.0)) binv_[i][k] -= factor * binv_[r][k];
      }
      xb_[i] -= factor * xb_[r];
      if constexpr (std::is_same_v<T, double>) {
        if (xb_[i] < 0.0 && xb_[i] > -eps_) xb_[i] = 0.0;
      }
    }
    is_basic_[basis_[r]] = false;
    basis_[r] = entering;
    is_basic_[entering] = true;
  }

  // Degenerate pivots that swap zero-level artificials for structural
  // columns. Artificials left in the basis sit on redundant rows.
  void drive_out_artificials() {
    std::vector<T> direction(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] < cols_) continue;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (fixed_[j] || is_basic_[j]) continue;
        scratch_.clear();
        column_(j, scratch_);
        T dr(0);
        for (const auto& [row, value] : scratch_) dr += binv_[r][row] * value;
        if (Traits::zero(dr, pivot_tolerance())) continue;
        for (std::size_t i = 0; i < rows_; ++i) {
          direction[i] = T(0);
          for (const auto& [row, value] : scratch_) direction[i] += binv_[i][row] * value;
        }
        pivot(r, j, direction);
        break;
      }
    }
  }

  std::size_t rows_;
  std::size_t cols_;
  ColumnFn column_;
  std::vector<T> rhs_;
  double eps_;
  std::size_t max_iterations_;
  std::size_t iterations_ = 0;
  std::vector<bool> fixed_;
  std::vector<bool> is_basic_;
  std::vector<std::vector<T>> binv_;
  std::vector<std::size_t> basis_;
  std::vector<T> xb_;
  mutable std::vector<Entry> scratch_;
};

}  // namespace bellcompat
