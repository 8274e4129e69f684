#pragma once

// Dense search state for F*(R, D) over U x X x Y x Z cells.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "entropy_expr.hpp"
#include "simplex_opt.hpp"
#include "wzexp/exponent.hpp"

namespace wzexp::detail {

struct Scored {
  std::vector<double> q;
  double value = 0.0;
};

class FStarSearch {
 public:
  FStarSearch(const WZInstance& inst, std::size_t u_size);

  std::size_t cell(std::size_t u, std::size_t x, std::size_t y, std::size_t z) const {
    return ((u * nx_ + x) * ny_ + y) * nz_ + z;
  }
  const EntropyExpr& expr() const { return expr_; }
  const SimplexLayout& layout() const { return layout_; }

  double cost(std::span<const double> q) const;
  bool feasible(std::span<const double> q) const;

  /// q(u, x, y) moved onto the distortion-minimizing z.
  std::vector<double> z_repaired(std::span<const double> q) const;
  /// P_XY with constant U and the best z per (x, y).
  std::vector<double> trivial() const;
  /// U = X with the best z; empty when |U| < |X|.
  std::vector<double> u_equals_x() const;
  /// P_XY with constant U and constant Z; empty when infeasible.
  std::vector<double> constant_z() const;
  /// Drops mass on cells outside the search support and renormalizes.
  std::vector<double> project_free(std::span<const double> q) const;

  /// Feasibility repair by minimal mixing, then exact evaluation.
  Scored finalize(std::vector<double> q) const;
  /// finalize() over several pruning thresholds.
  Scored polish(const std::vector<double>& q) const;

  std::vector<double> initial_logits(std::uint64_t seed, std::size_t restart) const;
  Scored descend(std::vector<double> theta, int max_iters, double tol) const;

 private:
  const WZInstance& inst_;
  std::size_t nu_, nx_, ny_, nz_;
  EntropyExpr expr_;
  SimplexLayout layout_;
  std::vector<double> cost_;
  std::vector<bool> free_;
};

}  // namespace wzexp::detail
