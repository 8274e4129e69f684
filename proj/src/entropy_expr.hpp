#pragma once

// Objectives of the form
//   sum_k a_k H(S_k) + sum_c lin_c q_c + |sum_k b_k H(G_k) + g0|^+
// over a dense table q, where each S_k, G_k is the image of the cells under
// a projection. The kink is smoothed with a softplus of width mu and an
// expected-cost constraint E_q[d] <= D enters through an augmented
// Lagrangian penalty.

#include <cstddef>
#include <span>
#include <vector>

#include "simplex_opt.hpp"

namespace wzexp::detail {

/// Cell -> marginal-cell map keeping `keep` axes of a row-major `shape`.
std::vector<std::size_t> projection(const std::vector<std::size_t>& shape,
                                    const std::vector<std::size_t>& keep);

class EntropyExpr {
 public:
  explicit EntropyExpr(std::size_t n_cells) : n_cells_(n_cells), linear_(n_cells, 0.0) {}

  void add_smooth(double coef, std::vector<std::size_t> proj);
  void add_gap(double coef, std::vector<std::size_t> proj);
  void set_gap_constant(double c) { gap_const_ = c; has_gap_ = true; }
  std::vector<double>& linear() { return linear_; }
  void set_cost(std::vector<double> cost, double level) {
    cost_ = std::move(cost);
    level_ = level;
  }

  struct Parts {
    double smooth = 0.0;
    double gap = 0.0;
    double cost = 0.0;
  };
  Parts parts(std::span<const double> q) const;
  /// smooth + max(gap, 0); the cost is not included.
  double exact(std::span<const double> q) const;
  /// Smoothed, penalized value with gradient.
  double smoothed(std::span<const double> q, std::span<double> grad, double mu, double nu,
                  double lambda) const;

  std::size_t n_cells() const { return n_cells_; }
  bool has_cost() const { return !cost_.empty(); }
  double cost_level() const { return level_; }
  bool has_gap() const { return has_gap_; }

 private:
  struct Term {
    double coef;
    std::vector<std::size_t> proj;
    std::size_t size;
  };
  static double entropy_term(const Term& t, std::span<const double> q, std::vector<double>& m);

  std::size_t n_cells_;
  std::vector<Term> smooth_, gap_;
  std::vector<double> linear_;
  double gap_const_ = 0.0;
  bool has_gap_ = false;
  std::vector<double> cost_;
  double level_ = 0.0;
};

struct DescentOptions {
  int max_iters = 5000;
  double tol = 1e-9;
  int stages = 8;
  double mu_first = 1e-2;
  double mu_last = 1e-7;
  double lambda_first = 20.0;
};

/// Runs L-BFGS through a schedule of shrinking softplus widths, updating the
/// cost multiplier between stages. Returns the final cells.
std::vector<double> continuation_descent(const SimplexLayout& layout, const EntropyExpr& expr,
                                         std::vector<double> theta, const DescentOptions& opts);

}  // namespace wzexp::detail
