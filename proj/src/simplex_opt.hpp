#pragma once

// Minimization over products of probability simplices. Each block is a set
// of free cells whose values are a softmax of per-cell logits; cells not in
// any block stay at exactly zero.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace wzexp::detail {

struct SimplexLayout {
  std::size_t n_cells = 0;
  std::vector<std::vector<std::size_t>> blocks;
};

/// Objective in cell space: returns f(q) and writes df/dq into `grad`.
using CellObjective = std::function<double(std::span<const double> q, std::span<double> grad)>;

struct LbfgsOptions {
  int max_iters = 1000;
  double tol = 1e-10;
  int memory = 8;
};

struct LbfgsResult {
  std::vector<double> theta;
  double value = 0.0;
  int iters = 0;
};

void softmax_cells(const SimplexLayout& layout, std::span<const double> theta, std::span<double> q);

/// Logits reproducing `q` on its support; zero cells get `floor_logit` below
/// the block maximum.
std::vector<double> logits_from_cells(const SimplexLayout& layout, std::span<const double> q,
                                      double floor_logit = 30.0);

LbfgsResult minimize_logits(const SimplexLayout& layout, const CellObjective& objective,
                            std::vector<double> theta0, const LbfgsOptions& opts);

/// Numerically stable mu * log(1 + exp(x / mu)) and its derivative.
double smooth_positive_part(double x, double mu, double* slope);

}  // namespace wzexp::detail
