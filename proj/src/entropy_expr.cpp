#include "entropy_expr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "simplex_opt.hpp"

namespace wzexp::detail {

std::vector<std::size_t> projection(const std::vector<std::size_t>& shape,
                                    const std::vector<std::size_t>& keep) {
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  std::vector<std::size_t> strides(shape.size(), 1);
  for (std::size_t k = shape.size(); k-- > 1;) strides[k - 1] = strides[k] * shape[k];
  std::vector<std::size_t> out(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t m = 0;
    for (auto a : keep) m = m * shape[a] + (c / strides[a]) % shape[a];
    out[c] = m;
  }
  return out;
}

namespace {

std::size_t image_size(const std::vector<std::size_t>& proj) {
  std::size_t mx = 0;
  for (auto v : proj) mx = std::max(mx, v);
  return proj.empty() ? 0 : mx + 1;
}

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

}  // namespace

void EntropyExpr::add_smooth(double coef, std::vector<std::size_t> proj) {
  if (proj.size() != n_cells_) throw std::invalid_argument("EntropyExpr: projection size");
  const auto s = image_size(proj);
  smooth_.push_back({coef, std::move(proj), s});
}

void EntropyExpr::add_gap(double coef, std::vector<std::size_t> proj) {
  if (proj.size() != n_cells_) throw std::invalid_argument("EntropyExpr: projection size");
  const auto s = image_size(proj);
  gap_.push_back({coef, std::move(proj), s});
  has_gap_ = true;
}

double EntropyExpr::entropy_term(const Term& t, std::span<const double> q, std::vector<double>& m) {
  m.assign(t.size, 0.0);
  for (std::size_t c = 0; c < q.size(); ++c) m[t.proj[c]] += q[c];
  double h = 0.0;
  for (double v : m)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

EntropyExpr::Parts EntropyExpr::parts(std::span<const double> q) const {
  Parts out;
  std::vector<double> m;
  for (const auto& t : smooth_) out.smooth += t.coef * entropy_term(t, q, m);
  for (std::size_t c = 0; c < n_cells_; ++c)
    if (q[c] > 0.0) out.smooth += linear_[c] * q[c];
  out.gap = gap_const_;
  for (const auto& t : gap_) out.gap += t.coef * entropy_term(t, q, m);
  if (!cost_.empty())
    for (std::size_t c = 0; c < n_cells_; ++c) out.cost += cost_[c] * q[c];
  return out;
}

double EntropyExpr::exact(std::span<const double> q) const {
  const auto p = parts(q);
  return p.smooth + (has_gap_ ? std::max(p.gap, 0.0) : 0.0);
}

double EntropyExpr::smoothed(std::span<const double> q, std::span<double> grad, double mu,
                             double nu, double lambda) const {
  std::vector<double> m;
  double value = 0.0;
  for (std::size_t c = 0; c < n_cells_; ++c) {
    grad[c] = linear_[c];
    if (q[c] > 0.0) value += linear_[c] * q[c];
  }
  auto accumulate = [&](const Term& t, double weight) {
    const double h = entropy_term(t, q, m);
    for (std::size_t c = 0; c < n_cells_; ++c) {
      const double v = m[t.proj[c]];
      if (v > 0.0) grad[c] += weight * t.coef * (-std::log2(v) - kInvLn2);
    }
    return t.coef * h;
  };
  for (const auto& t : smooth_) value += accumulate(t, 1.0);

  if (has_gap_) {
    double gap = gap_const_;
    std::vector<double> gg(n_cells_, 0.0);
    for (const auto& t : gap_) {
      const double h = entropy_term(t, q, m);
      gap += t.coef * h;
      for (std::size_t c = 0; c < n_cells_; ++c) {
        const double v = m[t.proj[c]];
        if (v > 0.0) gg[c] += t.coef * (-std::log2(v) - kInvLn2);
      }
    }
    double slope = 0.0;
    value += smooth_positive_part(gap, mu, &slope);
    for (std::size_t c = 0; c < n_cells_; ++c) grad[c] += slope * gg[c];
  }

  if (!cost_.empty() && lambda > 0.0) {
    double e = 0.0;
    for (std::size_t c = 0; c < n_cells_; ++c) e += cost_[c] * q[c];
    const double t = std::max(0.0, nu + lambda * (e - level_));
    value += (t * t - nu * nu) / (2.0 * lambda);
    for (std::size_t c = 0; c < n_cells_; ++c) grad[c] += t * cost_[c];
  }
  return value;
}

std::vector<double> continuation_descent(const SimplexLayout& layout, const EntropyExpr& expr,
                                         std::vector<double> theta, const DescentOptions& opts) {
  const int stages = std::max(1, opts.stages);
  const int per_stage = std::max(1, opts.max_iters / stages);
  double nu = 0.0;
  double lambda = expr.has_cost() ? opts.lambda_first : 0.0;
  std::vector<double> q(layout.n_cells);
  for (int k = 0; k < stages; ++k) {
    const double frac = stages == 1 ? 1.0 : static_cast<double>(k) / (stages - 1);
    const double mu = opts.mu_first * std::pow(opts.mu_last / opts.mu_first, frac);
    const CellObjective f = [&](std::span<const double> cells, std::span<double> g) {
      return expr.smoothed(cells, g, mu, nu, lambda);
    };
    auto res = minimize_logits(layout, f, std::move(theta), {per_stage, opts.tol, 8});
    theta = std::move(res.theta);
    if (expr.has_cost()) {
      softmax_cells(layout, theta, q);
      const double e = expr.parts(q).cost;
      nu = std::max(0.0, nu + lambda * (e - expr.cost_level()));
      lambda *= 2.0;
    }
  }
  softmax_cells(layout, theta, q);
  return q;
}

}  // namespace wzexp::detail
