#include "simplex_opt.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace wzexp::detail {

void softmax_cells(const SimplexLayout& layout, std::span<const double> theta, std::span<double> q) {
  std::fill(q.begin(), q.end(), 0.0);
  for (const auto& block : layout.blocks) {
    double mx = -std::numeric_limits<double>::infinity();
    for (auto c : block) mx = std::max(mx, theta[c]);
    double s = 0.0;
    for (auto c : block) {
      q[c] = std::exp(theta[c] - mx);
      s += q[c];
    }
    for (auto c : block) q[c] /= s;
  }
}

std::vector<double> logits_from_cells(const SimplexLayout& layout, std::span<const double> q,
                                      double floor_logit) {
  std::vector<double> theta(layout.n_cells, 0.0);
  for (const auto& block : layout.blocks) {
    double mx = 0.0;
    for (auto c : block) mx = std::max(mx, q[c]);
    for (auto c : block)
      theta[c] = q[c] > 0.0 ? std::max(std::log(q[c] / mx), -floor_logit) : -floor_logit;
  }
  return theta;
}

double smooth_positive_part(double x, double mu, double* slope) {
  const double t = x / mu;
  if (t > 0) {
    const double e = std::exp(-t);
    if (slope) *slope = 1.0 / (1.0 + e);
    return x + mu * std::log1p(e);
  }
  const double e = std::exp(t);
  if (slope) *slope = e / (1.0 + e);
  return mu * std::log1p(e);
}

namespace {

class LogitObjective {
 public:
  LogitObjective(const SimplexLayout& layout, const CellObjective& f)
      : layout_(layout), f_(f), q_(layout.n_cells), gq_(layout.n_cells) {}

  double operator()(std::span<const double> theta, std::span<double> grad) {
    softmax_cells(layout_, theta, q_);
    std::fill(gq_.begin(), gq_.end(), 0.0);
    const double v = f_(q_, gq_);
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const auto& block : layout_.blocks) {
      double mean = 0.0;
      for (auto c : block) mean += q_[c] * gq_[c];
      for (auto c : block) grad[c] = q_[c] * (gq_[c] - mean);
    }
    return v;
  }

 private:
  const SimplexLayout& layout_;
  const CellObjective& f_;
  std::vector<double> q_, gq_;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

LbfgsResult minimize_logits(const SimplexLayout& layout, const CellObjective& objective,
                            std::vector<double> theta0, const LbfgsOptions& opts) {
  const std::size_t n = layout.n_cells;
  LogitObjective f(layout, objective);
  std::vector<double> x = std::move(theta0), g(n), xn(n), gn(n), d(n);
  double fx = f(x, g);

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> alpha(static_cast<std::size_t>(opts.memory));
  int calm = 0;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    if (!std::isfinite(fx)) break;
    // two-loop recursion
    d = g;
    const std::size_t m = s_hist.size();
    for (std::size_t k = m; k-- > 0;) {
      alpha[k] = rho_hist[k] * dot(s_hist[k], d);
      for (std::size_t i = 0; i < n; ++i) d[i] -= alpha[k] * y_hist[k][i];
    }
    double gamma = 1.0;
    if (m > 0) gamma = dot(s_hist[m - 1], y_hist[m - 1]) / dot(y_hist[m - 1], y_hist[m - 1]);
    for (auto& v : d) v *= gamma;
    for (std::size_t k = 0; k < m; ++k) {
      const double beta = rho_hist[k] * dot(y_hist[k], d);
      for (std::size_t i = 0; i < n; ++i) d[i] += (alpha[k] - beta) * s_hist[k][i];
    }
    for (auto& v : d) v = -v;

    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      d = g;
      for (auto& v : d) v = -v;
      slope = dot(g, d);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }
    const double gnorm2 = dot(g, g);
    if (gnorm2 < 1e-30) break;

    double step = 1.0;
    double dmax = 0.0;
    for (double v : d) dmax = std::max(dmax, std::abs(v));
    if (dmax * step > 10.0) step = 10.0 / dmax;
    if (m == 0) step = std::min(step, 1.0 / std::sqrt(gnorm2));

    double fn = fx;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + step * d[i];
      fn = f(xn, gn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!s_hist.empty()) {
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        continue;
      }
      break;
    }

    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - x[i];
      y[i] = gn[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-16 * std::sqrt(dot(s, s) * dot(y, y))) {
      if (static_cast<int>(s_hist.size()) == opts.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }

    const double change = fx - fn;
    x.swap(xn);
    g.swap(gn);
    fx = fn;
    if (change <= opts.tol * std::max(1.0, std::abs(fx))) {
      if (++calm >= 5) {
        ++it;
        break;
      }
    } else {
      calm = 0;
    }
  }
  return {std::move(x), fx, it};
}

}  // namespace wzexp::detail
