#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "entropy_expr.hpp"
#include "simplex_opt.hpp"
#include "wzexp/exponent.hpp"
#include "wzexp/rng.hpp"

namespace wzexp {

using detail::EntropyExpr;
using detail::projection;
using detail::SimplexLayout;

namespace {

enum class Form { difference, conditional };

constexpr std::size_t kMaxDecoderMaps = 4096;

// U ranges over the maps g: Y -> Z and the decoder outputs g(y). Any auxiliary
// with a decoder can be replaced by the map it induces without increasing
// I(U;X|Y), and with the map fixed the objective is convex in P_{U|X}.
// Parameters are W(g|x) at g * nx + x; the joint is over U x X x Y.
class MapProblem {
 public:
  MapProblem(const WZInstance& inst, Form form)
      : inst_(inst), nx_(inst.x_size()), ny_(inst.y_size()) {
    double maps = 1.0;
    for (std::size_t y = 0; y < ny_; ++y) maps *= static_cast<double>(inst.z_size);
    if (maps > static_cast<double>(kMaxDecoderMaps))
      throw std::invalid_argument("rd_wyner_ziv: |Z|^|Y| exceeds 4096 decoder maps");
    ng_ = static_cast<std::size_t>(maps);
    expr_ = EntropyExpr(ng_ * nx_ * ny_);
    const std::vector<std::size_t> shape{ng_, nx_, ny_};
    if (form == Form::difference) {
      expr_.add_smooth(+1.0, projection(shape, {1}));
      expr_.add_smooth(-1.0, projection(shape, {0, 1}));
      expr_.add_smooth(-1.0, projection(shape, {2}));
      expr_.add_smooth(+1.0, projection(shape, {0, 2}));
    } else {
      expr_.add_smooth(+1.0, projection(shape, {0, 2}));
      expr_.add_smooth(+1.0, projection(shape, {1, 2}));
      expr_.add_smooth(-1.0, projection(shape, {0, 1, 2}));
      expr_.add_smooth(-1.0, projection(shape, {2}));
    }
    // per-letter expected cost c(g, x) = sum_y P(y|x)-weighted d(x, y, g(y))
    cost_gx_.assign(ng_ * nx_, 0.0);
    std::vector<double> cell_cost(expr_.n_cells(), 0.0);
    for (std::size_t g = 0; g < ng_; ++g)
      for (std::size_t x = 0; x < nx_; ++x)
        for (std::size_t y = 0; y < ny_; ++y) {
          const double d = inst.d(x, y, map_value(g, y));
          cell_cost[(g * nx_ + x) * ny_ + y] = d;
          cost_gx_[g * nx_ + x] += inst.p(x, y) * d;
        }
    has_cost_ = inst.level > 0.0;
    if (has_cost_) expr_.set_cost(std::move(cell_cost), inst.level);

    // at D = 0 a letter is usable for x only if it is exact on every y with P(x,y) > 0
    for (std::size_t x = 0; x < nx_; ++x) {
      std::vector<std::size_t> b;
      for (std::size_t g = 0; g < ng_; ++g)
        if (has_cost_ || cost_gx_[g * nx_ + x] == 0.0) b.push_back(g * nx_ + x);
      if (b.empty()) throw std::invalid_argument("rd_wyner_ziv: infeasible distortion level");
      layout_.blocks.push_back(std::move(b));
    }
    layout_.n_cells = ng_ * nx_;

    // the cheapest letter per x gives E[d] = min_distortion
    cheapest_.assign(ng_ * nx_, 0.0);
    for (std::size_t x = 0; x < nx_; ++x) {
      std::size_t best = 0;
      for (std::size_t g = 1; g < ng_; ++g)
        if (cost_gx_[g * nx_ + x] < cost_gx_[best * nx_ + x]) best = g;
      cheapest_[best * nx_ + x] = 1.0;
    }
  }

  std::size_t map_value(std::size_t g, std::size_t y) const {
    for (std::size_t k = ny_ - 1 - y; k > 0; --k) g /= inst_.z_size;
    return g % inst_.z_size;
  }

  const SimplexLayout& layout() const { return layout_; }

  void joint(std::span<const double> w, std::vector<double>& q) const {
    q.assign(expr_.n_cells(), 0.0);
    for (std::size_t g = 0; g < ng_; ++g)
      for (std::size_t x = 0; x < nx_; ++x) {
        const double wg = w[g * nx_ + x];
        if (wg == 0.0) continue;
        for (std::size_t y = 0; y < ny_; ++y) q[(g * nx_ + x) * ny_ + y] = inst_.p(x, y) * wg;
      }
  }

  double expected_cost(std::span<const double> w) const {
    double e = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c) e += w[c] * cost_gx_[c];
    return e;
  }

  double objective(std::span<const double> w, std::span<double> grad, double nu, double lambda) const {
    std::vector<double> q, gq(expr_.n_cells());
    joint(w, q);
    const double val = expr_.smoothed(q, gq, 1.0, nu, lambda);
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t g = 0; g < ng_; ++g)
      for (std::size_t x = 0; x < nx_; ++x)
        for (std::size_t y = 0; y < ny_; ++y) grad[g * nx_ + x] += inst_.p(x, y) * gq[(g * nx_ + x) * ny_ + y];
    return val;
  }

  std::vector<double> descend(std::vector<double> theta, int max_iters, double tol) const {
    const int stages = has_cost_ ? 10 : 1;
    double nu = 0.0, lambda = has_cost_ ? 20.0 : 0.0;
    std::vector<double> w(layout_.n_cells);
    for (int k = 0; k < stages; ++k) {
      const detail::CellObjective f = [&](std::span<const double> cells, std::span<double> g) {
        return objective(cells, g, nu, lambda);
      };
      auto res = detail::minimize_logits(layout_, f, std::move(theta), {std::max(1, max_iters / stages), tol, 8});
      theta = std::move(res.theta);
      if (has_cost_) {
        detail::softmax_cells(layout_, theta, w);
        nu = std::max(0.0, nu + lambda * (expected_cost(w) - inst_.level));
        lambda *= 2.0;
      }
    }
    detail::softmax_cells(layout_, theta, w);
    return w;
  }

  // Alternating minimization of sum p(x,y) W(g|x) log(W(g|x) / q(g|y)) + s E[c]
  // over W and q. At D = 0 the mask replaces the cost.
  std::vector<double> alternate(double s, std::vector<double> w, int max_iters) const {
    std::vector<double> q(ng_ * ny_), py(ny_, 0.0), px(nx_, 0.0);
    for (std::size_t x = 0; x < nx_; ++x)
      for (std::size_t y = 0; y < ny_; ++y) {
        px[x] += inst_.p(x, y);
        py[y] += inst_.p(x, y);
      }
    std::vector<double> logit(ng_);
    // letters at exactly zero never come back, so start strictly inside
    for (const auto& b : layout_.blocks)
      for (auto c : b) w[c] = (1.0 - 1e-3) * w[c] + 1e-3 / static_cast<double>(b.size());
    for (int it = 0; it < max_iters; ++it) {
      std::fill(q.begin(), q.end(), 0.0);
      for (std::size_t g = 0; g < ng_; ++g)
        for (std::size_t x = 0; x < nx_; ++x)
          for (std::size_t y = 0; y < ny_; ++y)
            if (py[y] > 0.0) q[g * ny_ + y] += inst_.p(x, y) / py[y] * w[g * nx_ + x];
      double change = 0.0;
      for (std::size_t x = 0; x < nx_; ++x) {
        if (px[x] == 0.0) continue;
        double top = -kInf;
        for (auto c : layout_.blocks[x]) {
          const std::size_t g = c / nx_;
          double v = 0.0;
          for (std::size_t y = 0; y < ny_; ++y) {
            const double pyx = inst_.p(x, y) / px[x];
            if (pyx == 0.0) continue;
            v += q[g * ny_ + y] > 0.0 ? pyx * std::log(q[g * ny_ + y]) : -kInf;
          }
          if (has_cost_) v -= s * cost_gx_[c] / px[x];
          logit[g] = v;
          top = std::max(top, v);
        }
        double z = 0.0;
        for (auto c : layout_.blocks[x]) z += std::isfinite(logit[c / nx_]) ? std::exp(logit[c / nx_] - top) : 0.0;
        for (auto c : layout_.blocks[x]) {
          const double l = logit[c / nx_];
          const double nw = std::isfinite(l) ? std::exp(l - top) / z : 0.0;
          change = std::max(change, std::abs(nw - w[c]));
          w[c] = nw;
        }
      }
      if (change < 1e-14) break;
    }
    return w;
  }

  /// Slope search for the level: the feasible W at the smallest slope found,
  /// mixed with the infeasible neighbour just enough to meet D.
  std::vector<double> alternate_at_level(int max_iters) const {
    std::vector<double> w(layout_.n_cells, 0.0);
    for (const auto& b : layout_.blocks)
      for (auto c : b) w[c] = 1.0 / static_cast<double>(b.size());
    if (!has_cost_) return alternate(0.0, std::move(w), max_iters);
    auto lo_w = alternate(0.0, w, max_iters);
    if (expected_cost(lo_w) <= inst_.level) return lo_w;
    double s_lo = 0.0, s_hi = 1.0;
    auto hi_w = alternate(s_hi, lo_w, max_iters);
    while (expected_cost(hi_w) > inst_.level && s_hi < 1e6) {
      s_lo = s_hi;
      lo_w = std::move(hi_w);
      s_hi *= 4.0;
      hi_w = alternate(s_hi, lo_w, max_iters);
    }
    for (int k = 0; k < 50 && s_hi - s_lo > 1e-9 * s_hi; ++k) {
      const double mid = 0.5 * (s_lo + s_hi);
      auto mw = alternate(mid, hi_w, max_iters);
      if (expected_cost(mw) > inst_.level) {
        s_lo = mid;
        lo_w = std::move(mw);
      } else {
        s_hi = mid;
        hi_w = std::move(mw);
      }
    }
    // the objective is convex in W, so the mixture stays below the chord
    const double e_lo = expected_cost(lo_w), e_hi = expected_cost(hi_w);
    if (e_hi <= inst_.level && e_lo > inst_.level) {
      const double t = (inst_.level - e_hi) / (e_lo - e_hi) * (1.0 - 1e-12);
      for (std::size_t c = 0; c < hi_w.size(); ++c) hi_w[c] = (1.0 - t) * hi_w[c] + t * lo_w[c];
    }
    return hi_w;
  }

  /// Exact value after mixing with the cheapest channel just enough to meet D.
  double feasible_value(std::vector<double> w) const {
    const double e = expected_cost(w);
    if (has_cost_ && e > inst_.level) {
      const double e0 = expected_cost(cheapest_);
      const double t = std::min(1.0, (e - inst_.level) / (e - e0) * (1.0 + 1e-12));
      for (std::size_t c = 0; c < w.size(); ++c) w[c] = (1.0 - t) * w[c] + t * cheapest_[c];
    }
    std::vector<double> q;
    joint(w, q);
    return expr_.exact(q);
  }

 private:
  const WZInstance& inst_;
  std::size_t nx_, ny_, ng_ = 1;
  EntropyExpr expr_{1};
  bool has_cost_ = false;
  std::vector<double> cost_gx_, cheapest_;
  SimplexLayout layout_;
};

double rd_form(const WZInstance& inst, Form form, const RdOptions& opts) {
  if (inst.level > 0.0 && inst.constant_z_distortion() <= inst.level + 1e-12) return 0.0;
  const MapProblem prob(inst, form);
  const auto w_alt = prob.alternate_at_level(opts.max_iters);
  double best = std::min(cond_entropy(inst.p_xy, {"X"}, {"Y"}), prob.feasible_value(w_alt));
  for (int r = 0; r < opts.restarts; ++r) {
    SplitMix64 rng(derive_seed(opts.seed, {static_cast<std::uint64_t>(r)}));
    std::vector<double> theta(prob.layout().n_cells, 0.0);
    // first start is the uniform channel; the problem is convex, later starts guard against stalls
    if (r > 0)
      for (const auto& b : prob.layout().blocks)
        for (auto c : b) theta[c] = 0.5 * (1 + r % 4) * rng.normal();
    best = std::min(best, prob.feasible_value(prob.descend(std::move(theta), opts.max_iters, opts.tol)));
  }
  return best;
}

}  // namespace

RdResult rd_wyner_ziv(const WZInstance& inst, const RdOptions& opts) {
  if (inst.min_distortion() > inst.level + 1e-12)
    throw std::invalid_argument("rd_wyner_ziv: infeasible distortion level");
  if (opts.restarts < 1 || opts.max_iters < 1 || !(opts.tol > 0.0))
    throw std::invalid_argument("rd_wyner_ziv: bad options");
  RdResult out;
  out.difference_form = std::max(0.0, rd_form(inst, Form::difference, opts));
  out.conditional_form = std::max(0.0, rd_form(inst, Form::conditional, opts));
  out.value = std::min(out.difference_form, out.conditional_form);
  out.forms_agree = std::abs(out.difference_form - out.conditional_form) <= 1e-4;
  return out;
}

RdResult rd_wyner_ziv(const JointTable& p_xy, std::size_t z_size,
                      const std::vector<double>& distortion, double level, const RdOptions& opts) {
  return rd_wyner_ziv(WZInstance::make(p_xy, z_size, distortion, 0.0, level), opts);
}

}  // namespace wzexp
