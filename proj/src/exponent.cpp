#include "wzexp/exponent.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

#include "entropy_expr.hpp"
#include "fstar_search.hpp"
#include "simplex_opt.hpp"
#include "wzexp/rng.hpp"

namespace wzexp {

using detail::EntropyExpr;
using detail::projection;
using detail::SimplexLayout;

namespace {

void require_rate(double r, const char* who) {
  if (!std::isfinite(r) || r < 0.0)
    throw std::invalid_argument(std::string(who) + ": rate must be finite and >= 0");
}

void require_source(const JointTable& p, const char* who) {
  if (p.rank() != 2 || p.axes()[0].name != "X" || p.axes()[1].name != "Y")
    throw std::invalid_argument(std::string(who) + ": source table must have axes X, Y");
  if (!p.is_normalized())
    throw std::invalid_argument(std::string(who) + ": source table is not normalized");
}

}  // namespace

// ---------------------------------------------------------------- instances

WZInstance WZInstance::make(JointTable p_xy, std::size_t z_size, std::vector<double> distortion,
                            double rate, double level, std::string name) {
  require_source(p_xy, "WZInstance");
  if (z_size == 0) throw std::invalid_argument("WZInstance: empty reproduction alphabet");
  const std::size_t nx = p_xy.axes()[0].size(), ny = p_xy.axes()[1].size();
  if (distortion.size() != nx * ny * z_size)
    throw std::invalid_argument("WZInstance: distortion table has " +
                                std::to_string(distortion.size()) + " entries, expected " +
                                std::to_string(nx * ny * z_size));
  for (double v : distortion)
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("WZInstance: distortion entries must be finite and >= 0");
  require_rate(rate, "WZInstance");
  if (!std::isfinite(level) || level < 0.0)
    throw std::invalid_argument("WZInstance: distortion level must be finite and >= 0");
  WZInstance inst{std::move(p_xy), z_size, std::move(distortion), rate, level, std::move(name)};
  const double dmin = inst.min_distortion();
  if (dmin > level + 1e-12)
    throw std::invalid_argument("WZInstance: infeasible distortion level " +
                                std::to_string(level) + " < " + std::to_string(dmin));
  return inst;
}

std::size_t WZInstance::best_z(std::size_t x, std::size_t y) const {
  std::size_t best = 0;
  for (std::size_t z = 1; z < z_size; ++z)
    if (d(x, y, z) < d(x, y, best)) best = z;
  return best;
}

double WZInstance::min_distortion() const {
  double s = 0.0;
  for (std::size_t x = 0; x < x_size(); ++x)
    for (std::size_t y = 0; y < y_size(); ++y) s += p(x, y) * d(x, y, best_z(x, y));
  return s;
}

double WZInstance::constant_z_distortion(std::size_t* argmin) const {
  double best = kInf;
  for (std::size_t z = 0; z < z_size; ++z) {
    double s = 0.0;
    for (std::size_t x = 0; x < x_size(); ++x)
      for (std::size_t y = 0; y < y_size(); ++y) s += p(x, y) * d(x, y, z);
    if (s < best) {
      best = s;
      if (argmin) *argmin = z;
    }
  }
  return best;
}

WZInstance WZInstance::with_rate(double r) const {
  return make(p_xy, z_size, distortion, r, level, name);
}

WZInstance WZInstance::with_level(double lv) const {
  return make(p_xy, z_size, distortion, rate, lv, name);
}

JointTable make_source(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows[0].empty()) throw std::invalid_argument("make_source: empty matrix");
  std::vector<double> v;
  for (const auto& r : rows) {
    if (r.size() != rows[0].size()) throw std::invalid_argument("make_source: ragged matrix");
    v.insert(v.end(), r.begin(), r.end());
  }
  JointTable p({Axis("X", rows.size()), Axis("Y", rows[0].size())}, std::move(v));
  if (!p.is_normalized()) throw std::invalid_argument("make_source: entries must sum to 1");
  return p;
}

WZInstance function_instance(const JointTable& p_xy, const std::vector<std::size_t>& f,
                             std::size_t z_size, double rate, std::string name) {
  require_source(p_xy, "function_instance");
  const std::size_t nx = p_xy.axes()[0].size(), ny = p_xy.axes()[1].size();
  if (f.size() != nx * ny) throw std::invalid_argument("function_instance: f must cover X x Y");
  std::vector<double> d(nx * ny * z_size, 1.0);
  for (std::size_t c = 0; c < nx * ny; ++c) {
    if (f[c] >= z_size) throw std::invalid_argument("function_instance: f value out of range");
    d[c * z_size + f[c]] = 0.0;
  }
  return WZInstance::make(p_xy, z_size, std::move(d), rate, 0.0, std::move(name));
}

WZInstance and_instance(double rate) {
  return function_instance(make_source({{0.25, 0.25}, {0.25, 0.25}}), {0, 0, 0, 1}, 2, rate,
                           "and_dfc");
}

WZInstance slepian_wolf_instance(const JointTable& p_xy, double rate) {
  require_source(p_xy, "slepian_wolf_instance");
  const std::size_t nx = p_xy.axes()[0].size(), ny = p_xy.axes()[1].size();
  std::vector<std::size_t> f(nx * ny);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) f[x * ny + y] = x;
  return function_instance(p_xy, f, nx, rate, "slepian_wolf");
}

// ---------------------------------------------------------------- objective

std::vector<Axis> uxyz_axes(std::size_t u, std::size_t x, std::size_t y, std::size_t z) {
  return {Axis("U", u), Axis("X", x), Axis("Y", y), Axis("Z", z)};
}

ExponentPoint objective_terms(const JointTable& p, const WZInstance& inst) {
  for (const char* n : {"U", "X", "Y", "Z"})
    if (!p.has_axis(n) || p.rank() != 4)
      throw std::invalid_argument("objective_terms: table must have axes U, X, Y, Z");
  const JointTable q = p.reorder({"U", "X", "Y", "Z"});
  if (q.axes()[1].size() != inst.x_size() || q.axes()[2].size() != inst.y_size() ||
      q.axes()[3].size() != inst.z_size)
    throw std::invalid_argument("objective_terms: alphabet sizes differ from the instance");
  if (!q.is_normalized()) throw std::invalid_argument("objective_terms: table is not normalized");

  ExponentPoint pt{q, {}, 0.0, inst.rate};
  auto& t = pt.terms;
  t.kl_term = kl_divergence(marginalize(q, {"X", "Y"}), inst.p_xy);
  t.soft_markov_1 = cond_mutual_information(q, {"U"}, {"Y"}, {"X"});
  t.soft_markov_2 = cond_mutual_information(q, {"Z"}, {"X"}, {"U", "Y"});
  t.rate_gap = cond_mutual_information(q, {"U"}, {"X"}) - cond_mutual_information(q, {"U"}, {"Y"}) -
               inst.rate;
  t.total = t.kl_term + t.soft_markov_1 + t.soft_markov_2 + std::max(t.rate_gap, 0.0);

  const Channel u_given_x = condition(marginalize(q, {"U", "X"}), {"X"});
  const Channel z_given_uy = condition(marginalize(q, {"U", "Y", "Z"}), {"U", "Y"});
  const JointTable ref = compose(compose(inst.p_xy, u_given_x), z_given_uy).reorder({"U", "X", "Y", "Z"});
  t.divergence_form = kl_divergence(q, ref) + std::max(t.rate_gap, 0.0);

  const auto v = q.values();
  for (std::size_t c = 0; c < v.size(); ++c) {
    const std::size_t z = c % inst.z_size;
    const std::size_t y = (c / inst.z_size) % inst.y_size();
    const std::size_t x = (c / (inst.z_size * inst.y_size())) % inst.x_size();
    pt.distortion += v[c] * inst.d(x, y, z);
  }
  return pt;
}

// ---------------------------------------------------------------- search

namespace detail {

FStarSearch::FStarSearch(const WZInstance& inst, std::size_t u_size)
    : inst_(inst),
      nu_(u_size),
      nx_(inst.x_size()),
      ny_(inst.y_size()),
      nz_(inst.z_size),
      expr_(u_size * inst.x_size() * inst.y_size() * inst.z_size) {
  if (u_size == 0) throw std::invalid_argument("optimize_fstar: |U| must be >= 1");
  const std::vector<std::size_t> shape{nu_, nx_, ny_, nz_};
  const std::size_t n = expr_.n_cells();
  expr_.add_smooth(+1.0, projection(shape, {0, 1}));
  expr_.add_smooth(-1.0, projection(shape, {1}));
  expr_.add_smooth(+1.0, projection(shape, {0, 2, 3}));
  expr_.add_smooth(-1.0, projection(shape, {0, 1, 2, 3}));
  expr_.add_smooth(-1.0, projection(shape, {0, 2}));
  expr_.add_gap(+1.0, projection(shape, {1}));
  expr_.add_gap(-1.0, projection(shape, {0, 1}));
  expr_.add_gap(-1.0, projection(shape, {2}));
  expr_.add_gap(+1.0, projection(shape, {0, 2}));
  expr_.set_gap_constant(-inst.rate);

  cost_.resize(n);
  layout_.n_cells = n;
  layout_.blocks.emplace_back();
  bool binding = false;
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t z = c % nz_, y = (c / nz_) % ny_, x = (c / (nz_ * ny_)) % nx_;
    const double pxy = inst.p(x, y);
    cost_[c] = inst.d(x, y, z);
    if (pxy > 0.0) expr_.linear()[c] = -std::log2(pxy);
    const bool free = pxy > 0.0 && (inst.level > 0.0 || cost_[c] == 0.0);
    if (free) {
      layout_.blocks[0].push_back(c);
      if (cost_[c] > inst.level) binding = true;
    }
  }
  if (binding) expr_.set_cost(cost_, inst.level);
  free_.assign(n, false);
  for (auto c : layout_.blocks[0]) free_[c] = true;
}

double FStarSearch::cost(std::span<const double> q) const {
  double e = 0.0;
  for (std::size_t c = 0; c < q.size(); ++c) e += q[c] * cost_[c];
  return e;
}

bool FStarSearch::feasible(std::span<const double> q) const {
  return cost(q) <= inst_.level + 1e-12;
}

std::vector<double> FStarSearch::z_repaired(std::span<const double> q) const {
  std::vector<double> r(q.size(), 0.0);
  for (std::size_t u = 0; u < nu_; ++u)
    for (std::size_t x = 0; x < nx_; ++x)
      for (std::size_t y = 0; y < ny_; ++y) {
        double s = 0.0;
        for (std::size_t z = 0; z < nz_; ++z) s += q[cell(u, x, y, z)];
        r[cell(u, x, y, inst_.best_z(x, y))] += s;
      }
  return r;
}

std::vector<double> FStarSearch::trivial() const {
  std::vector<double> r(expr_.n_cells(), 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y) r[cell(0, x, y, inst_.best_z(x, y))] = inst_.p(x, y);
  return r;
}

std::vector<double> FStarSearch::u_equals_x() const {
  if (nu_ < nx_) return {};
  std::vector<double> r(expr_.n_cells(), 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y) r[cell(x, x, y, inst_.best_z(x, y))] = inst_.p(x, y);
  return r;
}

std::vector<double> FStarSearch::constant_z() const {
  std::size_t z0 = 0;
  if (inst_.constant_z_distortion(&z0) > inst_.level + 1e-12) return {};
  std::vector<double> r(expr_.n_cells(), 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y) r[cell(0, x, y, z0)] = inst_.p(x, y);
  for (std::size_t c = 0; c < r.size(); ++c)
    if (!free_[c] && r[c] > 0.0) return {};
  return r;
}

std::vector<double> FStarSearch::project_free(std::span<const double> q) const {
  std::vector<double> r(q.begin(), q.end());
  double s = 0.0;
  for (std::size_t c = 0; c < r.size(); ++c) {
    if (!free_[c] || !(r[c] > 0.0)) r[c] = 0.0;
    s += r[c];
  }
  if (!(s > 0.0)) return trivial();
  for (auto& v : r) v /= s;
  return r;
}

Scored FStarSearch::finalize(std::vector<double> q) const {
  if (feasible(q)) {
    const double v = expr_.exact(q);
    return {std::move(q), v};
  }
  Scored best{trivial(), 0.0};
  best.value = expr_.exact(best.q);
  const double e = cost(q);
  for (auto anchor : {z_repaired(q), trivial()}) {
    const double ea = cost(anchor);
    if (ea > inst_.level + 1e-12) continue;
    const double av = expr_.exact(anchor);
    if (av < best.value) best = {anchor, av};
    double w = std::min(1.0, (e - inst_.level) / (e - ea) * (1.0 + 1e-12) + 1e-15);
    std::vector<double> mix(q.size());
    for (std::size_t c = 0; c < q.size(); ++c) mix[c] = (1.0 - w) * q[c] + w * anchor[c];
    if (!feasible(mix)) continue;
    const double mv = expr_.exact(mix);
    if (mv < best.value) best = {std::move(mix), mv};
  }
  return best;
}

Scored FStarSearch::polish(const std::vector<double>& q) const {
  Scored best = finalize(q);
  for (double tau : {1e-3, 1e-4, 1e-6, 1e-8, 1e-10}) {
    std::vector<double> t(q);
    double s = 0.0;
    for (auto& v : t) {
      if (v < tau) v = 0.0;
      s += v;
    }
    if (!(s > 0.0)) continue;
    for (auto& v : t) v /= s;
    Scored cand = finalize(std::move(t));
    if (cand.value < best.value) best = std::move(cand);
  }
  return best;
}

std::vector<double> FStarSearch::initial_logits(std::uint64_t seed, std::size_t r) const {
  static constexpr std::array<double, 4> kScales{0.5, 1.0, 2.0, 4.0};
  SplitMix64 rng(derive_seed(seed, {r}));
  const double sigma = kScales[r % kScales.size()];
  std::vector<double> theta(expr_.n_cells(), 0.0);
  for (auto c : layout_.blocks[0]) theta[c] = sigma * rng.normal();
  const std::size_t kind = r % 3;
  if (kind >= 1) {
    std::vector<std::size_t> g(nx_);
    for (auto& v : g) v = rng.below(nu_);
    for (std::size_t u = 0; u < nu_; ++u)
      for (std::size_t x = 0; x < nx_; ++x)
        if (g[x] == u)
          for (std::size_t y = 0; y < ny_; ++y)
            for (std::size_t z = 0; z < nz_; ++z) theta[cell(u, x, y, z)] += 4.0;
  }
  if (kind == 2) {
    for (std::size_t u = 0; u < nu_; ++u)
      for (std::size_t y = 0; y < ny_; ++y) {
        const std::size_t zz = rng.below(nz_);
        for (std::size_t x = 0; x < nx_; ++x) theta[cell(u, x, y, zz)] += 3.0;
      }
  }
  return theta;
}

Scored FStarSearch::descend(std::vector<double> theta, int max_iters, double tol) const {
  DescentOptions d;
  d.max_iters = max_iters;
  d.tol = tol;
  auto q = continuation_descent(layout_, expr_, std::move(theta), d);
  return polish(q);
}

}  // namespace detail

FStarResult optimize_fstar(const WZInstance& inst, const FStarOptions& opts) {
  if (inst.min_distortion() > inst.level + 1e-12)
    throw std::invalid_argument("optimize_fstar: infeasible distortion level");
  if (opts.restarts < 0 || opts.max_iters < 1 || !(opts.tol > 0.0))
    throw std::invalid_argument("optimize_fstar: bad options");
  const std::size_t nu = opts.u_size.value_or(inst.x_size() * inst.y_size() * inst.z_size + 1);
  const detail::FStarSearch search(inst, nu);
  const double inner_tol = std::min(opts.tol * 1e-2, 1e-9);

  const std::size_t n_restarts = static_cast<std::size_t>(opts.restarts);
  std::vector<detail::Scored> results(n_restarts);
  auto run = [&](std::size_t r) {
    results[r] = search.descend(search.initial_logits(opts.seed, r), opts.max_iters, inner_tol);
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(opts.workers, n_restarts));
  if (workers <= 1) {
    for (std::size_t r = 0; r < n_restarts; ++r) run(r);
  } else {
    std::vector<std::exception_ptr> errs(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t r = w; r < n_restarts; r += workers) run(r);
        } catch (...) {
          errs[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }

  const auto u_axes = uxyz_axes(nu, inst.x_size(), inst.y_size(), inst.z_size);
  for (const auto& w : opts.warm_starts) {
    const JointTable t = w.reorder({"U", "X", "Y", "Z"});
    if (!(t.axes() == u_axes))
      throw std::invalid_argument("optimize_fstar: warm start alphabets differ from the search");
    const auto q = search.project_free(t.values());
    results.push_back(search.finalize(q));
    results.push_back(search.descend(
        detail::logits_from_cells(search.layout(), q), opts.max_iters, inner_tol));
  }
  for (auto anchor : {search.trivial(), search.u_equals_x(), search.constant_z()})
    if (!anchor.empty()) results.push_back(search.finalize(std::move(anchor)));

  FStarResult out;
  double best = kInf;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto parts = search.expr().parts(results[i].q);
    out.candidate_values.push_back(results[i].value);
    out.candidate_naive_values.push_back(parts.smooth + parts.gap + inst.rate);
    out.candidate_rate_differences.push_back(parts.gap + inst.rate);
    if (results[i].value < best) {
      best = results[i].value;
      out.best_index = i;
    }
  }
  out.point = objective_terms(JointTable(u_axes, results[out.best_index].q), inst);
  out.value = std::max(0.0, out.point.terms.total);
  return out;
}

// ---------------------------------------------------------------- special cases

namespace {

detail::Scored prune_and_score(const EntropyExpr& expr, const std::vector<double>& q) {
  detail::Scored best{q, expr.exact(q)};
  for (double tau : {1e-3, 1e-4, 1e-6, 1e-8, 1e-10}) {
    std::vector<double> t(q);
    double s = 0.0;
    for (auto& v : t) {
      if (v < tau) v = 0.0;
      s += v;
    }
    if (!(s > 0.0)) continue;
    for (auto& v : t) v /= s;
    const double val = expr.exact(t);
    if (val < best.value) best = {std::move(t), val};
  }
  return best;
}

void check_search_options(const SimplexSearchOptions& o, const char* who) {
  if (o.restarts < 0 || o.max_iters < 1 || !(o.tol > 0.0))
    throw std::invalid_argument(std::string(who) + ": bad options");
}

}  // namespace

double fstar_slepian_wolf(const JointTable& p_xy, double rate, const SimplexSearchOptions& opts) {
  require_source(p_xy, "fstar_slepian_wolf");
  require_rate(rate, "fstar_slepian_wolf");
  check_search_options(opts, "fstar_slepian_wolf");
  const std::size_t nx = p_xy.axes()[0].size(), ny = p_xy.axes()[1].size();
  const std::vector<std::size_t> shape{nx, ny};
  EntropyExpr expr(nx * ny);
  expr.add_smooth(-1.0, projection(shape, {0, 1}));
  expr.add_gap(+1.0, projection(shape, {0, 1}));
  expr.add_gap(-1.0, projection(shape, {1}));
  expr.set_gap_constant(-rate);
  SimplexLayout layout{nx * ny, {{}}};
  for (std::size_t c = 0; c < nx * ny; ++c)
    if (p_xy[c] > 0.0) {
      expr.linear()[c] = -std::log2(p_xy[c]);
      layout.blocks[0].push_back(c);
    }

  const std::vector<double> p(p_xy.values().begin(), p_xy.values().end());
  double best = expr.exact(p);
  detail::DescentOptions d;
  d.max_iters = opts.max_iters;
  d.tol = opts.tol;
  for (int r = 0; r < opts.restarts; ++r) {
    SplitMix64 rng(derive_seed(opts.seed, {static_cast<std::uint64_t>(r)}));
    auto theta = detail::logits_from_cells(layout, p);
    const double sigma = 0.5 * (1 + r % 4);
    for (auto c : layout.blocks[0]) theta[c] += sigma * rng.normal();
    const auto q = detail::continuation_descent(layout, expr, std::move(theta), d);
    best = std::min(best, prune_and_score(expr, q).value);
  }
  return std::max(0.0, best);
}

FunctionExponent fstar_function_computation(const JointTable& p_xy,
                                            const std::vector<std::size_t>& f,
                                            std::size_t z_size, double rate,
                                            const SimplexSearchOptions& opts) {
  require_source(p_xy, "fstar_function_computation");
  require_rate(rate, "fstar_function_computation");
  check_search_options(opts, "fstar_function_computation");
  const std::size_t nx = p_xy.axes()[0].size(), ny = p_xy.axes()[1].size();
  if (z_size == 0 || f.size() != nx * ny)
    throw std::invalid_argument("fstar_function_computation: f must cover X x Y");
  for (auto v : f)
    if (v >= z_size) throw std::invalid_argument("fstar_function_computation: f value out of range");
  const std::size_t nu = opts.u_size.value_or(nx * ny * z_size + 1);
  if (nu == 0) throw std::invalid_argument("fstar_function_computation: |U| must be >= 1");
  const std::vector<std::size_t> shape{nu, nx, ny};
  const std::size_t n = nu * nx * ny;

  std::vector<std::size_t> uyz(n);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t y = c % ny, x = (c / ny) % nx, u = c / (nx * ny);
    uyz[c] = (u * ny + y) * z_size + f[x * ny + y];
  }
  EntropyExpr expr(n);
  expr.add_smooth(-1.0, projection(shape, {0, 1, 2}));
  expr.add_smooth(+1.0, projection(shape, {0, 1}));
  expr.add_smooth(-1.0, projection(shape, {1}));
  expr.add_smooth(+1.0, uyz);
  expr.add_smooth(-1.0, projection(shape, {0, 2}));
  expr.add_gap(+1.0, projection(shape, {1}));
  expr.add_gap(-1.0, projection(shape, {0, 1}));
  expr.add_gap(-1.0, projection(shape, {2}));
  expr.add_gap(+1.0, projection(shape, {0, 2}));
  expr.set_gap_constant(-rate);
  SimplexLayout layout{n, {{}}};
  for (std::size_t c = 0; c < n; ++c) {
    const double pxy = p_xy[c % (nx * ny)];
    if (pxy > 0.0) {
      expr.linear()[c] = -std::log2(pxy);
      layout.blocks[0].push_back(c);
    }
  }

  std::vector<std::vector<double>> anchors;
  {
    std::vector<double> t(n, 0.0);
    for (std::size_t c = 0; c < nx * ny; ++c) t[c] = p_xy[c];
    anchors.push_back(std::move(t));
    if (nu >= nx) {
      std::vector<double> ux(n, 0.0);
      for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) ux[(x * nx + x) * ny + y] = p_xy[x * ny + y];
      anchors.push_back(std::move(ux));
    }
  }
  detail::Scored best{anchors[0], expr.exact(anchors[0])};
  for (auto& a : anchors) {
    const double v = expr.exact(a);
    if (v < best.value) best = {a, v};
  }

  detail::DescentOptions d;
  d.max_iters = opts.max_iters;
  d.tol = opts.tol;
  for (int r = 0; r < opts.restarts; ++r) {
    SplitMix64 rng(derive_seed(opts.seed, {static_cast<std::uint64_t>(r)}));
    const double sigma = 0.5 * (1 + r % 4);
    std::vector<double> theta(n, 0.0);
    for (auto c : layout.blocks[0]) theta[c] = sigma * rng.normal();
    if (r % 2 == 1) {
      for (std::size_t x = 0; x < nx; ++x) {
        const std::size_t u = rng.below(nu);
        for (std::size_t y = 0; y < ny; ++y) theta[(u * nx + x) * ny + y] += 4.0;
      }
    }
    const auto q = detail::continuation_descent(layout, expr, std::move(theta), d);
    auto cand = prune_and_score(expr, q);
    if (cand.value < best.value) best = std::move(cand);
  }
  return {std::max(0.0, best.value),
          JointTable({Axis("U", nu), Axis("X", nx), Axis("Y", ny)}, std::move(best.q))};
}

AndExample and_example(double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("and_example: R must lie in [0, 1]");
  AndExample out;
  const double log3 = std::log2(3.0);
  out.timesharing = (1.0 - rate) * (2.0 - log3);
  out.coded_bound = 2.0 - binary_entropy((2.0 + rate) / 6.0) - (2.0 + rate) / 3.0;
  out.markov_term = (4.0 - rate) / 6.0 +
                    (2.0 + rate) / 6.0 * binary_entropy((4.0 - rate) / (4.0 + 2.0 * rate)) -
                    (2.0 + rate) / 3.0;

  const double pu[3] = {rate / 2.0, rate / 2.0, 1.0 - rate};
  const double slice[3][2][2] = {{{0.5, 0.5}, {0.0, 0.0}},
                                 {{0.0, 0.0}, {0.5, 0.5}},
                                 {{1.0 / 3.0, 1.0 / 3.0}, {1.0 / 3.0, 0.0}}};
  std::vector<double> v(3 * 2 * 2 * 2, 0.0);
  for (std::size_t u = 0; u < 3; ++u)
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y) v[((u * 2 + x) * 2 + y) * 2 + (x & y)] = pu[u] * slice[u][x][y];
  out.construction = objective_terms(JointTable(uxyz_axes(3, 2, 2, 2), std::move(v)), and_instance(rate));
  return out;
}

MixtureFunctionals mixture_functionals(const JointTable& p) {
  for (const char* n : {"X", "Y", "Z"})
    if (!p.has_axis(n) || p.rank() != 3)
      throw std::invalid_argument("mixture_functionals: table must have axes X, Y, Z");
  MixtureFunctionals g;
  g.g1 = cond_entropy(p, {"Z"}, {"Y"}) - cond_entropy(p, {"Z"}, {"X", "Y"}) -
         cond_entropy(p, {"Y"}, {"X"});
  g.g2 = cond_entropy(p, {"Y"}) - cond_entropy(p, {"X"});
  return g;
}

}  // namespace wzexp
