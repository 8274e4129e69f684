#include "wzexp/wz_sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "wzexp/matching.hpp"
#include "wzexp/rng.hpp"

namespace wzexp {

namespace {

// Stage tags mixed into the trial seed.
constexpr std::uint64_t kTagXY = 0x7879;          // "xy"
constexpr std::uint64_t kTagShared = 0x736861726564;  // "shared"
constexpr std::uint64_t kTagU = 0x75;             // "u"
constexpr std::uint64_t kTagZ = 0x7a;             // "z"

double to_double(const BigInt& v) { return v.convert_to<double>(); }

std::size_t floor_rn(std::size_t n, double rate) {
  return static_cast<std::size_t>(std::floor(rate * static_cast<double>(n) + 1e-9));
}

// Scaled argmin over keys (u^n, m) for u^n in a conditional type class and m
// in [m_lo, m_hi), all with the same weight. Ties go to the smaller key.
struct KeyChoice {
  Sequence u;
  std::uint64_t m = 0;
};

KeyChoice match_over_class(const CondClassHandle& h, std::uint64_t m_lo, std::uint64_t m_hi,
                           double weight, const SharedExpSource& src) {
  const std::size_t n = h.n();
  std::vector<std::uint64_t> words(n);
  KeyChoice best;
  double best_score = kInf;
  bool any = false;
  for_each_member(h, [&](const Sequence& u) {
    for (std::size_t i = 0; i < n; ++i) words[i] = u[i];
    const KeyHasher head = src.prefix(n + 1, words);
    for (std::uint64_t m = m_lo; m < m_hi; ++m) {
      KeyHasher k = head;
      k.absorb(m);
      const double s = SharedExpSource::variate_of(k) / weight;
      if (!any || s < best_score ||
          (s == best_score && (u < best.u || (u == best.u && m < best.m)))) {
        any = true;
        best_score = s;
        best.u = u;
        best.m = m;
      }
    }
  });
  if (!any) throw std::logic_error("match_over_class: empty class");
  return best;
}

double distortion_of(const WZInstance& inst, const Sequence& x, const Sequence& y, const Sequence& z) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += inst.d(x[i], y[i], z[i]);
  return d;
}

// Draws (x^n, y^n) as flat sequences.
void draw_source(const SchemeConfig& cfg, std::uint64_t seed, Sequence& x, Sequence& y) {
  const std::size_t n = cfg.n;
  const std::size_t ny = cfg.instance.y_size();
  x.assign(n, 0);
  y.assign(n, 0);
  if (cfg.xy_mode == SourceMode::uniform_on_type_class) {
    const CondClassHandle h(cfg.t_xy, {}, {});
    const auto s = sample_uniform_cond(h, seed);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = s[i] / ny;
      y[i] = s[i] % ny;
    }
    return;
  }
  SplitMix64 rng(seed);
  const auto p = cfg.instance.p_xy.values();
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = p.size();
    for (std::size_t c = 0; c < p.size(); ++c) {
      if (p[c] <= 0.0) continue;
      acc += p[c];
      pick = c;
      if (u <= acc) break;
    }
    x[i] = pick / ny;
    y[i] = pick % ny;
  }
}

JointType type_of_marginal(const JointType& t, const AxisNames& keep) { return t.marginal(keep); }

}  // namespace

std::uint64_t message_count(std::size_t n, double rate) {
  if (!std::isfinite(rate) || rate < 0.0) throw std::invalid_argument("message_count: bad rate");
  const double e = rate * static_cast<double>(n);
  if (e > 62.0) throw std::invalid_argument("message_count: n R too large");
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(std::exp2(e) + 1e-9)));
}

SchemeConfig build_scheme(const WZInstance& inst, const JointType& t, double rate, SchemeMode mode,
                          SourceMode xy_mode) {
  if (mode == SchemeMode::timesharing_and)
    throw std::invalid_argument("build_scheme: use build_timesharing_and for time-sharing");
  if (t.axes.size() != 4 || t.axes[0].name != "U" || t.axes[1].name != "X" || t.axes[2].name != "Y" ||
      t.axes[3].name != "Z")
    throw std::invalid_argument("build_scheme: joint type must have axes U, X, Y, Z");
  if (t.axes[1].size() != inst.x_size() || t.axes[2].size() != inst.y_size() ||
      t.axes[3].size() != inst.z_size)
    throw std::invalid_argument("build_scheme: joint type alphabets differ from the instance");
  if (t.n > kMaxSimBlocklength)
    throw std::invalid_argument("build_scheme: n > 14 is not supported; use a smaller n");
  double total = 0.0;
  for (std::size_t c = 0; c < t.counts.size(); ++c) {
    const std::size_t z = c % inst.z_size, y = (c / inst.z_size) % inst.y_size();
    const std::size_t x = (c / (inst.z_size * inst.y_size())) % inst.x_size();
    total += t.counts[c] * inst.d(x, y, z);
  }
  if (!within_level(total, t.n, inst.level))
    throw std::invalid_argument("build_scheme: joint type violates the distortion level");
  for (std::size_t c = 0; c < t.counts.size(); ++c) {
    const std::size_t xy = (c / inst.z_size) % (inst.x_size() * inst.y_size());
    if (t.counts[c] > 0 && inst.p_xy[xy] == 0.0 && xy_mode == SourceMode::iid_source)
      throw std::invalid_argument("build_scheme: joint type puts mass where P_XY is zero");
  }

  SchemeConfig cfg;
  cfg.instance = inst;
  cfg.joint_type = t;
  cfg.n = t.n;
  cfg.rate = rate;
  cfg.m_size = mode == SchemeMode::matched ? message_count(t.n, rate) : 1;
  cfg.mode = mode;
  cfg.xy_mode = xy_mode;
  cfg.t_x = type_of_marginal(t, {"X"});
  cfg.t_y = type_of_marginal(t, {"Y"});
  cfg.t_xy = type_of_marginal(t, {"X", "Y"});
  cfg.t_ux = type_of_marginal(t, {"U", "X"});
  cfg.t_uy = type_of_marginal(t, {"U", "Y"});
  cfg.t_uyz = type_of_marginal(t, {"U", "Y", "Z"});
  const auto u_class = class_size(CondClassHandle(type_of_marginal(t, {"U"}), {}, {}));
  cfg.log2_u_class = u_class.log2_exact;
  if (mode == SchemeMode::matched) {
    // per-trial encoder support is T_{U|X}(x) x M; its size depends only on the type
    Sequence x_rep;
    for (std::size_t a = 0; a < cfg.t_x.counts.size(); ++a) x_rep.insert(x_rep.end(), cfg.t_x.counts[a], a);
    const auto ux = class_size(CondClassHandle(cfg.t_ux, {"X"}, {x_rep}));
    if (to_double(ux.exact) * static_cast<double>(cfg.m_size) > kSupportCap)
      throw std::invalid_argument("build_scheme: |T_{U|X}| * M exceeds 1e6; use a smaller n or rate");
  }
  return cfg;
}

SchemeConfig build_timesharing_and(std::size_t n, double rate) {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw std::invalid_argument("build_timesharing_and: R must lie in [0, 1]");
  if (n == 0 || n > 62) throw std::invalid_argument("build_timesharing_and: bad n");
  SchemeConfig cfg;
  cfg.instance = and_instance(rate);
  cfg.n = n;
  cfg.rate = rate;
  cfg.m_size = std::uint64_t{1} << floor_rn(n, rate);
  cfg.mode = SchemeMode::timesharing_and;
  cfg.xy_mode = SourceMode::iid_source;
  return cfg;
}

TrialOutcome run_trial(const SchemeConfig& cfg, std::uint64_t trial_seed) {
  TrialOutcome out;
  const WZInstance& inst = cfg.instance;
  const std::size_t n = cfg.n;

  if (cfg.mode == SchemeMode::timesharing_and) {
    SplitMix64 rng(derive_seed(trial_seed, {kTagXY}));
    const std::size_t k = floor_rn(n, cfg.rate);
    bool ok = true;
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t bits = rng.next();
      const std::size_t x = bits & 1u, y = (bits >> 1) & 1u;
      const std::size_t z = i < k ? (x & y) : 0;
      d += inst.d(x, y, z);
      ok = ok && z == (x & y);
    }
    out.success = ok;
    out.distortion = d;
    out.joint_on_type = true;
    return out;
  }

  Sequence x, y;
  draw_source(cfg, derive_seed(trial_seed, {kTagXY}), x, y);
  const std::vector<Axis> ax{inst.p_xy.axes()[0]}, ay{inst.p_xy.axes()[1]};
  if (!(joint_type_of(ax, {x}) == cfg.t_x) || !(joint_type_of(ay, {y}) == cfg.t_y)) {
    out.on_type = false;
    return out;
  }

  const CondClassHandle uy_class(cfg.t_uy, {"Y"}, {y});
  const double size_uy = to_double(class_size(uy_class).exact);
  Sequence u_dec, u_enc;

  if (cfg.mode == SchemeMode::matched) {
    const SharedExpSource src(derive_seed(trial_seed, {kTagShared}));
    const CondClassHandle ux_class(cfg.t_ux, {"X"}, {x});
    const double size_ux = to_double(class_size(ux_class).exact);
    const double w_enc = 1.0 / (size_ux * static_cast<double>(cfg.m_size));
    const auto enc = match_over_class(ux_class, 0, cfg.m_size, w_enc, src);
    const auto dec = match_over_class(uy_class, enc.m, enc.m + 1, 1.0 / size_uy, src);
    u_enc = enc.u;
    u_dec = dec.u;
    out.matched = u_enc == u_dec;
    const bool in_uy =
        joint_type_of({cfg.t_uy.axes[0], cfg.t_uy.axes[1]}, {u_enc, y}) == cfg.t_uy;
    out.coupling_bound = mismatch_bound(w_enc, in_uy ? 1.0 / size_uy : 0.0);
  } else {
    u_dec = sample_uniform_cond(uy_class, derive_seed(trial_seed, {kTagU}));
    u_enc = u_dec;
  }

  const CondClassHandle z_class(cfg.t_uyz, {"U", "Y"}, {u_dec, y});
  const Sequence z = sample_uniform_cond(z_class, derive_seed(trial_seed, {kTagZ}));
  out.distortion = distortion_of(inst, x, y, z);
  out.success = within_level(out.distortion, n, inst.level);
  out.joint_on_type = joint_type_of(cfg.joint_type->axes, {u_enc, x, y, z}) == *cfg.joint_type;
  const bool designated = cfg.mode == SchemeMode::matched ? out.matched && out.joint_on_type
                                                          : out.joint_on_type;
  out.invariant_ok = !designated || out.success;
  return out;
}

Interval wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("wilson_interval: no trials");
  constexpr double z = 1.959963984540054;
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nt;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nt;
  const double center = (p + z2 / (2.0 * nt)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt));
  return {successes == 0 ? 0.0 : std::max(0.0, center - half),
          successes == trials ? 1.0 : std::min(1.0, center + half)};
}

double log2_lower_bound(const SchemeConfig& cfg) {
  if (cfg.mode == SchemeMode::timesharing_and) return std::log2(exact_pc_timesharing_and(cfg.n, cfg.rate));
  const JointTable p = cfg.joint_type->distribution();
  const double nu = static_cast<double>(p.axes()[0].size());
  const double nx = static_cast<double>(cfg.instance.x_size());
  const double ny = static_cast<double>(cfg.instance.y_size());
  const double nz = static_cast<double>(cfg.instance.z_size);
  const double n = static_cast<double>(cfg.n);
  const double lpoly = std::log2(n + 1.0);
  const double markov_2 = cond_mutual_information(p, {"Z"}, {"X"}, {"U", "Y"});
  const bool iid = cfg.xy_mode == SourceMode::iid_source;
  const double div = iid ? kl_divergence(marginalize(p, {"X", "Y"}), cfg.instance.p_xy) : 0.0;
  if (cfg.mode == SchemeMode::naive) {
    const double ux_given_y = cond_mutual_information(p, {"U"}, {"X"}, {"Y"});
    const double k = iid ? nx * ny * (nu * (nz + 1.0) + 1.0) : nu * nx * ny * (nz + 1.0);
    return -k * lpoly - n * (div + ux_given_y + markov_2);
  }
  const double markov_1 = cond_mutual_information(p, {"U"}, {"Y"}, {"X"});
  const double r_eff = std::log2(static_cast<double>(cfg.m_size)) / n;
  const double gap = cond_mutual_information(p, {"U"}, {"X"}) - cond_mutual_information(p, {"U"}, {"Y"}) - r_eff;
  const double k = iid ? nx * (nu * ny * (nz + 1.0) + nu + ny) : nu * nx * (ny * (nz + 1.0) + 1.0);
  return -k * lpoly - 1.0 - n * (div + markov_1 + markov_2 + std::max(gap, 0.0));
}

EstimateReport estimate(const SchemeConfig& cfg, std::size_t trials, std::uint64_t master_seed,
                        unsigned workers) {
  if (trials == 0) throw std::invalid_argument("estimate: trials must be >= 1");
  std::vector<TrialOutcome> outcomes(trials);
  auto run = [&](std::size_t t) { outcomes[t] = run_trial(cfg, derive_seed(master_seed, {t})); };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::size_t>(trials, 256))));
  if (workers == 1) {
    for (std::size_t t = 0; t < trials; ++t) run(t);
  } else {
    std::vector<std::exception_ptr> errs(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t t = w; t < trials; t += workers) run(t);
        } catch (...) {
          errs[w] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }

  EstimateReport r;
  r.trials = trials;
  double bound_sum = 0.0;
  for (const auto& o : outcomes) {
    r.successes += o.success;
    if (!o.invariant_ok) ++r.invariant_violations;
    if (cfg.mode == SchemeMode::matched && o.on_type) {
      ++r.coupled_trials;
      r.mismatches += !o.matched;
      bound_sum += o.coupling_bound;
    }
  }
  if (r.coupled_trials > 0) r.mean_coupling_bound = bound_sum / static_cast<double>(r.coupled_trials);
  r.p_hat = static_cast<double>(r.successes) / static_cast<double>(trials);
  const auto ci = wilson_interval(r.successes, trials);
  r.ci_lo = ci.lo;
  r.ci_hi = ci.hi;
  r.exponent_hat = r.p_hat > 0.0 ? -std::log2(r.p_hat) / static_cast<double>(cfg.n) : kInf;
  r.log2_bound = log2_lower_bound(cfg);
  r.bound = std::exp2(r.log2_bound);
  r.bound_satisfied = r.ci_hi >= r.bound;
  return r;
}

double exact_pc_timesharing_and(std::size_t n, double rate) {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw std::invalid_argument("exact_pc_timesharing_and: R must lie in [0, 1]");
  return std::pow(0.75, static_cast<double>(n - floor_rn(n, rate)));
}

Code timesharing_and_code(std::size_t n, double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("timesharing_and_code: R must lie in [0, 1]");
  const std::size_t k = floor_rn(n, rate);
  const std::uint64_t m_size = std::uint64_t{1} << k;
  const std::uint64_t nx = int_pow(2, n), ny = nx;
  std::vector<std::uint64_t> enc(nx), dec(m_size * ny);
  for (std::uint64_t x = 0; x < nx; ++x) enc[x] = x >> (n - k);
  for (std::uint64_t m = 0; m < m_size; ++m)
    for (std::uint64_t y = 0; y < ny; ++y) {
      const auto ys = sequence_digits(y, 2, n);
      const auto ms = sequence_digits(m, 2, k);
      std::vector<std::size_t> zs(n, 0);
      for (std::size_t i = 0; i < k; ++i) zs[i] = ms[i] & ys[i];
      dec[m * ny + y] = sequence_index(zs, 2);
    }
  return Code::make(n, m_size, 2, 2, 2, std::move(enc), std::move(dec));
}

}  // namespace wzexp
