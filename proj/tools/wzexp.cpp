// wzexp: command-line front end for the exponent library.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wzexp/exponent.hpp"
#include "wzexp/instance_io.hpp"
#include "wzexp/matching.hpp"
#include "wzexp/oracle.hpp"
#include "wzexp/rng.hpp"
#include "wzexp/types_method.hpp"
#include "wzexp/wz_sim.hpp"

using namespace wzexp;

namespace {

struct Row {
  std::string param;
  std::string kind;
  double value;
  std::optional<double> ci_lo, ci_hi;
};

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

class Output {
 public:
  void add(std::string param, std::string kind, double value, std::optional<double> lo = {},
           std::optional<double> hi = {}) {
    rows_.push_back({std::move(param), std::move(kind), value, lo, hi});
  }
  void check(const std::string& name, bool ok) {
    add(name, "check", ok ? 1.0 : 0.0);
    passed_ = passed_ && ok;
  }
  bool passed() const { return passed_; }

  std::string render(const std::string& format) const {
    std::ostringstream os;
    if (format == "json") {
      nlohmann::ordered_json doc;
      doc["rows"] = nlohmann::ordered_json::array();
      for (const auto& r : rows_) {
        nlohmann::ordered_json j;
        j["param"] = r.param;
        j["kind"] = r.kind;
        if (std::isfinite(r.value))
          j["value"] = r.value;
        else
          j["value"] = fmt(r.value);
        j["ci_lo"] = r.ci_lo ? nlohmann::ordered_json(*r.ci_lo) : nlohmann::ordered_json(nullptr);
        j["ci_hi"] = r.ci_hi ? nlohmann::ordered_json(*r.ci_hi) : nlohmann::ordered_json(nullptr);
        doc["rows"].push_back(j);
      }
      doc["passed"] = passed_;
      os << doc.dump(2) << "\n";
      return os.str();
    }
    os << "param,kind,value,ci_lo,ci_hi\n";
    for (const auto& r : rows_)
      os << r.param << "," << r.kind << "," << fmt(r.value) << "," << (r.ci_lo ? fmt(*r.ci_lo) : "") << ","
         << (r.ci_hi ? fmt(*r.ci_hi) : "") << "\n";
    os << "all,passed," << (passed_ ? 1 : 0) << ",,\n";
    return os.str();
  }

 private:
  std::vector<Row> rows_;
  bool passed_ = true;
};

struct Globals {
  std::string instance;
  std::uint64_t seed = 0;
  int restarts = 64;
  std::size_t trials = 10000;
  std::size_t n = 0;
  double tol = 1e-7;
  std::string out;
  std::string format = "csv";
  unsigned workers = 1;
  std::optional<double> rate, level;
  std::optional<std::size_t> u_size;
};

WZInstance load(const Globals& g) {
  WZInstance inst = g.instance.empty() ? and_instance() : parse_instance(g.instance);
  if (g.instance.empty()) std::cerr << "wzexp: no --instance given, using builtin and_dfc\n";
  if (g.rate) inst = inst.with_rate(*g.rate);
  if (g.level) inst = inst.with_level(*g.level);
  return inst;
}

FStarOptions fstar_opts(const Globals& g) {
  FStarOptions o;
  o.restarts = g.restarts;
  o.tol = g.tol;
  o.seed = g.seed;
  o.u_size = g.u_size;
  o.workers = g.workers;
  return o;
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("--grid: cannot parse '" + item + "'");
    }
    if (used != item.size()) throw std::invalid_argument("--grid: cannot parse '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("--grid: empty grid");
  return out;
}

void cmd_exponent(const Globals& g, Output& out) {
  const auto inst = load(g);
  const auto r = optimize_fstar(inst, fstar_opts(g));
  const auto p = fmt(inst.rate);
  const auto& t = r.point.terms;
  out.add(p, "fstar", r.value);
  out.add(p, "kl_term", t.kl_term);
  out.add(p, "soft_markov_1", t.soft_markov_1);
  out.add(p, "soft_markov_2", t.soft_markov_2);
  out.add(p, "rate_gap", t.rate_gap);
  out.add(p, "distortion", r.point.distortion);
  out.check("decomposition", std::abs(t.total - t.divergence_form) <= 1e-9);
  out.check("feasible", r.point.distortion <= inst.level + 1e-9);
}

void cmd_rd(const Globals& g, Output& out) {
  const auto inst = load(g);
  RdOptions o;
  o.seed = g.seed;
  if (g.restarts > 0) o.restarts = std::min(g.restarts, 64);
  const auto r = rd_wyner_ziv(inst, o);
  const auto p = fmt(inst.level);
  out.add(p, "rd_difference_form", r.difference_form);
  out.add(p, "rd_conditional_form", r.conditional_form);
  out.add(p, "rd", r.value);
  out.check("forms_agree", r.forms_agree);
}

void cmd_sweep(const Globals& g, const std::string& grid, const std::string& axis, Output& out) {
  const auto base = load(g);
  const auto values = parse_grid(grid);
  if (axis != "rate" && axis != "level") throw std::invalid_argument("--axis must be rate or level");
  const bool is_and = base.name == "and_dfc";
  for (double v : values) {
    const auto inst = axis == "rate" ? base.with_rate(v) : base.with_level(v);
    const auto p = fmt(v);
    std::cerr << "wzexp: sweep " << axis << "=" << p << "\n";
    out.add(p, "fstar", optimize_fstar(inst, fstar_opts(g)).value);
    if (is_and && axis == "rate") {
      const auto ex = and_example(v);
      out.add(p, "timesharing", ex.timesharing);
      out.add(p, "coded_bound", ex.coded_bound);
      const bool interior = v > 1e-12 && v < 1.0 - 1e-12;
      out.check("order@" + p, interior ? ex.coded_bound < ex.timesharing
                                       : std::abs(ex.coded_bound - ex.timesharing) <= 1e-9);
    }
  }
}

void cmd_simulate(const Globals& g, const std::string& mode, const std::string& xy_mode,
                  const std::string& type_source, Output& out) {
  const auto inst = load(g);
  const std::size_t n = g.n == 0 ? 8 : g.n;
  SchemeConfig cfg;
  if (mode == "timesharing") {
    if (inst.name != "and_dfc") throw std::invalid_argument("timesharing mode needs the and_dfc builtin");
    cfg = build_timesharing_and(n, inst.rate);
  } else {
    if (mode != "matched" && mode != "naive") throw std::invalid_argument("--mode must be matched, naive or timesharing");
    if (xy_mode != "uniform" && xy_mode != "iid") throw std::invalid_argument("--xy-mode must be uniform or iid");
    JointTable dist = JointTable::scalar();
    if (type_source == "construction") {
      if (inst.name != "and_dfc") throw std::invalid_argument("--type-source construction needs the and_dfc builtin");
      dist = and_example(inst.rate).construction.dist;
    } else if (type_source == "optimizer") {
      dist = optimize_fstar(inst, fstar_opts(g)).point.dist;
    } else {
      throw std::invalid_argument("--type-source must be construction or optimizer");
    }
    const auto t = nearest_type(dist, n);
    cfg = build_scheme(inst, t, inst.rate, mode == "matched" ? SchemeMode::matched : SchemeMode::naive,
                       xy_mode == "iid" ? SourceMode::iid_source : SourceMode::uniform_on_type_class);
  }
  std::cerr << "wzexp: simulating n=" << n << " M=" << cfg.m_size << " trials=" << g.trials << "\n";
  const auto r = estimate(cfg, g.trials, g.seed, g.workers);
  const auto p = fmt(static_cast<double>(n));
  out.add(p, "p_c", r.p_hat, r.ci_lo, r.ci_hi);
  out.add(p, "exponent_hat", r.exponent_hat);
  out.add(p, "log2_lower_bound", r.log2_bound);
  if (cfg.mode == SchemeMode::timesharing_and) out.add(p, "p_c_exact", exact_pc_timesharing_and(n, inst.rate));
  if (cfg.mode == SchemeMode::matched && r.coupled_trials > 0) {
    const double rate = static_cast<double>(r.mismatches) / static_cast<double>(r.coupled_trials);
    out.add(p, "mismatch_rate", rate);
    out.add(p, "mean_mismatch_bound", r.mean_coupling_bound);
    const double se = std::sqrt(r.mean_coupling_bound * (1.0 - r.mean_coupling_bound) / static_cast<double>(r.coupled_trials));
    out.check("mismatch_bound", rate <= r.mean_coupling_bound + 3.0 * se + 1e-12);
  }
  out.check("lower_bound", r.bound_satisfied);
  out.check("distortion_invariant", r.invariant_violations == 0);
}

void cmd_oracle(const Globals& g, std::uint64_t m_size, Output& out) {
  const auto inst = load(g);
  const std::size_t n = g.n == 0 ? 1 : g.n;
  const auto rep = check_converse(inst, n, m_size, fstar_opts(g));
  const auto p = fmt(rep.rate);
  out.add(p, "bruteforce", rep.bruteforce);
  out.add(p, "fstar", rep.fstar);
  out.check("converse", rep.passed);
}

void cmd_matching_test(const Globals& g, std::size_t pairs, std::size_t support, Output& out) {
  if (support < 1 || support > 64) throw std::invalid_argument("--support must lie in [1, 64]");
  SplitMix64 rng(derive_seed(g.seed, {0x6d61746368}));
  for (std::size_t i = 0; i < pairs; ++i) {
    std::vector<Key> keys;
    std::vector<double> wp, wq;
    double sp = 0.0, sq = 0.0;
    for (std::size_t c = 0; c < support; ++c) {
      keys.push_back({c});
      wp.push_back(-std::log(rng.uniform()));
      wq.push_back(rng.uniform() < 0.15 ? 0.0 : -std::log(rng.uniform()));
      sp += wp.back();
      sq += wq.back();
    }
    if (sq == 0.0) wq[0] = sq = 1.0;
    for (auto& w : wp) w /= sp;
    for (auto& w : wq) w /= sq;
    const auto ex = mismatch_experiment(WeightedSupport(keys, wp), WeightedSupport(keys, wq), g.trials,
                                        derive_seed(g.seed, {i}));
    double worst = -kInf;
    for (const auto& c : ex.cells)
      if (c.checked) worst = std::max(worst, static_cast<double>(c.mismatches) / c.count - c.bound);
    const auto p = std::to_string(i);
    out.add(p, "worst_excess", worst);
    out.add(p, "chi2_pvalue", ex.chi2_pvalue);
    out.check("pair" + p, ex.passed);
  }
}

void cmd_and_example(const Globals& g, Output& out) {
  const double r = g.rate.value_or(0.5);
  const auto ex = and_example(r);
  const auto p = fmt(r);
  out.add(p, "timesharing", ex.timesharing);
  out.add(p, "coded_bound", ex.coded_bound);
  out.add(p, "markov_term", ex.markov_term);
  out.add(p, "construction_total", ex.construction.terms.total);
  out.add(p, "construction_rate_difference", ex.construction.rate_difference());
  out.check("construction_total", std::abs(ex.construction.terms.total - ex.coded_bound) <= 1e-9);
  out.check("construction_markov", std::abs(ex.construction.terms.soft_markov_1 - ex.markov_term) <= 1e-9);
  out.check("construction_rate", std::abs(ex.construction.rate_difference() - r) <= 1e-9);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strong converse exponents for lossy coding with decoder side information"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--instance", g.instance, "instance file (JSON)");
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--restarts", g.restarts, "optimizer restarts")->check(CLI::PositiveNumber);
  app.add_option("--trials", g.trials, "Monte Carlo trials or seeds")->check(CLI::PositiveNumber);
  app.add_option("--n", g.n, "blocklength");
  app.add_option("--tol", g.tol, "optimizer tolerance")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "write data here instead of stdout");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--workers", g.workers, "worker threads");
  app.add_option("--rate", g.rate, "override the instance rate R");
  app.add_option("--level", g.level, "override the distortion level D");
  app.add_option("--u-size", g.u_size, "auxiliary alphabet size");

  auto* exponent = app.add_subcommand("exponent", "optimize F*(R, D)");
  auto* rd = app.add_subcommand("rd", "rate-distortion function with side information");
  std::string grid = "0,0.25,0.5,0.75,1", axis = "rate";
  auto* sweep = app.add_subcommand("sweep", "F* over a grid of R or D");
  sweep->add_option("--grid", grid, "comma-separated values");
  sweep->add_option("--axis", axis, "rate or level")->check(CLI::IsMember({"rate", "level"}));
  std::string mode = "matched", xy_mode = "uniform", type_source;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo of a coding scheme");
  simulate->add_option("--mode", mode, "matched, naive or timesharing");
  simulate->add_option("--xy-mode", xy_mode, "uniform or iid");
  simulate->add_option("--type-source", type_source, "construction or optimizer");
  std::uint64_t m_size = 1;
  auto* oracle = app.add_subcommand("oracle", "brute-force converse check");
  oracle->add_option("--m", m_size, "message count M")->check(CLI::PositiveNumber);
  std::size_t pairs = 10, support = 8;
  auto* matching = app.add_subcommand("matching-test", "exponential matching bound check");
  matching->add_option("--pairs", pairs, "random (p, q) pairs");
  matching->add_option("--support", support, "support size");
  auto* and_ex = app.add_subcommand("and-example", "closed forms for the AND function");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  Output out;
  try {
    if (*exponent) cmd_exponent(g, out);
    if (*rd) cmd_rd(g, out);
    if (*sweep) cmd_sweep(g, grid, axis, out);
    if (*simulate) {
      if (type_source.empty()) type_source = (g.instance.empty() || load(g).name == "and_dfc") ? "construction" : "optimizer";
      cmd_simulate(g, mode, xy_mode, type_source, out);
    }
    if (*oracle) cmd_oracle(g, m_size, out);
    if (*matching) {
      if (g.trials == 10000) g.trials = 100000;
      cmd_matching_test(g, pairs, support, out);
    }
    if (*and_ex) cmd_and_example(g, out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "wzexp: error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "wzexp: error: " << e.what() << "\n";
    return 2;
  }

  const auto text = out.render(g.format);
  if (g.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(g.out);
    if (!f) {
      std::cerr << "wzexp: error: cannot write " << g.out << "\n";
      return 2;
    }
    f << text;
  }
  if (!out.passed()) std::cerr << "wzexp: some checks failed\n";
  return out.passed() ? 0 : 1;
}
