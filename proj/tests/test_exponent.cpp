#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "support.hpp"
#include "wzexp/exponent.hpp"

using namespace wzexp;
using doctest::Approx;

namespace {

long double coded_ref(long double r) { return 2 - ref::h2((2 + r) / 6) - (2 + r) / 3; }
long double timesharing_ref(long double r) { return (1 - r) * (2 - std::log2(3.0L)); }

WZInstance random_instance(SplitMix64& rng, double rate, double level_frac) {
  const auto p = ref::random_table(rng, {Axis("X", 2), Axis("Y", 2)});
  std::vector<double> d(8);
  for (auto& v : d) v = rng.uniform();
  const auto probe = WZInstance::make(p, 2, d, rate, 10.0);
  const double lo = probe.min_distortion(), hi = probe.constant_z_distortion();
  return probe.with_level(lo + level_frac * (hi - lo));
}

FStarOptions quick(int restarts = 16) {
  FStarOptions o;
  o.restarts = restarts;
  return o;
}

}  // namespace

TEST_CASE("instance validation") {
  const auto p = make_source({{0.25, 0.25}, {0.25, 0.25}});
  CHECK_THROWS_AS(WZInstance::make(p, 2, {0, 1, 1, 0, 0, 1, 1, 0}, -0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(WZInstance::make(p, 2, {0, 1, 1, 0, 0, 1, 1}, 0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(WZInstance::make(p, 2, {0, 1, 1, 0, 0, 1, 1, -1}, 0.1, 0.0), std::invalid_argument);
  // every z costs at least 1
  CHECK_THROWS_AS(WZInstance::make(p, 2, {1, 1, 1, 1, 1, 1, 1, 1}, 0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(make_source({{0.5, 0.5}, {0.5, 0.5}}), std::invalid_argument);
  const auto inst = and_instance(0.3);
  CHECK(inst.level == 0.0);
  CHECK(inst.d(1, 1, 1) == 0.0);
  CHECK(inst.d(1, 1, 0) == 1.0);
  CHECK(inst.d(0, 1, 1) == 1.0);
}

TEST_CASE("objective terms") {
  SplitMix64 rng(21);
  SUBCASE("trivial point") {
    const auto inst = and_instance(0.7).with_level(1.0);
    std::vector<double> v(2 * 2 * 2 * 2, 0.0);
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y) v[((0 * 2 + x) * 2 + y) * 2 + 0] = inst.p(x, y);
    const auto pt = objective_terms(JointTable(uxyz_axes(2, 2, 2, 2), v), inst);
    CHECK(pt.terms.kl_term == Approx(0.0));
    CHECK(pt.terms.soft_markov_1 == Approx(0.0));
    CHECK(pt.terms.soft_markov_2 == Approx(0.0));
    CHECK(pt.terms.rate_gap == Approx(-0.7));
    CHECK(pt.terms.total == Approx(0.0));
  }
  SUBCASE("AND construction at R = 0.5") {
    const auto pt = objective_terms(and_example(0.5).construction.dist, and_instance(0.5));
    CHECK(std::abs(pt.terms.total - static_cast<double>(coded_ref(0.5L))) < 1e-9);
    CHECK(pt.terms.total == Approx(0.18680).epsilon(1e-4));
    CHECK(pt.distortion == Approx(0.0));
  }
  SUBCASE("two forms agree and the total is the clipped sum") {
    for (int t = 0; t < 300; ++t) {
      const std::size_t nx = 1 + rng.below(3), ny = 1 + rng.below(3), nz = 1 + rng.below(3), nu = 1 + rng.below(3);
      const auto pxy = ref::random_table(rng, {Axis("X", nx), Axis("Y", ny)});
      std::vector<double> d(nx * ny * nz);
      for (auto& v : d) v = rng.uniform();
      const auto inst = WZInstance::make(pxy, nz, d, rng.uniform(), 1.0);
      const auto p = ref::random_table(rng, uxyz_axes(nu, nx, ny, nz), 0.2);
      const auto pt = objective_terms(p, inst);
      const auto& tm = pt.terms;
      REQUIRE(std::abs(tm.total - tm.divergence_form) < 1e-9);
      REQUIRE(std::abs(tm.total - (tm.kl_term + tm.soft_markov_1 + tm.soft_markov_2 + std::max(tm.rate_gap, 0.0))) < 1e-10);
    }
  }
  SUBCASE("axis mismatch") {
    const auto p = ref::random_table(rng, uxyz_axes(2, 3, 2, 2));
    CHECK_THROWS_AS(objective_terms(p, and_instance(0.5)), std::invalid_argument);
  }
}

TEST_CASE("optimize_fstar") {
  SUBCASE("zero above the rate-distortion limit") {
    const auto r = optimize_fstar(and_instance(1.0 + 0.05), quick());
    CHECK(r.value < 1e-6);
  }
  SUBCASE("beats the AND construction") {
    for (double rate : {0.25, 0.5, 0.75}) {
      const auto r = optimize_fstar(and_instance(rate));
      CHECK(r.value <= static_cast<double>(coded_ref(rate)) + 1e-4);
      CHECK(r.point.distortion <= 1e-9);
      CHECK(std::abs(r.point.terms.total - r.point.terms.divergence_form) < 1e-9);
    }
  }
  SUBCASE("R = 0 on AND gives 2 - log 3") {
    CHECK(optimize_fstar(and_instance(0.0), quick()).value ==
          Approx(static_cast<double>(timesharing_ref(0))).epsilon(1e-6));
  }
  SUBCASE("deterministic and worker independent") {
    auto o = quick(12);
    o.seed = 9;
    const auto a = optimize_fstar(and_instance(0.4), o);
    o.workers = 3;
    const auto b = optimize_fstar(and_instance(0.4), o);
    CHECK(a.value == b.value);
    CHECK(a.best_index == b.best_index);
    CHECK(a.candidate_values == b.candidate_values);
  }
  SUBCASE("sign property and naive dominance") {
    SplitMix64 rng(31);
    for (int t = 0; t < 4; ++t) {
      const auto inst = random_instance(rng, 0.1 + 0.2 * t, 0.2);
      const auto r = optimize_fstar(inst, quick(24));
      CHECK(r.point.rate_difference() >= -1e-7);
      double best_naive = kInf;
      for (double v : r.candidate_naive_values) best_naive = std::min(best_naive, v);
      CHECK(r.value <= best_naive + 1e-7);
      CHECK(r.value >= 0.0);
    }
  }
  SUBCASE("infeasible level is rejected at construction") {
    const auto p = make_source({{0.25, 0.25}, {0.25, 0.25}});
    CHECK_THROWS_AS(slepian_wolf_instance(p, 0.1).with_level(-1.0), std::invalid_argument);
  }
}

TEST_CASE("monotone in R and in D") {
  double prev = kInf;
  for (int k = 0; k <= 10; ++k) {
    const double v = optimize_fstar(and_instance(0.1 * k), quick(16)).value;
    CHECK(v <= prev + 1e-6);
    prev = v;
  }
  SplitMix64 rng(41);
  const auto base = random_instance(rng, 0.05, 0.0);
  const double lo = base.min_distortion(), hi = base.constant_z_distortion();
  prev = kInf;
  for (int k = 0; k <= 6; ++k) {
    const double v = optimize_fstar(base.with_level(lo + (hi - lo) * k / 6.0), quick(16)).value;
    CHECK(v <= prev + 1e-6);
    prev = v;
  }
}

TEST_CASE("positive below the rate-distortion function") {
  CHECK(optimize_fstar(and_instance(0.9), quick()).value > 1e-4);
  SplitMix64 rng(43);
  // function computation at D = 0
  for (int t = 0; t < 3; ++t) {
    const auto p = ref::random_table(rng, {Axis("X", 2), Axis("Y", 2)});
    const auto inst = function_instance(p, {0, 1, 1, 0}, 2, 0.0);
    const double rd = rd_wyner_ziv(inst).value;
    if (rd < 0.1) continue;
    CHECK(optimize_fstar(inst.with_rate(rd - 0.06), quick()).value > 1e-4);
  }
  // positive D, on instances whose distortion range is not nearly degenerate
  int tested = 0;
  for (int t = 0; t < 40 && tested < 3; ++t) {
    // weighted Hamming distortion
    const auto p = ref::random_table(rng, {Axis("X", 2), Axis("Y", 2)});
    std::vector<double> d(8, 0.0);
    for (std::size_t c = 0; c < 8; ++c)
      if ((c & 1u) != (c >> 2)) d[c] = 0.5 + rng.uniform();
    const auto probe = WZInstance::make(p, 2, d, 0.0, 10.0);
    if (probe.constant_z_distortion() - probe.min_distortion() < 0.2) continue;
    const auto inst = probe.with_level(0.2 * probe.constant_z_distortion());
    const double rd = rd_wyner_ziv(inst).value;
    if (rd < 0.1) continue;
    ++tested;
    CHECK(optimize_fstar(inst.with_rate(rd - 0.06), quick()).value > 1e-4);
  }
  CHECK(tested > 0);
}

TEST_CASE("soft convexity along a segment") {
  SplitMix64 rng(47);
  const auto inst = random_instance(rng, 0.1, 0.2);
  const double d0 = inst.level, d1 = inst.min_distortion() + 0.6 * (inst.constant_z_distortion() - inst.min_distortion());
  const double f0 = optimize_fstar(inst.with_rate(0.05).with_level(d0), quick()).value;
  const double f1 = optimize_fstar(inst.with_rate(0.25).with_level(d1), quick()).value;
  const double fm = optimize_fstar(inst.with_rate(0.15).with_level(0.5 * (d0 + d1)), quick()).value;
  if (fm > 0.5 * (f0 + f1) + 1e-3) MESSAGE("soft convexity flagged: midpoint " << fm << " vs " << 0.5 * (f0 + f1));
  CHECK(std::isfinite(fm));
}

TEST_CASE("rate-distortion function") {
  SUBCASE("lossless reproduction gives H(X|Y)") {
    SplitMix64 rng(51);
    for (int t = 0; t < 3; ++t) {
      const auto p = ref::random_table(rng, {Axis("X", 2), Axis("Y", 2)});
      const auto r = rd_wyner_ziv(slepian_wolf_instance(p, 0.0));
      CHECK(r.value == Approx(cond_entropy(p, {"X"}, {"Y"})).epsilon(1e-4));
      CHECK(r.forms_agree);
    }
  }
  SUBCASE("no communication needed") {
    const auto inst = and_instance(0.0).with_level(0.25);
    CHECK(rd_wyner_ziv(inst).value == Approx(0.0));
  }
  SUBCASE("AND at D = 0") {
    const auto r = rd_wyner_ziv(and_instance(0.0));
    CHECK(r.value == Approx(1.0).epsilon(1e-3));
    CHECK(std::abs(r.difference_form - r.conditional_form) <= 1e-4);
  }
  SUBCASE("forms agree at positive distortion") {
    SplitMix64 rng(53);
    for (int t = 0; t < 3; ++t) {
      const auto r = rd_wyner_ziv(random_instance(rng, 0.0, 0.3));
      CHECK(r.forms_agree);
      CHECK(r.value >= 0.0);
    }
  }
  SUBCASE("low-level overload validates") {
    const auto p = make_source({{0.25, 0.25}, {0.25, 0.25}});
    CHECK_THROWS_AS(rd_wyner_ziv(p, 2, {1, 1, 1, 1, 1, 1, 1, 1}, 0.5), std::invalid_argument);
  }
}

TEST_CASE("Slepian-Wolf exponent") {
  SplitMix64 rng(61);
  const auto p = ref::random_table(rng, {Axis("X", 2), Axis("Y", 2)});
  const double hxy = cond_entropy(p, {"X"}, {"Y"});
  CHECK(fstar_slepian_wolf(p, hxy + 0.01) == Approx(0.0));
  CHECK(fstar_slepian_wolf(p, hxy / 2) > 0.0);
  // X = Y
  const auto det = make_source({{0.3, 0.0}, {0.0, 0.7}});
  for (double r : {0.0, 0.3, 1.0}) CHECK(fstar_slepian_wolf(det, r) == Approx(0.0));
  const auto uni = make_source({{0.25, 0.25}, {0.25, 0.25}});
  const double sw = fstar_slepian_wolf(uni, 0.0);
  const double full = optimize_fstar(slepian_wolf_instance(uni, 0.0)).value;
  CHECK(std::abs(sw - full) < 1e-3);
  CHECK_THROWS_AS(fstar_slepian_wolf(uni, -1.0), std::invalid_argument);
}

TEST_CASE("function computation exponent") {
  const auto uni = make_source({{0.25, 0.25}, {0.25, 0.25}});
  for (double r : {0.0, 0.5}) CHECK(fstar_function_computation(uni, {0, 0, 0, 0}, 2, r).value == Approx(0.0));
  const std::vector<std::size_t> and_f{0, 0, 0, 1};
  const double v = fstar_function_computation(uni, and_f, 2, 0.5).value;
  CHECK(v <= static_cast<double>(coded_ref(0.5)) + 1e-4);
  CHECK(std::abs(v - optimize_fstar(and_instance(0.5)).value) < 1e-3);
  CHECK(fstar_function_computation(uni, and_f, 2, 1.0).value < 1e-6);
  SplitMix64 rng(67);
  const auto p = ref::random_table(rng, {Axis("X", 2), Axis("Y", 2)});
  const std::vector<std::size_t> xor_f{0, 1, 1, 0};
  const double fc = fstar_function_computation(p, xor_f, 2, 0.3).value;
  const double full = optimize_fstar(function_instance(p, xor_f, 2, 0.3)).value;
  CHECK(std::abs(fc - full) < 1e-3);
}

TEST_CASE("AND example closed forms") {
  for (int k = 0; k <= 10; ++k) {
    const double r = 0.1 * k;
    const auto ex = and_example(r);
    CHECK(std::abs(ex.timesharing - static_cast<double>(timesharing_ref(r))) < 1e-12);
    CHECK(std::abs(ex.coded_bound - static_cast<double>(coded_ref(r))) < 1e-12);
    CHECK(std::abs(ex.construction.terms.total - ex.coded_bound) < 1e-9);
    CHECK(std::abs(ex.construction.terms.soft_markov_1 - ex.markov_term) < 1e-9);
    CHECK(std::abs(ex.construction.rate_difference() - r) < 1e-9);
    if (k > 0 && k < 10) CHECK(ex.coded_bound < ex.timesharing);
  }
  CHECK(and_example(0).timesharing == Approx(0.41504).epsilon(1e-5));
  CHECK(and_example(1).coded_bound == Approx(0.0));
  CHECK_THROWS_AS(and_example(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(and_example(1.1), std::invalid_argument);
}

TEST_CASE("mixture functionals") {
  SUBCASE("Z = X with uniform independent bits") {
    std::vector<double> v(8, 0.0);
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y) v[(x * 2 + y) * 2 + x] = 0.25;
    const auto g = mixture_functionals(JointTable({Axis("X", 2), Axis("Y", 2), Axis("Z", 2)}, v));
    CHECK(g.g2 == Approx(0.0));
  }
  SplitMix64 rng(71);
  for (int t = 0; t < 200; ++t) {
    const auto p = ref::random_table(rng, {Axis("X", 2), Axis("Y", 3), Axis("Z", 2)}, 0.2);
    const auto g = mixture_functionals(p);
    CHECK(std::abs(g.g1 + cond_entropy(p, {"Y"}, {"X"}) + cond_entropy(p, {"Z"}, {"X", "Y"}) -
                   cond_entropy(p, {"Z"}, {"Y"})) < 1e-12);
  }
  for (int t = 0; t < 200; ++t) {
    const std::size_t nu = 2 + rng.below(3);
    const auto pu = ref::random_simplex(rng, nu);
    std::vector<double> joint;
    double avg1 = 0, avg2 = 0;
    for (std::size_t u = 0; u < nu; ++u) {
      const auto s = ref::random_table(rng, {Axis("X", 2), Axis("Y", 2), Axis("Z", 2)}, 0.2);
      const auto g = mixture_functionals(s);
      avg1 += pu[u] * g.g1;
      avg2 += pu[u] * g.g2;
      for (double v : s.values()) joint.push_back(pu[u] * v);
    }
    const JointTable p(uxyz_axes(nu, 2, 2, 2), joint);
    const double want1 = cond_entropy(p, {"Z"}, {"U", "Y"}) - cond_entropy(p, {"Z"}, {"U", "X", "Y"}) -
                         cond_entropy(p, {"Y"}, {"U", "X"});
    const double want2 = cond_entropy(p, {"Y"}, {"U"}) - cond_entropy(p, {"X"}, {"U"});
    REQUIRE(std::abs(avg1 - want1) < 1e-9);
    REQUIRE(std::abs(avg2 - want2) < 1e-9);
  }
  CHECK_THROWS_AS(mixture_functionals(JointTable::uniform({Axis("X", 2), Axis("Y", 2)})), std::invalid_argument);
}

TEST_CASE("auxiliary alphabet reduction") {
  SplitMix64 rng(73);
  for (int t = 0; t < 20; ++t) {
    const auto inst = random_instance(rng, 0.2 * rng.uniform(), 1.0);
    const auto p = ref::random_table(rng, uxyz_axes(14, 2, 2, 2), 0.1);
    const auto before = objective_terms(p, inst);
    const auto red = reduce_auxiliary(p, 9);
    CHECK(red.axes()[0].size() == 9);
    const auto after = objective_terms(red, inst);
    CHECK(after.terms.total <= before.terms.total + 1e-10);
    CHECK(std::abs(after.rate_difference() - before.rate_difference()) < 1e-9);
    const auto m0 = marginalize(p, {"X", "Y", "Z"}), m1 = marginalize(red, {"X", "Y", "Z"});
    for (std::size_t c = 0; c < m0.size(); ++c) CHECK(std::abs(m0[c] - m1[c]) < 1e-12);
    const auto back = objective_terms(embed_auxiliary(red, 12), inst);
    CHECK(std::abs(back.terms.total - after.terms.total) < 1e-12);
  }
  CHECK_THROWS_AS(embed_auxiliary(ref::random_table(rng, uxyz_axes(3, 2, 2, 2)), 2), std::invalid_argument);
}
