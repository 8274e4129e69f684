#include "wzexp/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace wzexp {

double SharedExpSource::variate(std::span<const std::uint64_t> key) const noexcept {
  return -std::log(bits_to_unit_open0(hash_words(seed_, key)));
}

KeyHasher SharedExpSource::prefix(std::size_t total_len,
                                  std::span<const std::uint64_t> head) const noexcept {
  KeyHasher h(seed_);
  h.absorb(total_len);
  for (auto w : head) h.absorb(w);
  return h;
}

double SharedExpSource::variate_of(const KeyHasher& h) noexcept {
  return -std::log(bits_to_unit_open0(h.finish()));
}

double exp_variate(const SharedExpSource& src, std::span<const std::uint64_t> key) noexcept {
  return src.variate(key);
}

WeightedSupport::WeightedSupport(std::vector<Key> k, std::vector<double> w)
    : keys(std::move(k)), weights(std::move(w)) {
  if (keys.size() != weights.size())
    throw std::invalid_argument("WeightedSupport: keys and weights differ in length");
  double s = 0.0;
  for (double v : weights) {
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("WeightedSupport: weights must be finite and >= 0");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("WeightedSupport: weights must sum to 1");
  std::vector<Key> sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("WeightedSupport: duplicate key");
}

double WeightedSupport::weight_of(const Key& key) const {
  for (std::size_t i = 0; i < keys.size(); ++i)
    if (keys[i] == key) return weights[i];
  return 0.0;
}

void ArgminAccumulator::offer(std::span<const std::uint64_t> key, double variate, double weight) {
  if (!(weight > 0.0)) return;
  const double s = variate / weight;
  if (!has_ || s < score_ ||
      (s == score_ && std::lexicographical_compare(key.begin(), key.end(), key_.begin(), key_.end()))) {
    has_ = true;
    score_ = s;
    key_.assign(key.begin(), key.end());
  }
}

Key argmin_sample(std::span<const Key> keys, std::span<const double> weights,
                  const SharedExpSource& src) {
  if (keys.size() != weights.size())
    throw std::invalid_argument("argmin_sample: keys and weights differ in length");
  ArgminAccumulator acc;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] < 0.0)
      throw std::invalid_argument("argmin_sample: weights must be finite and >= 0");
    if (weights[i] > 0.0) acc.offer(keys[i], src.variate(keys[i]), weights[i]);
  }
  if (acc.empty()) throw std::invalid_argument("argmin_sample: no key has positive weight");
  return acc.key();
}

Key argmin_sample(const WeightedSupport& w, const SharedExpSource& src) {
  return argmin_sample(w.keys, w.weights, src);
}

Coupling coupled_mismatch(const WeightedSupport& p, const WeightedSupport& q,
                          const SharedExpSource& src) {
  Coupling c;
  c.c_p = argmin_sample(p, src);
  c.c_q = argmin_sample(q, src);
  c.match = c.c_p == c.c_q;
  return c;
}

Coupling couple_conditional(const WeightedSupport& p_given_a, const WeightedSupport& q_given_b,
                            const SharedExpSource& src) {
  return coupled_mismatch(p_given_a, q_given_b, src);
}

double mismatch_bound(double p_c, double q_c) {
  if (!(q_c > 0.0)) return 1.0;
  return 1.0 - 1.0 / (1.0 + p_c / q_c);
}


std::pair<double, double> chi_square_test(std::span<const std::size_t> counts,
                                          std::span<const double> weights) {
  if (counts.size() != weights.size()) throw std::invalid_argument("chi_square_test: size mismatch");
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  double stat = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (weights[i] <= 0.0) {
      if (counts[i] > 0) return {std::numeric_limits<double>::infinity(), 0.0};
      continue;
    }
    const double e = total * weights[i];
    const double diff = static_cast<double>(counts[i]) - e;
    stat += diff * diff / e;
    ++cells;
  }
  if (cells < 2) return {0.0, 1.0};
  const boost::math::chi_squared dist(static_cast<double>(cells - 1));
  return {stat, boost::math::cdf(boost::math::complement(dist, stat))};
}

MismatchExperiment mismatch_experiment(const WeightedSupport& p, const WeightedSupport& q,
                                       std::size_t seeds, std::uint64_t master_seed,
                                       std::size_t min_count, double sigmas, double alpha) {
  if (seeds == 0) throw std::invalid_argument("mismatch_experiment: seeds must be >= 1");
  MismatchExperiment ex;
  ex.seeds = seeds;
  for (std::size_t i = 0; i < p.keys.size(); ++i) {
    MismatchCell c;
    c.key = p.keys[i];
    c.bound = mismatch_bound(p.weights[i], q.weight_of(p.keys[i]));
    ex.cells.push_back(std::move(c));
  }
  for (std::size_t s = 0; s < seeds; ++s) {
    const SharedExpSource src(derive_seed(master_seed, {s}));
    const auto cp = coupled_mismatch(p, q, src);
    const auto it = std::find(p.keys.begin(), p.keys.end(), cp.c_p);
    auto& cell = ex.cells[static_cast<std::size_t>(it - p.keys.begin())];
    ++cell.count;
    cell.mismatches += !cp.match;
  }
  std::vector<std::size_t> counts;
  for (auto& c : ex.cells) {
    counts.push_back(c.count);
    c.checked = c.count >= min_count;
    if (!c.checked) continue;
    const double n = static_cast<double>(c.count);
    c.se = std::sqrt(c.bound * (1.0 - c.bound) / n);
    c.ok = static_cast<double>(c.mismatches) / n <= c.bound + sigmas * c.se + 1e-12;
    ex.passed = ex.passed && c.ok;
  }
  std::tie(ex.chi2, ex.chi2_pvalue) = chi_square_test(counts, p.weights);
  ex.passed = ex.passed && ex.chi2_pvalue >= alpha;
  return ex;
}

}  // namespace wzexp
