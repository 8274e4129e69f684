#pragma once

// Exponential matching: shared unit-rate exponential variates indexed by
// discrete keys, and the scaled-argmin samplers built on them. Two parties
// holding the same source and sampling from nearby distributions pick the
// same key with high probability.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "wzexp/rng.hpp"

namespace wzexp {

/// A key is a tuple of small integers. It is hashed as the word stream
/// (component count, component 0, component 1, ...), i.e. fixed-width
/// 64-bit big-endian packing of the components behind a length prefix.
using Key = std::vector<std::uint64_t>;

class SharedExpSource {
 public:
  explicit SharedExpSource(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Exp(1) variate -ln(u), u in (0, 1] drawn from hash(seed, key).
  double variate(std::span<const std::uint64_t> key) const noexcept;

  /// Hasher primed with the length and the first components of a key of
  /// `total_len` components; absorb the rest and pass it to `variate_of`.
  KeyHasher prefix(std::size_t total_len, std::span<const std::uint64_t> head) const noexcept;
  static double variate_of(const KeyHasher& h) noexcept;

 private:
  std::uint64_t seed_;
};

double exp_variate(const SharedExpSource& src, std::span<const std::uint64_t> key) noexcept;

/// Distinct keys with weights that sum to 1.
struct WeightedSupport {
  std::vector<Key> keys;
  std::vector<double> weights;

  WeightedSupport(std::vector<Key> keys, std::vector<double> weights);
  double weight_of(const Key& key) const;
};

/// Running scaled argmin. Zero-weight offers are ignored; on equal scores
/// the lexicographically smaller key wins.
class ArgminAccumulator {
 public:
  void offer(std::span<const std::uint64_t> key, double variate, double weight);
  bool empty() const noexcept { return !has_; }
  const Key& key() const noexcept { return key_; }
  double score() const noexcept { return score_; }

 private:
  bool has_ = false;
  Key key_;
  double score_ = 0.0;
};

/// argmin over positive-weight keys of variate(c) / w(c). Weights need only be
/// non-negative, so scaling them all leaves the result unchanged.
Key argmin_sample(std::span<const Key> keys, std::span<const double> weights,
                  const SharedExpSource& src);
Key argmin_sample(const WeightedSupport& w, const SharedExpSource& src);

struct Coupling {
  Key c_p;
  Key c_q;
  bool match = false;
};

/// Both argmins computed from the same variates.
Coupling coupled_mismatch(const WeightedSupport& p, const WeightedSupport& q,
                          const SharedExpSource& src);

/// Encoder samples from P(.|a), decoder from Q(.|b) with the same source.
/// The caller guarantees b was generated without looking at the source
/// beyond (a, c_enc).
Coupling couple_conditional(const WeightedSupport& p_given_a, const WeightedSupport& q_given_b,
                            const SharedExpSource& src);

/// 1 - (1 + p/q)^(-1), taken as 1 when q = 0.
double mismatch_bound(double p_c, double q_c);


struct MismatchCell {
  Key key;
  std::size_t count = 0;       ///< trials with c_p = key
  std::size_t mismatches = 0;  ///< of those, trials with c_q != key
  double bound = 1.0;
  /// Binomial standard error of the mismatch rate at the bound.
  double se = 0.0;
  bool checked = false;  ///< count >= min_count
  bool ok = true;
};

struct MismatchExperiment {
  std::size_t seeds = 0;
  std::vector<MismatchCell> cells;
  /// Chi-square goodness of fit of c_p against p.
  double chi2 = 0.0;
  double chi2_pvalue = 1.0;
  bool passed = true;
};

/// Runs coupled_mismatch over `seeds` shared sources derived from
/// `master_seed` and checks each well-sampled cell against mismatch_bound
/// plus `sigmas` standard errors, and the marginal of c_p at `alpha`.
MismatchExperiment mismatch_experiment(const WeightedSupport& p, const WeightedSupport& q,
                                       std::size_t seeds, std::uint64_t master_seed,
                                       std::size_t min_count = 500, double sigmas = 3.0,
                                       double alpha = 1e-3);

/// Pearson statistic and upper-tail p-value of observed counts against weights.
std::pair<double, double> chi_square_test(std::span<const std::size_t> counts,
                                          std::span<const double> weights);

}  // namespace wzexp
