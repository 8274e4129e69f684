#pragma once

// Monte Carlo simulation of type-class coding schemes: the matched scheme
// (encoder and decoder couple their choice of U^n through shared exponential
// variates), the no-communication scheme where the decoder draws U^n on its
// own, and time-sharing for the AND function.

#include <cstddef>
#include <cstdint>
#include <optional>

#include "wzexp/exponent.hpp"
#include "wzexp/oracle.hpp"
#include "wzexp/types_method.hpp"

namespace wzexp {

enum class SchemeMode { matched, naive, timesharing_and };
enum class SourceMode { uniform_on_type_class, iid_source };

inline constexpr std::size_t kMaxSimBlocklength = 14;
inline constexpr double kSupportCap = 1e6;

struct SchemeConfig {
  WZInstance instance;
  /// Over U, X, Y, Z. Unused by time-sharing.
  std::optional<JointType> joint_type;
  std::size_t n = 0;
  double rate = 0.0;
  std::uint64_t m_size = 1;
  SchemeMode mode = SchemeMode::matched;
  SourceMode xy_mode = SourceMode::uniform_on_type_class;

  // marginal types of the test channels
  JointType t_x, t_y, t_xy, t_ux, t_uy, t_uyz;
  /// log2 |T_U|
  double log2_u_class = 0.0;
};

/// M = max(1, floor(2^(nR))).
std::uint64_t message_count(std::size_t n, double rate);

SchemeConfig build_scheme(const WZInstance& inst, const JointType& joint_type, double rate,
                          SchemeMode mode, SourceMode xy_mode = SourceMode::uniform_on_type_class);
/// Sends the first floor(Rn) bits of x and guesses 0 elsewhere.
SchemeConfig build_timesharing_and(std::size_t n, double rate);

struct TrialOutcome {
  bool success = false;
  /// Encoder and decoder picked the same U^n (matched mode only).
  bool matched = false;
  /// x^n and y^n lie in the scheme's marginal type classes.
  bool on_type = true;
  /// (U^n, X^n, Y^n, Z^n) has the scheme's joint type.
  bool joint_on_type = false;
  double distortion = 0.0;
  /// Matching mismatch bound for the encoder's draw, 1 when vacuous.
  double coupling_bound = 1.0;
  /// On-type matched trials must meet the distortion level.
  bool invariant_ok = true;
};

TrialOutcome run_trial(const SchemeConfig& cfg, std::uint64_t trial_seed);

struct EstimateReport {
  std::size_t trials = 0;
  std::size_t successes = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double exponent_hat = 0.0;
  /// Explicit finite-n lower bound on P_c and its log2.
  double bound = 0.0;
  double log2_bound = 0.0;
  bool bound_satisfied = false;

  // matching diagnostics over trials where both sides sampled
  std::size_t coupled_trials = 0;
  std::size_t mismatches = 0;
  double mean_coupling_bound = 0.0;
  std::size_t invariant_violations = 0;
};

struct Interval {
  double lo, hi;
};
/// 95% Wilson score interval.
Interval wilson_interval(std::size_t successes, std::size_t trials);

/// The explicit lower bound on P_c for the configuration (log2).
double log2_lower_bound(const SchemeConfig& cfg);

EstimateReport estimate(const SchemeConfig& cfg, std::size_t trials, std::uint64_t master_seed,
                        unsigned workers = 1);

/// (3/4)^(n - floor(Rn)).
double exact_pc_timesharing_and(std::size_t n, double rate);

/// The time-sharing scheme as an explicit code for the oracle.
Code timesharing_and_code(std::size_t n, double rate);

}  // namespace wzexp
