#pragma once

// Exhaustive search over deterministic block codes at tiny blocklengths.
// Sequences are indexed in base |alphabet| with the first coordinate most
// significant.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wzexp/exponent.hpp"

namespace wzexp {

inline constexpr std::uint64_t kPcEnumerationCap = 10'000'000;
inline constexpr std::uint64_t kCodeSearchCap = 100'000'000;

/// True when an additive distortion total meets the level n * D.
inline bool within_level(double total, std::size_t n, double level) {
  return total <= static_cast<double>(n) * level + 1e-9;
}

std::uint64_t int_pow(std::uint64_t base, std::size_t exp);
/// Digits of `index` in base `base`, first coordinate most significant.
std::vector<std::size_t> sequence_digits(std::uint64_t index, std::size_t base, std::size_t n);
std::uint64_t sequence_index(const std::vector<std::size_t>& seq, std::size_t base);

struct Code {
  std::size_t n = 0;
  std::uint64_t m_size = 1;
  std::size_t x_size = 0, y_size = 0, z_size = 0;
  /// Message for every x^n.
  std::vector<std::uint64_t> encoder;
  /// Reproduction index for every (m, y^n), at m * |Y|^n + y^n.
  std::vector<std::uint64_t> decoder;

  static Code make(std::size_t n, std::uint64_t m_size, std::size_t x_size, std::size_t y_size,
                   std::size_t z_size, std::vector<std::uint64_t> encoder,
                   std::vector<std::uint64_t> decoder);
};

/// Exact non-excess-distortion probability of a deterministic code.
double pc_exact(const Code& code, const WZInstance& inst);

/// Stochastic code: enc[x^n * M + m] = P(m | x^n),
/// dec[(m * |Y|^n + y^n) * |Z|^n + z^n] = P(z^n | m, y^n).
struct StochasticCode {
  std::size_t n = 0;
  std::uint64_t m_size = 1;
  std::vector<double> enc;
  std::vector<double> dec;
};
double pc_exact(const StochasticCode& code, const WZInstance& inst);

struct BruteForceResult {
  double value = 0.0;  ///< (1/n) log2(1 / max P_c)
  double pc = 0.0;
  Code best_code;
  std::uint64_t encoders_searched = 0;
};

/// Exact F^(n) at rate (1/n) log2 M over deterministic codes. Encoders are
/// enumerated up to relabeling of messages, decoders by best response.
BruteForceResult min_exponent_bruteforce(const WZInstance& inst, std::size_t n, std::uint64_t m_size);

/// Same with M = floor(2^(nR)) for the instance's rate R.
BruteForceResult min_exponent_at_rate(const WZInstance& inst, std::size_t n);

struct ConverseReport {
  std::size_t n = 0;
  std::uint64_t m_size = 1;
  double rate = 0.0;
  double bruteforce = 0.0;
  double fstar = 0.0;
  double slack = 0.0;
  bool passed = false;
};

/// F^(n) >= F*(R, D) - slack at R = (1/n) log2 M.
ConverseReport check_converse(const WZInstance& inst, std::size_t n, std::uint64_t m_size,
                              const FStarOptions& opts = {}, double slack = 1e-3);

}  // namespace wzexp
