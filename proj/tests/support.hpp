#pragma once

// Reference computations for tests, written directly from the definitions
// without going through the library's marginalization code.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "wzexp/prob.hpp"
#include "wzexp/rng.hpp"

namespace ref {

inline long double plogp(long double p) { return p > 0 ? -p * std::log2(p) : 0.0L; }

inline long double entropy(const std::vector<double>& p) {
  long double h = 0;
  for (double v : p) h += plogp(v);
  return h;
}

inline long double h2(long double t) { return plogp(t) + plogp(1 - t); }

/// Marginal on the axes flagged in `keep`, by explicit mixed-radix decoding.
inline std::vector<double> marginal(const std::vector<double>& p, const std::vector<std::size_t>& shape,
                                    const std::vector<bool>& keep) {
  std::size_t out = 1;
  for (std::size_t a = 0; a < shape.size(); ++a)
    if (keep[a]) out *= shape[a];
  std::vector<double> m(out, 0.0);
  for (std::size_t c = 0; c < p.size(); ++c) {
    std::size_t rem = c, idx = 0, mul = 1;
    for (std::size_t a = shape.size(); a-- > 0;) {
      const std::size_t digit = rem % shape[a];
      rem /= shape[a];
      if (keep[a]) {
        idx += digit * mul;
        mul *= shape[a];
      }
    }
    m[idx] += p[c];
  }
  return m;
}

/// H of the axes in `keep`.
inline long double h(const wzexp::JointTable& t, const std::vector<bool>& keep) {
  std::vector<double> v(t.values().begin(), t.values().end());
  return entropy(marginal(v, t.shape(), keep));
}

/// Random normalized table; about `zero_frac` of cells set to zero.
inline wzexp::JointTable random_table(wzexp::SplitMix64& rng, std::vector<wzexp::Axis> axes,
                                      double zero_frac = 0.0) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.size();
  std::vector<double> v(n);
  double s = 0;
  for (auto& x : v) {
    x = rng.uniform() < zero_frac ? 0.0 : -std::log(rng.uniform());
    s += x;
  }
  if (s == 0.0) {
    v[0] = 1.0;
    s = 1.0;
  }
  for (auto& x : v) x /= s;
  return wzexp::JointTable(std::move(axes), std::move(v));
}

inline std::vector<double> random_simplex(wzexp::SplitMix64& rng, std::size_t n) {
  std::vector<double> v(n);
  double s = 0;
  for (auto& x : v) s += (x = -std::log(rng.uniform()));
  for (auto& x : v) x /= s;
  return v;
}

}  // namespace ref
