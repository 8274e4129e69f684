#include "wzexp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wzexp {

std::uint64_t int_pow(std::uint64_t base, std::size_t exp) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base)
      throw std::overflow_error("int_pow: overflow");
    r *= base;
  }
  return r;
}

std::vector<std::size_t> sequence_digits(std::uint64_t index, std::size_t base, std::size_t n) {
  std::vector<std::size_t> s(n);
  for (std::size_t i = n; i-- > 0;) {
    s[i] = index % base;
    index /= base;
  }
  return s;
}

std::uint64_t sequence_index(const std::vector<std::size_t>& seq, std::size_t base) {
  std::uint64_t r = 0;
  for (auto s : seq) r = r * base + s;
  return r;
}

Code Code::make(std::size_t n, std::uint64_t m_size, std::size_t x_size, std::size_t y_size,
                std::size_t z_size, std::vector<std::uint64_t> encoder,
                std::vector<std::uint64_t> decoder) {
  if (n == 0 || m_size == 0) throw std::invalid_argument("Code: n and M must be >= 1");
  const auto nx = int_pow(x_size, n), ny = int_pow(y_size, n), nz = int_pow(z_size, n);
  if (encoder.size() != nx) throw std::invalid_argument("Code: encoder table must cover X^n");
  if (decoder.size() != m_size * ny) throw std::invalid_argument("Code: decoder table must cover M x Y^n");
  for (auto m : encoder)
    if (m >= m_size) throw std::invalid_argument("Code: message out of range");
  for (auto z : decoder)
    if (z >= nz) throw std::invalid_argument("Code: reproduction out of range");
  return Code{n, m_size, x_size, y_size, z_size, std::move(encoder), std::move(decoder)};
}

namespace {

// Block probabilities and success indicators for all (x^n, y^n, z^n).
struct BlockTables {
  std::uint64_t nx = 0, ny = 0, nz = 0;
  std::vector<double> mass;        // [x * ny + y]
  std::vector<unsigned char> ok;   // [(x * ny + y) * nz + z]
};

BlockTables block_tables(const WZInstance& inst, std::size_t n, bool with_success) {
  BlockTables t;
  t.nx = int_pow(inst.x_size(), n);
  t.ny = int_pow(inst.y_size(), n);
  t.nz = int_pow(inst.z_size, n);
  if (t.nx * t.ny > kPcEnumerationCap)
    throw std::invalid_argument("oracle: |X|^n |Y|^n exceeds 1e7; use a smaller n");
  if (with_success && t.nx * t.ny * t.nz > kPcEnumerationCap)
    throw std::invalid_argument("oracle: |X|^n |Y|^n |Z|^n exceeds 1e7; use a smaller n");
  t.mass.resize(t.nx * t.ny);
  if (with_success) t.ok.resize(t.nx * t.ny * t.nz);
  for (std::uint64_t x = 0; x < t.nx; ++x) {
    const auto xs = sequence_digits(x, inst.x_size(), n);
    for (std::uint64_t y = 0; y < t.ny; ++y) {
      const auto ys = sequence_digits(y, inst.y_size(), n);
      double p = 1.0;
      for (std::size_t i = 0; i < n; ++i) p *= inst.p(xs[i], ys[i]);
      t.mass[x * t.ny + y] = p;
      if (!with_success) continue;
      for (std::uint64_t z = 0; z < t.nz; ++z) {
        const auto zs = sequence_digits(z, inst.z_size, n);
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d += inst.d(xs[i], ys[i], zs[i]);
        t.ok[(x * t.ny + y) * t.nz + z] = within_level(d, n, inst.level);
      }
    }
  }
  return t;
}

void check_alphabets(std::size_t x, std::size_t y, std::size_t z, const WZInstance& inst) {
  if (x != inst.x_size() || y != inst.y_size() || z != inst.z_size)
    throw std::invalid_argument("oracle: code alphabets differ from the instance");
}

}  // namespace

double pc_exact(const Code& code, const WZInstance& inst) {
  check_alphabets(code.x_size, code.y_size, code.z_size, inst);
  const std::size_t n = code.n;
  const auto nx = int_pow(inst.x_size(), n), ny = int_pow(inst.y_size(), n);
  if (nx * ny > kPcEnumerationCap)
    throw std::invalid_argument("pc_exact: |X|^n |Y|^n exceeds 1e7; use a smaller n");
  double pc = 0.0;
  for (std::uint64_t x = 0; x < nx; ++x) {
    const auto xs = sequence_digits(x, inst.x_size(), n);
    const auto m = code.encoder[x];
    for (std::uint64_t y = 0; y < ny; ++y) {
      const auto ys = sequence_digits(y, inst.y_size(), n);
      const auto zs = sequence_digits(code.decoder[m * ny + y], inst.z_size, n);
      double p = 1.0, d = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        p *= inst.p(xs[i], ys[i]);
        d += inst.d(xs[i], ys[i], zs[i]);
      }
      if (within_level(d, n, inst.level)) pc += p;
    }
  }
  return pc;
}

double pc_exact(const StochasticCode& code, const WZInstance& inst) {
  if (code.n == 0 || code.m_size == 0) throw std::invalid_argument("pc_exact: n and M must be >= 1");
  const auto t = block_tables(inst, code.n, true);
  const std::uint64_t m_size = code.m_size;
  if (code.enc.size() != t.nx * m_size || code.dec.size() != m_size * t.ny * t.nz)
    throw std::invalid_argument("pc_exact: stochastic code tables have the wrong size");
  double pc = 0.0;
  for (std::uint64_t x = 0; x < t.nx; ++x)
    for (std::uint64_t y = 0; y < t.ny; ++y) {
      const double p = t.mass[x * t.ny + y];
      if (p == 0.0) continue;
      for (std::uint64_t m = 0; m < m_size; ++m) {
        const double e = code.enc[x * m_size + m];
        if (e == 0.0) continue;
        for (std::uint64_t z = 0; z < t.nz; ++z)
          if (t.ok[(x * t.ny + y) * t.nz + z]) pc += p * e * code.dec[(m * t.ny + y) * t.nz + z];
      }
    }
  return pc;
}

BruteForceResult min_exponent_bruteforce(const WZInstance& inst, std::size_t n, std::uint64_t m_size) {
  if (n == 0 || m_size == 0) throw std::invalid_argument("min_exponent_bruteforce: n and M must be >= 1");
  const auto t = block_tables(inst, n, true);
  const std::uint64_t labels = std::min<std::uint64_t>(m_size, t.nx);

  // Restricted growth strings over nx positions with at most `labels` blocks:
  // count[i][k] = number of completions of positions i.. given k labels used.
  std::vector<std::vector<double>> count(t.nx + 1, std::vector<double>(labels + 1, 0.0));
  for (std::uint64_t k = 0; k <= labels; ++k) count[t.nx][k] = 1.0;
  for (std::uint64_t i = t.nx; i-- > 0;)
    for (std::uint64_t k = 0; k <= labels; ++k)
      count[i][k] = k * count[i + 1][k] + (k < labels ? count[i + 1][k + 1] : 0.0);
  if (count[0][0] > static_cast<double>(kCodeSearchCap))
    throw std::invalid_argument("min_exponent_bruteforce: search space exceeds 1e8 encoders");

  BruteForceResult best;
  best.pc = -1.0;
  std::vector<std::uint64_t> enc(t.nx, 0), best_enc, best_dec;
  std::vector<double> acc(labels * t.ny * t.nz);
  std::vector<std::uint64_t> dec(m_size * t.ny, 0);

  auto evaluate = [&](std::uint64_t used) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::uint64_t x = 0; x < t.nx; ++x) {
      const auto m = enc[x];
      for (std::uint64_t y = 0; y < t.ny; ++y) {
        const double p = t.mass[x * t.ny + y];
        if (p == 0.0) continue;
        const auto* ok = &t.ok[(x * t.ny + y) * t.nz];
        double* a = &acc[(m * t.ny + y) * t.nz];
        for (std::uint64_t z = 0; z < t.nz; ++z)
          if (ok[z]) a[z] += p;
      }
    }
    double pc = 0.0;
    std::fill(dec.begin(), dec.end(), 0);
    for (std::uint64_t m = 0; m < used; ++m)
      for (std::uint64_t y = 0; y < t.ny; ++y) {
        const double* a = &acc[(m * t.ny + y) * t.nz];
        std::uint64_t bz = 0;
        for (std::uint64_t z = 1; z < t.nz; ++z)
          if (a[z] > a[bz]) bz = z;
        dec[m * t.ny + y] = bz;
        pc += a[bz];
      }
    ++best.encoders_searched;
    if (pc > best.pc) {
      best.pc = pc;
      best_enc = enc;
      best_dec = dec;
    }
  };

  // Iterative depth-first enumeration in lexicographic order.
  std::vector<std::uint64_t> used_before(t.nx + 1, 0);
  std::uint64_t i = 0;
  enc[0] = 0;
  used_before[0] = 0;
  while (true) {
    const std::uint64_t used = std::max(used_before[i], enc[i] + 1);
    if (i + 1 == t.nx) {
      evaluate(used);
    } else {
      used_before[i + 1] = used;
      enc[++i] = 0;
      continue;
    }
    // advance to the next string
    while (true) {
      const std::uint64_t limit = std::min<std::uint64_t>(used_before[i] + 1, labels);
      if (enc[i] + 1 < limit) {
        ++enc[i];
        break;
      }
      if (i == 0) goto done;
      --i;
    }
  }
done:
  best.best_code = Code::make(n, m_size, inst.x_size(), inst.y_size(), inst.z_size, best_enc, best_dec);
  best.value = best.pc > 0.0 ? std::max(0.0, -std::log2(best.pc) / static_cast<double>(n)) : kInf;
  return best;
}

BruteForceResult min_exponent_at_rate(const WZInstance& inst, std::size_t n) {
  const double m = std::floor(std::exp2(static_cast<double>(n) * inst.rate) + 1e-9);
  return min_exponent_bruteforce(inst, n, static_cast<std::uint64_t>(std::max(1.0, m)));
}

ConverseReport check_converse(const WZInstance& inst, std::size_t n, std::uint64_t m_size,
                              const FStarOptions& opts, double slack) {
  ConverseReport r;
  r.n = n;
  r.m_size = m_size;
  r.rate = std::log2(static_cast<double>(m_size)) / static_cast<double>(n);
  r.slack = slack;
  r.bruteforce = min_exponent_bruteforce(inst, n, m_size).value;
  r.fstar = optimize_fstar(inst.with_rate(r.rate), opts).value;
  r.passed = r.bruteforce >= r.fstar - slack;
  return r;
}

}  // namespace wzexp
