#include "wzexp/types_method.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "wzexp/rng.hpp"

namespace wzexp {

namespace {

std::size_t product_of(const std::vector<Axis>& axes) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.size();
  return n;
}

std::vector<std::size_t> strides_of(const std::vector<Axis>& axes) {
  std::vector<std::size_t> s(axes.size(), 1);
  for (std::size_t k = axes.size(); k-- > 1;) s[k - 1] = s[k] * axes[k].size();
  return s;
}

double log2_factorial(std::size_t k) { return std::lgamma(static_cast<double>(k) + 1.0) / std::numbers::ln2; }

}  // namespace

JointType JointType::make(std::vector<Axis> axes, std::size_t n, std::vector<std::size_t> counts) {
  if (n == 0) throw std::invalid_argument("JointType: blocklength must be >= 1");
  if (counts.size() != product_of(axes))
    throw std::invalid_argument("JointType: count table does not match the alphabets");
  if (std::accumulate(counts.begin(), counts.end(), std::size_t{0}) != n)
    throw std::invalid_argument("JointType: counts must sum to n");
  for (std::size_t i = 0; i < axes.size(); ++i)
    for (std::size_t j = i + 1; j < axes.size(); ++j)
      if (axes[i].name == axes[j].name) throw std::invalid_argument("JointType: duplicate axis");
  return JointType{std::move(axes), n, std::move(counts)};
}

JointTable JointType::distribution() const {
  std::vector<double> v(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) v[c] = static_cast<double>(counts[c]) / n;
  return JointTable(axes, std::move(v));
}

JointType JointType::marginal(const AxisNames& keep) const {
  std::vector<std::size_t> pos;
  std::vector<Axis> out_axes;
  for (const auto& name : keep) {
    std::size_t i = 0;
    while (i < axes.size() && axes[i].name != name) ++i;
    if (i == axes.size()) throw std::invalid_argument("JointType::marginal: unknown axis '" + name + "'");
    pos.push_back(i);
    out_axes.push_back(axes[i]);
  }
  const auto in_strides = strides_of(axes);
  const auto out_strides = strides_of(out_axes);
  std::vector<std::size_t> out(product_of(out_axes), 0);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    std::size_t m = 0;
    for (std::size_t k = 0; k < pos.size(); ++k)
      m += ((c / in_strides[pos[k]]) % axes[pos[k]].size()) * out_strides[k];
    out[m] += counts[c];
  }
  return JointType{std::move(out_axes), n, std::move(out)};
}

JointType joint_type_of(const std::vector<Axis>& axes, const std::vector<Sequence>& seqs) {
  if (seqs.size() != axes.size()) throw std::invalid_argument("joint_type_of: one sequence per axis");
  if (seqs.empty() || seqs[0].empty()) throw std::invalid_argument("joint_type_of: empty sequences");
  const std::size_t n = seqs[0].size();
  for (std::size_t k = 0; k < seqs.size(); ++k) {
    if (seqs[k].size() != n) throw std::invalid_argument("joint_type_of: length mismatch");
    for (auto s : seqs[k])
      if (s >= axes[k].size()) throw std::invalid_argument("joint_type_of: symbol out of range");
  }
  const auto strides = strides_of(axes);
  std::vector<std::size_t> counts(product_of(axes), 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (std::size_t k = 0; k < seqs.size(); ++k) c += seqs[k][i] * strides[k];
    ++counts[c];
  }
  return JointType::make(axes, n, std::move(counts));
}

JointType nearest_type(const JointTable& p, std::size_t n) {
  if (n == 0) throw std::invalid_argument("nearest_type: blocklength must be >= 1");
  if (!p.is_normalized()) throw std::invalid_argument("nearest_type: table is not normalized");
  const std::size_t cells = p.size();
  std::vector<std::size_t> counts(cells);
  std::vector<double> rem(cells);
  std::size_t total = 0;
  for (std::size_t c = 0; c < cells; ++c) {
    const double t = p[c] * static_cast<double>(n);
    counts[c] = static_cast<std::size_t>(std::floor(t));
    rem[c] = t - std::floor(t);
    total += counts[c];
  }
  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; total < n; ++k, ++total) ++counts[order[k % cells]];
  return JointType::make(p.axes(), n, std::move(counts));
}

// ---------------------------------------------------------------- classes

CondClassHandle::CondClassHandle(JointType type, AxisNames given, std::vector<Sequence> given_seqs)
    : type_(std::move(type)), given_(std::move(given)) {
  if (given_seqs.size() != given_.size())
    throw std::invalid_argument("CondClassHandle: one conditioning sequence per given axis");
  const auto& axes = type_.axes;
  std::vector<std::size_t> given_pos, out_pos;
  for (const auto& name : given_) {
    std::size_t i = 0;
    while (i < axes.size() && axes[i].name != name) ++i;
    if (i == axes.size()) throw std::invalid_argument("CondClassHandle: unknown axis '" + name + "'");
    if (std::find(given_pos.begin(), given_pos.end(), i) != given_pos.end())
      throw std::invalid_argument("CondClassHandle: duplicate given axis");
    given_pos.push_back(i);
  }
  for (std::size_t i = 0; i < axes.size(); ++i)
    if (std::find(given_pos.begin(), given_pos.end(), i) == given_pos.end()) {
      out_pos.push_back(i);
      out_axes_.push_back(axes[i]);
    }
  for (auto i : given_pos) given_size_ *= axes[i].size();
  for (auto i : out_pos) out_size_ *= axes[i].size();

  const std::size_t n = type_.n;
  for (std::size_t k = 0; k < given_seqs.size(); ++k) {
    if (given_seqs[k].size() != n)
      throw std::invalid_argument("CondClassHandle: conditioning sequence length differs from n");
    for (auto s : given_seqs[k])
      if (s >= axes[given_pos[k]].size())
        throw std::invalid_argument("CondClassHandle: conditioning symbol out of range");
  }

  const auto strides = strides_of(axes);
  required_.assign(given_size_ * out_size_, 0);
  for (std::size_t c = 0; c < type_.counts.size(); ++c) {
    if (type_.counts[c] == 0) continue;
    std::size_t v = 0, w = 0;
    for (auto i : given_pos) v = v * axes[i].size() + (c / strides[i]) % axes[i].size();
    for (auto i : out_pos) w = w * axes[i].size() + (c / strides[i]) % axes[i].size();
    required_[v * out_size_ + w] += type_.counts[c];
  }
  positions_.assign(given_size_, {});
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t v = 0;
    for (std::size_t k = 0; k < given_pos.size(); ++k)
      v = v * axes[given_pos[k]].size() + given_seqs[k][j];
    positions_[v].push_back(j);
  }
  for (std::size_t v = 0; v < given_size_; ++v) {
    std::size_t s = 0;
    for (std::size_t w = 0; w < out_size_; ++w) s += required_[v * out_size_ + w];
    if (s != positions_[v].size()) consistent_ = false;
  }
}

std::vector<Sequence> CondClassHandle::split(const Sequence& member) const {
  std::vector<Sequence> out(out_axes_.size(), Sequence(member.size()));
  const auto strides = strides_of(out_axes_);
  for (std::size_t j = 0; j < member.size(); ++j)
    for (std::size_t k = 0; k < out_axes_.size(); ++k)
      out[k][j] = (member[j] / strides[k]) % out_axes_[k].size();
  return out;
}

ClassSize class_size(const CondClassHandle& h) {
  ClassSize out;
  const std::size_t n = h.n();
  const std::size_t nw = h.output_alphabet();
  double hcond = 0.0;
  for (std::size_t v = 0; v < h.given_alphabet(); ++v) {
    std::size_t nv = 0;
    for (std::size_t w = 0; w < nw; ++w) nv += h.required()[v * nw + w];
    for (std::size_t w = 0; w < nw; ++w) {
      const auto c = h.required()[v * nw + w];
      if (c > 0) hcond += static_cast<double>(c) / n * std::log2(static_cast<double>(nv) / c);
    }
  }
  out.cond_entropy = hcond;
  const double k = static_cast<double>(h.given_alphabet() * nw);
  out.log2_upper = n * hcond;
  out.log2_lower = n * hcond - k * std::log2(static_cast<double>(n) + 1.0);
  if (!h.consistent()) {
    out.exact = 0;
    out.log2_exact = -kInf;
    return out;
  }
  BigInt total = 1;
  double lg = 0.0;
  for (std::size_t v = 0; v < h.given_alphabet(); ++v) {
    const std::size_t nv = h.positions()[v].size();
    // multinomial as a product of binomials, built incrementally
    std::size_t placed = 0;
    lg += log2_factorial(nv);
    for (std::size_t w = 0; w < nw; ++w) {
      const auto c = h.required()[v * nw + w];
      lg -= log2_factorial(c);
      for (std::size_t i = 1; i <= c; ++i) {
        total *= placed + i;
        total /= i;
      }
      placed += c;
    }
  }
  out.exact = total;
  out.log2_exact = lg;
  return out;
}

void for_each_member(const CondClassHandle& h, const std::function<void(const Sequence&)>& fn) {
  if (!h.consistent()) return;
  if (class_size(h).exact > kEnumerationCap)
    throw std::invalid_argument("for_each_member: class has more than 1e7 members");
  const std::size_t nw = h.output_alphabet();
  std::vector<std::size_t> active;
  std::vector<Sequence> blocks(h.given_alphabet());
  for (std::size_t v = 0; v < h.given_alphabet(); ++v) {
    if (h.positions()[v].empty()) continue;
    active.push_back(v);
    for (std::size_t w = 0; w < nw; ++w)
      blocks[v].insert(blocks[v].end(), h.required()[v * nw + w], w);
  }
  Sequence seq(h.n());
  auto write = [&](std::size_t v) {
    const auto& pos = h.positions()[v];
    for (std::size_t i = 0; i < pos.size(); ++i) seq[pos[i]] = blocks[v][i];
  };
  for (auto v : active) write(v);
  while (true) {
    fn(seq);
    std::size_t k = active.size();
    while (k > 0) {
      const auto v = active[k - 1];
      const bool more = std::next_permutation(blocks[v].begin(), blocks[v].end());
      write(v);
      if (more) break;
      --k;
    }
    if (k == 0) return;
  }
}

Sequence sample_uniform_cond(const CondClassHandle& h, std::uint64_t seed) {
  if (!h.consistent()) throw std::invalid_argument("sample_uniform_cond: empty class");
  SplitMix64 rng(seed);
  const std::size_t nw = h.output_alphabet();
  Sequence seq(h.n());
  Sequence block;
  for (std::size_t v = 0; v < h.given_alphabet(); ++v) {
    const auto& pos = h.positions()[v];
    if (pos.empty()) continue;
    block.clear();
    for (std::size_t w = 0; w < nw; ++w) block.insert(block.end(), h.required()[v * nw + w], w);
    for (std::size_t i = block.size(); i-- > 1;) std::swap(block[i], block[rng.below(i + 1)]);
    for (std::size_t i = 0; i < pos.size(); ++i) seq[pos[i]] = block[i];
  }
  return seq;
}

TypeClassProb type_class_prob(const JointTable& p, const JointType& t) {
  if (!(p.axes() == t.axes)) throw std::invalid_argument("type_class_prob: alphabets differ");
  if (!p.is_normalized()) throw std::invalid_argument("type_class_prob: table is not normalized");
  const double n = static_cast<double>(t.n);
  double log2_size = log2_factorial(t.n);
  double log2_mass = 0.0;
  double div = 0.0;
  bool impossible = false;
  for (std::size_t c = 0; c < t.counts.size(); ++c) {
    const auto k = t.counts[c];
    if (k == 0) continue;
    log2_size -= log2_factorial(k);
    if (!(p[c] > 0.0)) {
      impossible = true;
      continue;
    }
    log2_mass += k * std::log2(p[c]);
    div += k / n * std::log2(k / n / p[c]);
  }
  TypeClassProb out;
  const double poly = -static_cast<double>(t.counts.size()) * std::log2(n + 1.0);
  if (impossible) {
    out.prob = 0.0;
    out.log2_prob = -kInf;
    out.log2_lower = -kInf;
    return out;
  }
  out.log2_prob = log2_size + log2_mass;
  out.prob = std::exp2(out.log2_prob);
  out.log2_lower = poly - n * div;
  return out;
}

}  // namespace wzexp
