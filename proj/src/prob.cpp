#include "wzexp/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace wzexp {

namespace {

std::vector<std::size_t> strides_for(const std::vector<Axis>& axes) {
  std::vector<std::size_t> strides(axes.size(), 1);
  for (std::size_t i = axes.size(); i-- > 1;)
    strides[i - 1] = strides[i] * axes[i].size();
  return strides;
}

std::size_t product_size(const std::vector<Axis>& axes) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.size();
  return n;
}

void check_unique_names(const std::vector<Axis>& axes) {
  std::set<std::string> seen;
  for (const auto& a : axes)
    if (!seen.insert(a.name).second)
      throw std::invalid_argument("duplicate axis name '" + a.name + "'");
}

std::vector<std::size_t> positions_of(const JointTable& p, const AxisNames& names) {
  std::vector<std::size_t> pos;
  pos.reserve(names.size());
  for (const auto& n : names) pos.push_back(p.axis_index(n));
  return pos;
}

double entropy_of_values(std::span<const double> v) {
  double h = 0.0;
  for (double x : v)
    if (x > 0.0) h -= x * std::log2(x);
  return h;
}

void require_normalized(const JointTable& p, const char* what) {
  if (!p.is_normalized())
    throw std::invalid_argument(std::string(what) + ": table is not normalized (sum=" +
                                std::to_string(p.sum()) + ")");
}

}  // namespace

Alphabet::Alphabet(std::size_t size) : size_(size) {
  if (size == 0) throw std::invalid_argument("alphabet size must be at least 1");
}

Alphabet::Alphabet(std::size_t size, std::vector<std::string> labels)
    : size_(size), labels_(std::move(labels)) {
  if (size == 0) throw std::invalid_argument("alphabet size must be at least 1");
  if (!labels_.empty()) {
    if (labels_.size() != size_)
      throw std::invalid_argument("alphabet label count does not match its size");
    std::set<std::string> distinct(labels_.begin(), labels_.end());
    if (distinct.size() != labels_.size())
      throw std::invalid_argument("alphabet labels must be distinct");
  }
}

JointTable::JointTable(std::vector<Axis> axes, std::vector<double> values)
    : axes_(std::move(axes)), values_(std::move(values)) {
  check_unique_names(axes_);
  if (values_.size() != product_size(axes_))
    throw std::invalid_argument("table has " + std::to_string(values_.size()) +
                                " entries, axes require " +
                                std::to_string(product_size(axes_)));
  for (double v : values_)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("table entries must be finite and non-negative");
  strides_ = strides_for(axes_);
}

JointTable JointTable::scalar(double value) { return JointTable({}, {value}); }

JointTable JointTable::uniform(std::vector<Axis> axes) {
  const std::size_t n = product_size(axes);
  return JointTable(std::move(axes), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

JointTable JointTable::point_mass(std::vector<Axis> axes, std::span<const std::size_t> index) {
  const std::size_t n = product_size(axes);
  JointTable t(std::move(axes), std::vector<double>(n, 0.0));
  t.values_[t.flat_index(index)] = 1.0;
  return t;
}

std::vector<std::size_t> JointTable::shape() const {
  std::vector<std::size_t> s;
  for (const auto& a : axes_) s.push_back(a.size());
  return s;
}

AxisNames JointTable::axis_names() const {
  AxisNames names;
  for (const auto& a : axes_) names.push_back(a.name);
  return names;
}

bool JointTable::has_axis(std::string_view name) const noexcept {
  return std::any_of(axes_.begin(), axes_.end(), [&](const Axis& a) { return a.name == name; });
}

std::size_t JointTable::axis_index(std::string_view name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i].name == name) return i;
  throw std::invalid_argument("unknown axis '" + std::string(name) + "'");
}

std::size_t JointTable::flat_index(std::span<const std::size_t> index) const {
  if (index.size() != axes_.size())
    throw std::invalid_argument("index rank does not match table rank");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= axes_[i].size()) throw std::out_of_range("table index out of range");
    flat += index[i] * strides_[i];
  }
  return flat;
}

std::vector<std::size_t> JointTable::multi_index(std::size_t flat) const {
  std::vector<std::size_t> idx(axes_.size());
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    idx[i] = flat / strides_[i];
    flat %= strides_[i];
  }
  return idx;
}

double JointTable::sum() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

bool JointTable::is_normalized(double tol) const noexcept {
  return std::abs(sum() - 1.0) <= tol;
}

JointTable JointTable::normalized() const {
  const double s = sum();
  if (!(s > 0.0)) throw std::invalid_argument("cannot normalize a table with zero mass");
  std::vector<double> v(values_);
  for (double& x : v) x /= s;
  return JointTable(axes_, std::move(v));
}

JointTable JointTable::reorder(const AxisNames& order) const {
  if (order.size() != axes_.size())
    throw std::invalid_argument("reorder must list every axis exactly once");
  auto pos = positions_of(*this, order);
  std::vector<Axis> axes;
  for (auto i : pos) axes.push_back(axes_[i]);
  check_unique_names(axes);
  std::vector<double> v(values_.size());
  const auto new_strides = strides_for(axes);
  for (std::size_t flat = 0; flat < values_.size(); ++flat) {
    auto idx = multi_index(flat);
    std::size_t g = 0;
    for (std::size_t k = 0; k < pos.size(); ++k) g += idx[pos[k]] * new_strides[k];
    v[g] = values_[flat];
  }
  return JointTable(std::move(axes), std::move(v));
}

Channel::Channel(std::vector<Axis> inputs, std::vector<Axis> outputs, std::vector<double> values,
                 std::vector<bool> zero_mass)
    : inputs_(std::move(inputs)),
      outputs_(std::move(outputs)),
      values_(std::move(values)),
      zero_mass_(std::move(zero_mass)) {
  std::vector<Axis> all = inputs_;
  all.insert(all.end(), outputs_.begin(), outputs_.end());
  check_unique_names(all);
  input_size_ = product_size(inputs_);
  output_size_ = product_size(outputs_);
  if (values_.size() != input_size_ * output_size_)
    throw std::invalid_argument("channel value count does not match its axes");
  if (zero_mass_.empty()) zero_mass_.assign(input_size_, false);
  if (zero_mass_.size() != input_size_)
    throw std::invalid_argument("channel zero-mass flags do not match input size");
  for (std::size_t i = 0; i < input_size_; ++i) {
    double s = 0.0;
    for (std::size_t o = 0; o < output_size_; ++o) {
      const double v = values_[i * output_size_ + o];
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("channel entries must be finite and non-negative");
      s += v;
    }
    if (std::abs(s - 1.0) > kNormTol)
      throw std::invalid_argument("channel slice " + std::to_string(i) + " sums to " +
                                  std::to_string(s));
  }
}

Channel Channel::constant(std::vector<Axis> inputs, const JointTable& dist) {
  require_normalized(dist, "Channel::constant");
  const std::size_t n_in = product_size(inputs);
  std::vector<double> v;
  v.reserve(n_in * dist.size());
  for (std::size_t i = 0; i < n_in; ++i)
    v.insert(v.end(), dist.values().begin(), dist.values().end());
  return Channel(std::move(inputs), dist.axes(), std::move(v));
}

Channel Channel::identity(const Axis& input, std::string output_name) {
  const std::size_t n = input.size();
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  return Channel({input}, {Axis(std::move(output_name), input.alphabet)}, std::move(v));
}

double entropy(const JointTable& p) {
  require_normalized(p, "entropy");
  return entropy_of_values(p.values());
}

double kl_divergence(const JointTable& p, const JointTable& q) {
  if (p.axes() != q.axes()) throw std::invalid_argument("kl_divergence: axis mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = p[i];
    if (a <= 0.0) continue;
    const double b = q[i];
    if (b <= 0.0) return kInf;
    d += a * std::log2(a / b);
  }
  return d;
}

JointTable marginalize(const JointTable& p, const AxisNames& keep) {
  auto pos = positions_of(p, keep);
  std::vector<Axis> axes;
  for (auto i : pos) axes.push_back(p.axes()[i]);
  check_unique_names(axes);
  const auto strides = strides_for(axes);
  std::vector<double> v(product_size(axes), 0.0);
  for (std::size_t flat = 0; flat < p.size(); ++flat) {
    if (p[flat] == 0.0) continue;
    auto idx = p.multi_index(flat);
    std::size_t g = 0;
    for (std::size_t k = 0; k < pos.size(); ++k) g += idx[pos[k]] * strides[k];
    v[g] += p[flat];
  }
  return JointTable(std::move(axes), std::move(v));
}

double cond_entropy(const JointTable& p, const AxisNames& a, const AxisNames& c) {
  require_normalized(p, "cond_entropy");
  AxisNames ac = c;
  ac.insert(ac.end(), a.begin(), a.end());
  const double h_ac = entropy_of_values(marginalize(p, ac).values());
  const double h_c = c.empty() ? 0.0 : entropy_of_values(marginalize(p, c).values());
  return h_ac - h_c;
}

double cond_mutual_information(const JointTable& p, const AxisNames& a, const AxisNames& b,
                               const AxisNames& c) {
  require_normalized(p, "cond_mutual_information");
  std::set<std::string> seen;
  for (const auto* group : {&a, &b, &c})
    for (const auto& n : *group) {
      p.axis_index(n);
      if (!seen.insert(n).second)
        throw std::invalid_argument("cond_mutual_information: axis '" + n +
                                    "' appears in more than one group");
    }
  auto h = [&](AxisNames names) {
    return names.empty() ? 0.0 : entropy_of_values(marginalize(p, names).values());
  };
  AxisNames ac = a, bc = b, abc = a;
  ac.insert(ac.end(), c.begin(), c.end());
  bc.insert(bc.end(), c.begin(), c.end());
  abc.insert(abc.end(), b.begin(), b.end());
  abc.insert(abc.end(), c.begin(), c.end());
  return h(ac) + h(bc) - h(abc) - h(c);
}

JointTable compose(const JointTable& p, const Channel& ch) {
  std::vector<std::size_t> in_pos;
  for (const auto& ax : ch.inputs()) {
    const auto i = p.axis_index(ax.name);
    if (p.axes()[i].size() != ax.size())
      throw std::invalid_argument("compose: channel input '" + ax.name +
                                  "' has a different alphabet size");
    in_pos.push_back(i);
  }
  for (const auto& ax : ch.outputs())
    if (p.has_axis(ax.name))
      throw std::invalid_argument("compose: channel output '" + ax.name +
                                  "' already present in the table");
  std::vector<Axis> axes = p.axes();
  axes.insert(axes.end(), ch.outputs().begin(), ch.outputs().end());
  const auto in_strides = strides_for(ch.inputs());
  const std::size_t n_out = ch.output_size();
  std::vector<double> v(p.size() * n_out, 0.0);
  for (std::size_t flat = 0; flat < p.size(); ++flat) {
    auto idx = p.multi_index(flat);
    std::size_t in = 0;
    for (std::size_t k = 0; k < in_pos.size(); ++k) in += idx[in_pos[k]] * in_strides[k];
    for (std::size_t o = 0; o < n_out; ++o) v[flat * n_out + o] = p[flat] * ch(in, o);
  }
  return JointTable(std::move(axes), std::move(v));
}

Channel condition(const JointTable& p, const AxisNames& given) {
  positions_of(p, given);
  AxisNames rest;
  for (const auto& ax : p.axes())
    if (std::find(given.begin(), given.end(), ax.name) == given.end()) rest.push_back(ax.name);
  AxisNames order = given;
  order.insert(order.end(), rest.begin(), rest.end());
  const JointTable r = p.reorder(order);

  std::vector<Axis> in_axes, out_axes;
  for (const auto& n : given) in_axes.push_back(r.axes()[r.axis_index(n)]);
  for (const auto& n : rest) out_axes.push_back(r.axes()[r.axis_index(n)]);
  const std::size_t n_in = product_size(in_axes);
  const std::size_t n_out = product_size(out_axes);

  std::vector<double> v(n_in * n_out);
  std::vector<bool> zero(n_in, false);
  for (std::size_t i = 0; i < n_in; ++i) {
    double s = 0.0;
    for (std::size_t o = 0; o < n_out; ++o) s += r[i * n_out + o];
    if (s <= 0.0) {
      zero[i] = true;
      for (std::size_t o = 0; o < n_out; ++o) v[i * n_out + o] = 1.0 / static_cast<double>(n_out);
      continue;
    }
    double t = 0.0;
    for (std::size_t o = 0; o < n_out; ++o) {
      v[i * n_out + o] = r[i * n_out + o] / s;
      t += v[i * n_out + o];
    }
    // renormalize against roundoff so the slice passes the channel check
    for (std::size_t o = 0; o < n_out; ++o) v[i * n_out + o] /= t;
  }
  return Channel(std::move(in_axes), std::move(out_axes), std::move(v), std::move(zero));
}

double variational_distance(const JointTable& p, const JointTable& q) {
  if (p.axes() != q.axes()) throw std::invalid_argument("variational_distance: axis mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
  return d;
}

double binary_entropy(double theta) {
  if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("binary_entropy: argument outside [0,1]");
  double h = 0.0;
  if (theta > 0.0) h -= theta * std::log2(theta);
  if (theta < 1.0) h -= (1.0 - theta) * std::log2(1.0 - theta);
  return h;
}

}  // namespace wzexp
