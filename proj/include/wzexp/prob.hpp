#pragma once

// Finite-alphabet probability tables and the information measures built on
// them. Every quantity is in bits. Tables are dense and row-major: the first
// axis varies slowest.

#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wzexp {

inline constexpr double kNormTol = 1e-12;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

class Alphabet {
 public:
  explicit Alphabet(std::size_t size);
  Alphabet(std::size_t size, std::vector<std::string> labels);

  std::size_t size() const noexcept { return size_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.size_ == b.size_;
  }

 private:
  std::size_t size_;
  std::vector<std::string> labels_;
};

struct Axis {
  std::string name;
  Alphabet alphabet;

  Axis(std::string n, std::size_t size) : name(std::move(n)), alphabet(size) {}
  Axis(std::string n, Alphabet a) : name(std::move(n)), alphabet(std::move(a)) {}

  std::size_t size() const noexcept { return alphabet.size(); }
  friend bool operator==(const Axis& a, const Axis& b) {
    return a.name == b.name && a.alphabet == b.alphabet;
  }
};

using AxisNames = std::vector<std::string>;

class JointTable {
 public:
  JointTable(std::vector<Axis> axes, std::vector<double> values);

  /// Zero-axis table holding a single value.
  static JointTable scalar(double value = 1.0);
  static JointTable uniform(std::vector<Axis> axes);
  static JointTable point_mass(std::vector<Axis> axes,
                               std::span<const std::size_t> index);

  const std::vector<Axis>& axes() const noexcept { return axes_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t rank() const noexcept { return axes_.size(); }
  std::size_t size() const noexcept { return values_.size(); }
  std::vector<std::size_t> shape() const;
  AxisNames axis_names() const;

  bool has_axis(std::string_view name) const noexcept;
  /// Throws std::invalid_argument for unknown names.
  std::size_t axis_index(std::string_view name) const;

  std::size_t flat_index(std::span<const std::size_t> index) const;
  std::vector<std::size_t> multi_index(std::size_t flat) const;

  double at(std::span<const std::size_t> index) const {
    return values_[flat_index(index)];
  }
  double operator()(std::initializer_list<std::size_t> index) const {
    return at(std::span<const std::size_t>(index.begin(), index.size()));
  }
  double operator[](std::size_t flat) const { return values_[flat]; }

  double sum() const noexcept;
  bool is_normalized(double tol = kNormTol) const noexcept;
  JointTable normalized() const;

  /// Same values under a permuted axis order.
  JointTable reorder(const AxisNames& order) const;

 private:
  std::vector<Axis> axes_;
  std::vector<double> values_;
  std::vector<std::size_t> strides_;
};

/// Conditional distribution P(outputs | inputs). Values are stored with the
/// input index slowest and the output index fastest.
class Channel {
 public:
  Channel(std::vector<Axis> inputs, std::vector<Axis> outputs,
          std::vector<double> values, std::vector<bool> zero_mass = {});

  const std::vector<Axis>& inputs() const noexcept { return inputs_; }
  const std::vector<Axis>& outputs() const noexcept { return outputs_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t input_size() const noexcept { return input_size_; }
  std::size_t output_size() const noexcept { return output_size_; }

  double operator()(std::size_t input_flat, std::size_t output_flat) const {
    return values_[input_flat * output_size_ + output_flat];
  }
  /// True when the slice was filled uniformly because its conditioning mass was 0.
  bool zero_mass(std::size_t input_flat) const { return zero_mass_[input_flat]; }
  const std::vector<bool>& zero_mass_flags() const noexcept { return zero_mass_; }

  /// Channel ignoring its input: every slice equals `dist`.
  static Channel constant(std::vector<Axis> inputs, const JointTable& dist);
  static Channel identity(const Axis& input, std::string output_name);

 private:
  std::vector<Axis> inputs_;
  std::vector<Axis> outputs_;
  std::vector<double> values_;
  std::vector<bool> zero_mass_;
  std::size_t input_size_ = 1;
  std::size_t output_size_ = 1;
};

/// Shannon entropy in bits; throws for unnormalized input.
double entropy(const JointTable& p);

/// D(p || q) in bits, +inf when p puts mass where q has none.
double kl_divergence(const JointTable& p, const JointTable& q);

/// I(A ; B | C) in bits. `c` may be empty.
double cond_mutual_information(const JointTable& p, const AxisNames& a,
                               const AxisNames& b, const AxisNames& c = {});

/// H(A | C) in bits. `c` may be empty.
double cond_entropy(const JointTable& p, const AxisNames& a,
                    const AxisNames& c = {});

JointTable marginalize(const JointTable& p, const AxisNames& keep);

/// p(a) * ch(out | in(a)) over the union of p's axes and the channel outputs.
JointTable compose(const JointTable& p, const Channel& ch);

/// P(rest | given). Zero-mass slices are filled uniformly and flagged.
Channel condition(const JointTable& p, const AxisNames& given);

/// Variational distance sum |p - q| (no factor 1/2).
double variational_distance(const JointTable& p, const JointTable& q);

/// Binary entropy in bits.
double binary_entropy(double theta);

}  // namespace wzexp
