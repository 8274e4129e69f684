#pragma once

// Joint types, type classes and conditional type classes over small
// alphabets: exact sizes, exponential bounds, enumeration and exact uniform
// sampling.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "wzexp/prob.hpp"

namespace wzexp {

using Sequence = std::vector<std::size_t>;
using BigInt = boost::multiprecision::cpp_int;

struct JointType {
  std::vector<Axis> axes;
  std::size_t n = 0;
  /// One count per cell of the product alphabet, row-major.
  std::vector<std::size_t> counts;

  static JointType make(std::vector<Axis> axes, std::size_t n, std::vector<std::size_t> counts);

  JointTable distribution() const;
  JointType marginal(const AxisNames& keep) const;
  std::size_t cells() const { return counts.size(); }

  friend bool operator==(const JointType& a, const JointType& b) {
    return a.axes == b.axes && a.n == b.n && a.counts == b.counts;
  }
};

/// Empirical joint type of equal-length sequences, one per axis.
JointType joint_type_of(const std::vector<Axis>& axes, const std::vector<Sequence>& seqs);

/// Largest-remainder rounding of n * p; ties go to the earlier cell.
JointType nearest_type(const JointTable& p, std::size_t n);

/// The sequences over the remaining axes whose joint type with the given
/// conditioning sequences is `type`. An empty `given` list means the plain
/// type class. Members are written as sequences of flat indices over the
/// remaining axes (row-major in the type's axis order).
class CondClassHandle {
 public:
  CondClassHandle(JointType type, AxisNames given, std::vector<Sequence> given_seqs);

  const JointType& type() const noexcept { return type_; }
  const AxisNames& given() const noexcept { return given_; }
  const std::vector<Axis>& output_axes() const noexcept { return out_axes_; }
  std::size_t output_alphabet() const noexcept { return out_size_; }
  std::size_t given_alphabet() const noexcept { return given_size_; }
  std::size_t n() const noexcept { return type_.n; }
  /// False when the conditioning sequences do not have the type's marginal.
  bool consistent() const noexcept { return consistent_; }

  /// Positions carrying conditioning symbol v (flat over the given axes).
  const std::vector<std::vector<std::size_t>>& positions() const noexcept { return positions_; }
  /// Required output counts for conditioning symbol v, flat index v * |W| + w.
  const std::vector<std::size_t>& required() const noexcept { return required_; }

  /// Splits a member into one sequence per output axis.
  std::vector<Sequence> split(const Sequence& member) const;

 private:
  JointType type_;
  AxisNames given_;
  std::vector<Axis> out_axes_;
  std::size_t out_size_ = 1, given_size_ = 1;
  bool consistent_ = true;
  std::vector<std::vector<std::size_t>> positions_;
  std::vector<std::size_t> required_;
};

struct ClassSize {
  BigInt exact;
  double log2_exact = 0.0;  ///< -inf for an empty class
  /// log2 of (n+1)^(-|V||W|) 2^(n H(W|V)) and of 2^(n H(W|V)).
  double log2_lower = 0.0;
  double log2_upper = 0.0;
  /// H(W|V) under the type.
  double cond_entropy = 0.0;
};

ClassSize class_size(const CondClassHandle& h);

inline constexpr std::uint64_t kEnumerationCap = 10'000'000;

/// Calls `fn` on every member in a fixed order. Throws when the class has
/// more than kEnumerationCap members.
void for_each_member(const CondClassHandle& h, const std::function<void(const Sequence&)>& fn);

/// Exactly uniform member: a uniformly shuffled copy of each conditioning
/// symbol's required outputs placed on its positions.
Sequence sample_uniform_cond(const CondClassHandle& h, std::uint64_t seed);

struct TypeClassProb {
  double prob = 0.0;
  double log2_prob = 0.0;
  /// (n+1)^(-cells) 2^(-n D(t || P)).
  double log2_lower = 0.0;
};

/// P^n(T_t) by the multinomial formula.
TypeClassProb type_class_prob(const JointTable& p, const JointType& t);

}  // namespace wzexp
