#pragma once

// The strong converse exponent F*(R, D) for lossy coding with decoder side
// information, its numerical minimization, the rate-distortion function, and
// closed forms for the lossless and function-computation special cases.
//
// Joint distributions of the auxiliary U, source X, side information Y and
// reproduction Z use the axis names "U", "X", "Y", "Z".

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wzexp/prob.hpp"

namespace wzexp {

/// A problem instance: source P_XY, distortion d(x, y, z), rate R, level D.
struct WZInstance {
  JointTable p_xy = JointTable::scalar();
  std::size_t z_size = 0;
  /// Flattened x-major, y-middle, z-minor.
  std::vector<double> distortion;
  double rate = 0.0;
  double level = 0.0;
  std::string name;

  /// Validates shapes, normalization, non-negativity and feasibility of D.
  static WZInstance make(JointTable p_xy, std::size_t z_size, std::vector<double> distortion,
                         double rate, double level, std::string name = {});

  std::size_t x_size() const { return p_xy.axes()[0].size(); }
  std::size_t y_size() const { return p_xy.axes()[1].size(); }
  double p(std::size_t x, std::size_t y) const { return p_xy[x * y_size() + y]; }
  double d(std::size_t x, std::size_t y, std::size_t z) const {
    return distortion[(x * y_size() + y) * z_size + z];
  }
  /// Reproduction minimizing d(x, y, .) (lowest index on ties).
  std::size_t best_z(std::size_t x, std::size_t y) const;
  /// sum_xy P(x,y) min_z d(x,y,z): the smallest achievable expected distortion.
  double min_distortion() const;
  /// min_z sum_xy P(x,y) d(x,y,z): distortion without any communication when
  /// the decoder also ignores Y.
  double constant_z_distortion(std::size_t* argmin = nullptr) const;

  WZInstance with_rate(double r) const;
  WZInstance with_level(double d) const;
};

/// Uniform independent bits, decoder must output x AND y exactly.
WZInstance and_instance(double rate = 0.0);
/// d = 1[z != x], D = 0.
WZInstance slepian_wolf_instance(const JointTable& p_xy, double rate);
/// d = 1[z != f(x, y)], D = 0. `f` is x-major over X x Y.
WZInstance function_instance(const JointTable& p_xy, const std::vector<std::size_t>& f,
                             std::size_t z_size, double rate, std::string name = {});

/// Source table with axes X, Y from a row-major matrix.
JointTable make_source(const std::vector<std::vector<double>>& rows);

struct ObjectiveTerms {
  double kl_term = 0.0;        ///< D(P_XY~ || P_XY)
  double soft_markov_1 = 0.0;  ///< I(U;Y|X)
  double soft_markov_2 = 0.0;  ///< I(Z;X|U,Y)
  double rate_gap = 0.0;       ///< I(U;X) - I(U;Y) - R
  double total = 0.0;          ///< sum of the above with rate_gap clipped at 0
  /// D(P || P_{Z|UY} P_{U|X} P_XY) + max(rate_gap, 0), computed independently.
  double divergence_form = 0.0;
};

struct ExponentPoint {
  JointTable dist = JointTable::scalar();
  ObjectiveTerms terms;
  double distortion = 0.0;
  double rate = 0.0;

  /// D(P_XY~ || P_XY) + I(U;X|Y) + I(Z;X|U,Y): the value without rate coding.
  double naive_value() const {
    return terms.kl_term + terms.soft_markov_1 + terms.soft_markov_2 + rate_difference();
  }
  /// I(U;X) - I(U;Y).
  double rate_difference() const { return terms.rate_gap + rate; }
};

std::vector<Axis> uxyz_axes(std::size_t u, std::size_t x, std::size_t y, std::size_t z);

ExponentPoint objective_terms(const JointTable& p, const WZInstance& inst);

struct FStarOptions {
  int restarts = 64;
  int max_iters = 5000;
  double tol = 1e-7;
  /// Defaults to |X||Y||Z| + 1.
  std::optional<std::size_t> u_size;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// Extra starting points over U x X x Y x Z; each is also evaluated as is.
  std::vector<JointTable> warm_starts;
};

struct FStarResult {
  ExponentPoint point;
  double value = 0.0;
  std::size_t best_index = 0;
  /// Exact objective, naive value and I(U;X) - I(U;Y) at every final candidate.
  std::vector<double> candidate_values;
  std::vector<double> candidate_naive_values;
  std::vector<double> candidate_rate_differences;
};

/// Multi-start local minimization of F*(R, D). The result is attained by a
/// feasible distribution, so it upper-bounds the true minimum.
FStarResult optimize_fstar(const WZInstance& inst, const FStarOptions& opts = {});

struct RdOptions {
  int restarts = 16;
  int max_iters = 3000;
  double tol = 1e-9;
  std::uint64_t seed = 0;
};

struct RdResult {
  double difference_form = 0.0;   ///< min I(U;X) - I(U;Y)
  double conditional_form = 0.0;  ///< min I(U;X|Y)
  double value = 0.0;             ///< the smaller of the two
  bool forms_agree = false;       ///< |difference - conditional| <= 1e-4
};

/// Rate-distortion function with decoder side information. U ranges over the
/// decoder maps Y -> Z (so |Z|^|Y| <= 4096 is required) and P_{U|X} is
/// optimized under U - X - Y with E[d(X, Y, U(Y))] <= D.
RdResult rd_wyner_ziv(const JointTable& p_xy, std::size_t z_size,
                      const std::vector<double>& distortion, double level,
                      const RdOptions& opts = {});
RdResult rd_wyner_ziv(const WZInstance& inst, const RdOptions& opts = {});

struct SimplexSearchOptions {
  int restarts = 32;
  int max_iters = 3000;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  std::optional<std::size_t> u_size;
};

/// min over P_XY~ of D(P_XY~ || P_XY) + |H(X~|Y~) - R|^+.
double fstar_slepian_wolf(const JointTable& p_xy, double rate,
                          const SimplexSearchOptions& opts = {});

struct FunctionExponent {
  double value = 0.0;
  JointTable dist = JointTable::scalar();  ///< over U x X x Y
};

/// min over P_UXY~ of D(P_UXY~ || P_{U|X} P_XY) + H(f(X,Y)|U,Y) + |I(U;X) - I(U;Y) - R|^+.
FunctionExponent fstar_function_computation(const JointTable& p_xy,
                                            const std::vector<std::size_t>& f,
                                            std::size_t z_size, double rate,
                                            const SimplexSearchOptions& opts = {});

struct AndExample {
  double timesharing = 0.0;  ///< (1-R)(2 - log 3)
  double coded_bound = 0.0;  ///< 2 - h((2+R)/6) - (2+R)/3
  /// Closed form of I(U;Y|X) for the three-letter construction.
  double markov_term = 0.0;
  ExponentPoint construction;
};

/// The AND-function example for independent uniform bits, 0 <= R <= 1.
AndExample and_example(double rate);

struct MixtureFunctionals {
  double g1 = 0.0;  ///< H(Z|Y) - H(Z|X,Y) - H(Y|X)
  double g2 = 0.0;  ///< H(Y) - H(X)
};

/// Functionals whose U-averages carry the U-dependence of the objective.
/// `p` has axes X, Y, Z.
MixtureFunctionals mixture_functionals(const JointTable& p);


/// Pads the U axis of a distribution over U x X x Y x Z with zero-mass letters.
JointTable embed_auxiliary(const JointTable& p, std::size_t u_size);

/// Carathéodory reduction of the U alphabet: keeps the slices P_{XYZ|U=u},
/// the X x Y x Z marginal and the average of g2 fixed, and moves the weights
/// P_U so that the average of g1 never increases, until at most `u_size`
/// letters carry mass. The result has exactly `u_size` letters. Throws when
/// the support cannot be brought down that far.
JointTable reduce_auxiliary(const JointTable& p, std::size_t u_size);

}  // namespace wzexp
