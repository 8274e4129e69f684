#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "wzexp/exponent.hpp"

namespace wzexp {

namespace {

void require_uxyz(const JointTable& p, const char* who) {
  const auto names = p.axis_names();
  if (names != AxisNames{"U", "X", "Y", "Z"})
    throw std::invalid_argument(std::string(who) + ": table must have axes U, X, Y, Z");
}

JointTable slice(const JointTable& p, std::size_t u, std::size_t cells) {
  const auto& ax = p.axes();
  std::vector<double> v(p.values().begin() + u * cells, p.values().begin() + (u + 1) * cells);
  double s = 0.0;
  for (double x : v) s += x;
  for (double& x : v) x /= s;
  return JointTable({ax[1], ax[2], ax[3]}, std::move(v));
}

}  // namespace

JointTable embed_auxiliary(const JointTable& p, std::size_t u_size) {
  require_uxyz(p, "embed_auxiliary");
  const auto& ax = p.axes();
  if (u_size < ax[0].size()) throw std::invalid_argument("embed_auxiliary: target smaller than |U|");
  std::vector<double> v(p.values().begin(), p.values().end());
  v.resize(u_size * ax[1].size() * ax[2].size() * ax[3].size(), 0.0);
  return JointTable(uxyz_axes(u_size, ax[1].size(), ax[2].size(), ax[3].size()), std::move(v));
}

JointTable reduce_auxiliary(const JointTable& p, std::size_t u_size) {
  require_uxyz(p, "reduce_auxiliary");
  if (u_size == 0) throw std::invalid_argument("reduce_auxiliary: u_size must be >= 1");
  const auto& ax = p.axes();
  const std::size_t nu = ax[0].size(), cells = ax[1].size() * ax[2].size() * ax[3].size();

  std::vector<double> w(nu, 0.0);
  std::vector<JointTable> slices;
  std::vector<double> g1(nu, 0.0), g2(nu, 0.0);
  for (std::size_t u = 0; u < nu; ++u) {
    for (std::size_t c = 0; c < cells; ++c) w[u] += p.values()[u * cells + c];
    slices.push_back(JointTable::scalar());
    if (w[u] <= 0.0) continue;
    slices[u] = slice(p, u, cells);
    const auto g = mixture_functionals(slices[u]);
    g1[u] = g.g1;
    g2[u] = g.g2;
  }

  // rows: the XYZ marginal cells, then the g2 average
  const auto rows = static_cast<Eigen::Index>(cells + 1);
  while (true) {
    std::vector<std::size_t> support;
    for (std::size_t u = 0; u < nu; ++u)
      if (w[u] > 0.0) support.push_back(u);
    if (support.size() <= u_size) break;
    Eigen::MatrixXd a(rows, static_cast<Eigen::Index>(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j) {
      const auto& s = slices[support[j]];
      for (std::size_t c = 0; c < cells; ++c) a(static_cast<Eigen::Index>(c), j) = s.values()[c];
      a(rows - 1, j) = g2[support[j]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-12);
    const Eigen::MatrixXd ker = lu.kernel();
    if (ker.cols() == 0 || ker.norm() == 0.0)
      throw std::invalid_argument("reduce_auxiliary: support cannot be reduced to the requested size");
    Eigen::VectorXd v = ker.col(0);
    double slope = 0.0;
    for (std::size_t j = 0; j < support.size(); ++j) slope += v(j) * g1[support[j]];
    if (slope > 0.0) v = -v;
    // largest step keeping every weight non-negative
    double step = std::numeric_limits<double>::infinity();
    std::size_t hit = support.size();
    for (std::size_t j = 0; j < support.size(); ++j)
      if (v(j) < 0.0 && w[support[j]] / -v(j) < step) {
        step = w[support[j]] / -v(j);
        hit = j;
      }
    // kernel entries sum to zero, so some entry is negative
    if (hit == support.size()) throw std::logic_error("reduce_auxiliary: degenerate kernel direction");
    for (std::size_t j = 0; j < support.size(); ++j) w[support[j]] = std::max(0.0, w[support[j]] + step * v(j));
    w[support[hit]] = 0.0;
  }

  double total = 0.0;
  for (double x : w) total += x;
  std::vector<double> out(u_size * cells, 0.0);
  std::size_t k = 0;
  for (std::size_t u = 0; u < nu; ++u) {
    if (w[u] <= 0.0) continue;
    for (std::size_t c = 0; c < cells; ++c) out[k * cells + c] = w[u] / total * slices[u].values()[c];
    ++k;
  }
  return JointTable(uxyz_axes(u_size, ax[1].size(), ax[2].size(), ax[3].size()), std::move(out));
}

}  // namespace wzexp
