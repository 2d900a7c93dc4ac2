#include "nonharm/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace nonharm {

namespace {

// Legendre P_n and derivative at t by the three-term recurrence.
std::pair<double, double> legendre(int n, double t) {
  double p0 = 1.0, p1 = t;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (t * p1 - p0) / (t * t - 1.0);
  return {p1, dp};
}

void gauss_legendre(Eigen::Index n, RVec& t, RVec& w_std) {
  t.resize(n);
  w_std.resize(n);
  const int ni = static_cast<int>(n);
  for (int i = 0; i < ni; ++i) {
    // Tricomi-type initial guess, then Newton.
    double z = std::cos(kPi * (i + 0.75) / (ni + 0.5));
    double p, dp;
    for (int it = 0; it < 100; ++it) {
      std::tie(p, dp) = legendre(ni, z);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    std::tie(p, dp) = legendre(ni, z);
    t[n - 1 - i] = z;  // cos ordering is decreasing; store ascending
    w_std[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

RMat barycentric_diff(const RVec& x, const RVec& b) {
  const Eigen::Index n = x.size();
  RMat d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double rowsum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double v = (b[j] / b[i]) / (x[i] - x[j]);
      d(i, j) = v;
      rowsum += v;
    }
    d(i, i) = -rowsum;
  }
  return d;
}

} // namespace

RMat make_diff_matrix(QuadKind kind, const RVec& x) {
  const Eigen::Index n = x.size();
  if (kind == QuadKind::Uniform) {
    // Derivative of the degree-n trigonometric interpolant, period 1, even n.
    RMat d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) {
          d(i, j) = 0.0;
          continue;
        }
        const Eigen::Index k = i - j;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        d(i, j) = sign * kPi / std::tan(kPi * static_cast<double>(k) / n);
      }
    }
    return d;
  }
  // Gauss nodes: barycentric weights b_i = (-1)^i sqrt((1-t_i^2) w_i) are
  // stable at large n; constant factors cancel in the ratios.
  RVec t(n), w_std(n);
  gauss_legendre(n, t, w_std);
  RVec b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = std::sqrt((1.0 - t[i] * t[i]) * w_std[i]);
    b[i] = (i % 2 == 0) ? v : -v;
  }
  return barycentric_diff(x, b);
}

Grid make_grid(QuadKind kind, Eigen::Index n) {
  if (n < 2) throw std::invalid_argument("grid: need at least 2 nodes");
  Grid g;
  g.kind = kind;
  if (kind == QuadKind::Uniform) {
    if (n % 2 != 0) throw std::invalid_argument("grid: uniform rule needs an even node count");
    g.x.resize(n);
    g.w = RVec::Constant(n, 1.0 / static_cast<double>(n));
    for (Eigen::Index i = 0; i < n; ++i) g.x[i] = (i + 0.5) / static_cast<double>(n);
  } else {
    RVec t, w_std;
    gauss_legendre(n, t, w_std);
    g.x = (t.array() + 1.0) / 2.0;
    g.w = w_std / 2.0;
  }
  g.diff = std::make_shared<const RMat>(make_diff_matrix(kind, g.x));
  g.validate();
  return g;
}

void Grid::validate() const {
  if (x.size() != w.size() || x.size() < 2) throw std::runtime_error("grid: inconsistent sizes");
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && x[i] < 1.0)) throw std::runtime_error("grid: node outside (0,1)");
    if (i > 0 && !(x[i] > x[i - 1])) throw std::runtime_error("grid: nodes not increasing");
    if (!(w[i] > 0.0)) throw std::runtime_error("grid: nonpositive weight");
  }
  if (std::abs(w.sum() - 1.0) > 1e-12) throw std::runtime_error("grid: weights do not sum to 1");
}

} // namespace nonharm
