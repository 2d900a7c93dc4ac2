#include "nonharm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nonharm/spectral.hpp"

namespace nonharm {

FitResult loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys,
                     FitBand band, double floor) {
  if (xs.size() != ys.size()) throw std::invalid_argument("loglog_fit: size mismatch");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] > 0.0 && ys[i] > floor) pts.emplace_back(std::log(xs[i]), std::log(ys[i]));
  }
  std::sort(pts.begin(), pts.end());
  const std::size_t n = pts.size();
  const std::size_t lo = static_cast<std::size_t>(band.drop_low * static_cast<double>(n));
  const std::size_t hi = n - static_cast<std::size_t>(band.drop_high * static_cast<double>(n));
  FitResult fit;
  if (hi <= lo + 1) return fit;  // not enough points; slope 0, r2 0

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double cnt = static_cast<double>(hi - lo);
  for (std::size_t i = lo; i < hi; ++i) {
    sx += pts[i].first;
    sy += pts[i].second;
    sxx += pts[i].first * pts[i].first;
    sxy += pts[i].first * pts[i].second;
    syy += pts[i].second * pts[i].second;
  }
  const double vxx = sxx - sx * sx / cnt;
  const double vxy = sxy - sx * sy / cnt;
  const double vyy = syy - sy * sy / cnt;
  fit.points = static_cast<Eigen::Index>(hi - lo);
  if (vxx <= 0.0) return fit;
  fit.slope = vxy / vxx;
  fit.intercept = (sy - fit.slope * sx) / cnt;
  fit.r2 = (vyy > 0.0) ? (vxy * vxy) / (vxx * vyy) : 1.0;
  return fit;
}

namespace {

// Number of eigenvalues of the symmetric tridiagonal (d, e) below sigma,
// by the standard Sturm pivot count.
int sturm_count(const std::vector<double>& d, double e, double sigma) {
  int count = 0;
  double p = 0.0;
  bool first = true;
  const double tiny = 1e-300;
  for (double di : d) {
    if (first) {
      p = di - sigma;
      first = false;
    } else {
      p = di - sigma - (e * e) / (p == 0.0 ? tiny : p);
    }
    if (p < 0.0) ++count;
  }
  return count;
}

std::vector<double> fd_dirichlet_raw(int n_fd, int count) {
  const int m = n_fd - 1;  // interior points
  if (count > m) throw std::invalid_argument("fd_eigensolve: too many eigenvalues requested");
  const double h = 1.0 / static_cast<double>(n_fd);
  const std::vector<double> d(static_cast<std::size_t>(m), 2.0 / (h * h));
  const double e = -1.0 / (h * h);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 1; k <= count; ++k) {
    double lo = 0.0, hi = 4.0 / (h * h);
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (sturm_count(d, e, mid) >= k)
        hi = mid;
      else
        lo = mid;
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

} // namespace

std::vector<double> fd_eigensolve_dirichlet(int n_fd, int count) {
  if (n_fd < 8) throw std::invalid_argument("fd_eigensolve: n_fd too small");
  const std::vector<double> coarse = fd_dirichlet_raw(n_fd, count);
  const std::vector<double> fine = fd_dirichlet_raw(2 * n_fd, count);
  std::vector<double> out(coarse.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;  // h^2 term cancels
  return out;
}

Mat dense_assemble(const SpectralModel& model,
                   const std::function<cplx(double x, double y, long xi)>& rule) {
  const Eigen::Index n = model.nx();
  Mat out(n, n);
  const auto& xi = model.xis.idx;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
    std::vector<cplx> terms(xi.size());
    for (std::size_t i = b; i < e; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        for (std::size_t c = 0; c < xi.size(); ++c)
          terms[c] = rule(model.grid.x[static_cast<Eigen::Index>(i)], model.grid.x[j], xi[c]);
        out(static_cast<Eigen::Index>(i), j) = kahan_sum(terms.data(), terms.size());
      }
    }
  });
  return out;
}

QuadConvReport quadrature_convergence(const std::function<double(Eigen::Index)>& metric,
                                      std::vector<Eigen::Index> sizes) {
  QuadConvReport rep;
  rep.sizes = std::move(sizes);
  for (Eigen::Index n : rep.sizes) rep.errors.push_back(metric(n));
  rep.nonincreasing = true;
  for (std::size_t i = 1; i < rep.errors.size(); ++i)
    if (rep.errors[i] > rep.errors[i - 1] + 1e-13) rep.nonincreasing = false;
  return rep;
}

} // namespace nonharm
