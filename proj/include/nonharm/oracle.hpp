#pragma once

#include <functional>
#include <vector>

#include "nonharm/common.hpp"

namespace nonharm {

struct SpectralModel;

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  Eigen::Index points = 0;
};

/// Fraction of samples dropped from each end, ranked by x. The default keeps
/// the middle half: truncation-edge and preasymptotic samples are excluded.
struct FitBand {
  double drop_low = 0.25;
  double drop_high = 0.25;
};

/// Least squares on (log x, log y). Pairs with nonpositive x or y (and y
/// below `floor`) are skipped.
FitResult loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys,
                     FitBand band = {}, double floor = 0.0);

/// Smallest eigenvalues of the 3-point Dirichlet Laplacian on (0,1) with
/// n_fd subintervals, by Sturm bisection, Richardson-extrapolated from n_fd
/// and 2*n_fd.
std::vector<double> fd_eigensolve_dirichlet(int n_fd, int count);

/// Reference kernel table assembled entry by entry with compensated sums; a
/// code path independent of the quantize module.
Mat dense_assemble(const SpectralModel& model,
                   const std::function<cplx(double x, double y, long xi)>& rule);

struct QuadConvReport {
  std::vector<Eigen::Index> sizes;
  std::vector<double> errors;
  bool nonincreasing = false;
};
/// Evaluates a quadrature-sensitive error metric over a list of node counts.
QuadConvReport quadrature_convergence(const std::function<double(Eigen::Index)>& metric,
                                      std::vector<Eigen::Index> sizes);

} // namespace nonharm
