#pragma once

#include <memory>

#include "nonharm/common.hpp"

namespace nonharm {

enum class QuadKind { GaussLegendre, Uniform };

/// Quadrature grid on (0,1): strictly interior increasing nodes and positive
/// weights that integrate the constant 1 exactly (sum 1 within 1e-12).
struct Grid {
  QuadKind kind = QuadKind::GaussLegendre;
  RVec x;
  RVec w;
  std::shared_ptr<const RMat> diff;  // first-derivative collocation matrix

  Eigen::Index size() const { return x.size(); }
  void validate() const;  // throws std::runtime_error on a violated invariant
};

/// Gauss-Legendre nodes mapped to (0,1), or the midpoint (uniform) rule used
/// for periodic data. Uniform grids require an even node count so the
/// trigonometric derivative matrix is well defined.
Grid make_grid(QuadKind kind, Eigen::Index n);

/// Spectral differentiation: barycentric on Gauss nodes, trigonometric
/// (period 1) on the uniform grid.
RMat make_diff_matrix(QuadKind kind, const RVec& x);

} // namespace nonharm
