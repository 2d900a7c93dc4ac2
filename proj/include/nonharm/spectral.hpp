#pragma once

#include <cstdint>
#include <vector>

#include "nonharm/common.hpp"
#include "nonharm/grid.hpp"

namespace nonharm {

enum class ModelId { HModel, Dirichlet, Periodic };

/// Truncated frequency set. Two-sided sets hold -xi_max..xi_max in ascending
/// order; the Dirichlet set is one-sided, 1..xi_max.
struct IndexSet {
  std::vector<long> idx;
  long xi_max = 0;
  bool two_sided = true;

  Eigen::Index size() const { return static_cast<Eigen::Index>(idx.size()); }
  /// Position of xi in storage order, or -1 when outside the set.
  Eigen::Index position(long xi) const {
    const long lo = two_sided ? -xi_max : 1;
    if (xi < lo || xi > xi_max) return -1;
    return static_cast<Eigen::Index>(xi - lo);
  }
};

struct WeightTable {
  RVec values;  // aligned with IndexSet storage order
};

/// A model operator on (0,1): eigenvalues, biorthogonal eigenfunction samples
/// and the analytic action of L (resp. L*) on them. Immutable after build.
struct SpectralModel {
  ModelId id = ModelId::Periodic;
  double h = 1.0;        // h-model parameter
  double order_m = 1.0;  // differential order entering the weight exponent
  double s0 = 2.0;
  Grid grid;
  IndexSet xis;
  Vec lambda;   // per storage position
  Mat U, V;     // eigenfunction samples, one column per xi
  Mat LU, LV;   // analytic (L u_xi) and (L* v_xi) samples
  RVec weight;  // <xi> = (1+|lambda|^2)^{1/(2m)}
  double mu0_estimate = 0.0;
  double mu0_constant = 1.0;
  double v_norm_dev = 0.0;  // |  ||v_xi|| - 1 | after biorthogonal rescale

  Eigen::Index nx() const { return grid.size(); }
  Eigen::Index nxi() const { return xis.size(); }
  bool self_adjoint() const { return id == ModelId::Dirichlet || id == ModelId::Periodic || h == 1.0; }

  cplx inner(const Vec& f, const Vec& g) const;  // quadrature (f, g)_{L2}
  double norm(const Vec& f) const;
  double lp_grid_norm(const Vec& f, double p) const;  // quadrature L^p, grid max at p=inf

  /// Biorthogonality matrix G[xi, eta] = (u_xi, v_eta).
  Mat gram() const;

  /// Differential action on arbitrary grid samples via the collocation
  /// derivative matrix (first order: -i d/dx, Dirichlet: -d^2/dx^2).
  Vec apply_L_numeric(const Vec& f) const;
  Vec apply_L_star_numeric(const Vec& f) const;
  /// (L*_y)^k applied to the second argument of a kernel table.
  Mat apply_L_star_y(const Mat& kernel, int k) const;
};

SpectralModel build_h_model(double h, long xi_max, Grid grid, double m = 1.0, double s0 = 2.0);
SpectralModel build_dirichlet_model(long xi_max, Grid grid, double m = 2.0, double s0 = 2.0);
SpectralModel build_periodic_model(long xi_max, Grid grid, double m = 1.0, double s0 = 2.0);

WeightTable weight_table(const SpectralModel& model);

struct Mu0Estimate {
  double mu0 = 0.0;   // fitted growth exponent of ||u_xi||_inf, floored at 0
  double C = 1.0;     // sup ||u_xi||_inf / <xi>^mu0
  double slope = 0.0; // raw fitted slope before flooring
  double r2 = 0.0;
};
Mu0Estimate estimate_mu0(const SpectralModel& model);

struct S0Report {
  std::vector<double> partial_sums;  // over |xi| <= k
  double tail_slope = 0.0;           // log increment vs log k
  bool summable = false;
};
S0Report check_s0(const SpectralModel& model, double s0);

struct RieszBounds {
  double m_lo = 0.0;
  double M_hi = 0.0;
  int probes = 0;
};
RieszBounds verify_riesz_bounds(const SpectralModel& model, int probe_count, std::uint64_t seed);

/// Build-time invariants evaluated on the finished model.
struct ModelChecks {
  double gram_dev = 0.0;       // max |G - I|
  double max_eig_resid = 0.0;  // max ||L u - lambda u|| / (1+|lambda|)
  double max_adj_resid = 0.0;  // same for the conjugate problem
  double max_u_norm_dev = 0.0;
  double v_norm_dev = 0.0;
  bool pass(double tol_biorth, double tol_eig) const {
    return gram_dev < tol_biorth && max_eig_resid < tol_eig && max_adj_resid < tol_eig;
  }
};
ModelChecks run_model_checks(const SpectralModel& model);

} // namespace nonharm
