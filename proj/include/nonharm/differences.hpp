#pragma once

#include "nonharm/quantize.hpp"

namespace nonharm {

enum class FamilyKind { ExpDiff, PolyDiff };

/// Admissible two-point function family (single member in one dimension):
/// vanishes exactly on the diagonal with nondegenerate normal derivative.
struct DifferenceFamily {
  FamilyKind kind = FamilyKind::ExpDiff;
  Mat q;  // q(x_i, y_j) on the grid

  cplx eval(double x, double y) const;      // off-grid evaluation
  cplx dy_on_diagonal(double x) const;      // analytic d/dy q(x,y)|_{y=x}
};

DifferenceFamily make_family(FamilyKind kind, const Grid& grid);

/// Difference operator of order alpha: multiply the kernel by q^alpha and
/// re-extract under the zero-set policy.
Symbol delta_q(const SpectralModel& model, const Symbol& a, int alpha,
               const DifferenceFamily& fam, double eps);

/// Conjugate-calculus difference (family conj(q), v-side kernels).
Symbol delta_q_star(const SpectralModel& model, const Symbol& b, int alpha,
                    const DifferenceFamily& fam, double eps);

/// Triangular recurrence tables mapping plain derivatives to the dual
/// derivative operators at any expansion point (coefficients are
/// position-independent for both built-in families).
struct TaylorTable {
  FamilyKind kind = FamilyKind::ExpDiff;
  int order = 0;
  Mat T;  // T(b,a) = (1/a!) d^b/dx^b q^a(e,x)|_{x=e}, 1-based orders at index 0..order-1
  Mat S;  // inverse of T
};
TaylorTable taylor_coeff_operators(const DifferenceFamily& fam, int beta_max);

/// Pointwise dual derivative of grid samples: D^(alpha) g = sum_b S(a,b) g^(b).
Vec taylor_derivative(const TaylorTable& table, const Grid& grid, const Vec& g, int alpha);
/// Columnwise version on symbol tables (acts in x for each frequency).
Symbol taylor_derivative(const TaylorTable& table, const SpectralModel& model, const Symbol& a,
                         int alpha);
/// Same combination applied through the kernel: the symbol of the operator
/// whose kernel is D^(alpha)_x K_A.
Symbol D_alpha_symbol(const SpectralModel& model, const Symbol& a, int alpha,
                      const TaylorTable& table, double eps);

struct TaylorRemainderReport {
  double slope = 0.0;       // fitted remainder order in |q(e,.)|
  double r2 = 0.0;
  double max_resid = 0.0;   // largest remainder in the neighborhood
  int points = 0;
  bool exact = false;       // remainder at rounding level everywhere
};
/// Expands g around grid point e with N terms and fits the remainder decay
/// against |q(e,.)|^N over |x-e| <= 0.1 (two grid cells around e excluded).
TaylorRemainderReport taylor_remainder_check(const DifferenceFamily& fam, const TaylorTable& table,
                                             const Grid& grid, const Vec& g, Eigen::Index e_pos,
                                             int n_terms);

/// Domain-preservation proxy: relative energy of q * K outside the truncated
/// band, for a decaying band-limited reference kernel.
double projection_leakage(const SpectralModel& model, const DifferenceFamily& fam);

} // namespace nonharm
