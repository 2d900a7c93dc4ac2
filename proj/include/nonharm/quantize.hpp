#pragma once

#include <vector>

#include "nonharm/transform.hpp"

namespace nonharm {

/// Symbol table a(x_i, xi) with claimed order metadata. Entries where
/// extraction divided by a vanishing eigenfunction are masked; a symbol with
/// no masked entries is "total".
struct Symbol {
  Mat a;  // N_x rows, one column per xi
  double order = 0.0;
  double rho = 1.0;
  double delta = 0.0;
  BoolGrid masked;  // empty means total

  bool total() const { return masked.size() == 0 || !masked.any(); }
  double masked_fraction() const {
    if (masked.size() == 0) return 0.0;
    return static_cast<double>(masked.count()) / static_cast<double>(masked.size());
  }
  bool is_masked(Eigen::Index i, Eigen::Index c) const {
    return masked.size() != 0 && masked(i, c);
  }
  void ensure_mask() {
    if (masked.size() == 0) masked = BoolGrid::Constant(a.rows(), a.cols(), false);
  }
};

/// Schwartz kernel samples K(x_i, y_j).
struct Kernel {
  Mat K;
};

/// Dense operator acting by quadrature: (Af)(x_i) = sum_j w_j A[i,j] f(y_j).
struct OperatorMatrix {
  Mat A;
  GridFunction apply(const SpectralModel& model, const GridFunction& f) const;
  Mat apply_cols(const SpectralModel& model, const Mat& fs) const;  // batched
};

/// Pointwise symbol algebra; masks propagate by union.
Symbol symbol_sum(const Symbol& a, const Symbol& b, cplx ca = 1.0, cplx cb = 1.0);
Symbol symbol_product(const Symbol& a, const Symbol& b);
Symbol symbol_scale(const Symbol& a, cplx c);

/// Constructors for common symbols.
Symbol symbol_constant(const SpectralModel& model, cplx value, double order = 0.0);
Symbol symbol_multiplier(const SpectralModel& model, const Vec& sigma, double order = 0.0);
Symbol symbol_lambda(const SpectralModel& model);  // a(x,xi) = lambda_xi
Symbol symbol_xfunction(const SpectralModel& model, const GridFunction& g);
Symbol symbol_weight_power(const SpectralModel& model, double mu);  // <xi>^mu

OperatorMatrix op_from_symbol(const SpectralModel& model, const Symbol& a);
Kernel kernel_of_symbol(const SpectralModel& model, const Symbol& a);

/// Extraction with the zero-set policy: entries with |u_xi(x)| below
/// eps * ||u_xi||_inf are masked, never divided.
Symbol symbol_of_operator(const SpectralModel& model, const OperatorMatrix& A, double eps);
/// Conjugate-calculus extraction against the v family.
Symbol star_symbol_of_operator(const SpectralModel& model, const OperatorMatrix& A, double eps);
/// Kernel synthesis of a star symbol: sum_xi v_xi(x) b(x,xi) conj(u_xi(y)).
Kernel star_kernel_of_symbol(const SpectralModel& model, const Symbol& b);

/// Amplitude a(x, y, xi), one x-by-y slice per xi.
struct Amplitude {
  std::vector<Mat> slices;
  double order = 0.0;
  double rho = 1.0;
  double delta = 0.0;
};
OperatorMatrix op_from_amplitude(const SpectralModel& model, const Amplitude& amp);

OperatorMatrix multiplier_op(const SpectralModel& model, const Vec& sigma, Flavor flavor);

/// Adjoint with respect to the weighted L2 inner product; for quadrature
/// operators this is the entrywise conjugate transpose.
OperatorMatrix adjoint_op(const OperatorMatrix& A);

/// Dense composition (A then B applied first): (A o B).A = A.A diag(w) B.A.
OperatorMatrix compose_ops(const SpectralModel& model, const OperatorMatrix& A,
                           const OperatorMatrix& B);

/// Largest singular value with respect to the weighted inner product
/// (block power iteration on the symmetrized matrix).
double weighted_operator_norm(const SpectralModel& model, const OperatorMatrix& A,
                              double tol = 1e-10, int max_iter = 600);

/// Same iteration driven by chained quadrature applications, for composites
/// like (P - B A) restricted by a projector, without assembling the product.
double weighted_operator_norm(const SpectralModel& model,
                              const std::vector<const OperatorMatrix*>& chain,
                              double tol = 1e-10, int max_iter = 600);

/// Band projector P as a dense operator, and the spectral restriction to
/// modes with |xi| >= n0.
OperatorMatrix band_projector(const SpectralModel& model);
OperatorMatrix mode_restriction(const SpectralModel& model, long n0);

struct AdmissibilityReport {
  double masked_fraction = 0.0;
  double resynthesis_error = 0.0;  // max-norm relative error of Op(sigma_A) vs A
  bool admissible = false;
};
AdmissibilityReport admissibility_diagnostic(const SpectralModel& model, const OperatorMatrix& A,
                                             double eps, double masked_threshold);

} // namespace nonharm
