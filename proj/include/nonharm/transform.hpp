#pragma once

#include <cstdint>

#include "nonharm/spectral.hpp"

namespace nonharm {

/// Which biorthogonal family analyzed the function. Mixing the two flavors
/// is the central non-self-adjoint pitfall, so it is part of the type.
enum class Flavor { Plain, Star };

struct CoefficientVector {
  Vec a;
  Flavor flavor = Flavor::Plain;
};

using GridFunction = Vec;  // samples on the model grid

CoefficientVector forward(const SpectralModel& model, const GridFunction& f);
CoefficientVector forward_star(const SpectralModel& model, const GridFunction& f);
GridFunction inverse(const SpectralModel& model, const CoefficientVector& a);
GridFunction inverse_star(const SpectralModel& model, const CoefficientVector& a);

/// Sequence-space inner product (a, b): sum over xi of a(xi) times the
/// conjugate of the star-transform of the synthesis of b.
cplx inner_l2L(const SpectralModel& model, const CoefficientVector& a,
               const CoefficientVector& b);
/// Conjugate-space counterpart for star-flavored coefficients.
cplx inner_l2L_star(const SpectralModel& model, const CoefficientVector& a,
                    const CoefficientVector& b);

struct ParsevalReport {
  double mismatch = 0.0;        // |(f,g)_{L2} - sum fhat conj(ghat_*)|
  double norm_l2 = 0.0;         // ||f||_{L2}
  double norm_seq = 0.0;        // ||fhat||   (plain sequence norm)
  double norm_seq_star = 0.0;   // ||fhat_*|| (star sequence norm)
  double max_norm_dev = 0.0;    // largest pairwise difference of the three
};
ParsevalReport parseval_check(const SpectralModel& model, const GridFunction& f,
                              const GridFunction& g);

/// Sequence p-norm weighted by eigenfunction sup norms; the analyzing family
/// switches at p = 2 and mirrors between the two flavors.
double lp_norm(const SpectralModel& model, const CoefficientVector& a, double p);

struct HausdorffYoungReport {
  double p = 0.0;
  double constant = 0.0;         // max ratio over the probe set
  double constant_doubled = 0.0; // same with twice the probes
  int probes = 0;
  bool stable = false;
};
HausdorffYoungReport hausdorff_young_check(const SpectralModel& model, double p,
                                           int probe_count, std::uint64_t seed);

/// Weighted Sobolev norm of order s. The defining sum is real and
/// nonnegative up to quadrature noise; a small imaginary residue is dropped,
/// a large one is reported via the returned flag.
double sobolev_norm(const SpectralModel& model, const GridFunction& f, double s,
                    bool* imag_warning = nullptr);

} // namespace nonharm
