#pragma once

#include "nonharm/calculus.hpp"

namespace nonharm {

struct EllipticityReport {
  double mu = 0.0;
  double C0 = 0.0;                // min margin over the passing range
  long N0 = 0;                    // smallest |xi| threshold that passes
  std::vector<double> margins;    // per storage position: min_x |sigma| / <xi>^mu
  bool pass = false;
};
/// Lower-bound test |sigma(x,xi)| >= C0 <xi>^mu for |xi| >= N0.
EllipticityReport check_elliptic(const SpectralModel& model, const Symbol& sigma, double mu);

struct ParametrixResult {
  std::vector<Symbol> b_terms;           // B_0..B_N
  Symbol sigma_b;                        // their sum
  EllipticityReport ellipticity;
  std::vector<double> residual_full;     // || (P - B A) || on the truncated span, per N
  std::vector<double> residual_active;   // domain restricted to |xi| >= N0
  std::vector<double> residual_band;     // domain restricted to the reliable band;
                                         // the expansion is asymptotic, so monotone
                                         // decrease is asserted here
  std::vector<double> b_order_fit;       // fitted order of each B_k
};
/// Corrected-reciprocal recursion for an approximate inverse of
/// A = sum_j Op(a_parts[j]); a_parts[j] must have order mu - (rho-delta) j.
ParametrixResult parametrix(const SpectralModel& model, const std::vector<Symbol>& a_parts,
                            double mu, int n_corrections, const DifferenceFamily& fam,
                            const TaylorTable& table, double eps, double norm_tol = 1e-10);

struct BandProbeDecay {
  std::vector<double> centers;   // band-center weights <xi_c>
  std::vector<double> ratios;    // max ||(P - BA) f|| / ||f|| over probes
  double fitted_exponent = 0.0;  // decay rate of the ratio in <xi_c>
};
/// Residual action on probes with spectrum concentrated near each center.
BandProbeDecay band_probe_residual(const SpectralModel& model, const OperatorMatrix& residual,
                                   const std::vector<long>& centers, long half_width, int probes,
                                   std::uint64_t seed);

struct L2BoundednessReport {
  double derivative_bound = 0.0;  // max sup-norm of d^b a / dx^b, b <= k
  double operator_norm = 0.0;
  double kappa = 0.0;             // operator_norm / derivative_bound
  bool finite = false;
};
L2BoundednessReport l2_boundedness_check(const SpectralModel& model, const Symbol& a, int k_derivs);

struct SobolevBoundednessReport {
  double ratio = 0.0;          // sup over probes of ||Op(a) f||_{s-mu} / ||f||_s
  double ratio_doubled = 0.0;
  bool stable = false;
};
SobolevBoundednessReport sobolev_boundedness_check(const SpectralModel& model, const Symbol& a,
                                                   double mu, double s, int probes,
                                                   std::uint64_t seed);

struct AprioriReport {
  double C_fit = 0.0;          // max over probes of lhs / rhs
  double C_mean = 0.0;
  int probes = 0;
};
/// ||u||_{s+mu} <= C ( ||A u||_s + ||u||_{-N} ) over random band-limited u.
AprioriReport apriori_estimate_check(const SpectralModel& model, const Symbol& sigma_a, double mu,
                                     double s, double n_neg, int probes, std::uint64_t seed);

struct KernelDecayEntry {
  int alpha = 0;
  double sup = 0.0;
  bool above_threshold = false;
};
struct KernelDecayReport {
  double threshold = 0.0;             // (mu + m k + 2 mu0 + s0) / rho
  std::vector<KernelDecayEntry> sups; // sup |(L*_y)^k (q^alpha K)| per alpha
  double profile_exponent = 0.0;      // s in |K_k| ~ |x-y|^{-s} (fitted)
  double profile_r2 = 0.0;
  int profile_n = 0;                  // integer bound N just above threshold
  bool profile_pass = false;          // s <= N + 0.5: the |x-y|^{-N} bound holds
};
KernelDecayReport kernel_decay_report(const SpectralModel& model, const Symbol& a,
                                      const DifferenceFamily& fam, int k_power,
                                      const std::vector<int>& alpha_list);

struct SingularSupportReport {
  std::vector<double> centers;
  std::vector<double> indicator_in;   // windowed high-frequency tail of input
  std::vector<double> indicator_out;  // same for the operator image
  double peak_in = 0.0, peak_out = 0.0;  // locations of the maxima
  double max_in = 0.0, max_out = 0.0;
};
SingularSupportReport singular_support_demo(const SpectralModel& model, const OperatorMatrix& op,
                                            const GridFunction& w);

/// sup ||f||_C / ||f||_{H^{kappa k}} over probes; reuses the ratio report.
SobolevBoundednessReport sobolev_embedding_check(const SpectralModel& model, int k, double kappa,
                                                 int probes, std::uint64_t seed);

} // namespace nonharm
