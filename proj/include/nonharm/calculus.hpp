#pragma once

#include "nonharm/differences.hpp"
#include "nonharm/oracle.hpp"

namespace nonharm {

/// Columns in the middle two quartiles of the weight range; fits exclude the
/// truncation edge (top quartile) and the preasymptotic bottom quartile.
std::vector<bool> reliable_band(const SpectralModel& model);

/// Fitted growth order of a symbol: log sup_x |a(x,xi)| against log <xi>
/// over the reliable band.
FitResult symbol_order_fit(const SpectralModel& model, const Symbol& a);

struct SeminormEntry {
  int alpha = 0;
  int beta = 0;
  double slope = 0.0;     // fitted exponent of sup_x |Delta^a D^(b) sym|
  double r2 = 0.0;
  double seminorm = 0.0;  // sup over (x,xi) of |.| / <xi>^{m - rho a + delta b}
  double target = 0.0;    // m - rho |alpha| + delta |beta|
  bool vanishes = false;  // identically zero up to rounding
  bool pass = false;
};

struct SymbolClassReport {
  double m_fit = 0.0;
  double r2 = 0.0;
  double m_claim = 0.0;
  double rho = 1.0, delta = 0.0;
  std::vector<SeminormEntry> entries;
  bool pass = false;
};

/// Measures |Delta_q^alpha D^(beta) a| growth for all orders up to
/// (alpha_max, beta_max) against the claimed class.
SymbolClassReport classify_symbol(const SpectralModel& model, const Symbol& a, double m_claim,
                                  double rho, double delta, int alpha_max, int beta_max,
                                  const DifferenceFamily& fam, const TaylorTable& table,
                                  double eps, double exponent_tol);

struct AsymptoticSumReport {
  Symbol sum;
  std::vector<double> tail_exponent;  // fitted order of sum minus first N terms
  std::vector<double> target;         // orders m_N
  bool ok = false;
};
/// Finite truncated sum of symbols with strictly decreasing orders.
AsymptoticSumReport asymptotic_sum(const SpectralModel& model, const std::vector<Symbol>& parts,
                                   double exponent_tol);

struct ExpansionResult {
  std::vector<Symbol> terms;
  Symbol truncated;  // sum of all terms
  Symbol exact;
  std::vector<double> remainder_exponent;  // per N = 1..terms
  std::vector<double> target_exponent;
  std::vector<double> remainder_sup;       // band sup of |exact - partial_N|
  std::vector<bool> exact_floor;           // remainder at rounding level
  bool pass = false;
};

/// Composition expansion sigma_AB ~ sum (1/a!) (Delta^a sigma_A)(D^(a) sigma_B),
/// checked against the dense product on the truncated span.
ExpansionResult compose_symbols(const SpectralModel& model, const Symbol& sig_a,
                                const Symbol& sig_b, int n_terms, const DifferenceFamily& fam,
                                const TaylorTable& table, double eps, double exponent_tol);

/// Adjoint expansion tau_{A*} ~ sum (1/a!) Delta~^a conj(D^(a) sigma_A),
/// checked against extraction from the dense adjoint.
ExpansionResult adjoint_symbol(const SpectralModel& model, const Symbol& sig_a, int n_terms,
                               const DifferenceFamily& fam, const TaylorTable& table, double eps,
                               double exponent_tol);

/// Amplitude reduction sigma ~ sum (1/a!) Delta^a D_y^(a) amp|_{y=x}, checked
/// against extraction from the assembled amplitude operator.
ExpansionResult amplitude_to_symbol(const SpectralModel& model, const Amplitude& amp, int n_terms,
                                    const DifferenceFamily& fam, const TaylorTable& table,
                                    double eps, double exponent_tol);

} // namespace nonharm
