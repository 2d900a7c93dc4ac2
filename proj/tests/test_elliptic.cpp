#include <doctest.h>

#include <cmath>

#include "nonharm/elliptic.hpp"
#include "nonharm/rng.hpp"
#include "nonharm/transform.hpp"

using namespace nonharm;

namespace {

struct Setup {
  SpectralModel model;
  DifferenceFamily fam;
  TaylorTable table;
};

Setup periodic_setup(Eigen::Index n = 256, long xi = 32) {
  SpectralModel m = build_periodic_model(xi, make_grid(QuadKind::Uniform, n));
  DifferenceFamily fam = make_family(FamilyKind::ExpDiff, m.grid);
  TaylorTable table = taylor_coeff_operators(fam, 6);
  return {std::move(m), std::move(fam), std::move(table)};
}

Symbol sin_symbol(const SpectralModel& m) {
  GridFunction g(m.nx());
  for (Eigen::Index i = 0; i < m.nx(); ++i) g[i] = std::sin(kTwoPi * m.grid.x[i]);
  return symbol_xfunction(m, g);
}

constexpr double kEps = 1e-6;

} // namespace

TEST_CASE("ellipticity margins") {
  const SpectralModel hm = build_h_model(2.0, 16, make_grid(QuadKind::GaussLegendre, 256));
  const EllipticityReport er = check_elliptic(hm, symbol_lambda(hm), 1.0);
  CHECK(er.pass);
  CHECK(er.C0 > 0.5);
  CHECK(er.C0 < 1.1);

  const Setup s = periodic_setup(128, 16);
  CHECK_FALSE(check_elliptic(s.model, sin_symbol(s.model), 0.0).pass);

  const EllipticityReport ew = check_elliptic(s.model, symbol_weight_power(s.model, 1.5), 1.5);
  CHECK(ew.pass);
  CHECK(ew.N0 == 0);
  CHECK(ew.C0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("parametrix of a pure weight multiplier is the exact inverse") {
  const Setup s = periodic_setup(128, 16);
  const ParametrixResult pr =
      parametrix(s.model, {symbol_weight_power(s.model, 1.0)}, 1.0, 2, s.fam, s.table, kEps);
  CHECK(pr.residual_full[0] < 1e-8);
  // all correction terms vanish for an exactly inverted multiplier
  for (int k = 1; k <= 2; ++k)
    CHECK(pr.b_terms[static_cast<std::size_t>(k)].a.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("parametrix of the detuned first-order operator") {
  const Setup s = periodic_setup();
  std::vector<Symbol> parts{symbol_lambda(s.model), sin_symbol(s.model)};
  const ParametrixResult pr = parametrix(s.model, parts, 1.0, 2, s.fam, s.table, kEps);
  REQUIRE(pr.residual_band.size() == 3);
  CHECK(pr.ellipticity.pass);
  CHECK(pr.ellipticity.N0 >= 1);  // the zero mode kills the margin

  // the expansion is asymptotic: residuals decrease on the reliable band,
  // while the cutoff-adjacent modes keep the active-span series stalled
  CHECK(pr.residual_band[1] < pr.residual_band[0]);
  CHECK(pr.residual_band[2] < pr.residual_band[1]);
  CHECK(pr.residual_band[2] < 1e-3);

  // correction orders: -mu - k
  for (std::size_t k = 0; k < pr.b_order_fit.size(); ++k)
    CHECK(std::abs(pr.b_order_fit[k] + 1.0 + static_cast<double>(k)) < 0.3);

  // band-probe decay of the final residual
  Symbol sig_a = symbol_sum(parts[0], parts[1]);
  const OperatorMatrix a_op = op_from_symbol(s.model, sig_a);
  const OperatorMatrix b_op = op_from_symbol(s.model, pr.sigma_b);
  const OperatorMatrix resid{band_projector(s.model).A - compose_ops(s.model, b_op, a_op).A};
  const BandProbeDecay decay =
      band_probe_residual(s.model, resid, {8, 12, 16, 20, 24}, 2, 4, 515);
  CHECK(decay.fitted_exponent <= -(3.0) + 0.5);  // (rho-delta)(N+1) = 3
}

TEST_CASE("parametrix rejects non-elliptic input") {
  const Setup s = periodic_setup(128, 16);
  CHECK_THROWS_AS(parametrix(s.model, {sin_symbol(s.model)}, 0.0, 1, s.fam, s.table, kEps),
                  std::runtime_error);
}

TEST_CASE("l2 boundedness measurements") {
  const Setup s = periodic_setup(128, 16);
  const L2BoundednessReport pr = l2_boundedness_check(s.model, symbol_constant(s.model, 1.0), 1);
  CHECK(pr.finite);
  CHECK(pr.operator_norm == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(pr.derivative_bound == doctest::Approx(1.0).epsilon(1e-10));

  const L2BoundednessReport sr = l2_boundedness_check(s.model, sin_symbol(s.model), 1);
  CHECK(sr.operator_norm < 1.0 + 1e-8);
  CHECK(sr.derivative_bound == doctest::Approx(kTwoPi).epsilon(1e-3));

  // unimodular multiplier: operator norm within the analytic frame spread,
  // which is h for this family (the weight h^x ranges over [1, h])
  const SpectralModel hm = build_h_model(2.0, 16, make_grid(QuadKind::GaussLegendre, 256));
  ProbeRng rng(21);
  Vec sigma(hm.nxi());
  for (Eigen::Index c = 0; c < hm.nxi(); ++c)
    sigma[c] = std::exp(kI * (kTwoPi * rng.uniform()));  // |sigma| = 1
  const double norm = weighted_operator_norm(hm, multiplier_op(hm, sigma, Flavor::Plain));
  CHECK(norm <= 2.0 + 1e-6);
  CHECK(norm >= 1.0 - 1e-6);

  // linearity of the measured norm under scaling
  const Symbol one = symbol_constant(s.model, 1.0);
  const double n1 = weighted_operator_norm(s.model, op_from_symbol(s.model, one));
  const double n3 = weighted_operator_norm(s.model, op_from_symbol(s.model, symbol_scale(one, 3.0)));
  CHECK(n3 == doctest::Approx(3.0 * n1).epsilon(1e-10));
}

TEST_CASE("sobolev boundedness ratios") {
  const Setup s = periodic_setup(128, 16);
  const SobolevBoundednessReport wr =
      sobolev_boundedness_check(s.model, symbol_weight_power(s.model, 1.0), 1.0, 1.0, 8, 77);
  CHECK(std::abs(wr.ratio - 1.0) < 1e-10);
  CHECK(wr.stable);

  // the eigenvalue symbol at mu = m never amplifies: |lambda| <= <xi>
  const SobolevBoundednessReport lr =
      sobolev_boundedness_check(s.model, symbol_lambda(s.model), 1.0, 1.0, 8, 77);
  CHECK(lr.ratio_doubled <= 1.0 + 1e-9);
  CHECK(lr.ratio_doubled > 0.9);

  // a generic order-zero symbol stays bounded under probe doubling
  const SobolevBoundednessReport gr =
      sobolev_boundedness_check(s.model, sin_symbol(s.model), 0.0, 1.0, 8, 78);
  CHECK(std::isfinite(gr.ratio_doubled));
  CHECK(gr.stable);
}

TEST_CASE("a-priori estimate for elliptic operators") {
  const Setup s = periodic_setup(128, 16);
  // exact weight multiplier: lhs equals the first right-hand term
  const Symbol sw = symbol_weight_power(s.model, 1.0);
  const OperatorMatrix op = op_from_symbol(s.model, sw);
  ProbeRng rng(5);
  const Vec u = s.model.U * rng.coefficients(s.model.weight, 1.0);
  const double lhs = sobolev_norm(s.model, u, 1.5);
  const double rhs = sobolev_norm(s.model, op.apply(s.model, u), 0.5);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

  // single-mode probe: the bound reduces to a weight comparison
  const Eigen::Index c4 = s.model.xis.position(4);
  const Vec mode = s.model.U.col(c4);
  const double l = sobolev_norm(s.model, mode, 1.5);
  const double r = sobolev_norm(s.model, op.apply(s.model, mode), 0.5) +
                   sobolev_norm(s.model, mode, -2.0);
  CHECK(l / r <= 1.0);

  std::vector<Symbol> parts{symbol_lambda(s.model), sin_symbol(s.model)};
  const Symbol sig_a = symbol_sum(parts[0], parts[1]);
  const AprioriReport ar = apriori_estimate_check(s.model, sig_a, 1.0, 0.5, 2.0, 16, 99);
  CHECK(std::isfinite(ar.C_fit));
  CHECK(ar.C_fit > 0.0);
}

TEST_CASE("kernel sup norms against the summability threshold") {
  const Setup s = periodic_setup();
  // order-one symbol: threshold (mu + s0)/rho = 3
  const Symbol sw = symbol_weight_power(s.model, 1.0);
  const KernelDecayReport kd = kernel_decay_report(s.model, sw, s.fam, 0, {0, 1, 2, 3, 4});
  CHECK(kd.threshold == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(kd.sups[4].above_threshold);
  CHECK_FALSE(kd.sups[2].above_threshold);
  CHECK(kd.profile_pass);

  // the band kernel: one q-factor collapses the O(xi_max) diagonal peak to
  // band-edge remnants of size O(1); further factors stay O(1)
  const KernelDecayReport kb =
      kernel_decay_report(s.model, symbol_constant(s.model, 1.0), s.fam, 0, {0, 1, 2});
  CHECK(kb.sups[0].sup > 0.5 * (2.0 * 32.0 + 1.0));
  CHECK(kb.sups[1].sup < 0.1 * kb.sups[0].sup);
  CHECK(kb.sups[2].sup < 0.1 * kb.sups[0].sup);

  // near-smoothing symbol: small kernel sup
  const KernelDecayReport ks =
      kernel_decay_report(s.model, symbol_weight_power(s.model, -8.0), s.fam, 0, {0});
  CHECK(ks.sups[0].sup < 2.0);
}

TEST_CASE("windowed tail indicator localizes a kink") {
  const Setup s = periodic_setup();
  std::vector<Symbol> parts{symbol_lambda(s.model), sin_symbol(s.model)};
  const OperatorMatrix a_op = op_from_symbol(s.model, symbol_sum(parts[0], parts[1]));

  // smooth input: uniformly small indicator
  Vec smooth(s.model.nx());
  for (Eigen::Index i = 0; i < s.model.nx(); ++i)
    smooth[i] = std::sin(kTwoPi * s.model.grid.x[i]) + 0.3 * std::cos(2.0 * kTwoPi * s.model.grid.x[i]);
  const SingularSupportReport rs = singular_support_demo(s.model, a_op, smooth);
  CHECK(rs.max_in < 1e-3);
  CHECK(rs.max_out < 1e-2);

  // |cos(pi x)| kinks at 1/2 only and is periodic-smooth at the seam
  Vec kink(s.model.nx());
  for (Eigen::Index i = 0; i < s.model.nx(); ++i)
    kink[i] = std::abs(std::cos(kPi * s.model.grid.x[i]));
  const SingularSupportReport rk = singular_support_demo(s.model, a_op, kink);
  CHECK(std::abs(rk.peak_in - 0.5) < 0.07);
  CHECK(std::abs(rk.peak_out - 0.5) < 0.07);
  CHECK(rk.max_out > 10.0 * rs.max_out);
  CHECK(rk.max_in > 100.0 * rs.max_in);

  // the parametrix composition keeps the peak at the same window
  const ParametrixResult pr = parametrix(s.model, parts, 1.0, 1, s.fam, s.table, kEps);
  const OperatorMatrix ba =
      compose_ops(s.model, op_from_symbol(s.model, pr.sigma_b), a_op);
  const SingularSupportReport rb = singular_support_demo(s.model, ba, kink);
  CHECK(std::abs(rb.peak_out - rk.peak_in) < 0.07);
}

TEST_CASE("sup-norm embedding ratios") {
  const Setup s = periodic_setup(128, 16);
  const SobolevBoundednessReport er = sobolev_embedding_check(s.model, 1, 1.0, 8, 31);
  CHECK(std::isfinite(er.ratio_doubled));
  CHECK(er.stable);

  // single modes: ratio is exactly <eta>^{-k}
  for (long eta : {0L, 3L}) {
    const Eigen::Index c = s.model.xis.position(eta);
    const double ratio =
        s.model.U.col(c).cwiseAbs().maxCoeff() / sobolev_norm(s.model, s.model.U.col(c), 1.0);
    CHECK(ratio == doctest::Approx(1.0 / s.model.weight[c]).epsilon(1e-10));
  }

  const SpectralModel dm = build_dirichlet_model(16, make_grid(QuadKind::GaussLegendre, 256));
  const SobolevBoundednessReport dr = sobolev_embedding_check(dm, 1, 1.0, 8, 32);
  CHECK(std::isfinite(dr.ratio_doubled));
  CHECK(dr.stable);
}
