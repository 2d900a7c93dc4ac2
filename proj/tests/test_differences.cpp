#include <doctest.h>

#include <cmath>

#include "nonharm/differences.hpp"
#include "nonharm/rng.hpp"

using namespace nonharm;

namespace {
SpectralModel periodic(Eigen::Index n = 256, long xi = 32) {
  return build_periodic_model(xi, make_grid(QuadKind::Uniform, n));
}
} // namespace

TEST_CASE("families vanish only on the diagonal with unit-rank slope") {
  const Grid g = make_grid(QuadKind::GaussLegendre, 128);
  const DifferenceFamily ef = make_family(FamilyKind::ExpDiff, g);
  const DifferenceFamily pf = make_family(FamilyKind::PolyDiff, g);
  CHECK(std::abs(ef.dy_on_diagonal(0.3) - kI * kTwoPi) == 0.0);
  CHECK(std::abs(pf.dy_on_diagonal(0.3) - cplx(1.0)) == 0.0);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    CHECK(std::abs(ef.q(i, i)) == 0.0);
    CHECK(std::abs(pf.q(i, i)) == 0.0);
  }
  // |y - x| < 1 keeps the exponential argument off the lattice
  double min_off = 1e9;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    for (Eigen::Index j = 0; j < g.size(); ++j)
      if (i != j) min_off = std::min(min_off, std::abs(ef.q(i, j)));
  CHECK(min_off > 0.0);
}

TEST_CASE("difference of order zero is the identity on symbols") {
  const SpectralModel m = periodic();
  const DifferenceFamily fam = make_family(FamilyKind::ExpDiff, m.grid);
  const Symbol s = symbol_weight_power(m, -1.0);
  const Symbol d0 = delta_q(m, s, 0, fam, 1e-6);
  CHECK((d0.a - s.a).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("periodic difference acts as the forward difference on multipliers") {
  const SpectralModel m = periodic();
  const DifferenceFamily fam = make_family(FamilyKind::ExpDiff, m.grid);
  Vec sigma(m.nxi());
  for (Eigen::Index c = 0; c < m.nxi(); ++c) sigma[c] = 1.0 / m.weight[c];
  const Symbol s = symbol_multiplier(m, sigma, -1.0);
  const Symbol d1 = delta_q(m, s, 1, fam, 1e-6);
  double worst = 0.0;
  for (long xi = -m.xis.xi_max; xi < m.xis.xi_max; ++xi) {  // needs xi+1 in band
    const Eigen::Index c = m.xis.position(xi);
    const cplx want = sigma[m.xis.position(xi + 1)] - sigma[c];
    for (Eigen::Index i = 0; i < m.nx(); ++i)
      worst = std::max(worst, std::abs(d1.a(i, c) - want));
  }
  CHECK(worst < 1e-8);

  // difference of the constant symbol: interior columns vanish
  const Symbol one = symbol_constant(m, 1.0);
  const Symbol d1one = delta_q(m, one, 1, fam, 1e-6);
  double interior = 0.0;
  for (long xi = -m.xis.xi_max; xi < m.xis.xi_max; ++xi)
    interior = std::max(interior,
                        d1one.a.col(m.xis.position(xi)).cwiseAbs().maxCoeff());
  CHECK(interior < 1e-8);
  // the top band edge loses its shifted partner
  CHECK(d1one.a.col(m.xis.position(m.xis.xi_max)).cwiseAbs().maxCoeff() > 0.5);
}

TEST_CASE("iterated differences compose on periodic multipliers") {
  const SpectralModel m = periodic();
  const DifferenceFamily fam = make_family(FamilyKind::ExpDiff, m.grid);
  Vec sigma(m.nxi());
  for (Eigen::Index c = 0; c < m.nxi(); ++c) sigma[c] = std::pow(m.weight[c], -0.5);
  const Symbol s = symbol_multiplier(m, sigma, -0.5);
  const Symbol d2_direct = delta_q(m, s, 2, fam, 1e-6);
  const Symbol d2_iter = delta_q(m, delta_q(m, s, 1, fam, 1e-6), 1, fam, 1e-6);
  double worst = 0.0;
  for (long xi = -m.xis.xi_max + 8; xi <= m.xis.xi_max - 8; ++xi) {
    const Eigen::Index c = m.xis.position(xi);
    worst = std::max(worst, (d2_direct.a.col(c) - d2_iter.a.col(c)).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("difference operators are linear in the symbol") {
  const SpectralModel m = periodic(128, 12);
  const DifferenceFamily fam = make_family(FamilyKind::ExpDiff, m.grid);
  ProbeRng rng(9);
  Symbol s1 = symbol_constant(m, 0.0), s2 = symbol_constant(m, 0.0);
  for (Eigen::Index c = 0; c < m.nxi(); ++c)
    for (Eigen::Index i = 0; i < m.nx(); ++i) {
      s1.a(i, c) = rng.cnormal();
      s2.a(i, c) = rng.cnormal();
    }
  const cplx c1(1.5, 0.25), c2(-0.75, 2.0);
  const Symbol lhs = delta_q(m, symbol_sum(s1, s2, c1, c2), 1, fam, 1e-6);
  const Symbol rhs = symbol_sum(delta_q(m, s1, 1, fam, 1e-6), delta_q(m, s2, 1, fam, 1e-6),
                                c1, c2);
  CHECK((lhs.a - rhs.a).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("taylor tables: recurrence structure and exactness") {
  const Grid g = make_grid(QuadKind::Uniform, 256);
  const DifferenceFamily pf = make_family(FamilyKind::PolyDiff, g);
  const TaylorTable pt = taylor_coeff_operators(pf, 4);
  CHECK((pt.T - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);

  const DifferenceFamily ef = make_family(FamilyKind::ExpDiff, g);
  const TaylorTable et = taylor_coeff_operators(ef, 4);
  CHECK(std::abs(et.T(0, 0) - kI * kTwoPi) < 1e-12);
  // triangular inversion is exact
  CHECK((et.T * et.S - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

  // D^(1) = (2 pi i)^{-1} d/dx on plane waves, D^(2) the two-step solve
  Vec g4(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) g4[i] = std::exp(kI * (2.0 * kTwoPi * g.x[i]));
  const Vec d1 = taylor_derivative(et, g, g4, 1);
  CHECK((d1 - 2.0 * g4).cwiseAbs().maxCoeff() < 1e-8);
  const Vec d2 = taylor_derivative(et, g, g4, 2);
  // xi (xi - 1) at xi = 2
  CHECK((d2 - 2.0 * g4).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("poly family dual derivatives reproduce plain derivatives") {
  const Grid g = make_grid(QuadKind::GaussLegendre, 256);
  const DifferenceFamily pf = make_family(FamilyKind::PolyDiff, g);
  const TaylorTable pt = taylor_coeff_operators(pf, 3);
  Vec mono(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) mono[i] = std::pow(g.x[i], 5);
  for (int alpha : {1, 2, 3}) {
    const Vec got = taylor_derivative(pt, g, mono, alpha);
    double fac = 1.0;
    for (int k = 0; k < alpha; ++k) fac *= (5 - k);
    double worst = 0.0;
    for (Eigen::Index i = g.size() / 4; i < 3 * g.size() / 4; ++i)
      worst = std::max(worst,
                       std::abs(got[i] - fac * std::pow(g.x[i], 5 - alpha)));
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("kernel-level dual derivative of multipliers and x-symbols") {
  const SpectralModel m = periodic();
  const DifferenceFamily pf = make_family(FamilyKind::PolyDiff, m.grid);
  const TaylorTable pt = taylor_coeff_operators(pf, 2);

  Vec sigma(m.nxi());
  for (Eigen::Index c = 0; c < m.nxi(); ++c) sigma[c] = std::pow(m.weight[c], -2.0);
  const Symbol s = symbol_multiplier(m, sigma, -2.0);
  const Symbol d0 = D_alpha_symbol(m, s, 0, pt, 1e-6);
  CHECK((d0.a - s.a).cwiseAbs().maxCoeff() == 0.0);

  // kernel differentiation turns the multiplier into 2 pi i xi sigma(xi)
  const Symbol d1 = D_alpha_symbol(m, s, 1, pt, 1e-6);
  double worst = 0.0;
  for (Eigen::Index c = 0; c < m.nxi(); ++c) {
    const cplx want = kI * kTwoPi * static_cast<double>(m.xis.idx[static_cast<std::size_t>(c)]) *
                      sigma[c];
    for (Eigen::Index i = 0; i < m.nx(); ++i)
      worst = std::max(worst, std::abs(d1.a(i, c) - want));
  }
  CHECK(worst < 1e-6);

  // x-dependent symbol: u^{-1} d/dx (u sin) = 2 pi i xi sin + derivative term
  GridFunction sg(m.nx());
  for (Eigen::Index i = 0; i < m.nx(); ++i) sg[i] = std::sin(kTwoPi * m.grid.x[i]);
  const Symbol sx = symbol_xfunction(m, sg);
  const Symbol dx1 = D_alpha_symbol(m, sx, 1, pt, 1e-6);
  worst = 0.0;
  for (Eigen::Index c = 0; c < m.nxi(); ++c) {
    const double xi = static_cast<double>(m.xis.idx[static_cast<std::size_t>(c)]);
    for (Eigen::Index i = 0; i < m.nx(); ++i) {
      const double x = m.grid.x[i];
      const cplx want = kI * kTwoPi * xi * std::sin(kTwoPi * x) + kTwoPi * std::cos(kTwoPi * x);
      worst = std::max(worst, std::abs(dx1.a(i, c) - want));
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("taylor remainder orders") {
  const Grid g = make_grid(QuadKind::Uniform, 512);
  const DifferenceFamily ef = make_family(FamilyKind::ExpDiff, g);
  const TaylorTable et = taylor_coeff_operators(ef, 4);
  const Eigen::Index e = g.size() / 2;

  // the family function itself is reproduced by two terms
  Vec qe(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) qe[i] = ef.q(e, i);
  CHECK(taylor_remainder_check(ef, et, g, qe, e, 2).exact);

  // constants are exact at one term
  CHECK(taylor_remainder_check(ef, et, g, Vec::Ones(g.size()), e, 1).exact);

  // a plane wave is affine in q for this family: two terms reproduce it
  Vec pw(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) pw[i] = std::exp(kI * (kTwoPi * g.x[i]));
  const TaylorRemainderReport one_term = taylor_remainder_check(ef, et, g, pw, e, 1);
  CHECK_FALSE(one_term.exact);
  CHECK(std::abs(one_term.slope - 1.0) < 0.3);
  CHECK(taylor_remainder_check(ef, et, g, pw, e, 2).exact);

  // analytic data outside the q-polynomial algebra: order tracks the count
  Vec ga(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) ga[i] = std::exp(std::sin(kTwoPi * g.x[i]));
  for (int n : {1, 2, 3}) {
    const TaylorRemainderReport rep = taylor_remainder_check(ef, et, g, ga, e, n);
    CHECK_FALSE(rep.exact);
    CHECK(rep.slope > n - 0.3);
    CHECK(rep.slope < n + 0.5);
  }
}

TEST_CASE("multiplication by q keeps resolved kernels inside the band") {
  const SpectralModel pm = periodic();
  const DifferenceFamily ef = make_family(FamilyKind::ExpDiff, pm.grid);
  CHECK(projection_leakage(pm, ef) < 0.05);

  const SpectralModel hm = build_h_model(2.0, 16, make_grid(QuadKind::GaussLegendre, 256));
  const DifferenceFamily ef2 = make_family(FamilyKind::ExpDiff, hm.grid);
  CHECK(projection_leakage(hm, ef2) < 0.05);
}
