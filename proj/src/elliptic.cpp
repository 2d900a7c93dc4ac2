#include "nonharm/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nonharm/rng.hpp"
#include "nonharm/transform.hpp"

namespace nonharm {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

constexpr double kMarginFloor = 1e-6;

Vec synthesize_band_probe(const SpectralModel& model, ProbeRng& rng, long center,
                          long half_width) {
  Vec c = Vec::Zero(model.nxi());
  for (long xi = center - half_width; xi <= center + half_width; ++xi) {
    const Eigen::Index p = model.xis.position(xi);
    if (p >= 0) c[p] = rng.cnormal();
  }
  return model.U * c;
}

} // namespace

EllipticityReport check_elliptic(const SpectralModel& model, const Symbol& sigma, double mu) {
  EllipticityReport rep;
  rep.mu = mu;
  rep.margins.resize(static_cast<std::size_t>(model.nxi()));
  for (Eigen::Index c = 0; c < model.nxi(); ++c) {
    double m = std::numeric_limits<double>::infinity();
    double colmax = 0.0;
    bool any = false;
    for (Eigen::Index i = 0; i < model.nx(); ++i) {
      if (sigma.is_masked(i, c)) continue;
      m = std::min(m, std::abs(sigma.a(i, c)));
      colmax = std::max(colmax, std::abs(sigma.a(i, c)));
      any = true;
    }
    // a zero between nodes shows up as a phase flip next to a dip; the grid
    // minimum alone would report a spurious positive margin
    for (Eigen::Index i = 0; any && i + 1 < model.nx(); ++i) {
      if (sigma.is_masked(i, c) || sigma.is_masked(i + 1, c)) continue;
      const cplx a = sigma.a(i, c);
      const cplx b = sigma.a(i + 1, c);
      if (std::min(std::abs(a), std::abs(b)) < 0.25 * colmax &&
          (std::conj(a) * b).real() <= 0.0) {
        m = 0.0;
        break;
      }
    }
    rep.margins[static_cast<std::size_t>(c)] =
        any ? m / std::pow(model.weight[c], mu) : 0.0;
  }
  // smallest threshold |xi| >= N0 with a uniform positive margin beyond it
  for (long n0 = 0; n0 <= model.xis.xi_max; ++n0) {
    double c0 = std::numeric_limits<double>::infinity();
    bool any = false;
    for (Eigen::Index c = 0; c < model.nxi(); ++c) {
      if (std::labs(model.xis.idx[static_cast<std::size_t>(c)]) < n0) continue;
      c0 = std::min(c0, rep.margins[static_cast<std::size_t>(c)]);
      any = true;
    }
    if (any && c0 > kMarginFloor) {
      rep.pass = true;
      rep.N0 = n0;
      rep.C0 = c0;
      return rep;
    }
  }
  return rep;
}

ParametrixResult parametrix(const SpectralModel& model, const std::vector<Symbol>& a_parts,
                            double mu, int n_corrections, const DifferenceFamily& fam,
                            const TaylorTable& table, double eps, double norm_tol) {
  if (a_parts.empty()) throw std::invalid_argument("parametrix: empty decomposition");
  const double rho = a_parts.front().rho;
  const double dlt = a_parts.front().delta;
  if (!(rho > dlt)) throw std::invalid_argument("parametrix: requires rho > delta");

  ParametrixResult res;
  res.ellipticity = check_elliptic(model, a_parts.front(), mu);
  if (!res.ellipticity.pass)
    throw std::runtime_error("parametrix: principal symbol fails the ellipticity bound");
  const long n0 = res.ellipticity.N0;

  // reciprocal of the principal symbol, active only for |xi| >= N0
  const Symbol& a0 = a_parts.front();
  Symbol b0 = a0;
  b0.ensure_mask();
  b0.order = -mu;
  for (Eigen::Index c = 0; c < model.nxi(); ++c) {
    const bool active = std::labs(model.xis.idx[static_cast<std::size_t>(c)]) >= n0;
    for (Eigen::Index i = 0; i < model.nx(); ++i) {
      if (!active || a0.is_masked(i, c)) {
        b0.a(i, c) = 0.0;
        continue;
      }
      const cplx den = a0.a(i, c);
      if (std::abs(den) < kMarginFloor * std::pow(model.weight[c], mu))
        throw std::runtime_error("parametrix: reciprocal underflow inside the active range");
      b0.a(i, c) = 1.0 / den;
    }
  }
  res.b_terms.push_back(b0);

  // recursion: each new correction consumes differences of the decomposition
  // terms and dual derivatives of the earlier corrections
  std::vector<std::vector<Symbol>> delta_a;  // delta_a[j][alpha]
  for (const Symbol& aj : a_parts) {
    std::vector<Symbol> row;
    row.push_back(aj);
    for (int alpha = 1; alpha <= n_corrections; ++alpha)
      row.push_back(delta_q(model, aj, alpha, fam, eps));
    delta_a.push_back(std::move(row));
  }

  for (int n = 1; n <= n_corrections; ++n) {
    Symbol acc = symbol_constant(model, 0.0);
    acc.ensure_mask();
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j <= n - k; ++j) {
        const int alpha = n - j - k;
        if (j >= static_cast<int>(a_parts.size())) continue;
        const Symbol da = delta_a[static_cast<std::size_t>(j)][static_cast<std::size_t>(alpha)];
        const Symbol db = taylor_derivative(table, model, res.b_terms[static_cast<std::size_t>(k)],
                                            alpha);
        acc = symbol_sum(acc, symbol_product(da, db), 1.0, 1.0 / factorial(alpha));
      }
    }
    Symbol bn = acc;
    bn.order = -mu - (rho - dlt) * n;
    for (Eigen::Index c = 0; c < model.nxi(); ++c) {
      const bool active = std::labs(model.xis.idx[static_cast<std::size_t>(c)]) >= n0;
      for (Eigen::Index i = 0; i < model.nx(); ++i) {
        if (!active || a0.is_masked(i, c) || acc.is_masked(i, c)) {
          bn.a(i, c) = 0.0;
          continue;
        }
        bn.a(i, c) = -acc.a(i, c) / a0.a(i, c);
      }
    }
    res.b_terms.push_back(std::move(bn));
  }

  // assembled parametrix and residual norms per correction depth
  Symbol sig_a = a_parts.front();
  for (std::size_t j = 1; j < a_parts.size(); ++j) sig_a = symbol_sum(sig_a, a_parts[j]);
  const OperatorMatrix a_op = op_from_symbol(model, sig_a);
  const OperatorMatrix p_band = band_projector(model);
  const OperatorMatrix p_active = mode_restriction(model, n0);
  const std::vector<bool> rel = reliable_band(model);
  Vec band_mask(model.nxi());
  for (Eigen::Index c = 0; c < model.nxi(); ++c)
    band_mask[c] = rel[static_cast<std::size_t>(c)] ? 1.0 : 0.0;
  const OperatorMatrix p_reliable = multiplier_op(model, band_mask, Flavor::Plain);

  Symbol b_partial = res.b_terms.front();
  for (int n = 0; n <= n_corrections; ++n) {
    if (n > 0) b_partial = symbol_sum(b_partial, res.b_terms[static_cast<std::size_t>(n)]);
    const OperatorMatrix b_op = op_from_symbol(model, b_partial);
    const OperatorMatrix residual{p_band.A - compose_ops(model, b_op, a_op).A};
    res.residual_full.push_back(
        weighted_operator_norm(model, {&residual, &p_band}, norm_tol));
    res.residual_active.push_back(
        weighted_operator_norm(model, {&residual, &p_active}, norm_tol));
    res.residual_band.push_back(
        weighted_operator_norm(model, {&residual, &p_reliable}, norm_tol));
  }
  res.sigma_b = b_partial;

  const std::vector<bool> band = reliable_band(model);
  for (const Symbol& b : res.b_terms) {
    std::vector<double> xs, ys;
    for (Eigen::Index c = 0; c < model.nxi(); ++c) {
      if (!band[static_cast<std::size_t>(c)]) continue;
      double sup = 0.0;
      for (Eigen::Index i = 0; i < model.nx(); ++i)
        if (!b.is_masked(i, c)) sup = std::max(sup, std::abs(b.a(i, c)));
      if (sup > 0.0) {
        xs.push_back(model.weight[c]);
        ys.push_back(sup);
      }
    }
    res.b_order_fit.push_back(loglog_fit(xs, ys, FitBand{0.0, 0.0}).slope);
  }
  return res;
}

BandProbeDecay band_probe_residual(const SpectralModel& model, const OperatorMatrix& residual,
                                   const std::vector<long>& centers, long half_width, int probes,
                                   std::uint64_t seed) {
  ProbeRng rng(seed);
  BandProbeDecay out;
  for (long c : centers) {
    double worst = 0.0;
    for (int p = 0; p < probes; ++p) {
      const Vec f = synthesize_band_probe(model, rng, c, half_width);
      const double fn = model.norm(f);
      if (fn == 0.0) continue;
      worst = std::max(worst, model.norm(residual.apply(model, f)) / fn);
    }
    const Eigen::Index pos = model.xis.position(c);
    out.centers.push_back(pos >= 0 ? model.weight[pos] : 0.0);
    out.ratios.push_back(worst);
  }
  out.fitted_exponent = loglog_fit(out.centers, out.ratios, FitBand{0.0, 0.0}).slope;
  return out;
}

L2BoundednessReport l2_boundedness_check(const SpectralModel& model, const Symbol& a,
                                         int k_derivs) {
  L2BoundednessReport rep;
  const RMat& d = *model.grid.diff;
  Mat der = a.a;
  rep.derivative_bound = der.cwiseAbs().maxCoeff();
  for (int b = 1; b <= k_derivs; ++b) {
    der = dmul(d, der);
    rep.derivative_bound = std::max(rep.derivative_bound, der.cwiseAbs().maxCoeff());
  }
  rep.operator_norm = weighted_operator_norm(model, op_from_symbol(model, a));
  rep.kappa = rep.operator_norm / std::max(rep.derivative_bound, 1e-300);
  rep.finite = std::isfinite(rep.operator_norm) && std::isfinite(rep.derivative_bound);
  return rep;
}

SobolevBoundednessReport sobolev_boundedness_check(const SpectralModel& model, const Symbol& a,
                                                   double mu, double s, int probes,
                                                   std::uint64_t seed) {
  if (probes < 1) throw std::invalid_argument("sobolev_boundedness: empty probe set");
  ProbeRng rng(seed);
  const OperatorMatrix op = op_from_symbol(model, a);
  SobolevBoundednessReport rep;
  double best = 0.0, after_half = 0.0;
  // single modes first, then random decaying probes
  for (long xi : {0L, 1L, 3L, -5L}) {
    const Eigen::Index c = model.xis.position(xi);
    if (c < 0) continue;
    const Vec f = model.U.col(c);
    const double den = sobolev_norm(model, f, s);
    if (den > 0.0) best = std::max(best, sobolev_norm(model, op.apply(model, f), s - mu) / den);
  }
  for (int i = 0; i < 2 * probes; ++i) {
    const Vec f = model.U * rng.coefficients(model.weight, 1.0);
    const double den = sobolev_norm(model, f, s);
    if (den > 0.0) best = std::max(best, sobolev_norm(model, op.apply(model, f), s - mu) / den);
    if (i == probes - 1) after_half = best;
  }
  rep.ratio = after_half;
  rep.ratio_doubled = best;
  rep.stable = std::isfinite(best) && best - after_half <= 0.05 * std::max(after_half, 1e-300);
  return rep;
}

AprioriReport apriori_estimate_check(const SpectralModel& model, const Symbol& sigma_a, double mu,
                                     double s, double n_neg, int probes, std::uint64_t seed) {
  if (probes < 1) throw std::invalid_argument("apriori_estimate: empty probe set");
  ProbeRng rng(seed);
  const OperatorMatrix op = op_from_symbol(model, sigma_a);
  AprioriReport rep;
  rep.probes = probes;
  double sum = 0.0;
  for (int i = 0; i < probes; ++i) {
    const Vec u = model.U * rng.coefficients(model.weight, 1.0);
    const double lhs = sobolev_norm(model, u, s + mu);
    const double rhs = sobolev_norm(model, op.apply(model, u), s) +
                       sobolev_norm(model, u, -n_neg);
    if (rhs <= 0.0) continue;
    const double c = lhs / rhs;
    rep.C_fit = std::max(rep.C_fit, c);
    sum += c;
  }
  rep.C_mean = sum / probes;
  return rep;
}

KernelDecayReport kernel_decay_report(const SpectralModel& model, const Symbol& a,
                                      const DifferenceFamily& fam, int k_power,
                                      const std::vector<int>& alpha_list) {
  KernelDecayReport rep;
  rep.threshold = (a.order + model.order_m * k_power + 2.0 * model.mu0_estimate + model.s0) /
                  std::max(a.rho, 1e-12);
  const Mat k0 = kernel_of_symbol(model, a).K;
  const Mat kk = model.apply_L_star_y(k0, k_power);
  for (int alpha : alpha_list) {
    Mat qk = kk;
    for (int p = 0; p < alpha; ++p) qk = qk.cwiseProduct(fam.q);
    KernelDecayEntry e;
    e.alpha = alpha;
    e.sup = qk.cwiseAbs().maxCoeff();
    e.above_threshold = static_cast<double>(alpha) > rep.threshold;
    rep.sups.push_back(e);
  }

  // off-diagonal profile |K_k| ~ |x-y|^{-s}: geometric separation bins
  rep.profile_n = static_cast<int>(std::floor(rep.threshold)) + 1;
  const Eigen::Index n = model.nx();
  const double rmin = 4.0 / static_cast<double>(n);
  std::vector<double> rs, vals;
  const int bins = 24;
  for (int b = 0; b < bins; ++b) {
    const double r_lo = rmin * std::pow(0.5 / rmin, static_cast<double>(b) / bins);
    const double r_hi = rmin * std::pow(0.5 / rmin, static_cast<double>(b + 1) / bins);
    double sup = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double r = std::abs(model.grid.x[i] - model.grid.x[j]);
        if (r >= r_lo && r < r_hi) sup = std::max(sup, std::abs(kk(i, j)));
      }
    }
    if (sup > 0.0) {
      rs.push_back(std::sqrt(r_lo * r_hi));
      vals.push_back(sup);
    }
  }
  const FitResult fit = loglog_fit(rs, vals, FitBand{0.0, 0.0});
  rep.profile_exponent = -fit.slope;  // singularity strength s
  rep.profile_r2 = fit.r2;
  rep.profile_pass = rep.profile_exponent <= rep.profile_n + 0.5;
  return rep;
}

SingularSupportReport singular_support_demo(const SpectralModel& model, const OperatorMatrix& op,
                                            const GridFunction& w) {
  SingularSupportReport rep;
  const Vec image = op.apply(model, w);
  // window wide enough that its own spectrum dies well before the tail cut
  const double sigma_w = 0.05;
  const long tail_cut = model.xis.xi_max / 2;
  // interior windows only, four window widths from the endpoints: closer in,
  // the window's own edge truncation pollutes the high-frequency content
  const double c_lo = 4.0 * sigma_w, c_hi = 1.0 - 4.0 * sigma_w;

  const auto indicator = [&](const Vec& f, double c) {
    Vec windowed(model.nx());
    for (Eigen::Index i = 0; i < model.nx(); ++i) {
      const double dx = model.grid.x[i] - c;
      windowed[i] = f[i] * std::exp(-dx * dx / (2.0 * sigma_w * sigma_w));
    }
    const CoefficientVector ch = forward(model, windowed);
    double tail = 0.0, total = 0.0;
    for (Eigen::Index p = 0; p < model.nxi(); ++p) {
      const double e = std::norm(ch.a[p]);
      total += e;
      if (std::labs(model.xis.idx[static_cast<std::size_t>(p)]) > tail_cut) tail += e;
    }
    return total > 0.0 ? tail / total : 0.0;
  };

  const int n_windows = 33;
  for (int k = 0; k < n_windows; ++k) {
    const double c = c_lo + (c_hi - c_lo) * (k + 0.5) / n_windows;
    rep.centers.push_back(c);
    rep.indicator_in.push_back(indicator(w, c));
    rep.indicator_out.push_back(indicator(image, c));
  }
  const auto peak = [&](const std::vector<double>& v, double& loc, double& mx) {
    mx = 0.0;
    loc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] > mx) {
        mx = v[i];
        loc = rep.centers[i];
      }
  };
  peak(rep.indicator_in, rep.peak_in, rep.max_in);
  peak(rep.indicator_out, rep.peak_out, rep.max_out);
  return rep;
}

SobolevBoundednessReport sobolev_embedding_check(const SpectralModel& model, int k, double kappa,
                                                 int probes, std::uint64_t seed) {
  if (probes < 1) throw std::invalid_argument("sobolev_embedding: empty probe set");
  ProbeRng rng(seed);
  const double s = kappa * k;
  SobolevBoundednessReport rep;
  double best = 0.0, after_half = 0.0;
  for (long xi : {0L, 1L, 4L}) {
    const Eigen::Index c = model.xis.position(xi);
    if (c < 0) continue;
    const double den = sobolev_norm(model, model.U.col(c), s);
    if (den > 0.0)
      best = std::max(best, model.U.col(c).cwiseAbs().maxCoeff() / den);
  }
  for (int i = 0; i < 2 * probes; ++i) {
    const Vec f = model.U * rng.coefficients(model.weight, 1.0);
    const double den = sobolev_norm(model, f, s);
    if (den > 0.0) best = std::max(best, f.cwiseAbs().maxCoeff() / den);
    if (i == probes - 1) after_half = best;
  }
  rep.ratio = after_half;
  rep.ratio_doubled = best;
  rep.stable = std::isfinite(best) && best - after_half <= 0.05 * std::max(after_half, 1e-300);
  return rep;
}

} // namespace nonharm
