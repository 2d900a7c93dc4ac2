#include "nonharm/campaigns.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nonharm/oracle.hpp"
#include "nonharm/rng.hpp"
#include "nonharm/transform.hpp"

namespace nonharm {

namespace {

std::string model_tag(const RunConfig& cfg) {
  if (cfg.model.model == "h-model") return "h=" + fmt_double(cfg.model.h);
  return cfg.model.model;
}

// Standard operators the expansion campaigns exercise.
Symbol sin_symbol(const SpectralModel& m) {
  GridFunction g(m.nx());
  for (Eigen::Index i = 0; i < m.nx(); ++i) g[i] = std::sin(kTwoPi * m.grid.x[i]);
  return symbol_xfunction(m, g);
}

} // namespace

Report campaign_model_verify(const RunConfig& cfg) {
  cfg.validate();
  Report rep("model-verify", cfg.to_json_string());
  const SpectralModel model = cfg.build_model();
  const std::string tag = model_tag(cfg);

  const ModelChecks checks = run_model_checks(model);
  rep.check("gram_identity", tag, "", checks.gram_dev, 0.0, cfg.tol.biorth,
            checks.gram_dev < cfg.tol.biorth);
  rep.check("eigen_residual", tag, "", checks.max_eig_resid, 0.0, cfg.tol.eig,
            checks.max_eig_resid < cfg.tol.eig);
  rep.check("adjoint_residual", tag, "", checks.max_adj_resid, 0.0, cfg.tol.eig,
            checks.max_adj_resid < cfg.tol.eig);
  rep.check("u_norms", tag, "", checks.max_u_norm_dev, 0.0, cfg.tol.roundtrip,
            checks.max_u_norm_dev < cfg.tol.roundtrip);
  rep.info("v_norm_deviation", tag, "", checks.v_norm_dev);

  const WeightTable wt = weight_table(model);
  rep.check("weight_min", tag, "", wt.values.minCoeff(), 1.0, 0.0, wt.values.minCoeff() >= 1.0);

  const RieszBounds rb = verify_riesz_bounds(model, cfg.probes, cfg.seed);
  const RieszBounds rb2 = verify_riesz_bounds(model, 2 * cfg.probes, cfg.seed);
  rep.check("riesz_lower_positive", tag, "", rb.m_lo, 0.0, 0.0, rb.m_lo > 0.0);
  rep.check("riesz_upper_finite", tag, "", rb.M_hi, 0.0, 0.0, std::isfinite(rb.M_hi));
  const double drift = std::max(std::abs(rb2.m_lo - rb.m_lo) / rb.m_lo,
                                std::abs(rb2.M_hi - rb.M_hi) / rb.M_hi);
  rep.check("riesz_probe_stability", tag, "", drift, 0.0, cfg.tol.stability,
            drift <= cfg.tol.stability);

  const Mu0Estimate mu0 = estimate_mu0(model);
  rep.info("mu0_estimate", tag, "", mu0.mu0);
  rep.info("mu0_constant", tag, "", mu0.C);

  const S0Report s0 = check_s0(model, model.s0);
  rep.check("s0_summable", tag, "s0=" + fmt_double(model.s0), s0.tail_slope, -1.0, 0.0,
            s0.summable);
  bool monotone = true;
  for (std::size_t i = 1; i < s0.partial_sums.size(); ++i)
    if (s0.partial_sums[i] < s0.partial_sums[i - 1]) monotone = false;
  rep.check("s0_partial_sums_nondecreasing", tag, "", monotone ? 1.0 : 0.0, 1.0, 0.0, monotone);
  return rep;
}

Report campaign_transform_verify(const RunConfig& cfg) {
  cfg.validate();
  Report rep("transform-verify", cfg.to_json_string());
  const SpectralModel model = cfg.build_model();
  const std::string tag = model_tag(cfg);
  ProbeRng rng(cfg.seed);

  double rt_worst = 0.0, parseval_worst = 0.0, planch_worst = 0.0, inner_neg = 0.0;
  for (int p = 0; p < cfg.probes; ++p) {
    const Vec c = rng.coefficients(model.weight, 2.0);
    const Vec f = inverse(model, {c, Flavor::Plain});
    const Vec g = inverse(model, {rng.coefficients(model.weight, 2.0), Flavor::Plain});
    const CoefficientVector fh = forward(model, f);
    rt_worst = std::max(rt_worst, (fh.a - c).norm() / c.norm());
    const ParsevalReport pr = parseval_check(model, f, g);
    parseval_worst = std::max(parseval_worst, pr.mismatch);
    planch_worst = std::max(planch_worst, pr.max_norm_dev);
    const cplx q = inner_l2L(model, fh, fh);
    inner_neg = std::min(inner_neg, q.real());
  }
  rep.check("roundtrip", tag, "", rt_worst, 0.0, cfg.tol.roundtrip, rt_worst < cfg.tol.roundtrip);
  rep.check("parseval", tag, "", parseval_worst, 0.0, cfg.tol.roundtrip,
            parseval_worst < cfg.tol.roundtrip);
  rep.check("plancherel_norms", tag, "", planch_worst, 0.0, cfg.tol.roundtrip,
            planch_worst < cfg.tol.roundtrip);
  rep.check("l2L_nonnegative", tag, "", inner_neg, 0.0, 1e-10, inner_neg > -1e-10);

  for (double p : {1.0, 1.5, 2.0}) {
    const HausdorffYoungReport hy = hausdorff_young_check(model, p, cfg.probes, cfg.seed);
    const bool finite = std::isfinite(hy.constant) && hy.stable;
    rep.check("hausdorff_young_finite", tag, "p=" + fmt_double(p), hy.constant, 0.0, 0.0, finite);
    if (model.self_adjoint())
      rep.check("hausdorff_young_unit", tag, "p=" + fmt_double(p), hy.constant, 1.0,
                cfg.tol.roundtrip, std::abs(hy.constant - 1.0) < cfg.tol.roundtrip);
  }

  // s = 0 reduces the weighted norm to the L2 norm
  const Vec f0 = inverse(model, {rng.coefficients(model.weight, 2.0), Flavor::Plain});
  const double s0dev = std::abs(sobolev_norm(model, f0, 0.0) - model.norm(f0));
  rep.check("sobolev_s0_matches_l2", tag, "", s0dev, 0.0, cfg.tol.roundtrip,
            s0dev < cfg.tol.roundtrip);
  return rep;
}

Report campaign_calculus(const RunConfig& cfg, const std::string& sub) {
  cfg.validate();
  if (!(cfg.rho > cfg.delta))
    throw std::invalid_argument(
        "calculus: the expansion theorems require rho > delta; refusing the request");
  Report rep("calculus-" + sub, cfg.to_json_string());
  const SpectralModel model = cfg.build_model();
  const DifferenceFamily fam = cfg.build_family(model);
  const TaylorTable table = taylor_coeff_operators(fam, std::max(cfg.difference.beta_max, cfg.terms));
  const std::string tag = model_tag(cfg);
  const double eps = cfg.tol.mask_eps;

  if (sub == "compose") {
    // multiplier x multiplier is exact at one term
    const Symbol sa = symbol_weight_power(model, -1.0);
    const Symbol sb = symbol_weight_power(model, 0.5);
    ExpansionResult mm = compose_symbols(model, sa, sb, 1, fam, table, eps, cfg.tol.exponent);
    rep.check("multiplier_compose_exact", tag, "", mm.remainder_sup[0], 0.0, cfg.tol.entrywise,
              mm.remainder_sup[0] < cfg.tol.entrywise);
    // order-1 multiplier against multiplication by sin(2 pi x)
    const Symbol sl = symbol_lambda(model);
    const Symbol sx = sin_symbol(model);
    ExpansionResult ls = compose_symbols(model, sl, sx, cfg.terms, fam, table, eps,
                                         cfg.tol.exponent);
    for (std::size_t n = 0; n < ls.remainder_exponent.size(); ++n) {
      const bool ok = ls.exact_floor[n] ||
                      ls.remainder_exponent[n] <= ls.target_exponent[n] + cfg.tol.exponent;
      rep.check("compose_remainder_order", tag, "N=" + std::to_string(n + 1),
                ls.remainder_exponent[n], ls.target_exponent[n], cfg.tol.exponent, ok);
      rep.info("compose_remainder_sup", tag, "N=" + std::to_string(n + 1), ls.remainder_sup[n]);
    }
  } else if (sub == "adjoint") {
    const Symbol sm = symbol_weight_power(model, -1.0);
    ExpansionResult ma = adjoint_symbol(model, sm, 1, fam, table, eps, cfg.tol.exponent);
    rep.check("multiplier_adjoint_exact", tag, "", ma.remainder_sup[0], 0.0, cfg.tol.roundtrip,
              ma.remainder_sup[0] < cfg.tol.roundtrip);
    Symbol mixed = symbol_product(symbol_weight_power(model, 1.0), sin_symbol(model));
    mixed.order = 1.0;
    ExpansionResult ax = adjoint_symbol(model, mixed, cfg.terms, fam, table, eps,
                                        cfg.tol.exponent);
    for (std::size_t n = 0; n < ax.remainder_exponent.size(); ++n) {
      const bool ok = ax.exact_floor[n] ||
                      ax.remainder_exponent[n] <= ax.target_exponent[n] + cfg.tol.exponent;
      rep.check("adjoint_remainder_order", tag, "N=" + std::to_string(n + 1),
                ax.remainder_exponent[n], ax.target_exponent[n], cfg.tol.exponent, ok);
    }
  } else if (sub == "amp-reduce") {
    // amplitude g(y) <xi>^{-1}: reduction against direct extraction
    Amplitude amp;
    amp.order = -1.0;
    amp.rho = cfg.rho;
    amp.delta = cfg.delta;
    for (Eigen::Index c = 0; c < model.nxi(); ++c) {
      Mat slice(model.nx(), model.nx());
      for (Eigen::Index j = 0; j < model.nx(); ++j)
        slice.col(j).setConstant(std::cos(kTwoPi * model.grid.x[j]) / model.weight[c]);
      amp.slices.push_back(std::move(slice));
    }
    ExpansionResult ar = amplitude_to_symbol(model, amp, cfg.terms, fam, table, eps,
                                             cfg.tol.exponent);
    for (std::size_t n = 0; n < ar.remainder_exponent.size(); ++n) {
      const bool ok = ar.exact_floor[n] ||
                      ar.remainder_exponent[n] <= ar.target_exponent[n] + cfg.tol.exponent;
      rep.check("amplitude_remainder_order", tag, "N=" + std::to_string(n + 1),
                ar.remainder_exponent[n], ar.target_exponent[n], cfg.tol.exponent, ok);
    }
  } else if (sub == "classify") {
    const Symbol sl = symbol_lambda(model);
    const SymbolClassReport cr =
        classify_symbol(model, sl, model.order_m, cfg.rho, cfg.delta, cfg.difference.alpha_max,
                        cfg.difference.beta_max, fam, table, eps, cfg.tol.exponent);
    rep.check("classify_lambda_order", tag, "", cr.m_fit, model.order_m, cfg.tol.exponent,
              std::abs(cr.m_fit - model.order_m) <= cfg.tol.exponent);
    rep.check("classify_lambda_pass", tag, "", cr.pass ? 1.0 : 0.0, 1.0, 0.0, cr.pass);
    const Symbol dec = symbol_weight_power(model, -2.0);
    const SymbolClassReport cr2 =
        classify_symbol(model, dec, -2.0, cfg.rho, cfg.delta, cfg.difference.alpha_max,
                        cfg.difference.beta_max, fam, table, eps, cfg.tol.exponent);
    rep.check("classify_decay_order", tag, "", cr2.m_fit, -2.0, 0.2,
              std::abs(cr2.m_fit + 2.0) <= 0.2);
  } else {
    throw std::invalid_argument("calculus: unknown subcommand '" + sub + "'");
  }
  return rep;
}

Report campaign_elliptic(const RunConfig& cfg, const std::string& sub) {
  cfg.validate();
  Report rep("elliptic-" + sub, cfg.to_json_string());
  const SpectralModel model = cfg.build_model();
  const DifferenceFamily fam = cfg.build_family(model);
  const TaylorTable table = taylor_coeff_operators(fam, std::max(cfg.difference.beta_max, cfg.terms));
  const std::string tag = model_tag(cfg);
  const double eps = cfg.tol.mask_eps;

  if (sub == "parametrix") {
    std::vector<Symbol> parts{symbol_lambda(model), sin_symbol(model)};
    const ParametrixResult pr =
        parametrix(model, parts, model.order_m, cfg.terms - 1, fam, table, eps);
    rep.info("ellipticity_C0", tag, "", pr.ellipticity.C0);
    rep.info("ellipticity_N0", tag, "", static_cast<double>(pr.ellipticity.N0));
    for (std::size_t n = 0; n < pr.residual_band.size(); ++n) {
      rep.info("residual_band", tag, "N=" + std::to_string(n), pr.residual_band[n]);
      rep.info("residual_active", tag, "N=" + std::to_string(n), pr.residual_active[n]);
      rep.info("residual_full", tag, "N=" + std::to_string(n), pr.residual_full[n]);
      if (n > 0)
        rep.check("residual_monotone", tag, "N=" + std::to_string(n),
                  pr.residual_band[n] / pr.residual_band[n - 1], 1.0, 0.0,
                  pr.residual_band[n] < pr.residual_band[n - 1]);
      rep.check("b_order_fit", tag, "k=" + std::to_string(n), pr.b_order_fit[n],
                -model.order_m - (cfg.rho - cfg.delta) * static_cast<double>(n),
                cfg.tol.exponent,
                std::abs(pr.b_order_fit[n] +
                         model.order_m + (cfg.rho - cfg.delta) * static_cast<double>(n)) <=
                    cfg.tol.exponent);
    }
  } else if (sub == "kernel-decay") {
    const Symbol a = symbol_weight_power(model, 1.0);
    const KernelDecayReport kd = kernel_decay_report(model, a, fam, 0, {0, 1, 2, 3, 4});
    rep.info("threshold", tag, "", kd.threshold);
    for (const KernelDecayEntry& e : kd.sups)
      rep.info("qK_sup", tag, "alpha=" + std::to_string(e.alpha), e.sup);
    rep.check("profile_bound", tag, "N=" + std::to_string(kd.profile_n), kd.profile_exponent,
              kd.profile_n, 0.5, kd.profile_pass);
  } else if (sub == "bounds") {
    const Symbol one = symbol_constant(model, 1.0);
    const L2BoundednessReport b1 = l2_boundedness_check(model, one, 1);
    rep.check("l2_bound_projector", tag, "", b1.operator_norm, 1.0, 0.1,
              b1.finite && b1.operator_norm < 1.5);
    const Symbol sw = symbol_weight_power(model, model.order_m);
    const SobolevBoundednessReport sb =
        sobolev_boundedness_check(model, sw, model.order_m, 1.0, cfg.probes, cfg.seed);
    rep.check("sobolev_weight_shift", tag, "", sb.ratio, 1.0, 1e-10,
              std::abs(sb.ratio - 1.0) < 1e-10);
    // exact weight multiplier: the estimate saturates with the H^s term alone
    const OperatorMatrix sw_op = op_from_symbol(model, sw);
    ProbeRng rng(cfg.seed);
    double unit_dev = 0.0;
    for (int p = 0; p < cfg.probes; ++p) {
      const Vec u = model.U * rng.coefficients(model.weight, 1.0);
      const double lhs = sobolev_norm(model, u, 1.0 + model.order_m);
      const double rhs = sobolev_norm(model, sw_op.apply(model, u), 1.0);
      unit_dev = std::max(unit_dev, std::abs(lhs / rhs - 1.0));
    }
    rep.check("apriori_multiplier_unit", tag, "", unit_dev, 0.0, 1e-8, unit_dev < 1e-8);
    const AprioriReport ap =
        apriori_estimate_check(model, sw, model.order_m, 0.0, 2.0, cfg.probes, cfg.seed);
    rep.info("apriori_multiplier_Cfit", tag, "", ap.C_fit);
  } else if (sub == "embed") {
    const SobolevBoundednessReport em = sobolev_embedding_check(model, 1, 1.0, cfg.probes, cfg.seed);
    rep.check("embedding_ratio_finite", tag, "", em.ratio_doubled, 0.0, 0.0,
              std::isfinite(em.ratio_doubled) && em.stable);
  } else if (sub == "singsupp") {
    std::vector<Symbol> parts{symbol_lambda(model), sin_symbol(model)};
    const ParametrixResult pr = parametrix(model, parts, model.order_m, 1, fam, table, eps);
    Symbol sig_a = symbol_sum(parts[0], parts[1]);
    const OperatorMatrix a_op = op_from_symbol(model, sig_a);
    GridFunction w(model.nx());
    for (Eigen::Index i = 0; i < model.nx(); ++i) w[i] = std::abs(std::cos(kPi * model.grid.x[i]));
    const SingularSupportReport ss = singular_support_demo(model, a_op, w);
    rep.info("kink_peak_in", tag, "", ss.peak_in);
    rep.info("kink_peak_out", tag, "", ss.peak_out);
    rep.info("kink_max_out", tag, "", ss.max_out);
    const OperatorMatrix b_op = op_from_symbol(model, pr.sigma_b);
    const SingularSupportReport ss2 =
        singular_support_demo(model, compose_ops(model, b_op, a_op), w);
    rep.info("kink_peak_ba", tag, "", ss2.peak_out);
  } else {
    throw std::invalid_argument("elliptic: unknown subcommand '" + sub + "'");
  }
  return rep;
}

Report campaign_oracle_selftest(const RunConfig& cfg) {
  cfg.validate();
  Report rep("oracle-selftest", cfg.to_json_string());

  // fitting utility on synthetic power laws
  std::vector<double> xs, ys2, ysm3, ysc;
  ProbeRng rng(cfg.seed);
  for (int i = 1; i <= 40; ++i) {
    const double x = i;
    xs.push_back(x);
    ys2.push_back(x * x);
    ysm3.push_back(std::pow(x, -3.0) * (1.0 + 0.01 * rng.normal()));
    ysc.push_back(7.5);
  }
  rep.check("fit_square", "", "", loglog_fit(xs, ys2, FitBand{0, 0}).slope, 2.0, 1e-10,
            std::abs(loglog_fit(xs, ys2, FitBand{0, 0}).slope - 2.0) < 1e-10);
  rep.check("fit_noisy_cube", "", "", loglog_fit(xs, ysm3, FitBand{0, 0}).slope, -3.0, 0.05,
            std::abs(loglog_fit(xs, ysm3, FitBand{0, 0}).slope + 3.0) < 0.05);
  rep.check("fit_constant", "", "", loglog_fit(xs, ysc, FitBand{0, 0}).slope, 0.0, 1e-12,
            std::abs(loglog_fit(xs, ysc, FitBand{0, 0}).slope) < 1e-12);

  // finite-difference eigensolver against the Dirichlet spectrum
  const std::vector<double> evs = fd_eigensolve_dirichlet(2048, 3);
  double worst = 0.0;
  for (int j = 1; j <= 3; ++j) {
    const double exact = kPi * kPi * j * j;
    worst = std::max(worst, std::abs(evs[static_cast<std::size_t>(j - 1)] - exact) / exact);
  }
  rep.check("fd_eigensolver", "", "j<=3", worst, 0.0, 1e-4, worst < 1e-4);

  // independent assembly against the quantize path
  RunConfig small = cfg;
  small.model.nodes = std::min<Eigen::Index>(small.model.nodes, 512);
  small.model.xi_max = std::min<long>(small.model.xi_max, 16);
  const SpectralModel model = small.build_model();
  ProbeRng srng(cfg.seed + 1);
  Symbol s = symbol_constant(model, 0.0);
  for (Eigen::Index c = 0; c < model.nxi(); ++c)
    for (Eigen::Index i = 0; i < model.nx(); ++i)
      s.a(i, c) = srng.cnormal();
  const OperatorMatrix a_op = op_from_symbol(model, s);
  // rule closes over the sampled symbol via node positions
  std::vector<double> xpos(model.grid.x.data(), model.grid.x.data() + model.nx());
  const auto rule = [&](double x, double y, long xi) -> cplx {
    const auto ix = static_cast<Eigen::Index>(
        std::lower_bound(xpos.begin(), xpos.end(), x) - xpos.begin());
    const auto iy = static_cast<Eigen::Index>(
        std::lower_bound(xpos.begin(), xpos.end(), y) - xpos.begin());
    const Eigen::Index c = model.xis.position(xi);
    return s.a(ix, c) * model.U(ix, c) * std::conj(model.V(iy, c));
  };
  const Mat ref2 = dense_assemble(model, rule);
  const double dev = (ref2 - a_op.A).cwiseAbs().maxCoeff();
  rep.check("dense_assemble_crosscheck", "", "", dev, 0.0, cfg.tol.entrywise,
            dev < cfg.tol.entrywise);
  return rep;
}

} // namespace nonharm
