#include "nonharm/spectral.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nonharm/oracle.hpp"
#include "nonharm/rng.hpp"

namespace nonharm {

namespace {

IndexSet make_index_set(long xi_max, bool two_sided) {
  if (xi_max < 1) throw std::invalid_argument("model: xi_max must be >= 1");
  IndexSet s;
  s.xi_max = xi_max;
  s.two_sided = two_sided;
  const long lo = two_sided ? -xi_max : 1;
  for (long xi = lo; xi <= xi_max; ++xi) s.idx.push_back(xi);
  return s;
}

void check_nyquist(const Grid& grid, long xi_max) {
  if (grid.size() < 4 * xi_max)
    throw std::invalid_argument("model: grid too coarse for xi_max (need N_x >= 4 xi_max)");
}

RVec weights_from_lambda(const Vec& lambda, double m) {
  RVec w(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    w[i] = std::pow(1.0 + std::norm(lambda[i]), 1.0 / (2.0 * m));
  return w;
}

// Normalize each column to unit quadrature L2 norm.
void l2_normalize(const SpectralModel& model, Mat& table) {
  for (Eigen::Index c = 0; c < table.cols(); ++c) {
    const double n = model.norm(table.col(c));
    if (n <= 0.0) throw std::runtime_error("model: zero eigenfunction sample");
    table.col(c) /= n;
  }
}

// Rescale v_xi so the Gram diagonal is exactly 1; biorthogonality wins over
// unit norm and the deviation is recorded on the model.
void biorth_rescale(SpectralModel& model) {
  double dev = 0.0;
  for (Eigen::Index c = 0; c < model.V.cols(); ++c) {
    const cplx g = model.inner(model.U.col(c), model.V.col(c));
    if (std::abs(g) < 1e-12) throw std::runtime_error("model: degenerate biorthogonal pair");
    const cplx scale = 1.0 / std::conj(g);
    model.V.col(c) *= scale;
    model.LV.col(c) *= scale;
    dev = std::max(dev, std::abs(model.norm(model.V.col(c)) - 1.0));
  }
  model.v_norm_dev = dev;
}

void finalize(SpectralModel& model) {
  model.weight = weights_from_lambda(model.lambda, model.order_m);
  const Mu0Estimate mu = estimate_mu0(model);
  model.mu0_estimate = mu.mu0;
  model.mu0_constant = mu.C;
}

} // namespace

cplx SpectralModel::inner(const Vec& f, const Vec& g) const {
  if (f.size() != nx() || g.size() != nx()) throw std::invalid_argument("inner: grid mismatch");
  Vec terms = f.cwiseProduct(g.conjugate());
  terms.array() *= grid.w.array();
  return kahan_sum(terms.data(), static_cast<std::size_t>(terms.size()));
}

double SpectralModel::norm(const Vec& f) const {
  RVec terms = f.cwiseAbs2();
  terms.array() *= grid.w.array();
  const double s = kahan_sum(terms.data(), static_cast<std::size_t>(terms.size()));
  return std::sqrt(std::max(0.0, s));
}

double SpectralModel::lp_grid_norm(const Vec& f, double p) const {
  if (p < 1.0) throw std::invalid_argument("lp_grid_norm: p < 1");
  if (std::isinf(p)) return f.cwiseAbs().maxCoeff();
  RVec terms = f.cwiseAbs().array().pow(p);
  terms.array() *= grid.w.array();
  return std::pow(kahan_sum(terms.data(), static_cast<std::size_t>(terms.size())), 1.0 / p);
}

Mat SpectralModel::gram() const {
  // G[c, d] = sum_i w_i u_c(x_i) conj(v_d(x_i))
  Mat wu = U;
  wu.array().colwise() *= grid.w.array().cast<cplx>();
  return wu.transpose() * V.conjugate();
}

Vec SpectralModel::apply_L_numeric(const Vec& f) const {
  const RMat& d = *grid.diff;
  if (id == ModelId::Dirichlet) return -(d * (d * f));
  return -kI * (d * f);
}

Vec SpectralModel::apply_L_star_numeric(const Vec& f) const {
  // All three models share the differential expression of L; the adjoint
  // differs only through the boundary conditions, invisible pointwise.
  return apply_L_numeric(f);
}

Mat SpectralModel::apply_L_star_y(const Mat& kernel, int k) const {
  Mat out = kernel;
  const RMat& d = *grid.diff;
  const RMat dt = d.transpose();
  for (int j = 0; j < k; ++j) {
    if (id == ModelId::Dirichlet) {
      out = -muld(muld(out, dt), dt);
    } else {
      out = (-kI) * muld(out, dt);
    }
  }
  return out;
}

SpectralModel build_h_model(double h, long xi_max, Grid grid, double m, double s0) {
  if (!(h > 0.0)) throw std::invalid_argument("h-model: h must be positive");
  check_nyquist(grid, xi_max);
  SpectralModel model;
  model.id = ModelId::HModel;
  model.h = h;
  model.order_m = m;
  model.s0 = s0;
  model.grid = std::move(grid);
  model.xis = make_index_set(xi_max, true);

  const Eigen::Index n = model.nx();
  const Eigen::Index k = model.nxi();
  const double lnh = std::log(h);
  model.lambda.resize(k);
  model.U.resize(n, k);
  model.V.resize(n, k);
  model.LU.resize(n, k);
  model.LV.resize(n, k);

  for (Eigen::Index c = 0; c < k; ++c) {
    const long j = model.xis.idx[static_cast<std::size_t>(c)];
    model.lambda[c] = cplx(kTwoPi * j, -lnh);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = model.grid.x[i];
      const cplx phase = std::exp(kI * (kTwoPi * j * x));
      model.U(i, c) = std::exp(lnh * x) * phase;
      model.V(i, c) = std::exp(-lnh * x) * phase;
    }
    // L = -i d/dx applied through the derivative of the closed form; the
    // eigen-residual then cross-checks the lambda table.
    model.LU.col(c) = (-kI) * cplx(lnh, kTwoPi * j) * model.U.col(c);
    model.LV.col(c) = (-kI) * cplx(-lnh, kTwoPi * j) * model.V.col(c);
  }
  l2_normalize(model, model.U);
  l2_normalize(model, model.V);
  // normalization rescales LU/LV by the same factor; recompute from columns
  for (Eigen::Index c = 0; c < k; ++c) {
    const long j = model.xis.idx[static_cast<std::size_t>(c)];
    model.LU.col(c) = (-kI) * cplx(lnh, kTwoPi * j) * model.U.col(c);
    model.LV.col(c) = (-kI) * cplx(-lnh, kTwoPi * j) * model.V.col(c);
  }
  biorth_rescale(model);
  finalize(model);
  return model;
}

SpectralModel build_dirichlet_model(long xi_max, Grid grid, double m, double s0) {
  check_nyquist(grid, xi_max);
  if (grid.kind == QuadKind::Uniform)
    throw std::invalid_argument("dirichlet: uniform rule is reserved for periodic data");
  SpectralModel model;
  model.id = ModelId::Dirichlet;
  model.order_m = m;
  model.s0 = s0;
  model.grid = std::move(grid);
  model.xis = make_index_set(xi_max, false);

  const Eigen::Index n = model.nx();
  const Eigen::Index k = model.nxi();
  model.lambda.resize(k);
  model.U.resize(n, k);
  model.LU.resize(n, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const long j = model.xis.idx[static_cast<std::size_t>(c)];
    model.lambda[c] = kPi * kPi * static_cast<double>(j) * static_cast<double>(j);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = model.grid.x[i];
      model.U(i, c) = std::sin(kPi * j * x);
      // L = -d^2/dx^2 via the sine second-derivative rule
      model.LU(i, c) = kPi * j * kPi * j * std::sin(kPi * j * x);
    }
  }
  l2_normalize(model, model.U);
  for (Eigen::Index c = 0; c < k; ++c) {
    const long j = model.xis.idx[static_cast<std::size_t>(c)];
    model.LU.col(c) = (kPi * j * kPi * j) * model.U.col(c);
  }
  model.V = model.U;
  model.LV = model.LU;
  biorth_rescale(model);
  finalize(model);
  return model;
}

SpectralModel build_periodic_model(long xi_max, Grid grid, double m, double s0) {
  check_nyquist(grid, xi_max);
  SpectralModel model;
  model.id = ModelId::Periodic;
  model.order_m = m;
  model.s0 = s0;
  model.grid = std::move(grid);
  model.xis = make_index_set(xi_max, true);

  const Eigen::Index n = model.nx();
  const Eigen::Index k = model.nxi();
  model.lambda.resize(k);
  model.U.resize(n, k);
  model.LU.resize(n, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const long xi = model.xis.idx[static_cast<std::size_t>(c)];
    model.lambda[c] = kTwoPi * xi;
    for (Eigen::Index i = 0; i < n; ++i)
      model.U(i, c) = std::exp(kI * (kTwoPi * xi * model.grid.x[i]));
    model.LU.col(c) = (-kI) * (kI * kTwoPi * static_cast<double>(xi)) * model.U.col(c);
  }
  l2_normalize(model, model.U);
  for (Eigen::Index c = 0; c < k; ++c) {
    const long xi = model.xis.idx[static_cast<std::size_t>(c)];
    model.LU.col(c) = (kTwoPi * static_cast<double>(xi)) * model.U.col(c);
  }
  model.V = model.U;
  model.LV = model.LU;
  biorth_rescale(model);
  finalize(model);
  return model;
}

WeightTable weight_table(const SpectralModel& model) {
  WeightTable t;
  t.values = model.weight;
  for (Eigen::Index i = 0; i < t.values.size(); ++i)
    if (!(t.values[i] >= 1.0)) throw std::runtime_error("weight_table: value below 1");
  // nondecreasing along the eigenvalue ordering (by |xi|)
  for (long a = 0; a + 1 <= model.xis.xi_max; ++a) {
    double wa = 0.0, wb = 0.0;
    bool have_a = false, have_b = false;
    for (long sgn : {1L, -1L}) {
      const Eigen::Index pa = model.xis.position(sgn * a);
      const Eigen::Index pb = model.xis.position(sgn * (a + 1));
      if (pa >= 0) { wa = std::max(have_a ? wa : 0.0, t.values[pa]); have_a = true; }
      if (pb >= 0) { wb = std::max(have_b ? wb : 0.0, t.values[pb]); have_b = true; }
    }
    if (have_a && have_b && wb + 1e-12 < wa)
      throw std::runtime_error("weight_table: ordering violated");
  }
  return t;
}

Mu0Estimate estimate_mu0(const SpectralModel& model) {
  std::vector<double> xs, ys;
  for (Eigen::Index c = 0; c < model.nxi(); ++c) {
    xs.push_back(model.weight[c]);
    ys.push_back(model.U.col(c).cwiseAbs().maxCoeff());
  }
  double mean = 0.0;
  for (double x : xs) mean += std::log(x);
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (std::log(x) - mean) * (std::log(x) - mean);
  if (var < 1e-20) throw std::runtime_error("estimate_mu0: degenerate weight range");

  const FitResult fit = loglog_fit(xs, ys, FitBand{0.0, 0.0});
  Mu0Estimate est;
  est.slope = fit.slope;
  est.r2 = fit.r2;
  est.mu0 = std::max(0.0, fit.slope);
  double c = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    c = std::max(c, ys[i] / std::pow(xs[i], est.mu0));
  est.C = c;
  return est;
}

S0Report check_s0(const SpectralModel& model, double s0) {
  if (!(s0 > 0.0)) throw std::invalid_argument("check_s0: s0 must be positive");
  S0Report rep;
  std::vector<double> inc_k, inc_v;
  double total = 0.0;
  for (long k = model.xis.two_sided ? 0 : 1; k <= model.xis.xi_max; ++k) {
    double inc = 0.0;
    for (long sgn : {1L, -1L}) {
      if (sgn < 0 && (k == 0 || !model.xis.two_sided)) continue;
      const Eigen::Index p = model.xis.position(sgn * k);
      if (p >= 0) inc += std::pow(model.weight[p], -s0);
    }
    total += inc;
    rep.partial_sums.push_back(total);
    if (k >= 1) {
      inc_k.push_back(static_cast<double>(k));
      inc_v.push_back(inc);
    }
  }
  const FitResult fit = loglog_fit(inc_k, inc_v, FitBand{0.5, 0.0});
  rep.tail_slope = fit.slope;
  rep.summable = fit.slope < -1.0;
  return rep;
}

RieszBounds verify_riesz_bounds(const SpectralModel& model, int probe_count, std::uint64_t seed) {
  if (probe_count < 1) throw std::invalid_argument("riesz: need at least one probe");
  ProbeRng rng(seed);
  RieszBounds out;
  out.probes = probe_count;
  out.m_lo = std::numeric_limits<double>::infinity();
  out.M_hi = 0.0;
  for (int p = 0; p < probe_count; ++p) {
    const Vec c = rng.coefficients(model.weight, 0.0);
    const Vec f = model.U * c;
    const double fn = model.norm(f);
    if (fn == 0.0) throw std::invalid_argument("riesz: zero probe");
    // recompute coefficients through the transform rather than trusting c
    Vec wf = f;
    wf.array() *= model.grid.w.array().cast<cplx>();
    const Vec fhat = model.V.adjoint() * wf;
    const double ratio = fhat.norm() / fn;
    out.m_lo = std::min(out.m_lo, ratio);
    out.M_hi = std::max(out.M_hi, ratio);
  }
  return out;
}

ModelChecks run_model_checks(const SpectralModel& model) {
  ModelChecks c;
  const Mat g = model.gram();
  Mat dev = g;
  dev.diagonal().array() -= 1.0;
  c.gram_dev = dev.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < model.nxi(); ++k) {
    const double scale = 1.0 + std::abs(model.lambda[k]);
    c.max_eig_resid = std::max(
        c.max_eig_resid, model.norm(model.LU.col(k) - model.lambda[k] * model.U.col(k)) / scale);
    c.max_adj_resid = std::max(
        c.max_adj_resid,
        model.norm(model.LV.col(k) - std::conj(model.lambda[k]) * model.V.col(k)) / scale);
    c.max_u_norm_dev = std::max(c.max_u_norm_dev, std::abs(model.norm(model.U.col(k)) - 1.0));
  }
  c.v_norm_dev = model.v_norm_dev;
  return c;
}

} // namespace nonharm
