#include "nonharm/differences.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nonharm/oracle.hpp"

namespace nonharm {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

Mat q_power(const Mat& q, int alpha) {
  if (alpha == 0) return Mat::Ones(q.rows(), q.cols());
  Mat p = q;
  for (int k = 1; k < alpha; ++k) p = p.cwiseProduct(q);
  return p;
}

// Extraction of sum_j w_j M(x_i, y_j) family(y_j, c) / family(x_i, c) under
// the zero-set policy (shared by the plain and conjugate differences).
Symbol extract_kernel(const SpectralModel& model, const Mat& m, const Mat& family, double eps) {
  Mat wf = family;
  wf.array().colwise() *= model.grid.w.array().cast<cplx>();
  const Mat af = m * wf;
  Symbol s;
  s.a.resize(model.nx(), model.nxi());
  s.masked = BoolGrid::Constant(model.nx(), model.nxi(), false);
  for (Eigen::Index c = 0; c < model.nxi(); ++c) {
    const double cutoff = eps * family.col(c).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < model.nx(); ++i) {
      const cplx u = family(i, c);
      if (std::abs(u) <= cutoff) {
        s.a(i, c) = 0.0;
        s.masked(i, c) = true;
      } else {
        s.a(i, c) = af(i, c) / u;
      }
    }
  }
  return s;
}

} // namespace

cplx DifferenceFamily::eval(double x, double y) const {
  if (kind == FamilyKind::ExpDiff) return std::exp(kI * (kTwoPi * (y - x))) - 1.0;
  return cplx(y - x, 0.0);
}

cplx DifferenceFamily::dy_on_diagonal(double) const {
  if (kind == FamilyKind::ExpDiff) return kI * kTwoPi;
  return 1.0;
}

DifferenceFamily make_family(FamilyKind kind, const Grid& grid) {
  DifferenceFamily fam;
  fam.kind = kind;
  const Eigen::Index n = grid.size();
  fam.q.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      fam.q(i, j) = (i == j) ? cplx(0.0) : fam.eval(grid.x[i], grid.x[j]);

  // diagonal vanishing and nondegenerate normal derivative (finite
  // differences against the analytic slope)
  const double delta = 1e-7;
  double min_offdiag = std::numeric_limits<double>::infinity();
  double spacing = 0.0;
  for (Eigen::Index i = 1; i < n; ++i) spacing = std::max(spacing, grid.x[i] - grid.x[i - 1]);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = grid.x[i];
    const cplx fd = (fam.eval(x, x + delta) - fam.eval(x, x)) / delta;
    if (std::abs(fd) < 0.1) throw std::runtime_error("difference family: degenerate slope");
    if (std::abs(fd - fam.dy_on_diagonal(x)) > 1e-4)
      throw std::runtime_error("difference family: slope mismatch");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(grid.x[i] - grid.x[j]) > spacing)
        min_offdiag = std::min(min_offdiag, std::abs(fam.q(i, j)));
    }
  }
  if (!(min_offdiag > 0.0))
    throw std::runtime_error("difference family: vanishes away from the diagonal");
  return fam;
}

Symbol delta_q(const SpectralModel& model, const Symbol& a, int alpha,
               const DifferenceFamily& fam, double eps) {
  if (alpha < 0) throw std::invalid_argument("delta_q: negative order");
  const Kernel k = kernel_of_symbol(model, a);
  const Mat m = q_power(fam.q, alpha).cwiseProduct(k.K);
  Symbol out = extract_kernel(model, m, model.U, eps);
  out.order = a.order - a.rho * alpha;
  out.rho = a.rho;
  out.delta = a.delta;
  return out;
}

Symbol delta_q_star(const SpectralModel& model, const Symbol& b, int alpha,
                    const DifferenceFamily& fam, double eps) {
  if (alpha < 0) throw std::invalid_argument("delta_q_star: negative order");
  const Kernel k = star_kernel_of_symbol(model, b);
  const Mat m = q_power(fam.q.conjugate(), alpha).cwiseProduct(k.K);
  Symbol out = extract_kernel(model, m, model.V, eps);
  out.order = b.order - b.rho * alpha;
  out.rho = b.rho;
  out.delta = b.delta;
  return out;
}

TaylorTable taylor_coeff_operators(const DifferenceFamily& fam, int beta_max) {
  if (beta_max < 1) throw std::invalid_argument("taylor_coeff_operators: beta_max must be >= 1");
  TaylorTable table;
  table.kind = fam.kind;
  table.order = beta_max;
  table.T = Mat::Zero(beta_max, beta_max);
  for (int b = 1; b <= beta_max; ++b) {
    for (int a = 1; a <= b; ++a) {
      if (fam.kind == FamilyKind::PolyDiff) {
        // d^b (x-e)^a has diagonal value a!, so T is the identity.
        table.T(b - 1, a - 1) = (a == b) ? 1.0 : 0.0;
      } else {
        // d^b [ (e^{2 pi i (x-e)} - 1)^a ] expanded binomially.
        cplx sum = 0.0;
        for (int k = 0; k <= a; ++k) {
          const double sign = ((a - k) % 2 == 0) ? 1.0 : -1.0;
          sum += binomial(a, k) * sign * std::pow(kI * (kTwoPi * k), b);
        }
        table.T(b - 1, a - 1) = sum / factorial(a);
      }
    }
  }
  for (int a = 1; a <= beta_max; ++a)
    if (std::abs(table.T(a - 1, a - 1)) < 1e-14)
      throw std::runtime_error("taylor_coeff_operators: singular recurrence diagonal");
  table.S = table.T.triangularView<Eigen::Lower>().solve(Mat::Identity(beta_max, beta_max));
  return table;
}

Vec taylor_derivative(const TaylorTable& table, const Grid& grid, const Vec& g, int alpha) {
  if (alpha < 0) throw std::invalid_argument("taylor_derivative: negative order");
  if (alpha == 0) return g;
  if (alpha > table.order) throw std::invalid_argument("taylor_derivative: order beyond table");
  const RMat& d = *grid.diff;
  Vec acc = Vec::Zero(g.size());
  Vec der = g;
  for (int b = 1; b <= alpha; ++b) {
    der = d * der;
    acc += table.S(alpha - 1, b - 1) * der;
  }
  return acc;
}

Symbol taylor_derivative(const TaylorTable& table, const SpectralModel& model, const Symbol& a,
                         int alpha) {
  if (alpha == 0) return a;
  if (alpha > table.order) throw std::invalid_argument("taylor_derivative: order beyond table");
  Symbol out = a;
  out.a.setZero();
  const RMat& d = *model.grid.diff;
  Mat der = a.a;
  for (int b = 1; b <= alpha; ++b) {
    der = dmul(d, der);
    out.a += table.S(alpha - 1, b - 1) * der;
  }
  out.order = a.order + a.delta * alpha;
  return out;
}

Symbol D_alpha_symbol(const SpectralModel& model, const Symbol& a, int alpha,
                      const TaylorTable& table, double eps) {
  if (alpha == 0) return a;
  if (alpha > table.order) throw std::invalid_argument("D_alpha_symbol: order beyond table");
  const Kernel k = kernel_of_symbol(model, a);
  const RMat& d = *model.grid.diff;
  Mat acc = Mat::Zero(model.nx(), model.nx());
  Mat der = k.K;
  for (int b = 1; b <= alpha; ++b) {
    der = dmul(d, der);
    acc += table.S(alpha - 1, b - 1) * der;
  }
  Mat wf = model.U;
  wf.array().colwise() *= model.grid.w.array().cast<cplx>();
  const Mat af = acc * wf;
  Symbol out;
  out.a.resize(model.nx(), model.nxi());
  out.masked = BoolGrid::Constant(model.nx(), model.nxi(), false);
  for (Eigen::Index c = 0; c < model.nxi(); ++c) {
    const double cutoff = eps * model.U.col(c).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < model.nx(); ++i) {
      const cplx u = model.U(i, c);
      if (std::abs(u) <= cutoff) {
        out.a(i, c) = 0.0;
        out.masked(i, c) = true;
      } else {
        out.a(i, c) = af(i, c) / u;
      }
    }
  }
  out.order = a.order + a.delta * alpha;
  out.rho = a.rho;
  out.delta = a.delta;
  return out;
}

TaylorRemainderReport taylor_remainder_check(const DifferenceFamily& fam, const TaylorTable& table,
                                             const Grid& grid, const Vec& g, Eigen::Index e_pos,
                                             int n_terms) {
  if (e_pos < 0 || e_pos >= grid.size())
    throw std::invalid_argument("taylor_remainder_check: expansion point outside grid");
  if (n_terms < 1 || n_terms - 1 > table.order)
    throw std::invalid_argument("taylor_remainder_check: bad term count");
  const double e = grid.x[e_pos];

  // D^(alpha) g at e, for alpha < n_terms
  std::vector<cplx> dvals(static_cast<std::size_t>(n_terms));
  for (int a = 0; a < n_terms; ++a)
    dvals[static_cast<std::size_t>(a)] = taylor_derivative(table, grid, g, a)[e_pos];

  std::vector<double> qs, rs;
  double max_resid = 0.0;
  double scale = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (std::abs(grid.x[i] - e) > 0.1) continue;
    if (std::abs(i - e_pos) <= 2) continue;  // avoid 0/0 near the expansion point
    const cplx qv = fam.q(e_pos, i);
    cplx p = 0.0;
    cplx qp = 1.0;
    for (int a = 0; a < n_terms; ++a) {
      p += dvals[static_cast<std::size_t>(a)] / factorial(a) * qp;
      qp *= qv;
    }
    const double resid = std::abs(g[i] - p);
    max_resid = std::max(max_resid, resid);
    scale = std::max(scale, std::abs(g[i]));
    qs.push_back(std::abs(qv));
    rs.push_back(resid);
  }
  TaylorRemainderReport rep;
  rep.max_resid = max_resid;
  rep.points = static_cast<int>(qs.size());
  rep.exact = max_resid <= 1e-10 * std::max(1.0, scale);
  if (!rep.exact) {
    const FitResult fit = loglog_fit(qs, rs, FitBand{0.0, 0.0}, 1e-14);
    rep.slope = fit.slope;
    rep.r2 = fit.r2;
  }
  return rep;
}

double projection_leakage(const SpectralModel& model, const DifferenceFamily& fam) {
  // reference kernel with <xi>^{-2} coefficient decay, well inside the band
  const Symbol ref = symbol_weight_power(model, -2.0);
  const Mat k = kernel_of_symbol(model, ref).K;
  const Mat qk = fam.q.cwiseProduct(k);

  // band projection in both variables through the biorthogonal system
  Mat wv = model.V;
  wv.array().colwise() *= model.grid.w.array().cast<cplx>();
  Mat wu = model.U;
  wu.array().colwise() *= model.grid.w.array().cast<cplx>();
  const Mat coeff = wv.adjoint() * qk * wu;               // analyze x against v, y against u
  const Mat proj = model.U * coeff * model.V.adjoint();   // resynthesize

  const RVec& w = model.grid.w;
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < model.nx(); ++i)
    for (Eigen::Index j = 0; j < model.nx(); ++j) {
      const double ww = w[i] * w[j];
      num += ww * std::norm(qk(i, j) - proj(i, j));
      den += ww * std::norm(qk(i, j));
    }
  return std::sqrt(num / std::max(den, 1e-300));
}

} // namespace nonharm
