#include "nonharm/quantize.hpp"

#include <cmath>
#include <stdexcept>

#include "nonharm/rng.hpp"

namespace nonharm {

namespace {

void check_dims(const SpectralModel& model, const Symbol& a, const char* who) {
  if (a.a.rows() != model.nx() || a.a.cols() != model.nxi())
    throw std::invalid_argument(std::string(who) + ": symbol dimension mismatch");
}

// Synthesis factor (family ° a) with masked entries zeroed.
Mat masked_factor(const Mat& family, const Symbol& a) {
  Mat f = family.cwiseProduct(a.a);
  if (a.masked.size() != 0) {
    for (Eigen::Index c = 0; c < f.cols(); ++c)
      for (Eigen::Index i = 0; i < f.rows(); ++i)
        if (a.masked(i, c)) f(i, c) = 0.0;
  }
  return f;
}

// Extraction core: divide (A family)(x) by family(x) under the zero-set
// policy. analyze = family the operator is applied to, divide = same family.
Symbol extract(const SpectralModel& model, const OperatorMatrix& A, const Mat& family,
               double eps) {
  if (A.A.rows() != model.nx() || A.A.cols() != model.nx())
    throw std::invalid_argument("symbol extraction: operator dimension mismatch");
  if (!(eps > 0.0)) throw std::invalid_argument("symbol extraction: eps must be positive");
  const Mat af = A.apply_cols(model, family);
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

GridFunction OperatorMatrix::apply(const SpectralModel& model, const GridFunction& f) const {
  if (f.size() != A.cols()) throw std::invalid_argument("operator apply: grid mismatch");
  Vec wf = f;
  wf.array() *= model.grid.w.array().cast<cplx>();
  return A * wf;
}

Mat OperatorMatrix::apply_cols(const SpectralModel& model, const Mat& fs) const {
  if (fs.rows() != A.cols()) throw std::invalid_argument("operator apply: grid mismatch");
  Mat wf = fs;
  wf.array().colwise() *= model.grid.w.array().cast<cplx>();
  return A * wf;
}

Symbol symbol_sum(const Symbol& a, const Symbol& b, cplx ca, cplx cb) {
  if (a.a.rows() != b.a.rows() || a.a.cols() != b.a.cols())
    throw std::invalid_argument("symbol_sum: dimension mismatch");
  Symbol out;
  out.a = ca * a.a + cb * b.a;
  out.order = std::max(a.order, b.order);
  out.rho = std::min(a.rho, b.rho);
  out.delta = std::max(a.delta, b.delta);
  if (a.masked.size() != 0 || b.masked.size() != 0) {
    out.masked = BoolGrid::Constant(out.a.rows(), out.a.cols(), false);
    if (a.masked.size() != 0) out.masked = out.masked || a.masked;
    if (b.masked.size() != 0) out.masked = out.masked || b.masked;
  }
  return out;
}

Symbol symbol_product(const Symbol& a, const Symbol& b) {
  if (a.a.rows() != b.a.rows() || a.a.cols() != b.a.cols())
    throw std::invalid_argument("symbol_product: dimension mismatch");
  Symbol out;
  out.a = a.a.cwiseProduct(b.a);
  out.order = a.order + b.order;
  out.rho = std::min(a.rho, b.rho);
  out.delta = std::max(a.delta, b.delta);
  if (a.masked.size() != 0 || b.masked.size() != 0) {
    out.masked = BoolGrid::Constant(out.a.rows(), out.a.cols(), false);
    if (a.masked.size() != 0) out.masked = out.masked || a.masked;
    if (b.masked.size() != 0) out.masked = out.masked || b.masked;
  }
  return out;
}

Symbol symbol_scale(const Symbol& a, cplx c) {
  Symbol out = a;
  out.a *= c;
  return out;
}

Symbol symbol_constant(const SpectralModel& model, cplx value, double order) {
  Symbol s;
  s.a = Mat::Constant(model.nx(), model.nxi(), value);
  s.order = order;
  return s;
}

Symbol symbol_multiplier(const SpectralModel& model, const Vec& sigma, double order) {
  if (sigma.size() != model.nxi()) throw std::invalid_argument("symbol_multiplier: size mismatch");
  Symbol s;
  s.a.resize(model.nx(), model.nxi());
  for (Eigen::Index c = 0; c < model.nxi(); ++c) s.a.col(c).setConstant(sigma[c]);
  s.order = order;
  return s;
}

Symbol symbol_lambda(const SpectralModel& model) {
  Symbol s = symbol_multiplier(model, model.lambda, model.order_m);
  return s;
}

Symbol symbol_xfunction(const SpectralModel& model, const GridFunction& g) {
  if (g.size() != model.nx()) throw std::invalid_argument("symbol_xfunction: grid mismatch");
  Symbol s;
  s.a.resize(model.nx(), model.nxi());
  for (Eigen::Index c = 0; c < model.nxi(); ++c) s.a.col(c) = g;
  s.order = 0.0;
  return s;
}

Symbol symbol_weight_power(const SpectralModel& model, double mu) {
  Vec sigma(model.nxi());
  for (Eigen::Index c = 0; c < model.nxi(); ++c) sigma[c] = std::pow(model.weight[c], mu);
  return symbol_multiplier(model, sigma, mu);
}

OperatorMatrix op_from_symbol(const SpectralModel& model, const Symbol& a) {
  check_dims(model, a, "op_from_symbol");
  // A = (U ° a) V^H ; masked entries enter as zeros.
  return {masked_factor(model.U, a) * model.V.adjoint()};
}

Kernel kernel_of_symbol(const SpectralModel& model, const Symbol& a) {
  check_dims(model, a, "kernel_of_symbol");
  return {masked_factor(model.U, a) * model.V.adjoint()};
}

Kernel star_kernel_of_symbol(const SpectralModel& model, const Symbol& b) {
  check_dims(model, b, "star_kernel_of_symbol");
  return {masked_factor(model.V, b) * model.U.adjoint()};
}

Symbol symbol_of_operator(const SpectralModel& model, const OperatorMatrix& A, double eps) {
  return extract(model, A, model.U, eps);
}

Symbol star_symbol_of_operator(const SpectralModel& model, const OperatorMatrix& A, double eps) {
  return extract(model, A, model.V, eps);
}

OperatorMatrix op_from_amplitude(const SpectralModel& model, const Amplitude& amp) {
  if (static_cast<Eigen::Index>(amp.slices.size()) != model.nxi())
    throw std::invalid_argument("op_from_amplitude: slice count mismatch");
  const Eigen::Index n = model.nx();
  for (const Mat& s : amp.slices)
    if (s.rows() != n || s.cols() != n)
      throw std::invalid_argument("op_from_amplitude: slice dimension mismatch");
  OperatorMatrix out;
  out.A = Mat::Zero(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Eigen::Index ii = static_cast<Eigen::Index>(i);
      for (Eigen::Index c = 0; c < model.nxi(); ++c) {
        const cplx ux = model.U(ii, c);
        out.A.row(ii) += ux * model.V.col(c).adjoint().cwiseProduct(amp.slices[c].row(ii));
      }
    }
  });
  return out;
}

OperatorMatrix multiplier_op(const SpectralModel& model, const Vec& sigma, Flavor flavor) {
  if (sigma.size() != model.nxi()) throw std::invalid_argument("multiplier_op: size mismatch");
  const Mat& synth = (flavor == Flavor::Plain) ? model.U : model.V;
  const Mat& analyze = (flavor == Flavor::Plain) ? model.V : model.U;
  Mat f = synth;
  f.array().rowwise() *= sigma.transpose().array();
  return {f * analyze.adjoint()};
}

OperatorMatrix adjoint_op(const OperatorMatrix& A) { return {A.A.adjoint()}; }

OperatorMatrix compose_ops(const SpectralModel& model, const OperatorMatrix& A,
                           const OperatorMatrix& B) {
  if (A.A.cols() != B.A.rows()) throw std::invalid_argument("compose_ops: dimension mismatch");
  Mat wb = B.A;
  wb.array().colwise() *= model.grid.w.array().cast<cplx>();
  return {A.A * wb};
}

namespace {

// Block power iteration for the largest singular value of the map x -> fwd(x)
// with adjoint adj; both must already include the weight symmetrization.
double block_power_norm(Eigen::Index n, const std::function<Mat(const Mat&)>& fwd,
                        const std::function<Mat(const Mat&)>& adj, double tol, int max_iter) {
  constexpr int block = 4;
  ProbeRng rng(0x5eedf00dULL);
  Mat x(n, block);
  for (Eigen::Index j = 0; j < block; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = rng.cnormal();
  Eigen::HouseholderQR<Mat> qr(x);
  x = qr.householderQ() * Mat::Identity(n, block);

  double est = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Mat y = fwd(x);
    // x has orthonormal columns, so column norms of y estimate sigma_max
    const double cand = y.colwise().norm().maxCoeff();
    const Mat z = adj(y);
    Eigen::HouseholderQR<Mat> qr2(z);
    x = qr2.householderQ() * Mat::Identity(n, block);
    if (it > 2 && std::abs(cand - est) <= tol * std::max(1.0, cand)) {
      est = cand;
      break;
    }
    est = cand;
  }
  return est;
}

} // namespace

double weighted_operator_norm(const SpectralModel& model, const OperatorMatrix& A,
                              double tol, int max_iter) {
  // ||A||_w = ||S A W S^{-1}||_2 with S = diag(sqrt(w)); equivalently the
  // largest singular value of M = S A S.
  const Eigen::Index n = model.nx();
  const RVec s = model.grid.w.cwiseSqrt();
  Mat m = A.A;
  m.array().colwise() *= s.array().cast<cplx>();
  m.array().rowwise() *= s.transpose().array().cast<cplx>();
  return block_power_norm(
      n, [&](const Mat& x) { return Mat(m * x); },
      [&](const Mat& y) { return Mat(m.adjoint() * y); }, tol, max_iter);
}

double weighted_operator_norm(const SpectralModel& model,
                              const std::vector<const OperatorMatrix*>& chain,
                              double tol, int max_iter) {
  if (chain.empty()) throw std::invalid_argument("weighted_operator_norm: empty chain");
  const Eigen::Index n = model.nx();
  const RVec s = model.grid.w.cwiseSqrt();
  const RVec w = model.grid.w;
  // composite application matrix is A_0 W A_1 W ... A_k; symmetrized by S on
  // both sides. The product is never assembled.
  const auto fwd = [&](const Mat& x) {
    Mat v = x;
    v.array().colwise() *= s.array().cast<cplx>();
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      v = (*it)->A * v;
      if (std::next(it) != chain.rend()) v.array().colwise() *= w.array().cast<cplx>();
    }
    v.array().colwise() *= s.array().cast<cplx>();
    return v;
  };
  const auto adj = [&](const Mat& y) {
    Mat v = y;
    v.array().colwise() *= s.array().cast<cplx>();
    for (auto it = chain.begin(); it != chain.end(); ++it) {
      v = (*it)->A.adjoint() * v;
      if (std::next(it) != chain.end()) v.array().colwise() *= w.array().cast<cplx>();
    }
    v.array().colwise() *= s.array().cast<cplx>();
    return v;
  };
  return block_power_norm(n, fwd, adj, tol, max_iter);
}

OperatorMatrix band_projector(const SpectralModel& model) {
  return {model.U * model.V.adjoint()};
}

OperatorMatrix mode_restriction(const SpectralModel& model, long n0) {
  Vec sigma(model.nxi());
  for (Eigen::Index c = 0; c < model.nxi(); ++c)
    sigma[c] = (std::labs(model.xis.idx[static_cast<std::size_t>(c)]) >= n0) ? 1.0 : 0.0;
  return multiplier_op(model, sigma, Flavor::Plain);
}

AdmissibilityReport admissibility_diagnostic(const SpectralModel& model, const OperatorMatrix& A,
                                             double eps, double masked_threshold) {
  AdmissibilityReport rep;
  const Symbol s = symbol_of_operator(model, A, eps);
  rep.masked_fraction = s.masked_fraction();
  const OperatorMatrix back = op_from_symbol(model, s);
  const double scale = std::max(1e-300, A.A.cwiseAbs().maxCoeff());
  rep.resynthesis_error = (back.A - A.A).cwiseAbs().maxCoeff() / scale;
  rep.admissible = rep.masked_fraction < masked_threshold && rep.resynthesis_error < 1e-6;
  return rep;
}

} // namespace nonharm
