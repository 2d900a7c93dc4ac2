#include "nonharm/transform.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nonharm/rng.hpp"

namespace nonharm {

namespace {

Vec analyze(const SpectralModel& model, const Mat& family, const GridFunction& f) {
  if (f.size() != model.nx()) throw std::invalid_argument("transform: grid mismatch");
  Vec wf = f;
  wf.array() *= model.grid.w.array().cast<cplx>();
  return family.adjoint() * wf;
}

void expect_flavor(const CoefficientVector& a, Flavor want, const char* who) {
  if (a.flavor != want) throw std::invalid_argument(std::string(who) + ": wrong coefficient flavor");
}

} // namespace

CoefficientVector forward(const SpectralModel& model, const GridFunction& f) {
  return {analyze(model, model.V, f), Flavor::Plain};
}

CoefficientVector forward_star(const SpectralModel& model, const GridFunction& f) {
  return {analyze(model, model.U, f), Flavor::Star};
}

GridFunction inverse(const SpectralModel& model, const CoefficientVector& a) {
  expect_flavor(a, Flavor::Plain, "inverse");
  if (a.a.size() != model.nxi()) throw std::invalid_argument("inverse: index set mismatch");
  return model.U * a.a;
}

GridFunction inverse_star(const SpectralModel& model, const CoefficientVector& a) {
  expect_flavor(a, Flavor::Star, "inverse_star");
  if (a.a.size() != model.nxi()) throw std::invalid_argument("inverse_star: index set mismatch");
  return model.V * a.a;
}

cplx inner_l2L(const SpectralModel& model, const CoefficientVector& a,
               const CoefficientVector& b) {
  expect_flavor(a, Flavor::Plain, "inner_l2L");
  expect_flavor(b, Flavor::Plain, "inner_l2L");
  const GridFunction g = inverse(model, b);
  const CoefficientVector gs = forward_star(model, g);
  Vec terms = a.a.cwiseProduct(gs.a.conjugate());
  return kahan_sum(terms.data(), static_cast<std::size_t>(terms.size()));
}

cplx inner_l2L_star(const SpectralModel& model, const CoefficientVector& a,
                    const CoefficientVector& b) {
  expect_flavor(a, Flavor::Star, "inner_l2L_star");
  expect_flavor(b, Flavor::Star, "inner_l2L_star");
  const GridFunction g = inverse_star(model, b);
  const CoefficientVector gh = forward(model, g);
  Vec terms = a.a.cwiseProduct(gh.a.conjugate());
  return kahan_sum(terms.data(), static_cast<std::size_t>(terms.size()));
}

ParsevalReport parseval_check(const SpectralModel& model, const GridFunction& f,
                              const GridFunction& g) {
  ParsevalReport rep;
  const cplx lhs = model.inner(f, g);
  const CoefficientVector fh = forward(model, f);
  const CoefficientVector gh_star = forward_star(model, g);
  Vec terms = fh.a.cwiseProduct(gh_star.a.conjugate());
  const cplx rhs = kahan_sum(terms.data(), static_cast<std::size_t>(terms.size()));
  rep.mismatch = std::abs(lhs - rhs);

  const CoefficientVector fh_star = forward_star(model, f);
  Vec nterms = fh.a.cwiseProduct(fh_star.a.conjugate());
  const cplx sq = kahan_sum(nterms.data(), static_cast<std::size_t>(nterms.size()));
  rep.norm_l2 = model.norm(f);
  rep.norm_seq = std::sqrt(std::max(0.0, sq.real()));
  rep.norm_seq_star = std::sqrt(std::max(0.0, std::conj(sq).real()));
  rep.max_norm_dev = std::max({std::abs(rep.norm_l2 - rep.norm_seq),
                               std::abs(rep.norm_l2 - rep.norm_seq_star),
                               std::abs(rep.norm_seq - rep.norm_seq_star)});
  return rep;
}

double lp_norm(const SpectralModel& model, const CoefficientVector& a, double p) {
  if (p < 1.0) throw std::invalid_argument("lp_norm: p < 1");
  if (a.a.size() != model.nxi()) throw std::invalid_argument("lp_norm: index set mismatch");
  // plain flavor weighs with ||u||_inf below p=2 and ||v||_inf above;
  // star flavor mirrors the two families.
  const bool plain = a.flavor == Flavor::Plain;
  const Mat& low_family = plain ? model.U : model.V;
  const Mat& high_family = plain ? model.V : model.U;
  if (std::isinf(p)) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < a.a.size(); ++c)
      s = std::max(s, std::abs(a.a[c]) / high_family.col(c).cwiseAbs().maxCoeff());
    return s;
  }
  const Mat& family = (p <= 2.0) ? low_family : high_family;
  std::vector<double> terms(static_cast<std::size_t>(a.a.size()));
  for (Eigen::Index c = 0; c < a.a.size(); ++c) {
    const double sup = family.col(c).cwiseAbs().maxCoeff();
    terms[static_cast<std::size_t>(c)] =
        std::pow(std::abs(a.a[c]), p) * std::pow(sup, 2.0 - p);
  }
  return std::pow(kahan_sum(terms.data(), terms.size()), 1.0 / p);
}

HausdorffYoungReport hausdorff_young_check(const SpectralModel& model, double p,
                                           int probe_count, std::uint64_t seed) {
  if (p < 1.0 || p > 2.0) throw std::invalid_argument("hausdorff_young: need 1 <= p <= 2");
  if (probe_count < 1) throw std::invalid_argument("hausdorff_young: empty probe set");
  const double pc = (p == 1.0) ? std::numeric_limits<double>::infinity() : p / (p - 1.0);

  ProbeRng rng(seed);
  const auto ratio_of = [&](const GridFunction& f) {
    const double den = model.lp_grid_norm(f, p);
    if (den == 0.0) return 0.0;
    return lp_norm(model, forward(model, f), pc) / den;
  };

  // Single modes are the extremal inputs (they saturate the bound for
  // orthonormal systems); random decaying probes cover the rest.
  double best = 0.0;
  for (long xi : {0L, 1L, -2L, 5L}) {
    const Eigen::Index c = model.xis.position(xi);
    if (c >= 0) best = std::max(best, ratio_of(model.U.col(c)));
  }
  HausdorffYoungReport rep;
  rep.p = p;
  rep.probes = probe_count;
  double after_half = best;
  for (int i = 0; i < 2 * probe_count; ++i) {
    const Vec c = rng.coefficients(model.weight, 2.0);
    best = std::max(best, ratio_of(model.U * c));
    if (i == probe_count - 1) after_half = best;
  }
  rep.constant = after_half;
  rep.constant_doubled = best;
  rep.stable = std::isfinite(best) && (best - after_half) <= 0.05 * after_half;
  return rep;
}

double sobolev_norm(const SpectralModel& model, const GridFunction& f, double s,
                    bool* imag_warning) {
  const CoefficientVector fh = forward(model, f);
  const CoefficientVector fh_star = forward_star(model, f);
  std::vector<cplx> terms(static_cast<std::size_t>(model.nxi()));
  for (Eigen::Index c = 0; c < model.nxi(); ++c)
    terms[static_cast<std::size_t>(c)] =
        std::pow(model.weight[c], 2.0 * s) * fh.a[c] * std::conj(fh_star.a[c]);
  const cplx total = kahan_sum(terms.data(), terms.size());
  const double scale = std::max(1.0, std::abs(total.real()));
  if (imag_warning) *imag_warning = std::abs(total.imag()) > 1e-10 * scale;
  if (total.real() < -1e-10 * scale)
    throw std::runtime_error("sobolev_norm: negative total beyond tolerance");
  return std::sqrt(std::max(0.0, total.real()));
}

} // namespace nonharm
