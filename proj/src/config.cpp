#include "nonharm/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace nonharm {

using nlohmann::json;

void RunConfig::validate() const {
  if (model.model != "h-model" && model.model != "dirichlet" && model.model != "periodic")
    throw std::invalid_argument("config: unknown model '" + model.model + "'");
  if (model.model == "h-model" && !(model.h > 0.0))
    throw std::invalid_argument("config: h must be positive");
  if (model.xi_max < 1) throw std::invalid_argument("config: xi_max must be >= 1");
  if (model.nodes < 4 * model.xi_max)
    throw std::invalid_argument("config: nodes below the 4*xi_max resolution guard");
  if (model.quadrature != "gauss" && model.quadrature != "uniform")
    throw std::invalid_argument("config: unknown quadrature '" + model.quadrature + "'");
  if (model.quadrature == "uniform" && model.model != "periodic")
    throw std::invalid_argument("config: the uniform rule is only valid for the periodic model");
  if (difference.family != "exp_diff" && difference.family != "poly_diff")
    throw std::invalid_argument("config: unknown difference family '" + difference.family + "'");
  if (difference.alpha_max < 1 || difference.beta_max < 1)
    throw std::invalid_argument("config: alpha_max and beta_max must be >= 1");
  if (!(rho >= 0.0 && rho <= 1.0 && delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("config: (rho, delta) must lie in [0,1]^2");
  if (terms < 1) throw std::invalid_argument("config: terms must be >= 1");
  if (probes < 1) throw std::invalid_argument("config: probes must be >= 1");
  if (format != "csv" && format != "json")
    throw std::invalid_argument("config: format must be csv or json");
}

SpectralModel RunConfig::build_model() const {
  const QuadKind kind = (model.quadrature == "uniform") ? QuadKind::Uniform : QuadKind::GaussLegendre;
  Grid grid = make_grid(kind, model.nodes);
  const double s0 = (model.s0 > 0.0) ? model.s0 : 2.0;
  if (model.model == "h-model") {
    const double m = (model.m > 0.0) ? model.m : 1.0;
    return build_h_model(model.h, model.xi_max, std::move(grid), m, s0);
  }
  if (model.model == "dirichlet") {
    const double m = (model.m > 0.0) ? model.m : 2.0;
    return build_dirichlet_model(model.xi_max, std::move(grid), m, s0);
  }
  const double m = (model.m > 0.0) ? model.m : 1.0;
  return build_periodic_model(model.xi_max, std::move(grid), m, s0);
}

DifferenceFamily RunConfig::build_family(const SpectralModel& m) const {
  const FamilyKind kind =
      (difference.family == "poly_diff") ? FamilyKind::PolyDiff : FamilyKind::ExpDiff;
  return make_family(kind, m.grid);
}

namespace {

json to_json(const RunConfig& c) {
  return json{
      {"model",
       {{"model", c.model.model},
        {"h", c.model.h},
        {"xi_max", c.model.xi_max},
        {"nodes", c.model.nodes},
        {"quadrature", c.model.quadrature},
        {"m", c.model.m},
        {"s0", c.model.s0}}},
      {"difference",
       {{"family", c.difference.family},
        {"alpha_max", c.difference.alpha_max},
        {"beta_max", c.difference.beta_max}}},
      {"rho", c.rho},
      {"delta", c.delta},
      {"terms", c.terms},
      {"probes", c.probes},
      {"seed", c.seed},
      {"tolerances",
       {{"biorth", c.tol.biorth},
        {"eig", c.tol.eig},
        {"roundtrip", c.tol.roundtrip},
        {"entrywise", c.tol.entrywise},
        {"mask_eps", c.tol.mask_eps},
        {"masked_fraction", c.tol.masked_fraction},
        {"exponent", c.tol.exponent},
        {"stability", c.tol.stability},
        {"leakage", c.tol.leakage}}},
      {"out", c.out_dir},
      {"format", c.format}};
}

template <class T>
void maybe(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

RunConfig from_json(const json& j) {
  RunConfig c;
  if (j.contains("model")) {
    const json& m = j.at("model");
    maybe(m, "model", c.model.model);
    maybe(m, "h", c.model.h);
    maybe(m, "xi_max", c.model.xi_max);
    long nodes = static_cast<long>(c.model.nodes);
    maybe(m, "nodes", nodes);
    c.model.nodes = nodes;
    maybe(m, "quadrature", c.model.quadrature);
    maybe(m, "m", c.model.m);
    maybe(m, "s0", c.model.s0);
  }
  if (j.contains("difference")) {
    const json& d = j.at("difference");
    maybe(d, "family", c.difference.family);
    maybe(d, "alpha_max", c.difference.alpha_max);
    maybe(d, "beta_max", c.difference.beta_max);
  }
  maybe(j, "rho", c.rho);
  maybe(j, "delta", c.delta);
  maybe(j, "terms", c.terms);
  maybe(j, "probes", c.probes);
  maybe(j, "seed", c.seed);
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    maybe(t, "biorth", c.tol.biorth);
    maybe(t, "eig", c.tol.eig);
    maybe(t, "roundtrip", c.tol.roundtrip);
    maybe(t, "entrywise", c.tol.entrywise);
    maybe(t, "mask_eps", c.tol.mask_eps);
    maybe(t, "masked_fraction", c.tol.masked_fraction);
    maybe(t, "exponent", c.tol.exponent);
    maybe(t, "stability", c.tol.stability);
    maybe(t, "leakage", c.tol.leakage);
  }
  maybe(j, "out", c.out_dir);
  maybe(j, "format", c.format);
  return c;
}

} // namespace

std::string RunConfig::to_json_string() const { return to_json(*this).dump(); }

RunConfig config_from_json_string(const std::string& text) {
  return from_json(json::parse(text));
}

RunConfig config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  json j;
  in >> j;
  return from_json(j);
}

} // namespace nonharm
