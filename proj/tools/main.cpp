#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nonharm/campaigns.hpp"
#include "nonharm/version.hpp"

namespace {

int write_and_grade(const nonharm::Report& rep, const nonharm::RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const std::string ext = (cfg.format == "json") ? ".json" : ".csv";
  const fs::path path = fs::path(cfg.out_dir) / (rep.suite() + ext);
  std::ofstream out(path);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    return 2;
  }
  if (cfg.format == "json")
    rep.write_json(out);
  else
    rep.write_csv(out);
  int fails = 0;
  for (const auto& row : rep.rows())
    if (row.status == nonharm::CheckStatus::Fail) ++fails;
  std::cout << rep.suite() << ": " << rep.rows().size() << " rows, " << fails
            << " failing -> " << path.string() << "\n";
  return rep.pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification campaigns for the biorthogonal operator calculus"};
  app.set_version_flag("--version", nonharm::kVersion);

  std::string config_path;
  std::string out_dir, format;
  std::uint64_t seed = 0;
  bool have_seed = false;
  app.add_option("--config", config_path, "run configuration (JSON)");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--format", format, "report format: csv | json (overrides config)");
  auto* seed_opt = app.add_option("--seed", seed, "probe seed (overrides config)");

  app.require_subcommand(1);
  auto* c_model = app.add_subcommand("model-verify", "spectral model invariants");
  auto* c_transform = app.add_subcommand("transform-verify", "transform identities");
  auto* c_calc = app.add_subcommand("calculus", "expansion campaigns");
  std::string calc_sub = "compose";
  c_calc->add_option("sub", calc_sub, "compose | adjoint | amp-reduce | classify")->required();
  auto* c_ell = app.add_subcommand("elliptic", "ellipticity and kernel campaigns");
  std::string ell_sub = "parametrix";
  c_ell->add_option("sub", ell_sub, "parametrix | kernel-decay | bounds | embed | singsupp")
      ->required();
  auto* c_oracle = app.add_subcommand("oracle", "oracle selftest");
  std::string oracle_sub = "selftest";
  c_oracle->add_option("sub", oracle_sub, "selftest");

  CLI11_PARSE(app, argc, argv);
  have_seed = seed_opt->count() > 0;

  try {
    nonharm::RunConfig cfg;
    if (!config_path.empty()) cfg = nonharm::config_from_json_file(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!format.empty()) cfg.format = format;
    if (have_seed) cfg.seed = seed;
    cfg.validate();

    if (c_model->parsed()) return write_and_grade(nonharm::campaign_model_verify(cfg), cfg);
    if (c_transform->parsed())
      return write_and_grade(nonharm::campaign_transform_verify(cfg), cfg);
    if (c_calc->parsed())
      return write_and_grade(nonharm::campaign_calculus(cfg, calc_sub), cfg);
    if (c_ell->parsed()) return write_and_grade(nonharm::campaign_elliptic(cfg, ell_sub), cfg);
    if (c_oracle->parsed()) {
      if (oracle_sub != "selftest") throw std::invalid_argument("oracle: unknown subcommand");
      return write_and_grade(nonharm::campaign_oracle_selftest(cfg), cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
