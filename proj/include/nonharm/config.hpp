#pragma once

#include <cstdint>
#include <string>

#include "nonharm/differences.hpp"

namespace nonharm {

/// Tolerances used by the campaign drivers. The defaults below are the
/// single authoritative table; campaign code never hardcodes its own.
struct Tolerances {
  double biorth = 1e-8;          // || Gram - I ||_max
  double eig = 1e-6;             // relative eigen-residuals
  double roundtrip = 1e-8;       // transform and quantization round trips
  double entrywise = 1e-10;      // identities that hold up to rounding
  double mask_eps = 1e-6;        // zero-set policy threshold (relative)
  double masked_fraction = 0.2;  // admissibility diagnostic cutoff
  double exponent = 0.3;         // slack on fitted decay exponents
  double stability = 0.05;       // relative drift allowed under probe doubling
  double leakage = 0.05;         // band-projection leakage of q * K
};

struct ModelConfig {
  std::string model = "h-model";  // h-model | dirichlet | periodic
  double h = 2.0;
  long xi_max = 64;
  Eigen::Index nodes = 2048;
  std::string quadrature = "gauss";  // gauss | uniform
  double m = 0.0;                    // 0 = model default (true order of L)
  double s0 = 0.0;                   // 0 = model default
};

struct DifferenceConfig {
  std::string family = "exp_diff";  // exp_diff | poly_diff
  int alpha_max = 4;
  int beta_max = 4;
};

struct RunConfig {
  ModelConfig model;
  DifferenceConfig difference;
  double rho = 1.0;
  double delta = 0.0;
  int terms = 3;
  int probes = 32;
  std::uint64_t seed = 20240915;
  Tolerances tol;
  std::string out_dir = "out";
  std::string format = "csv";  // csv | json

  void validate() const;  // throws std::invalid_argument on bad settings
  std::string to_json_string() const;

  SpectralModel build_model() const;
  DifferenceFamily build_family(const SpectralModel&) const;
};

RunConfig config_from_json_file(const std::string& path);
RunConfig config_from_json_string(const std::string& text);

} // namespace nonharm
