#pragma once

#include <cstdint>
#include <random>

#include "nonharm/common.hpp"

namespace nonharm {

/// Seeded probe generator. Gaussians come from Box-Muller on raw mt19937_64
/// output so the stream is identical across standard libraries.
class ProbeRng {
 public:
  explicit ProbeRng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // (0,1]
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    have_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }

  cplx cnormal() {
    const double re = normal();
    const double im = normal();
    return cplx(re, im) / std::sqrt(2.0);
  }

  /// Coefficient vector z_xi * weight_xi^{-decay}; decay 0 gives a flat
  /// band-limited probe.
  Vec coefficients(const RVec& weight, double decay) {
    Vec c(weight.size());
    for (Eigen::Index i = 0; i < weight.size(); ++i)
      c[i] = cnormal() * std::pow(weight[i], -decay);
    return c;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

} // namespace nonharm
