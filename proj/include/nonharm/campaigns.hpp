#pragma once

#include "nonharm/config.hpp"
#include "nonharm/elliptic.hpp"
#include "nonharm/report.hpp"

namespace nonharm {

Report campaign_model_verify(const RunConfig& cfg);
Report campaign_transform_verify(const RunConfig& cfg);

/// sub: compose | adjoint | amp-reduce | classify
Report campaign_calculus(const RunConfig& cfg, const std::string& sub);

/// sub: parametrix | kernel-decay | bounds | embed | singsupp
Report campaign_elliptic(const RunConfig& cfg, const std::string& sub);

Report campaign_oracle_selftest(const RunConfig& cfg);

} // namespace nonharm
