#pragma once

#include "okdrop/okenergy.hpp"

#include <cstdint>

namespace okdrop {

// epsilon = 1e-6 on a torus of side 30 (blown-up side about 111, default r0 = 1/4).
ModelParams cluster_params();

// 1 to 4 droplets (disks, ellipses, convex quadrilaterals) with A_i in
// [beta, 3 pi rbar^2], packed within about 0.3 blown-up units of a common point.
DropletConfig random_cluster(std::uint64_t seed);

} // namespace okdrop
