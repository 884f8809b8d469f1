#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vmblab/fluid.hpp"

namespace vmblab {

// Named fluid initial data: shear, taylor_green_like, single_mode_sigma, random_small.
// Velocities are odd and scalars even under x -> -x, so the box integral of sigma u
// vanishes for all time. random_small is band-limited to |k| <= 2 and scaled so
// each nonzero field has max |value| = amplitude.
FluidState initial_fluid(const std::string& name, double amplitude, std::uint64_t seed, const GridPtr& g,
                         Corrections* corr = nullptr);

const std::vector<std::string>& initializer_names();

}  // namespace vmblab
