#pragma once

#include <cstdint>

#include "peakseg/profile.hpp"

namespace peakseg {

/// Unit-width rows drawn from a piecewise-constant Poisson mean with
/// about sqrt(n) segments alternating between means 2 and 20.
ProfileData synthetic_profile(std::size_t n, std::uint64_t seed);

}  // namespace peakseg
