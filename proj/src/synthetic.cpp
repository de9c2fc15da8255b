#include "peakseg/synthetic.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "peakseg/errors.hpp"

namespace peakseg {

ProfileData synthetic_profile(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InputError("synthetic profile needs at least one row");
  constexpr double kBackgroundMean = 2.0;
  constexpr double kPeakMean = 20.0;
  const std::size_t segments =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(double(n)))));

  std::mt19937_64 rng(seed);
  std::poisson_distribution<std::uint32_t> background(kBackgroundMean);
  std::poisson_distribution<std::uint32_t> peak(kPeakMean);
  std::vector<std::uint32_t> counts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t segment = i * segments / n;
    counts[i] = segment % 2 == 0 ? background(rng) : peak(rng);
  }
  return profile_from_counts(counts);
}

}  // namespace peakseg
