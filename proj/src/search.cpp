#include "peakseg/search.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <stdexcept>

#include "peakseg/errors.hpp"

namespace peakseg {

double compute_next_penalty(double under_loss, std::uint64_t under_peaks, double over_loss,
                            std::uint64_t over_peaks) {
  if (over_peaks == under_peaks) {
    throw UsageError("compute_next_penalty: bounding models have equal peak counts");
  }
  if (over_peaks < under_peaks) {
    throw UsageError("compute_next_penalty: over_peaks must exceed under_peaks");
  }
  const double lambda = (over_loss - under_loss) /
                        (static_cast<double>(under_peaks) - static_cast<double>(over_peaks));
  return lambda == 0.0 ? 0.0 : lambda;
}

std::string penalty_key(double penalty) {
  if (std::isinf(penalty)) return "Inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", penalty);
  return buf;
}

SearchResult sequential_search(std::int64_t target_peaks, const PenaltySolver& solve) {
  if (target_peaks < 0) throw InputError("target peaks must be non-negative");
  const auto target = static_cast<std::uint64_t>(target_peaks);

  SearchResult result;
  // The two extreme penalties are independent; the infinite one is trivial.
  auto max_future = std::async(std::launch::async, [&] { return solve(0.0, penalty_key(0.0)); });
  SolveResult zero_peaks = solve(kInfinitePenalty, penalty_key(kInfinitePenalty));
  SolveResult max_peaks = max_future.get();
  result.solver_calls = 2;
  result.trace.push_back({1, std::nullopt, std::nullopt, 0.0, max_peaks.summary.peaks,
                          max_peaks.summary.total_loss});
  result.trace.push_back({1, std::nullopt, std::nullopt, kInfinitePenalty,
                          zero_peaks.summary.peaks, zero_peaks.summary.total_loss});

  if (target == 0) {
    result.solved = std::move(zero_peaks);
    result.exact = true;
    return result;
  }
  if (target >= max_peaks.summary.peaks) {
    result.exact = target == max_peaks.summary.peaks;
    result.solved = std::move(max_peaks);
    return result;
  }

  SolveResult under = std::move(zero_peaks);
  SolveResult over = std::move(max_peaks);
  for (std::uint64_t iteration = 2;; ++iteration) {
    const std::uint64_t p_under = under.summary.peaks;
    const std::uint64_t p_over = over.summary.peaks;
    const double lambda =
        compute_next_penalty(under.summary.total_loss, p_under, over.summary.total_loss, p_over);
    if (!(lambda >= 0.0) || std::isinf(lambda)) {
      throw std::logic_error("sequential search computed invalid penalty " + penalty_key(lambda));
    }
    SolveResult next = solve(lambda, penalty_key(lambda));
    ++result.solver_calls;
    const std::uint64_t p_new = next.summary.peaks;
    result.trace.push_back(
        {iteration, p_under, p_over, lambda, p_new, next.summary.total_loss});

    if (p_new == p_under || p_new == p_over) {
      result.solved = std::move(under);
      result.exact = false;
      return result;
    }
    if (p_new == target) {
      result.solved = std::move(next);
      result.exact = true;
      return result;
    }
    if (p_new < p_under || p_new > p_over) {
      throw std::logic_error("sequential search iterate with " + std::to_string(p_new) +
                             " peaks lies outside the bounds (" + std::to_string(p_under) + ", " +
                             std::to_string(p_over) + ")");
    }
    if (p_new < target) {
      under = std::move(next);
    } else {
      over = std::move(next);
    }
  }
}

SearchResult sequential_search(const ProfileData& data, std::int64_t target_peaks,
                               const SolveConfig& config) {
  const PenaltySolver solve = [&](double penalty, const std::string& key) {
    SolveConfig c = config;
    c.penalty = penalty;
    if (c.storage_backend == StorageBackend::disk && !c.workdir.empty()) {
      c.workdir = config.workdir / ("penalty=" + key);
    }
    return gfpop_solve(data, c);
  };
  return sequential_search(target_peaks, solve);
}

}  // namespace peakseg
