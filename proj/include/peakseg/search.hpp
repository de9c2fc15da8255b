#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "peakseg/solver.hpp"

namespace peakseg {

struct SearchIterate {
  std::uint64_t iteration = 0;
  std::optional<std::uint64_t> under;  // peaks of the lower-bound model
  std::optional<std::uint64_t> over;   // peaks of the upper-bound model
  double penalty = 0.0;
  std::uint64_t peaks = 0;
  double total_loss = 0.0;
  friend bool operator==(const SearchIterate&, const SearchIterate&) = default;
};

struct SearchResult {
  SolveResult solved;
  std::vector<SearchIterate> trace;
  bool exact = false;  // true iff the returned model has the target peak count
  /// Solver invocations, counting both extreme penalties.
  std::size_t solver_calls = 0;
};

/// Penalty where L_under + lambda*(p_under - P*) meets L_over + lambda*(p_over - P*).
double compute_next_penalty(double under_loss, std::uint64_t under_peaks, double over_loss,
                            std::uint64_t over_peaks);

/// Canonical penalty string used as a cache key: "Inf", or 17 significant
/// digits.
std::string penalty_key(double penalty);

/// Solves at one penalty; `key` is penalty_key(penalty).
using PenaltySolver = std::function<SolveResult(double penalty, const std::string& key)>;

/// Most likely model with at most target_peaks peaks, found by repeatedly
/// intersecting the affine lower-envelope pieces of the bounding models.
SearchResult sequential_search(std::int64_t target_peaks, const PenaltySolver& solve);

/// Convenience overload solving in process with the given storage settings
/// (config.penalty is ignored).
SearchResult sequential_search(const ProfileData& data, std::int64_t target_peaks,
                               const SolveConfig& config);

}  // namespace peakseg
