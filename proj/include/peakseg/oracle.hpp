#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "peakseg/profile.hpp"
#include "peakseg/solver.hpp"

// Exhaustive reference solver for tiny instances, used as ground truth.
namespace peakseg::oracle {

/// Sufficient statistics of one candidate segment.
struct Block {
  double weighted_sum = 0.0;  // sum of w*z
  double weight = 0.0;        // sum of w
};

enum class Direction { up, down };  // m_k <= m_{k+1} / m_k >= m_{k+1}

struct SegmentFit {
  std::vector<double> means;
  double loss = 0.0;
};

/// Exact constrained fit of segment means for a fixed segmentation, by
/// enumerating every subset of active (equality) constraints.
SegmentFit constrained_segment_fit(const std::vector<Block>& blocks,
                                   const std::vector<Direction>& directions);

struct OracleResult {
  double objective = 0.0;  // loss + penalty * peaks
  SegmentModel model;
  std::uint64_t enumerated = 0;
};

inline constexpr std::size_t kMaxRows = 14;

/// Enumerates all up-down segmentations with changes at row boundaries.
/// Throws UsageError when the profile has more than kMaxRows rows.
OracleResult brute_force_solve(const ProfileData& data, double penalty);

/// Objective value loss + penalty * peaks, treating an infinite penalty
/// with zero peaks as contributing nothing.
double penalized_objective(double loss, double penalty, std::uint64_t peaks);

struct SuiteInstance {
  std::size_t index = 0;
  ProfileData data;
  double penalty = 0.0;
};

/// Random instances: N in [2,12], counts in [0,5], weights in {1,2,3},
/// penalty in {0, 0.5, 1, 5, Inf}.
std::vector<SuiteInstance> random_suite(std::uint64_t seed, std::size_t count);

struct SuiteOutcome {
  std::size_t index = 0;
  std::size_t rows = 0;
  double penalty = 0.0;
  double solver_objective = 0.0;
  double oracle_objective = 0.0;
  bool objective_ok = false;
  bool cost_identity_ok = false;
  bool structure_ok = false;
  [[nodiscard]] bool passed() const { return objective_ok && cost_identity_ok && structure_ok; }
};

using SolverFn = std::function<SolveResult(const ProfileData&, double penalty)>;

/// Checks a solver against the oracle on every instance.
std::vector<SuiteOutcome> run_suite(const std::vector<SuiteInstance>& instances,
                                    const SolverFn& solver);

SolverFn default_solver();

}  // namespace peakseg::oracle
