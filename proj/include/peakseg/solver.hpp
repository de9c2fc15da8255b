#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "peakseg/piecewise.hpp"
#include "peakseg/profile.hpp"
#include "peakseg/storage.hpp"

namespace peakseg {

inline constexpr double kInfinitePenalty = std::numeric_limits<double>::infinity();

enum class SegmentStatus { background, peak };

const char* to_string(SegmentStatus s);

struct Segment {
  DataIndex first = 1;  // 1-based row index
  DataIndex last = 1;
  double mean = 0.0;
  SegmentStatus status = SegmentStatus::background;
  std::uint64_t first_base = 0;  // chromStart of row `first`
  std::uint64_t last_base = 0;   // chromEnd of row `last`
};

struct SegmentModel {
  std::vector<Segment> segments;  // ascending position
  double penalty = 0.0;
  std::uint64_t equality_constraints = 0;

  [[nodiscard]] std::uint64_t peaks() const { return segments.size() / 2; }
};

struct LossSummary {
  double penalty = 0.0;
  std::uint64_t segments = 0;
  std::uint64_t peaks = 0;
  std::uint64_t bases = 0;
  double mean_pen_cost = 0.0;
  double total_loss = 0.0;
  std::uint64_t equality_constraints = 0;
  double mean_intervals = 0.0;
  std::uint64_t max_intervals = 0;
};

struct SolveConfig {
  double penalty = 0.0;
  StorageBackend storage_backend = StorageBackend::memory;
  std::filesystem::path workdir;  // disk backend; empty = fresh temp dir
  bool keep_cost_files = false;
};

struct SolveResult {
  SegmentModel model;
  LossSummary summary;
  /// Minimum of the final background cost function (loss + penalty * peaks).
  double objective = 0.0;
  StoreStats store_stats;
};

/// Optimal up-down constrained segmentation for one penalty via the
/// functional pruning dynamic program.
SolveResult gfpop_solve(const ProfileData& data, const SolveConfig& config);

/// Zero-peak model, computed in closed form.
SolveResult solve_infinite_penalty(const ProfileData& data);

/// Unpenalized Poisson loss of the model's segment means on the data.
double recompute_loss(const SegmentModel& model, const ProfileData& data);

/// Poisson loss of one segment with weighted count sum s, total weight w
/// and mean m: w*m - s*log(m), with 0*log(0) = 0.
double segment_loss(double weighted_sum, double weight, double mean);

/// Returns a description of the first violated structural invariant
/// (odd segment count, alternation, start/end background, up/down mean
/// directions within `tolerance`, exact tiling), or nullopt.
std::optional<std::string> check_model_structure(const SegmentModel& model,
                                                 const ProfileData& data,
                                                 double tolerance = 1e-9);

LossSummary summarize(const SegmentModel& model, const ProfileData& data, double total_loss,
                      double mean_intervals, std::uint64_t max_intervals);

/// Fresh, unique directory under the system temp dir (or $PEAKSEG_WORKDIR).
std::filesystem::path make_temp_workdir(const std::string& tag);

}  // namespace peakseg
