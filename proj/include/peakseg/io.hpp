#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "peakseg/profile.hpp"
#include "peakseg/search.hpp"
#include "peakseg/solver.hpp"

namespace peakseg {

/// Shortest representation that parses back to the same double; "Inf"
/// for infinity. Locale independent.
std::string format_number(double x);

/// Inverse of format_number (also accepts "Inf"). Throws InputError.
double parse_number(std::string_view text);

/// Parses a user-supplied penalty: a non-negative decimal or "Inf".
double parse_penalty(const std::string& text);

// Segment table: header line, then chrom, chromStart, chromEnd, status, mean.
void write_segments(const SegmentModel& model, const ProfileData& data,
                    const std::filesystem::path& path);
void write_segments(const SegmentModel& model, const ProfileData& data, std::ostream& out);
/// Reconstructs a model from a segments table; throws InputError when the
/// table is malformed or does not tile `data`.
SegmentModel read_segments(const std::filesystem::path& path, const ProfileData& data,
                           double penalty);

// Loss table: header plus one row.
void write_loss(const LossSummary& summary, const std::filesystem::path& path);
void write_loss(const LossSummary& summary, std::ostream& out, bool header = true);
LossSummary read_loss(const std::filesystem::path& path);

// Trace table: iteration, under, over, penalty, peaks, total.loss ("NA" for
// missing bounds).
void write_trace(const std::vector<SearchIterate>& trace, const std::filesystem::path& path);
void write_trace(const std::vector<SearchIterate>& trace, std::ostream& out);
std::vector<SearchIterate> read_trace(const std::filesystem::path& path);

struct CachePaths {
  std::filesystem::path loss;
  std::filesystem::path segments;
};

/// `<data>_penalty=<penalty_string>_loss.tsv` and `..._segments.tsv`.
CachePaths cache_paths(const std::filesystem::path& data_path, const std::string& penalty_string);

struct CachedSolve {
  SolveResult solved;
  bool cache_hit = false;
};

/// Reads the cached result for penalty_string when its files exist and are
/// consistent with each other and with the data; otherwise solves and
/// (re)writes them. Not safe to call concurrently for the same path and key.
CachedSolve cached_solve(const std::filesystem::path& data_path, const std::string& penalty_string,
                         const SolveConfig& config);
CachedSolve cached_solve(const std::filesystem::path& data_path, const ProfileData& data,
                         const std::string& penalty_string, const SolveConfig& config);

}  // namespace peakseg
