#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "peakseg/storage.hpp"

namespace peakseg {

struct BenchRow {
  std::size_t n = 0;
  double penalty = 0.0;
  StorageBackend backend = StorageBackend::memory;
  double seconds = 0.0;
  double mean_intervals = 0.0;
  std::uint64_t max_intervals = 0;
  std::uint64_t bytes_on_disk = 0;
  std::uint64_t peaks = 0;
};

struct BenchOptions {
  std::vector<std::size_t> sizes = {1000, 10000, 100000};
  std::size_t penalties_per_size = 8;
  std::uint64_t seed = 1;
  std::filesystem::path workdir;  // empty = temp dir
};

/// Log-spaced penalties strictly inside (log n, n).
std::vector<double> penalty_grid(std::size_t n, std::size_t count);

/// Solves synthetic data of each size over the penalty grid with both
/// storage backends.
std::vector<BenchRow> run_benchmark(const BenchOptions& options);

/// Columns: N, penalty, backend, seconds, mean.intervals, max.intervals,
/// bytes.on.disk.
void write_bench(const std::vector<BenchRow>& rows, std::ostream& out);

}  // namespace peakseg
