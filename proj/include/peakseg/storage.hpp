#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <vector>

#include "peakseg/piecewise.hpp"

namespace peakseg {

/// Cost functions C_{0,i} (background) and C_{1,i} (peak) for data index i.
/// The peak function is absent only at i = 1.
struct CostColumn {
  DataIndex index = 0;
  PiecewiseCost background;
  std::optional<PiecewiseCost> peak;
};

struct StoreStats {
  std::uint64_t total_pieces = 0;
  std::uint64_t functions_stored = 0;
  std::uint64_t max_pieces = 0;
  std::uint64_t bytes_written = 0;

  [[nodiscard]] double mean_pieces() const {
    return functions_stored == 0 ? 0.0
                                 : static_cast<double>(total_pieces) /
                                       static_cast<double>(functions_stored);
  }
  friend bool operator==(const StoreStats&, const StoreStats&) = default;
};

enum class StorageBackend { memory, disk };

/// Append-only store written during the forward pass and randomly read
/// during decoding. Reads are only valid after the last push.
class CostStore {
 public:
  virtual ~CostStore() = default;

  void push_column(const CostColumn& column);
  [[nodiscard]] PiecewiseCost get(DataIndex index, int state) const;
  [[nodiscard]] StoreStats stats() const;
  [[nodiscard]] DataIndex columns() const { return last_index_; }

  /// Number of columns currently held in process memory.
  [[nodiscard]] virtual std::size_t resident_columns() const = 0;

 protected:
  virtual void write_column(const CostColumn& column) = 0;
  [[nodiscard]] virtual PiecewiseCost read_function(DataIndex index, int state) const = 0;

  StoreStats stats_;

 private:
  DataIndex last_index_ = 0;
};

class MemoryCostStore final : public CostStore {
 public:
  [[nodiscard]] std::size_t resident_columns() const override { return columns_.size(); }

 private:
  void write_column(const CostColumn& column) override;
  [[nodiscard]] PiecewiseCost read_function(DataIndex index, int state) const override;

  std::vector<CostColumn> columns_;
};

/// Disk backend: cost.db holds the piece records, cost.idx one 8-byte
/// offset per (index, state). See piece_record_size for the layout.
class DiskCostStore final : public CostStore {
 public:
  explicit DiskCostStore(std::filesystem::path workdir, bool keep_files = false);
  ~DiskCostStore() override;
  DiskCostStore(const DiskCostStore&) = delete;
  DiskCostStore& operator=(const DiskCostStore&) = delete;

  [[nodiscard]] std::size_t resident_columns() const override { return 0; }
  [[nodiscard]] const std::filesystem::path& db_path() const { return db_path_; }
  [[nodiscard]] const std::filesystem::path& index_path() const { return idx_path_; }

  static constexpr std::size_t piece_record_size = 57;
  static constexpr std::size_t write_buffer_size = 1 << 16;

 private:
  void write_column(const CostColumn& column) override;
  [[nodiscard]] PiecewiseCost read_function(DataIndex index, int state) const override;
  void finish_writing() const;
  void append_function(const PiecewiseCost* f);

  std::filesystem::path db_path_;
  std::filesystem::path idx_path_;
  bool keep_files_;
  std::uint64_t db_offset_ = 0;
  mutable std::vector<char> db_buffer_;
  mutable std::vector<char> idx_buffer_;
  mutable std::ofstream db_out_;
  mutable std::ofstream idx_out_;
  mutable std::ifstream db_in_;
  mutable std::ifstream idx_in_;
  mutable bool reading_ = false;
};

std::unique_ptr<CostStore> make_store(StorageBackend backend,
                                      const std::filesystem::path& workdir,
                                      bool keep_files);

}  // namespace peakseg
