#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace peakseg {

/// One bedGraph row: count observed on every base of [chrom_start, chrom_end).
struct CoverageRow {
  std::uint64_t chrom_start = 0;
  std::uint64_t chrom_end = 0;
  std::uint32_t count = 0;

  [[nodiscard]] std::uint64_t weight() const { return chrom_end - chrom_start; }
  friend bool operator==(const CoverageRow&, const CoverageRow&) = default;
};

/// Run-length encoded coverage profile on a single chromosome. Rows are
/// contiguous: each row starts where the previous one ends.
class ProfileData {
 public:
  ProfileData() = default;

  /// Validates contiguity and ordering; throws InputError. Rows are kept
  /// as given (no coalescing).
  ProfileData(std::string chrom, std::vector<CoverageRow> rows);

  [[nodiscard]] const std::string& chrom() const { return chrom_; }
  [[nodiscard]] const std::vector<CoverageRow>& rows() const { return rows_; }
  [[nodiscard]] std::size_t size() const { return rows_.size(); }
  [[nodiscard]] bool empty() const { return rows_.empty(); }

  [[nodiscard]] double count(std::size_t i) const { return rows_[i].count; }
  [[nodiscard]] double weight(std::size_t i) const {
    return static_cast<double>(rows_[i].weight());
  }
  [[nodiscard]] std::uint32_t min_count() const { return min_count_; }
  [[nodiscard]] std::uint32_t max_count() const { return max_count_; }
  [[nodiscard]] std::uint64_t bases() const { return bases_; }
  [[nodiscard]] double weighted_sum() const { return weighted_sum_; }

  friend bool operator==(const ProfileData& a, const ProfileData& b) {
    return a.chrom_ == b.chrom_ && a.rows_ == b.rows_;
  }

 private:
  std::string chrom_;
  std::vector<CoverageRow> rows_;
  std::uint32_t min_count_ = 0;
  std::uint32_t max_count_ = 0;
  std::uint64_t bases_ = 0;
  double weighted_sum_ = 0.0;
};

/// Parses 4-column tab-separated bedGraph text. Adjacent rows with equal
/// counts are merged. Errors carry the offending line number.
ProfileData parse_bedgraph(std::istream& in);
ProfileData read_bedgraph(const std::string& path);

/// Builds a profile of unit-width rows starting at base 0.
ProfileData profile_from_counts(const std::vector<std::uint32_t>& counts,
                                const std::vector<std::uint64_t>& weights = {});

}  // namespace peakseg
