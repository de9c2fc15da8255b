#include "peakseg/profile.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <string_view>

#include "peakseg/errors.hpp"

namespace peakseg {

namespace {

[[noreturn]] void fail_at(std::size_t line, const std::string& what) {
  throw InputError("line " + std::to_string(line) + ": " + what);
}

template <typename T>
bool parse_unsigned(std::string_view field, T& out) {
  if (field.empty()) return false;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return fields;
}

}  // namespace

ProfileData::ProfileData(std::string chrom, std::vector<CoverageRow> rows)
    : chrom_(std::move(chrom)), rows_(std::move(rows)) {
  if (rows_.empty()) throw InputError("profile has no rows");
  min_count_ = rows_.front().count;
  max_count_ = rows_.front().count;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const CoverageRow& r = rows_[i];
    if (r.chrom_start >= r.chrom_end) {
      throw InputError("row " + std::to_string(i + 1) + ": chromStart must be < chromEnd");
    }
    if (i > 0 && rows_[i - 1].chrom_end != r.chrom_start) {
      throw InputError("row " + std::to_string(i + 1) + ": gap or overlap with previous row");
    }
    min_count_ = std::min(min_count_, r.count);
    max_count_ = std::max(max_count_, r.count);
    bases_ += r.weight();
    weighted_sum_ += static_cast<double>(r.weight()) * r.count;
  }
}

ProfileData parse_bedgraph(std::istream& in) {
  std::string chrom;
  std::vector<CoverageRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) fail_at(line_no, "empty line");
    const auto fields = split_tabs(line);
    if (fields.size() != 4) {
      fail_at(line_no, "expected 4 tab-separated columns, found " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) fail_at(line_no, "empty chromosome name");
    if (rows.empty()) {
      chrom = std::string(fields[0]);
    } else if (fields[0] != chrom) {
      fail_at(line_no, "multiple chromosomes (" + chrom + ", " + std::string(fields[0]) + ")");
    }
    CoverageRow row;
    if (!parse_unsigned(fields[1], row.chrom_start) || row.chrom_start >> 63) {
      fail_at(line_no, "invalid chromStart '" + std::string(fields[1]) + "'");
    }
    if (!parse_unsigned(fields[2], row.chrom_end) || row.chrom_end >> 63) {
      fail_at(line_no, "invalid chromEnd '" + std::string(fields[2]) + "'");
    }
    if (!fields[3].empty() && fields[3].front() == '-') {
      fail_at(line_no, "negative count '" + std::string(fields[3]) + "'");
    }
    if (!parse_unsigned(fields[3], row.count)) {
      fail_at(line_no, "count must be a non-negative integer, got '" + std::string(fields[3]) + "'");
    }
    if (row.chrom_start >= row.chrom_end) fail_at(line_no, "chromStart must be < chromEnd");
    if (!rows.empty()) {
      CoverageRow& prev = rows.back();
      if (prev.chrom_end != row.chrom_start) {
        fail_at(line_no, "gap or overlap: previous row ends at " +
                             std::to_string(prev.chrom_end) + ", this row starts at " +
                             std::to_string(row.chrom_start));
      }
      if (prev.count == row.count) {
        prev.chrom_end = row.chrom_end;
        continue;
      }
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw InputError("line 0: empty bedGraph input");
  return ProfileData(std::move(chrom), std::move(rows));
}

ProfileData read_bedgraph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open bedGraph file " + path);
  try {
    return parse_bedgraph(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

ProfileData profile_from_counts(const std::vector<std::uint32_t>& counts,
                                const std::vector<std::uint64_t>& weights) {
  if (!weights.empty() && weights.size() != counts.size()) {
    throw InputError("counts and weights differ in length");
  }
  std::vector<CoverageRow> rows;
  rows.reserve(counts.size());
  std::uint64_t pos = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::uint64_t w = weights.empty() ? 1 : weights[i];
    rows.push_back({pos, pos + w, counts[i]});
    pos += w;
  }
  return ProfileData("chr1", std::move(rows));
}

}  // namespace peakseg
