#include "peakseg/storage.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <string>
#include <system_error>

#include "peakseg/errors.hpp"

namespace peakseg {

namespace {

constexpr std::array<char, 5> kMagic = {'G', 'F', 'P', 'C', '\x01'};
constexpr std::uint8_t kEqualityFlag = 0x01;

void put_u64(std::vector<char>& buf, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) buf.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

void put_u32(std::vector<char>& buf, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) buf.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

void put_f64(std::vector<char>& buf, double v) { put_u64(buf, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int k = 7; k >= 0; --k) v = (v << 8) | p[k];
  return v;
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int k = 3; k >= 0; --k) v = (v << 8) | p[k];
  return v;
}

double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_u64(p)); }

std::uint64_t serialized_size(const PiecewiseCost* f) {
  return 4 + (f == nullptr ? 0 : f->size() * DiskCostStore::piece_record_size);
}

void check_state(DataIndex index, int state) {
  if (state != 0 && state != 1) {
    throw LookupError("invalid state " + std::to_string(state) + " (expected 0 or 1)");
  }
  if (index == 1 && state == 1) {
    throw LookupError("peak state is undefined at data index 1");
  }
}

}  // namespace

void CostStore::push_column(const CostColumn& column) {
  if (column.index != last_index_ + 1) {
    throw UsageError("columns must be pushed in order: expected index " +
                     std::to_string(last_index_ + 1) + ", got " + std::to_string(column.index));
  }
  if (column.background.empty()) throw UsageError("background cost function is empty");
  if (column.index > 1 && !column.peak) {
    throw UsageError("peak cost function missing at index " + std::to_string(column.index));
  }
  if (column.index == 1 && column.peak) throw UsageError("no peak cost function at index 1");
  write_column(column);
  last_index_ = column.index;

  const auto record = [&](const PiecewiseCost& f) {
    stats_.total_pieces += f.size();
    stats_.functions_stored += 1;
    stats_.max_pieces = std::max<std::uint64_t>(stats_.max_pieces, f.size());
  };
  if (column.index == 1) stats_.bytes_written += kMagic.size();
  record(column.background);
  if (column.peak) record(*column.peak);
  stats_.bytes_written += serialized_size(&column.background) +
                          serialized_size(column.peak ? &*column.peak : nullptr);
}

PiecewiseCost CostStore::get(DataIndex index, int state) const {
  check_state(index, state);
  if (index < 1 || index > last_index_) {
    throw LookupError("column " + std::to_string(index) + " has not been stored");
  }
  return read_function(index, state);
}

StoreStats CostStore::stats() const {
  if (last_index_ == 0) throw UsageError("stats requested from an empty store");
  return stats_;
}

void MemoryCostStore::write_column(const CostColumn& column) { columns_.push_back(column); }

PiecewiseCost MemoryCostStore::read_function(DataIndex index, int state) const {
  const CostColumn& c = columns_[static_cast<std::size_t>(index - 1)];
  return state == 0 ? c.background : *c.peak;
}

DiskCostStore::DiskCostStore(std::filesystem::path workdir, bool keep_files)
    : db_path_(workdir / "cost.db"), idx_path_(workdir / "cost.idx"), keep_files_(keep_files) {
  std::error_code ec;
  std::filesystem::create_directories(workdir, ec);
  if (ec) throw StorageError("cannot create workdir " + workdir.string() + ": " + ec.message());
  db_out_.open(db_path_, std::ios::binary | std::ios::trunc);
  idx_out_.open(idx_path_, std::ios::binary | std::ios::trunc);
  if (!db_out_ || !idx_out_) {
    throw StorageError("cannot open cost files in " + workdir.string() + ": " +
                       std::strerror(errno));
  }
  db_buffer_.reserve(write_buffer_size + 4096);
  idx_buffer_.reserve(4096);
  db_buffer_.insert(db_buffer_.end(), kMagic.begin(), kMagic.end());
  db_offset_ = kMagic.size();
}

DiskCostStore::~DiskCostStore() {
  db_out_.close();
  idx_out_.close();
  db_in_.close();
  idx_in_.close();
  if (!keep_files_) {
    std::error_code ec;
    std::filesystem::remove(db_path_, ec);
    std::filesystem::remove(idx_path_, ec);
  }
}

void DiskCostStore::append_function(const PiecewiseCost* f) {
  put_u64(idx_buffer_, db_offset_);
  const std::uint32_t n = f == nullptr ? 0 : static_cast<std::uint32_t>(f->size());
  put_u32(db_buffer_, n);
  if (f != nullptr) {
    for (const Piece& p : f->pieces()) {
      put_f64(db_buffer_, p.alpha);
      put_f64(db_buffer_, p.beta);
      put_f64(db_buffer_, p.gamma);
      put_f64(db_buffer_, p.min_mean);
      put_f64(db_buffer_, p.max_mean);
      put_f64(db_buffer_, p.is_equality() ? 0.0 : p.prev_mean);
      put_u64(db_buffer_, static_cast<std::uint64_t>(p.prev_end));
      db_buffer_.push_back(static_cast<char>(p.is_equality() ? kEqualityFlag : 0));
    }
  }
  db_offset_ += serialized_size(f);
}

void DiskCostStore::write_column(const CostColumn& column) {
  if (reading_) throw UsageError("cannot push columns after reading has started");
  append_function(&column.background);
  append_function(column.peak ? &*column.peak : nullptr);
  if (db_buffer_.size() >= write_buffer_size) {
    db_out_.write(db_buffer_.data(), static_cast<std::streamsize>(db_buffer_.size()));
    idx_out_.write(idx_buffer_.data(), static_cast<std::streamsize>(idx_buffer_.size()));
    db_buffer_.clear();
    idx_buffer_.clear();
    if (!db_out_ || !idx_out_) {
      throw StorageError("write to " + db_path_.string() + " failed: " + std::strerror(errno));
    }
  }
}

void DiskCostStore::finish_writing() const {
  db_out_.write(db_buffer_.data(), static_cast<std::streamsize>(db_buffer_.size()));
  idx_out_.write(idx_buffer_.data(), static_cast<std::streamsize>(idx_buffer_.size()));
  db_buffer_.clear();
  idx_buffer_.clear();
  db_out_.flush();
  idx_out_.flush();
  const bool failed = db_out_.fail() || idx_out_.fail();
  db_out_.close();
  idx_out_.close();
  if (failed) {
    throw StorageError("flushing cost files in " + db_path_.parent_path().string() + " failed");
  }
  db_in_.open(db_path_, std::ios::binary);
  idx_in_.open(idx_path_, std::ios::binary);
  if (!db_in_ || !idx_in_) throw StorageError("cannot reopen cost files for reading");
  reading_ = true;
}

PiecewiseCost DiskCostStore::read_function(DataIndex index, int state) const {
  if (!reading_) finish_writing();
  std::array<unsigned char, 8> off_bytes{};
  const auto slot = static_cast<std::streamoff>(((index - 1) * 2 + state) * 8);
  idx_in_.seekg(slot);
  idx_in_.read(reinterpret_cast<char*>(off_bytes.data()), 8);
  if (!idx_in_) throw StorageError("cannot read " + idx_path_.string());
  const std::uint64_t offset = get_u64(off_bytes.data());

  std::array<unsigned char, 4> count_bytes{};
  db_in_.seekg(static_cast<std::streamoff>(offset));
  db_in_.read(reinterpret_cast<char*>(count_bytes.data()), 4);
  if (!db_in_) throw StorageError("cannot read " + db_path_.string());
  const std::uint32_t n = get_u32(count_bytes.data());
  if (n == 0) throw LookupError("stored function is empty");

  std::vector<unsigned char> raw(static_cast<std::size_t>(n) * piece_record_size);
  db_in_.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!db_in_) throw StorageError("truncated record in " + db_path_.string());

  std::vector<Piece> pieces(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    const unsigned char* r = raw.data() + static_cast<std::size_t>(k) * piece_record_size;
    Piece& p = pieces[k];
    p.alpha = get_f64(r);
    p.beta = get_f64(r + 8);
    p.gamma = get_f64(r + 16);
    p.min_mean = get_f64(r + 24);
    p.max_mean = get_f64(r + 32);
    p.prev_mean = get_f64(r + 40);
    p.prev_end = static_cast<DataIndex>(get_u64(r + 48));
    if (r[56] & kEqualityFlag) p.prev_mean = kEqualityMean;
  }
  return PiecewiseCost(std::move(pieces));
}

std::unique_ptr<CostStore> make_store(StorageBackend backend,
                                      const std::filesystem::path& workdir, bool keep_files) {
  if (backend == StorageBackend::disk) return std::make_unique<DiskCostStore>(workdir, keep_files);
  return std::make_unique<MemoryCostStore>();
}

}  // namespace peakseg
