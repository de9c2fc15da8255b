#include "peakseg/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string_view>

#include "peakseg/errors.hpp"

namespace peakseg {

namespace {

constexpr const char* kSegmentsHeader = "chrom\tchromStart\tchromEnd\tstatus\tmean";
constexpr const char* kLossHeader =
    "penalty\tsegments\tpeaks\tbases\tmean.pen.cost\ttotal.loss\tequality.constraints\t"
    "mean.intervals\tmax.intervals";
constexpr const char* kTraceHeader = "iteration\tunder\tover\tpenalty\tpeaks\ttotal.loss";

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

std::uint64_t parse_count(std::string_view text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw InputError("expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return v;
}

std::string format_mean(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError("cannot open " + path.string() + " for writing");
  return out;
}

void close_output(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (out.fail()) throw StorageError("writing " + path.string() + " failed");
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "Inf" : "-Inf";
  if (std::isnan(x)) return "NaN";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

double parse_number(std::string_view text) {
  if (text == "Inf") return std::numeric_limits<double>::infinity();
  if (text == "-Inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw InputError("expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

double parse_penalty(const std::string& text) {
  if (text == "Inf") return kInfinitePenalty;
  const bool plain = !text.empty() && text.find_first_not_of("0123456789.eE+-") == std::string::npos;
  if (!plain || text.front() == '-') {
    throw InputError("penalty must be a non-negative number or Inf, got '" + text + "'");
  }
  try {
    return parse_number(text);
  } catch (const InputError&) {
    throw InputError("penalty must be a non-negative number or Inf, got '" + text + "'");
  }
}

void write_segments(const SegmentModel& model, const ProfileData& data, std::ostream& out) {
  out << kSegmentsHeader << '\n';
  for (const Segment& s : model.segments) {
    out << data.chrom() << '\t' << s.first_base << '\t' << s.last_base << '\t'
        << to_string(s.status) << '\t' << format_mean(s.mean) << '\n';
  }
}

void write_segments(const SegmentModel& model, const ProfileData& data,
                    const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  write_segments(model, data, out);
  close_output(out, path);
}

SegmentModel read_segments(const std::filesystem::path& path, const ProfileData& data,
                           double penalty) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty() || lines.front() != kSegmentsHeader) {
    throw InputError(path.string() + ": missing segments header");
  }
  SegmentModel model;
  model.penalty = penalty;
  std::size_t row = 0;  // next data row (0-based)
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto fields = split_tabs(lines[k]);
    const std::string where = path.string() + ":" + std::to_string(k + 1) + ": ";
    if (fields.size() != 5) throw InputError(where + "expected 5 columns");
    if (fields[0] != data.chrom()) throw InputError(where + "chromosome mismatch");
    Segment s;
    try {
      s.first_base = parse_count(fields[1]);
      s.last_base = parse_count(fields[2]);
      s.mean = parse_number(fields[4]);
    } catch (const InputError& e) {
      throw InputError(where + e.what());
    }
    if (fields[3] == "peak") {
      s.status = SegmentStatus::peak;
    } else if (fields[3] == "background") {
      s.status = SegmentStatus::background;
    } else {
      throw InputError(where + "unknown status '" + std::string(fields[3]) + "'");
    }
    if (row >= data.size() || data.rows()[row].chrom_start != s.first_base) {
      throw InputError(where + "segment does not start at a data row boundary");
    }
    s.first = static_cast<DataIndex>(row + 1);
    while (row < data.size() && data.rows()[row].chrom_end < s.last_base) ++row;
    if (row >= data.size() || data.rows()[row].chrom_end != s.last_base) {
      throw InputError(where + "segment does not end at a data row boundary");
    }
    s.last = static_cast<DataIndex>(row + 1);
    ++row;
    if (!model.segments.empty() && model.segments.back().mean == s.mean) {
      ++model.equality_constraints;
    }
    model.segments.push_back(s);
  }
  if (row != data.size()) throw InputError(path.string() + ": segments do not cover the data");
  return model;
}

void write_loss(const LossSummary& s, std::ostream& out, bool header) {
  if (header) out << kLossHeader << '\n';
  out << format_number(s.penalty) << '\t' << s.segments << '\t' << s.peaks << '\t' << s.bases
      << '\t' << format_number(s.mean_pen_cost) << '\t' << format_number(s.total_loss) << '\t'
      << s.equality_constraints << '\t' << format_number(s.mean_intervals) << '\t'
      << s.max_intervals << '\n';
}

void write_loss(const LossSummary& summary, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  write_loss(summary, out);
  close_output(out, path);
}

LossSummary read_loss(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.size() != 2 || lines[0] != kLossHeader) {
    throw InputError(path.string() + ": expected header and one row");
  }
  const auto f = split_tabs(lines[1]);
  if (f.size() != 9) throw InputError(path.string() + ": expected 9 columns");
  LossSummary s;
  try {
    s.penalty = parse_number(f[0]);
    s.segments = parse_count(f[1]);
    s.peaks = parse_count(f[2]);
    s.bases = parse_count(f[3]);
    s.mean_pen_cost = parse_number(f[4]);
    s.total_loss = parse_number(f[5]);
    s.equality_constraints = parse_count(f[6]);
    s.mean_intervals = parse_number(f[7]);
    s.max_intervals = parse_count(f[8]);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return s;
}

void write_trace(const std::vector<SearchIterate>& trace, std::ostream& out) {
  const auto bound = [](const std::optional<std::uint64_t>& b) {
    return b ? std::to_string(*b) : std::string("NA");
  };
  out << kTraceHeader << '\n';
  for (const SearchIterate& it : trace) {
    out << it.iteration << '\t' << bound(it.under) << '\t' << bound(it.over) << '\t'
        << format_number(it.penalty) << '\t' << it.peaks << '\t' << format_number(it.total_loss)
        << '\n';
  }
}

void write_trace(const std::vector<SearchIterate>& trace, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  write_trace(trace, out);
  close_output(out, path);
}

std::vector<SearchIterate> read_trace(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty() || lines[0] != kTraceHeader) {
    throw InputError(path.string() + ": missing trace header");
  }
  const auto bound = [](std::string_view v) -> std::optional<std::uint64_t> {
    if (v == "NA") return std::nullopt;
    return parse_count(v);
  };
  std::vector<SearchIterate> trace;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto f = split_tabs(lines[k]);
    if (f.size() != 6) throw InputError(path.string() + ": expected 6 columns");
    trace.push_back({parse_count(f[0]), bound(f[1]), bound(f[2]), parse_number(f[3]),
                     parse_count(f[4]), parse_number(f[5])});
  }
  return trace;
}

CachePaths cache_paths(const std::filesystem::path& data_path, const std::string& penalty_string) {
  const std::string prefix = data_path.string() + "_penalty=" + penalty_string;
  return {prefix + "_loss.tsv", prefix + "_segments.tsv"};
}

namespace {

std::optional<SolveResult> read_cache(const CachePaths& paths, const ProfileData& data,
                                      double penalty) {
  if (!std::filesystem::exists(paths.loss) || !std::filesystem::exists(paths.segments)) {
    return std::nullopt;
  }
  const LossSummary s = read_loss(paths.loss);
  const bool same_penalty = s.penalty == penalty;
  const double penalized =
      s.peaks == 0 ? s.total_loss : s.total_loss + s.penalty * static_cast<double>(s.peaks);
  const double identity_gap = std::abs(s.mean_pen_cost * static_cast<double>(s.bases) - penalized);
  if (!same_penalty || s.segments != 2 * s.peaks + 1 || s.bases != data.bases() ||
      !(identity_gap <= 1e-6 * std::max(1.0, std::abs(penalized)))) {
    throw InputError(paths.loss.string() + ": inconsistent loss row");
  }
  SolveResult r;
  r.model = read_segments(paths.segments, data, penalty);
  if (r.model.segments.size() != s.segments || r.model.peaks() != s.peaks) {
    throw InputError(paths.segments.string() + ": segment count disagrees with loss file");
  }
  r.model.equality_constraints = s.equality_constraints;
  r.summary = s;
  r.objective = penalized;
  return r;
}

}  // namespace

CachedSolve cached_solve(const std::filesystem::path& data_path, const ProfileData& data,
                         const std::string& penalty_string, const SolveConfig& config) {
  const double penalty = parse_penalty(penalty_string);
  const CachePaths paths = cache_paths(data_path, penalty_string);
  try {
    if (auto cached = read_cache(paths, data, penalty)) return {std::move(*cached), true};
  } catch (const InputError& e) {
    std::cerr << "warning: ignoring corrupt cache (" << e.what() << "); recomputing\n";
  }
  SolveConfig c = config;
  c.penalty = penalty;
  CachedSolve out;
  out.solved = gfpop_solve(data, c);
  write_segments(out.solved.model, data, paths.segments);
  write_loss(out.solved.summary, paths.loss);
  return out;
}

CachedSolve cached_solve(const std::filesystem::path& data_path, const std::string& penalty_string,
                         const SolveConfig& config) {
  parse_penalty(penalty_string);
  const ProfileData data = read_bedgraph(data_path.string());
  return cached_solve(data_path, data, penalty_string, config);
}

}  // namespace peakseg
