#include "peakseg/solver.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <unistd.h>

#include "peakseg/errors.hpp"

namespace peakseg {

namespace {

SegmentModel single_segment_model(const ProfileData& data, double penalty) {
  SegmentModel model;
  model.penalty = penalty;
  Segment s;
  s.first = 1;
  s.last = static_cast<DataIndex>(data.size());
  s.mean = data.weighted_sum() / static_cast<double>(data.bases());
  s.status = SegmentStatus::background;
  s.first_base = data.rows().front().chrom_start;
  s.last_base = data.rows().back().chrom_end;
  model.segments.push_back(s);
  return model;
}

void validate_input(const ProfileData& data) {
  if (data.empty()) throw InputError("profile data is empty");
}

// Removes a temp workdir created for one solve.
struct ScopedWorkdir {
  std::filesystem::path path;
  bool remove = false;
  ~ScopedWorkdir() {
    if (remove) {
      std::error_code ec;
      std::filesystem::remove_all(path, ec);
    }
  }
};

}  // namespace

const char* to_string(SegmentStatus s) {
  return s == SegmentStatus::peak ? "peak" : "background";
}

double segment_loss(double weighted_sum, double weight, double mean) {
  if (weighted_sum == 0.0) return weight * mean;
  if (mean <= 0.0) return std::numeric_limits<double>::infinity();
  return weight * mean - weighted_sum * std::log(mean);
}

double recompute_loss(const SegmentModel& model, const ProfileData& data) {
  if (model.segments.empty()) throw InputError("model has no segments");
  DataIndex expected_first = 1;
  double total = 0.0;
  for (const Segment& s : model.segments) {
    if (s.first != expected_first || s.last < s.first ||
        s.last > static_cast<DataIndex>(data.size())) {
      throw InputError("model segments do not tile the data");
    }
    double sum = 0.0;
    double weight = 0.0;
    for (DataIndex i = s.first; i <= s.last; ++i) {
      const auto k = static_cast<std::size_t>(i - 1);
      sum += data.weight(k) * data.count(k);
      weight += data.weight(k);
    }
    total += segment_loss(sum, weight, s.mean);
    expected_first = s.last + 1;
  }
  if (expected_first != static_cast<DataIndex>(data.size()) + 1) {
    throw InputError("model segments do not cover the data");
  }
  return total;
}

std::optional<std::string> check_model_structure(const SegmentModel& model,
                                                 const ProfileData& data, double tolerance) {
  const auto& segs = model.segments;
  if (segs.empty()) return "model has no segments";
  if (segs.size() % 2 == 0) return "even number of segments";
  if (segs.front().status != SegmentStatus::background) return "first segment is not background";
  if (segs.back().status != SegmentStatus::background) return "last segment is not background";
  DataIndex expected_first = 1;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const Segment& s = segs[k];
    if (s.first != expected_first || s.last < s.first) return "segments do not tile the data";
    const auto want = k % 2 == 0 ? SegmentStatus::background : SegmentStatus::peak;
    if (s.status != want) return "statuses do not alternate";
    if (s.first_base != data.rows()[static_cast<std::size_t>(s.first - 1)].chrom_start ||
        s.last_base != data.rows()[static_cast<std::size_t>(s.last - 1)].chrom_end) {
      return "segment coordinates disagree with data rows";
    }
    if (k > 0) {
      const double prev = segs[k - 1].mean;
      const double slack = tolerance * (1.0 + std::abs(prev));
      if (s.status == SegmentStatus::peak && s.mean < prev - slack) {
        return "decreasing change into peak at segment " + std::to_string(k + 1);
      }
      if (s.status == SegmentStatus::background && s.mean > prev + slack) {
        return "increasing change out of peak at segment " + std::to_string(k + 1);
      }
    }
    expected_first = s.last + 1;
  }
  if (expected_first != static_cast<DataIndex>(data.size()) + 1) return "segments do not cover data";
  return std::nullopt;
}

LossSummary summarize(const SegmentModel& model, const ProfileData& data, double total_loss,
                      double mean_intervals, std::uint64_t max_intervals) {
  LossSummary s;
  s.penalty = model.penalty;
  s.segments = model.segments.size();
  s.peaks = model.peaks();
  s.bases = data.bases();
  s.total_loss = total_loss;
  const double penalized =
      s.peaks == 0 ? total_loss : total_loss + model.penalty * static_cast<double>(s.peaks);
  s.mean_pen_cost = penalized / static_cast<double>(s.bases);
  s.equality_constraints = model.equality_constraints;
  s.mean_intervals = mean_intervals;
  s.max_intervals = max_intervals;
  return s;
}

std::filesystem::path make_temp_workdir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  std::filesystem::path base;
  if (const char* env = std::getenv("PEAKSEG_WORKDIR"); env != nullptr && *env != '\0') {
    base = env;
  } else {
    base = std::filesystem::temp_directory_path();
  }
  return base / ("peakseg-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) +
                 "-" + tag);
}

SolveResult solve_infinite_penalty(const ProfileData& data) {
  validate_input(data);
  SolveResult r;
  r.model = single_segment_model(data, kInfinitePenalty);
  const double loss = recompute_loss(r.model, data);
  r.summary = summarize(r.model, data, loss, 1.0, 1);
  r.objective = loss;
  return r;
}

SolveResult gfpop_solve(const ProfileData& data, const SolveConfig& config) {
  validate_input(data);
  if (std::isnan(config.penalty) || config.penalty < 0.0) {
    throw InputError("penalty must be non-negative");
  }
  if (std::isinf(config.penalty)) return solve_infinite_penalty(data);

  const double lambda = config.penalty;
  const double lo = data.min_count();
  const double hi = data.max_count();
  const auto n = static_cast<DataIndex>(data.size());

  if (lo == hi) {
    SolveResult r;
    r.model = single_segment_model(data, lambda);
    const double loss = recompute_loss(r.model, data);
    r.summary = summarize(r.model, data, loss, 1.0, 1);
    r.objective = loss;
    return r;
  }

  ScopedWorkdir scratch;
  std::filesystem::path workdir = config.workdir;
  if (config.storage_backend == StorageBackend::disk && workdir.empty()) {
    workdir = make_temp_workdir("solve");
    scratch.path = workdir;
    scratch.remove = !config.keep_cost_files;
  }
  auto store = make_store(config.storage_backend, workdir, config.keep_cost_files);

  // Forward pass. Only the previous column is kept in memory.
  PiecewiseCost background = one_piece(data.count(0), data.weight(0), lo, hi);
  PiecewiseCost peak;
  store->push_column({1, background, std::nullopt});
  for (DataIndex i = 2; i <= n; ++i) {
    const auto row = static_cast<std::size_t>(i - 1);
    const PiecewiseCost data_term = one_piece(data.count(row), data.weight(row), lo, hi);

    PiecewiseCost up_change = add_constant(min_less(i - 1, background), lambda);
    PiecewiseCost next_peak = i == 2 ? std::move(up_change) : min_of_two(up_change, peak);
    PiecewiseCost next_background =
        i == 2 ? background : min_of_two(min_more(i - 1, peak), background);

    peak = simplify(add(next_peak, data_term));
    background = simplify(add(next_background, data_term));
    store->push_column({i, background, peak});
  }

  // Decoding.
  const ArgMinResult best = arg_min(background);
  SolveResult result;
  result.objective = best.cost;
  SegmentModel& model = result.model;
  model.penalty = lambda;

  std::vector<Segment> reversed;
  double mean = best.mean;
  DataIndex prev_end = best.prev_end;
  double prev_mean = best.prev_mean;
  DataIndex end = n;
  SegmentStatus status = SegmentStatus::background;
  while (true) {
    Segment s;
    s.first = prev_end == kNoIndex ? 1 : prev_end + 1;
    s.last = end;
    s.mean = mean;
    s.status = status;
    s.first_base = data.rows()[static_cast<std::size_t>(s.first - 1)].chrom_start;
    s.last_base = data.rows()[static_cast<std::size_t>(s.last - 1)].chrom_end;
    reversed.push_back(s);
    if (prev_end == kNoIndex) break;
    if (prev_end < 1 || prev_end >= end) {
      throw std::logic_error("decoding produced an invalid segment end");
    }
    if (prev_mean == kEqualityMean) {
      ++model.equality_constraints;
    } else {
      mean = prev_mean;
    }
    status = status == SegmentStatus::background ? SegmentStatus::peak : SegmentStatus::background;
    const PiecewiseCost cost = store->get(prev_end, status == SegmentStatus::peak ? 1 : 0);
    end = prev_end;
    const BackPointer bp = find_mean(cost, mean);
    prev_end = bp.prev_end;
    prev_mean = bp.prev_mean;
  }
  model.segments.assign(reversed.rbegin(), reversed.rend());

  result.store_stats = store->stats();
  const double loss = recompute_loss(model, data);
  result.summary = summarize(model, data, loss, result.store_stats.mean_pieces(),
                             result.store_stats.max_pieces);
  return result;
}

}  // namespace peakseg
