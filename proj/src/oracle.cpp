#include "peakseg/oracle.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "peakseg/errors.hpp"

namespace peakseg::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double penalized_objective(double loss, double penalty, std::uint64_t peaks) {
  if (peaks == 0) return loss;
  return loss + penalty * static_cast<double>(peaks);
}

SegmentFit constrained_segment_fit(const std::vector<Block>& blocks,
                                   const std::vector<Direction>& directions) {
  const std::size_t k = blocks.size();
  if (k == 0) throw UsageError("constrained_segment_fit needs at least one segment");
  if (directions.size() + 1 != k) throw UsageError("need one direction per adjacent pair");
  if (k > 31) throw UsageError("too many segments for active-set enumeration");

  SegmentFit best;
  best.loss = kInf;
  bool found = false;
  std::vector<double> means(k);
  const std::uint32_t subsets = 1u << (k - 1);
  for (std::uint32_t active = 0; active < subsets; ++active) {
    // Pool runs of segments joined by active constraints.
    double loss = 0.0;
    std::size_t start = 0;
    while (start < k) {
      std::size_t stop = start;
      while (stop + 1 < k && (active >> stop & 1u)) ++stop;
      double sum = 0.0, weight = 0.0;
      for (std::size_t j = start; j <= stop; ++j) {
        sum += blocks[j].weighted_sum;
        weight += blocks[j].weight;
      }
      const double m = sum / weight;
      for (std::size_t j = start; j <= stop; ++j) means[j] = m;
      loss += segment_loss(sum, weight, m);
      start = stop + 1;
    }
    bool feasible = true;
    for (std::size_t j = 0; j + 1 < k && feasible; ++j) {
      if (active >> j & 1u) continue;
      feasible = directions[j] == Direction::up ? means[j] <= means[j + 1]
                                                : means[j] >= means[j + 1];
    }
    if (feasible && (!found || loss < best.loss)) {
      best.loss = loss;
      best.means = means;
      found = true;
    }
  }
  if (!found) throw std::logic_error("no feasible constrained fit");
  return best;
}

OracleResult brute_force_solve(const ProfileData& data, double penalty) {
  const std::size_t n = data.size();
  if (n == 0) throw InputError("profile data is empty");
  if (n > kMaxRows) {
    throw UsageError("brute force oracle limited to " + std::to_string(kMaxRows) + " rows");
  }
  if (std::isnan(penalty) || penalty < 0.0) throw InputError("penalty must be non-negative");

  OracleResult best;
  best.objective = kInf;
  std::vector<DataIndex> best_cuts;
  bool found = false;
  const std::size_t boundaries = n - 1;
  std::vector<Block> blocks;
  std::vector<Direction> directions;
  std::vector<DataIndex> cuts;
  for (std::uint32_t mask = 0; mask < (1u << boundaries); ++mask) {
    const int changes = std::popcount(mask);
    if (changes % 2 != 0) continue;
    const std::uint64_t peaks = static_cast<std::uint64_t>(changes) / 2;
    if (std::isinf(penalty) && peaks > 0) continue;
    ++best.enumerated;

    // Cut after row b+1 (1-based) when bit b is set.
    cuts.clear();
    blocks.assign(1, Block{});
    directions.clear();
    for (std::size_t i = 0; i < n; ++i) {
      blocks.back().weighted_sum += data.weight(i) * data.count(i);
      blocks.back().weight += data.weight(i);
      if (i < boundaries && (mask >> i & 1u)) {
        cuts.push_back(static_cast<DataIndex>(i + 1));
        directions.push_back(blocks.size() % 2 == 1 ? Direction::up : Direction::down);
        blocks.emplace_back();
      }
    }
    const SegmentFit fit = constrained_segment_fit(blocks, directions);
    const double objective = penalized_objective(fit.loss, penalty, peaks);
    // Objectives equal up to rounding count as ties, so that e.g. splitting
    // constant data never wins by an ulp.
    const double tie = 1e-12 * (1.0 + std::abs(best.objective));
    const bool better =
        !found || objective < best.objective - tie ||
        (objective <= best.objective + tie &&
         (cuts.size() < best_cuts.size() || (cuts.size() == best_cuts.size() && cuts < best_cuts)));
    if (!better) continue;
    found = true;
    best.objective = objective;
    best_cuts = cuts;
    SegmentModel model;
    model.penalty = penalty;
    DataIndex first = 1;
    for (std::size_t s = 0; s < blocks.size(); ++s) {
      Segment seg;
      seg.first = first;
      seg.last = s < cuts.size() ? cuts[s] : static_cast<DataIndex>(n);
      seg.mean = fit.means[s];
      seg.status = s % 2 == 0 ? SegmentStatus::background : SegmentStatus::peak;
      seg.first_base = data.rows()[static_cast<std::size_t>(seg.first - 1)].chrom_start;
      seg.last_base = data.rows()[static_cast<std::size_t>(seg.last - 1)].chrom_end;
      if (s > 0 && fit.means[s] == fit.means[s - 1]) ++model.equality_constraints;
      model.segments.push_back(seg);
      first = seg.last + 1;
    }
    best.model = std::move(model);
  }
  return best;
}

std::vector<SuiteInstance> random_suite(std::uint64_t seed, std::size_t count) {
  static constexpr double kPenalties[] = {0.0, 0.5, 1.0, 5.0, kInf};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> rows_dist(2, 12);
  std::uniform_int_distribution<std::uint32_t> count_dist(0, 5);
  std::uniform_int_distribution<std::uint64_t> weight_dist(1, 3);
  std::uniform_int_distribution<int> penalty_dist(0, 4);
  std::vector<SuiteInstance> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const int n = rows_dist(rng);
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(n));
    std::vector<std::uint64_t> weights(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      counts[static_cast<std::size_t>(i)] = count_dist(rng);
      weights[static_cast<std::size_t>(i)] = weight_dist(rng);
    }
    out.push_back({k, profile_from_counts(counts, weights), kPenalties[penalty_dist(rng)]});
  }
  return out;
}

std::vector<SuiteOutcome> run_suite(const std::vector<SuiteInstance>& instances,
                                    const SolverFn& solver) {
  std::vector<SuiteOutcome> outcomes;
  outcomes.reserve(instances.size());
  for (const SuiteInstance& inst : instances) {
    SuiteOutcome o;
    o.index = inst.index;
    o.rows = inst.data.size();
    o.penalty = inst.penalty;
    const OracleResult expected = brute_force_solve(inst.data, inst.penalty);
    const SolveResult got = solver(inst.data, inst.penalty);
    const double loss = recompute_loss(got.model, inst.data);
    o.solver_objective = penalized_objective(loss, inst.penalty, got.model.peaks());
    o.oracle_objective = expected.objective;
    o.objective_ok = std::abs(o.solver_objective - o.oracle_objective) <=
                     1e-8 * (1.0 + std::abs(o.oracle_objective));
    o.cost_identity_ok = std::abs(got.objective - o.solver_objective) <=
                         1e-6 * std::max(1.0, std::abs(o.solver_objective));
    o.structure_ok = !check_model_structure(got.model, inst.data).has_value();
    outcomes.push_back(o);
  }
  return outcomes;
}

SolverFn default_solver() {
  return [](const ProfileData& data, double penalty) {
    SolveConfig config;
    config.penalty = penalty;
    return gfpop_solve(data, config);
  };
}

}  // namespace peakseg::oracle
