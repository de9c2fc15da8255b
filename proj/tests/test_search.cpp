#include <doctest.h>

#include <cmath>
#include <map>
#include <mutex>

#include "peakseg/errors.hpp"
#include "peakseg/search.hpp"
#include "peakseg/synthetic.hpp"

using namespace peakseg;

namespace {

// Solver over a fixed table of (peaks -> optimal loss): returns the model
// minimizing loss + penalty * peaks, ties to fewer peaks.
struct TableSolver {
  std::map<std::uint64_t, double> losses;
  mutable std::mutex mu;
  mutable std::vector<double> penalties;

  SolveResult operator()(double penalty, const std::string&) const {
    {
      std::lock_guard<std::mutex> lock(mu);
      penalties.push_back(penalty);
    }
    std::uint64_t best_p = 0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [p, loss] : losses) {
      const double v = p == 0 ? loss : loss + penalty * static_cast<double>(p);
      if (v < best) {
        best = v;
        best_p = p;
      }
    }
    SolveResult r;
    r.summary.penalty = penalty;
    r.summary.peaks = best_p;
    r.summary.segments = 2 * best_p + 1;
    r.summary.total_loss = losses.at(best_p);
    r.objective = best;
    return r;
  }
};

}  // namespace

TEST_CASE("compute_next_penalty") {
  CHECK(compute_next_penalty(375197.873, 0, -130227.291, 3199) ==
        doctest::Approx(157.9947).epsilon(1e-6));
  CHECK(compute_next_penalty(375197.873, 0, -62199.931, 224) ==
        doctest::Approx(1952.6688).epsilon(1e-6));
  const double zero = compute_next_penalty(10, 0, 10, 1);
  CHECK(zero == 0);
  CHECK_FALSE(std::signbit(zero));
  CHECK_THROWS_AS(compute_next_penalty(1, 3, 0, 3), UsageError);
}

TEST_CASE("penalty keys") {
  CHECK(penalty_key(kInfinitePenalty) == "Inf");
  CHECK(penalty_key(0) == "0");
  CHECK(penalty_key(10000) == "10000");
  const double x = 157.99470107354;
  CHECK(std::stod(penalty_key(x)) == x);
}

TEST_CASE("search follows the concave envelope") {
  TableSolver table;
  table.losses = {{0, 375197.873}, {17, 2640.128}, {224, -62199.931}, {3199, -130227.291}};
  const SearchResult r =
      sequential_search(17, [&](double p, const std::string& k) { return table(p, k); });
  CHECK(r.exact);
  CHECK(r.solved.summary.peaks == 17);
  REQUIRE(r.trace.size() == 4);
  CHECK(r.trace[0].iteration == 1);
  CHECK(r.trace[0].penalty == 0);
  CHECK(r.trace[0].peaks == 3199);
  CHECK(r.trace[1].iteration == 1);
  CHECK(std::isinf(r.trace[1].penalty));
  CHECK(r.trace[1].peaks == 0);
  CHECK(r.trace[2].iteration == 2);
  CHECK(r.trace[2].under == 0);
  CHECK(r.trace[2].over == 3199);
  CHECK(r.trace[2].penalty == doctest::Approx(157.9947).epsilon(1e-6));
  CHECK(r.trace[2].peaks == 224);
  CHECK(r.trace[3].iteration == 3);
  CHECK(r.trace[3].over == 224);
  CHECK(r.trace[3].penalty == doctest::Approx(1952.6688).epsilon(1e-6));
  CHECK(r.trace[3].peaks == 17);
  CHECK(r.solver_calls == 4);
}

TEST_CASE("target in a gap of the envelope") {
  // 75 is not on the envelope: after bounds 74/76 the intersection penalty
  // reproduces one of them.
  TableSolver table;
  table.losses = {{0, 10000}, {74, 300}, {75, 240}, {76, 150}, {200, 0}};
  const SearchResult r =
      sequential_search(75, [&](double p, const std::string& k) { return table(p, k); });
  CHECK_FALSE(r.exact);
  CHECK(r.solved.summary.peaks <= 75);
  CHECK(r.solved.summary.peaks == 74);
  const SearchIterate& last = r.trace.back();
  REQUIRE(last.under.has_value());
  REQUIRE(last.over.has_value());
  CHECK((last.peaks == *last.under || last.peaks == *last.over));
  // both bounding affine functions meet at the last penalty
  const double g_under = table.losses.at(*last.under) +
                         last.penalty * (static_cast<double>(*last.under) - 75);
  const double g_over = table.losses.at(*last.over) +
                        last.penalty * (static_cast<double>(*last.over) - 75);
  CHECK(g_under == doctest::Approx(g_over).epsilon(1e-6));
}

TEST_CASE("extreme targets") {
  TableSolver table;
  table.losses = {{0, 100}, {3, 10}, {9, 0}};
  const auto run = [&](std::int64_t target) {
    return sequential_search(target, [&](double p, const std::string& k) { return table(p, k); });
  };
  const SearchResult zero = run(0);
  CHECK(zero.exact);
  CHECK(zero.solved.summary.peaks == 0);
  CHECK(zero.trace.size() == 2);

  const SearchResult top = run(9);
  CHECK(top.exact);
  CHECK(top.solved.summary.peaks == 9);

  const SearchResult beyond = run(50);
  CHECK_FALSE(beyond.exact);
  CHECK(beyond.solved.summary.peaks == 9);
  CHECK(beyond.trace.size() == 2);

  CHECK_THROWS_AS(run(-1), InputError);
}

TEST_CASE("search on synthetic data") {
  const ProfileData data = synthetic_profile(5000, 12);
  for (std::int64_t target : {0, 3, 10, 25}) {
    const SearchResult r = sequential_search(data, target, SolveConfig{});
    CAPTURE(target);
    CHECK(r.solved.summary.peaks <= static_cast<std::uint64_t>(target));
    CHECK(r.exact == (r.solved.summary.peaks == static_cast<std::uint64_t>(target)));
    CHECK_FALSE(check_model_structure(r.solved.model, data).has_value());
    CHECK(r.solver_calls == r.trace.size());
    // dominance: no solved model with at most target peaks has lower loss
    for (const SearchIterate& it : r.trace) {
      if (it.peaks <= static_cast<std::uint64_t>(target)) {
        CHECK(r.solved.summary.total_loss <= it.total_loss + 1e-9 * std::abs(it.total_loss));
      }
    }
    // bounds tighten strictly
    for (std::size_t k = 3; k < r.trace.size(); ++k) {
      const auto& a = r.trace[k - 1];
      const auto& b = r.trace[k];
      CHECK(*b.over - *b.under < *a.over - *a.under);
    }
  }
}

TEST_CASE("search with disk storage") {
  const auto dir = make_temp_workdir("search-test");
  SolveConfig c;
  c.storage_backend = StorageBackend::disk;
  c.workdir = dir;
  const ProfileData data = synthetic_profile(2000, 4);
  const SearchResult d = sequential_search(data, 5, c);
  const SearchResult m = sequential_search(data, 5, SolveConfig{});
  CHECK(d.trace == m.trace);
  std::filesystem::remove_all(dir);
}
