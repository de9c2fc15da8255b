// peakseg: up-down constrained Poisson peak calling on bedGraph coverage.
//
//   peakseg solve    DATA --penalty 10000
//   peakseg search   DATA --peaks 17
//   peakseg bench    [--sizes 1000,10000,100000] [--output bench.tsv]
//   peakseg validate [--seed 1] [--count 200]
//
// Exit status: 0 success, 1 invalid input, 2 I/O failure, 3 internal error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "peakseg/bench.hpp"
#include "peakseg/errors.hpp"
#include "peakseg/io.hpp"
#include "peakseg/oracle.hpp"
#include "peakseg/search.hpp"

namespace {

using namespace peakseg;

constexpr int kExitInput = 1;
constexpr int kExitStorage = 2;
constexpr int kExitInternal = 3;

struct Options {
  std::string data_path;
  std::string penalty;
  std::int64_t peaks = -1;
  std::string storage = "memory";
  std::string workdir;
  bool keep_cost_files = false;
  std::uint64_t seed = 1;
  std::size_t count = 200;
  std::vector<std::size_t> sizes = {1000, 10000, 100000};
  std::string output;
};

SolveConfig solve_config(const Options& o) {
  SolveConfig c;
  c.storage_backend = o.storage == "disk" ? StorageBackend::disk : StorageBackend::memory;
  c.workdir = o.workdir;
  c.keep_cost_files = o.keep_cost_files;
  return c;
}

int cmd_solve(const Options& o) {
  try {
    parse_penalty(o.penalty);
  } catch (const InputError& e) {
    std::cerr << "--penalty: " << e.what() << '\n';
    return kExitInput;
  }
  SolveConfig config = solve_config(o);
  if (!config.workdir.empty()) config.workdir /= "penalty=" + o.penalty;
  const CachedSolve r = cached_solve(o.data_path, o.penalty, config);
  if (r.cache_hit) std::cerr << "using cached result for penalty " << o.penalty << '\n';
  write_loss(r.solved.summary, std::cout);
  return 0;
}

int cmd_search(const Options& o) {
  if (o.peaks < 0) {
    std::cerr << "--peaks: must be a non-negative integer\n";
    return kExitInput;
  }
  const ProfileData data = read_bedgraph(o.data_path);
  const SolveConfig base = solve_config(o);
  const PenaltySolver solve = [&](double, const std::string& key) {
    SolveConfig c = base;
    if (!c.workdir.empty()) c.workdir /= "penalty=" + key;
    return cached_solve(o.data_path, data, key, c).solved;
  };
  const SearchResult result = sequential_search(o.peaks, solve);
  if (!result.exact) {
    std::cerr << "warning: no optimal model has exactly " << o.peaks << " peaks; returning "
              << result.solved.summary.peaks << " peaks\n";
  }
  const std::string prefix = o.data_path + "_peaks=" + std::to_string(o.peaks);
  write_trace(result.trace, prefix + "_trace.tsv");
  write_loss(result.solved.summary, prefix + "_loss.tsv");
  write_segments(result.solved.model, data, prefix + "_segments.tsv");
  write_trace(result.trace, std::cout);
  return 0;
}

int cmd_bench(const Options& o) {
  BenchOptions b;
  b.sizes = o.sizes;
  b.seed = o.seed;
  b.workdir = o.workdir;
  const std::vector<BenchRow> rows = run_benchmark(b);
  if (o.output.empty()) {
    write_bench(rows, std::cout);
    return 0;
  }
  std::ofstream out(o.output);
  if (!out) throw StorageError("cannot open " + o.output + " for writing");
  write_bench(rows, out);
  out.close();
  if (out.fail()) throw StorageError("writing " + o.output + " failed");
  return 0;
}

int cmd_validate(const Options& o) {
  const auto instances = oracle::random_suite(o.seed, o.count);
  const auto outcomes = oracle::run_suite(instances, oracle::default_solver());
  std::size_t failed = 0;
  std::cout << "instance\trows\tpenalty\tsolver\toracle\tresult\n";
  for (const auto& r : outcomes) {
    if (!r.passed()) ++failed;
    std::cout << r.index << '\t' << r.rows << '\t' << format_number(r.penalty) << '\t'
              << format_number(r.solver_objective) << '\t' << format_number(r.oracle_objective)
              << '\t' << (r.passed() ? "pass" : "FAIL") << '\n';
  }
  std::cerr << (outcomes.size() - failed) << "/" << outcomes.size() << " instances passed\n";
  return failed == 0 ? 0 : kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal up-down constrained Poisson changepoint models for bedGraph coverage"};
  app.require_subcommand(1);
  Options o;
  if (const char* env = std::getenv("PEAKSEG_WORKDIR")) o.workdir = env;

  const auto add_storage = [&](CLI::App* cmd) {
    cmd->add_option("--storage", o.storage, "cost function storage")
        ->check(CLI::IsMember({"memory", "disk"}));
    cmd->add_option("--workdir", o.workdir, "directory for disk storage (default $PEAKSEG_WORKDIR)");
    cmd->add_flag("--keep-cost-files", o.keep_cost_files, "keep cost.db/cost.idx after decoding");
  };

  auto* solve = app.add_subcommand("solve", "optimal model for one penalty");
  solve->add_option("data", o.data_path, "bedGraph coverage file")->required();
  solve->add_option("--penalty", o.penalty, "non-negative penalty or Inf")->required();
  add_storage(solve);

  auto* search = app.add_subcommand("search", "most likely model with at most P peaks");
  search->add_option("data", o.data_path, "bedGraph coverage file")->required();
  search->add_option("--peaks", o.peaks, "target number of peaks")->required();
  add_storage(search);

  auto* bench = app.add_subcommand("bench", "time and interval counts on synthetic data");
  bench->add_option("--sizes", o.sizes, "data sizes")->delimiter(',');
  bench->add_option("--seed", o.seed, "random seed");
  bench->add_option("--output", o.output, "output TSV (default stdout)");
  bench->add_option("--workdir", o.workdir, "directory for disk storage");

  auto* validate = app.add_subcommand("validate", "compare against the brute-force oracle");
  validate->add_option("--seed", o.seed, "random seed");
  validate->add_option("--count", o.count, "number of random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? 0 : kExitInput;
  }

  try {
    if (*solve) return cmd_solve(o);
    if (*search) return cmd_search(o);
    if (*bench) return cmd_bench(o);
    if (*validate) return cmd_validate(o);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const StorageError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitStorage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
