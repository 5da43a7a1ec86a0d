#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "mimm/app/estimate.hpp"
#include "mimm/gaussian/params.hpp"

namespace mimm::app {

/// A ground-truth Gaussian model and the dependence spec it is fitted with.
struct TrueModel {
  std::string label;
  std::variant<ClassicalARParams, ClassicalVARParams> params;

  DependenceSpec spec() const;
  Vector true_theta() const;
  TimeSeries simulate(std::size_t n, int burn_in, std::uint64_t seed) const;
  std::string describe() const;  // compact parameter text for tables
};

struct EstimatorRun {
  std::string label;
  Estimator kind = Estimator::ple_naive;
  EstimatorOptions options;
};

struct BenchmarkCell {
  std::size_t model = 0;  // index into Manifest::models
  std::size_t n = 0;
  EstimatorRun estimator;
};

struct Manifest {
  std::string name = "benchmark";
  std::size_t reps = 30;
  std::uint64_t seed = 1;
  double time_limit_s = 900.0;  // per run
  int burn_in = 100;
  std::size_t threads = 1;
  std::vector<TrueModel> models;
  std::vector<BenchmarkCell> cells;
};

/// JSON manifest: {name, reps, seed, time_limit_s, burn_in, models: [...],
/// groups: [{models: [labels], n: [...], estimators: [...]}]}.  Each group
/// expands to the product of its lists.
Manifest parse_manifest(const std::string& json_text);
Manifest load_manifest(const std::filesystem::path& path);

enum class RunStatus { ok, timeout, failed, skipped };
const char* to_string(RunStatus status) noexcept;

struct RunRecord {
  std::size_t cell = 0;
  std::size_t rep = 0;
  RunStatus status = RunStatus::skipped;
  double error = 0.0;   // ‖θ̂ − θ*‖₂
  double time_s = 0.0;  // estimator wall time, data generation excluded
  bool converged = false;
  std::string message;
};

struct BenchmarkRow {
  std::string model;
  std::string params;
  std::size_t n = 0;
  std::string estimator;
  std::size_t reps = 0;
  std::size_t completed = 0;
  std::size_t failed = 0;
  bool timed_out = false;
  double mean_error = 0.0;
  double sd_error = 0.0;
  double mean_time_s = 0.0;
  std::string message;  // first failure message, if any
};

struct BenchmarkReport {
  std::string name;
  std::vector<BenchmarkRow> rows;  // one per cell, manifest order
  std::vector<RunRecord> runs;
};

using ProgressCallback = std::function<void(const RunRecord&)>;

/// Runs every (cell, repetition) on a worker pool.  Repetition r of every
/// cell uses data seed manifest.seed + r.  A cell stops scheduling further
/// repetitions after its first timeout.
BenchmarkReport run_benchmark(const Manifest& manifest, const ProgressCallback& progress = {});

/// Tidy CSV: one line per cell; timed-out cells print "--" for error and time.
std::string rows_csv(const BenchmarkReport& report);
/// One line per run, for error/time-vs-n curves.
std::string runs_csv(const BenchmarkReport& report, const Manifest& manifest);
/// Aligned text table.
std::string rows_text(const BenchmarkReport& report);

}  // namespace mimm::app
