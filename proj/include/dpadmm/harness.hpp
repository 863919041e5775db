// Copyright 2026 The dpadmm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef DPADMM_HARNESS_HPP_
#define DPADMM_HARNESS_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpadmm/losses.hpp"
#include "dpadmm/solvers.hpp"

namespace dpadmm {

// Environment variable naming the directory that holds adult.data and
// adult.test when a config does not set adult_dir.
inline constexpr const char* kDataDirEnv = "DPADMM_DATA_DIR";

enum class Algorithm { kAdmm, kPvp, kDvp, kDpadmm, kDpsgd };
enum class DatasetKind { kAdult, kSynthetic };
enum class ScheduleChoice { kAuto, kNonSmooth, kSmooth };
enum class ColumnStats { kFull, kTrain };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);

// Experiment description. Every field has a key in the flat config format;
// see parse_config.
struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kDpadmm;
  DatasetKind dataset = DatasetKind::kAdult;
  std::string adult_dir;  // empty: $DPADMM_DATA_DIR, then data/adult
  int n = 100;
  int t = 100;
  double rho = 0.1;
  double lambda_over_n = 1e-6;
  RegKind reg = RegKind::kL2;
  double eps = 0.1;
  double delta = 1e-3;
  std::optional<double> c_w;  // default 23 for l1, 89 for l2
  bool pretrain = false;      // estimate c_w as ||w*|| from a non-private run
  ScheduleChoice schedule = ScheduleChoice::kAuto;
  std::vector<std::uint64_t> seeds;  // explicit list wins over master_seed
  std::uint64_t master_seed = 1;
  int repeats = 10;
  double inner_tolerance = 1e-6;
  int inner_max_iters = 500;
  double lr = 0.1;
  double clip = 1.0;
  double noise_multiplier = 1.0;
  int n_train = 40000;
  ColumnStats column_stats = ColumnStats::kFull;
  int synthetic_m = 200;
  int synthetic_d = 10;
  double synthetic_separation = 2.0;
  Exec exec = Exec::kParallel;
  int threads = 0;  // 0 keeps the OpenMP default
  std::vector<std::string> plot_metrics = {"aug_objective", "empirical_loss",
                                           "test_error"};
  std::string output = "results";

  double resolved_c_w() const;
  Schedule resolved_schedule() const;
  std::vector<std::uint64_t> resolved_seeds() const;
  std::filesystem::path resolved_adult_dir() const;
  bool is_private() const { return algorithm != Algorithm::kAdmm; }
};

// Parses "key = value" lines; '#' starts a comment. Unknown or repeated keys
// and malformed values throw ConfigError naming the line.
ExperimentConfig parse_config(std::string_view text,
                              std::string_view origin = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

// Throws ConfigError describing the first violated constraint.
void validate(const ExperimentConfig& config);

// Sorted key=value lines covering every field.
// parse_config(canonical_config(c)) reproduces c.
std::string canonical_config(const ExperimentConfig& config);

// 64-bit FNV-1a of canonical_config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

// Trace columns after k, in file order.
inline constexpr std::array<std::string_view, 7> kMetricNames = {
    "aug_objective",      "empirical_loss", "test_error",   "elapsed_s",
    "aug_objective_last", "inner_iters",    "dual_sum_norm"};

// Column index of a metric name; throws ArgumentError when unknown.
std::size_t metric_index(std::string_view metric);

struct TraceRow {
  int k = 0;
  std::array<double, kMetricNames.size()> values{};
  bool operator==(const TraceRow&) const = default;
};

std::vector<TraceRow> to_rows(const RunTrace& trace);

struct AveragedTrace {
  std::vector<TraceRow> mean;
  std::vector<TraceRow> stddev;  // sample standard deviation, 0 for one run
  bool operator==(const AveragedTrace&) const = default;
};

// Element-wise mean and standard deviation over runs of equal length.
AveragedTrace average_traces(const std::vector<std::vector<TraceRow>>& runs);

// Header: k,aug_objective,empirical_loss,test_error,elapsed_s,
//         aug_objective_last,inner_iters,dual_sum_norm
void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<TraceRow>& rows);
std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

// Same columns followed by <metric>_stddev for each metric.
void write_averaged_csv(const std::filesystem::path& path,
                        const AveragedTrace& trace);
AveragedTrace read_averaged_csv(const std::filesystem::path& path);

struct PlotHeader {
  std::string config_hash;
  std::string algorithm;
  std::optional<PrivacyBudget> budget;  // absent for non-private runs
  int t = 0;
};

struct PlotData {
  PlotHeader header;
  std::string metric;
  std::optional<double> epsilon_bar;
  std::vector<std::pair<int, double>> points;
};

// Two-column "k value" text file. The '#' header records the config hash and,
// for private runs, epsilon, delta, the accumulated epsilon_bar and its moment
// order. Unknown or empty metric names and empty traces throw ArgumentError
// before the file is created.
void emit_plotdata(const AveragedTrace& trace, std::string_view metric,
                   const PlotHeader& header,
                   const std::filesystem::path& path);
PlotData read_plotdata(const std::filesystem::path& path);

struct ExperimentResult {
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  double c_w = 0.0;
  std::optional<AccountantReport> accountant;
  std::vector<std::vector<TraceRow>> runs;
  AveragedTrace averaged;
  std::vector<std::filesystem::path> csv_files;   // per seed, then averaged
  std::vector<std::filesystem::path> plot_files;
  std::filesystem::path manifest;
  bool approximate = false;
};

// Validates, loads data, runs every seed and writes
//   <output>/<algorithm>_seed<seed>.csv   one per seed
//   <output>/<algorithm>_avg.csv          seed average with *_stddev columns
//   <output>/<algorithm>_<metric>.dat     one per plot metric
//   <output>/<algorithm>_manifest.txt     canonical config, hash and seeds
ExperimentResult run_experiment(const ExperimentConfig& config);

struct SweepRow {
  std::string source;
  std::string config_hash;
  Algorithm algorithm = Algorithm::kDpadmm;
  double eps = 0.0;
  double delta = 0.0;
  double epsilon_bar = 0.0;  // NaN for non-private runs
  double final_empirical_loss = 0.0;
  double final_test_error = 0.0;
  double runtime_s = 0.0;  // mean solver time of the last iteration
};

struct SweepFailure {
  std::string source;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepFailure> failures;
  bool ok() const { return failures.empty(); }
};

// Runs each config file in order. Invalid or failing configs are recorded
// and skipped.
SweepResult sweep(const std::vector<std::filesystem::path>& configs);

// Config files (*.cfg) of a directory in lexicographic order.
std::vector<std::filesystem::path> list_configs(
    const std::filesystem::path& dir);

void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_summary_csv(const std::filesystem::path& path);

}  // namespace dpadmm

#endif  // DPADMM_HARNESS_HPP_
