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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dpadmm/data_ingest.hpp"
#include "dpadmm/harness.hpp"
#include "dpadmm/privacy.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_run(const std::string& config_path) {
  const dpadmm::ExperimentConfig config = dpadmm::load_config(config_path);
  const dpadmm::ExperimentResult result = dpadmm::run_experiment(config);
  const auto& last = result.averaged.mean.back();
  std::printf("algorithm %s  config %s  seeds %zu\n",
              std::string(dpadmm::to_string(config.algorithm)).c_str(),
              result.config_hash.c_str(), result.seeds.size());
  if (result.accountant) {
    std::printf("epsilon_bar %.4f (tau* = %d)\n", result.accountant->epsilon_bar,
                result.accountant->tau_star);
  }
  std::printf("final: aug_objective %.6g  empirical_loss %.6g  test_error %.4f  "
              "solver time %.3fs\n",
              last.values[dpadmm::metric_index("aug_objective")],
              last.values[dpadmm::metric_index("empirical_loss")],
              last.values[dpadmm::metric_index("test_error")],
              last.values[dpadmm::metric_index("elapsed_s")]);
  for (const auto& f : result.csv_files) std::printf("wrote %s\n", f.string().c_str());
  for (const auto& f : result.plot_files) std::printf("wrote %s\n", f.string().c_str());
  std::printf("wrote %s\n", result.manifest.string().c_str());
  return 0;
}

int cmd_sweep(const std::string& dir, std::string summary) {
  const auto configs = dpadmm::list_configs(dir);
  if (configs.empty()) {
    std::cerr << "no *.cfg files in " << dir << "\n";
    return 1;
  }
  const dpadmm::SweepResult result = dpadmm::sweep(configs);
  if (summary.empty()) summary = (fs::path(dir) / "summary.csv").string();
  dpadmm::write_summary_csv(summary, result.rows);

  std::printf("%-32s %-7s %-8s %-8s %-9s %-12s %-10s %-9s\n", "config", "alg", "eps",
              "delta", "eps_bar", "emp_loss", "test_err", "time_s");
  for (const auto& r : result.rows) {
    std::printf("%-32s %-7s %-8g %-8g %-9.4f %-12.6g %-10.4f %-9.3f\n",
                fs::path(r.source).filename().string().c_str(),
                std::string(dpadmm::to_string(r.algorithm)).c_str(), r.eps, r.delta,
                r.epsilon_bar, r.final_empirical_loss, r.final_test_error, r.runtime_s);
  }
  for (const auto& f : result.failures) {
    std::cerr << "skipped " << f.source << ": " << f.message << "\n";
  }
  std::printf("wrote %s (%zu rows, %zu failed)\n", summary.c_str(), result.rows.size(),
              result.failures.size());
  return result.ok() ? 0 : 1;
}

int cmd_account(double eps, double delta, int iters, std::optional<double> target) {
  const dpadmm::AccountantReport rep = dpadmm::epsilon_bar(eps, delta, iters);
  std::printf("epsilon %g  delta %g  t %d\n", eps, delta, iters);
  std::printf("epsilon_bar %.6f  tau* %d\n", rep.epsilon_bar, rep.tau_star);
  std::printf("epsilon_bar floor %.6g\n", dpadmm::delta_floor(delta));
  if (target) {
    const double per_iter = dpadmm::per_iteration_epsilon(*target, delta, iters);
    std::printf("per-iteration epsilon for epsilon_bar %g: %.6g\n", *target, per_iter);
  }
  return 0;
}

int cmd_ingest(const std::string& adult, const std::string& out) {
  const fs::path src(adult);
  const auto records =
      fs::is_directory(src) ? dpadmm::load_adult_dir(src) : dpadmm::load_adult(src);
  const dpadmm::Dataset data = dpadmm::preprocess(records);
  dpadmm::write_dataset_csv(data, out);
  std::printf("%zu records -> %lld rows, d = %lld; wrote %s\n", records.size(),
              static_cast<long long>(data.rows()), static_cast<long long>(data.dim()),
              out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private distributed ERM with ADMM"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);

  std::string config_dir, summary;
  auto* sw = app.add_subcommand("sweep", "Run every *.cfg in a directory");
  sw->add_option("--config-dir", config_dir, "Directory of configs")
      ->required()
      ->check(CLI::ExistingDirectory);
  sw->add_option("--summary", summary, "Summary CSV (default <config-dir>/summary.csv)");

  double eps = 0.1, delta = 1e-3;
  int iters = 100;
  std::optional<double> target;
  auto* acc = app.add_subcommand("account", "Total privacy loss after t iterations");
  acc->add_option("--eps", eps, "Per-iteration epsilon")->required();
  acc->add_option("--delta", delta, "Delta")->required();
  acc->add_option("--iters", iters, "Iteration count")->required();
  acc->add_option("--target", target, "Solve for the per-iteration epsilon reaching this total");

  std::string adult, out;
  auto* ing = app.add_subcommand("ingest", "Preprocess Adult into a CSV dump");
  ing->add_option("--adult", adult, "adult.data file or directory with adult.data/adult.test")
      ->required();
  ing->add_option("--out", out, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path);
    if (*sw) return cmd_sweep(config_dir, summary);
    if (*acc) return cmd_account(eps, delta, iters, target);
    if (*ing) return cmd_ingest(adult, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
