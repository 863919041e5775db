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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "dpadmm/data_ingest.hpp"
#include "dpadmm/harness.hpp"
#include "dpadmm/losses.hpp"
#include "dpadmm/metrics.hpp"
#include "dpadmm/privacy.hpp"
#include "dpadmm/solvers.hpp"
#include "oracles.hpp"

namespace {

using namespace dpadmm;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

template <typename... Args>
std::string fmtn(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ModelMatrix random_model(std::mt19937_64& rng, Index d, Index p, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  ModelMatrix w(d, p);
  for (Index i = 0; i < w.size(); ++i) w(i) = g(rng);
  return w;
}

Eigen::VectorXd random_unit_ball(std::mt19937_64& rng, Index d) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd a(d);
  for (Index i = 0; i < d; ++i) a(i) = g(rng);
  return a / a.norm() * std::pow(u(rng), 1.0 / static_cast<double>(d));
}

// 1. Accountant golden values.
Outcome accountant_golden() {
  const double a = epsilon_bar(0.05, 1e-3, 100).epsilon_bar;
  const double b = epsilon_bar(0.1, 1e-3, 100).epsilon_bar;
  return {std::abs(a - 0.5009) <= 5e-4 && std::abs(b - 1.0193) <= 5e-4,
          fmtn("eps_bar(0.05)=%.6f eps_bar(0.1)=%.6f (tol 5e-4)", a, b)};
}

// 2. Accountant lower bound over random inputs.
Outcome accountant_lower_bound() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = INFINITY;
  for (int i = 0; i < 200; ++i) {
    const double eps = std::max(1e-4, u(rng));
    const double delta = std::pow(10.0, -2.0 - 8.0 * u(rng));
    const int t = 1 + static_cast<int>(2000 * u(rng));
    const double lb = eps * std::sqrt(t * std::log(1.0 / delta) / std::log(1.25 / delta));
    worst = std::min(worst, epsilon_bar(eps, delta, t).epsilon_bar - lb);
  }
  return {worst >= -1e-12, fmt("min(eps_bar - lower bound) = %.3e over 200 draws", worst)};
}

// 3. Closed-form primal zeroes the gradient of the linearized Lagrangian.
Outcome closed_form_optimality() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  const LossSpec loss = make_loss(LossKind::kBinaryLogistic, 104, 1);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const AgentShard shard = make_synthetic(1, 50, 104, 0.5, 1000 + i).front();
    const RegSpec reg = make_reg(i % 2 ? RegKind::kL1 : RegKind::kL2, u(rng), 10, 104, 1);
    const ModelMatrix wt = random_model(rng, 104, 1, 1.0);
    const ModelMatrix wg = random_model(rng, 104, 1, 1.0);
    const ModelMatrix gm = random_model(rng, 104, 1, 1.0);
    const double rho = u(rng), eta = u(rng);
    const ModelMatrix w = dpadmm_primal(shard, loss, reg, wt, wg, gm, rho, eta);
    const ModelMatrix g =
        f_i_subgrad(shard, loss, reg, wt) - gm + rho * (w - wg) + (w - wt) / eta;
    worst = std::max(worst, g.norm());
  }
  return {worst < 1e-8, fmt("max gradient norm %.3e (< 1e-8)", worst)};
}

// 4. Sensitivity of the DP-ADMM primal update on neighbouring shards.
Outcome sensitivity_oracle() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  const Index d = 8;
  const int m = 30;
  const LossSpec loss = make_loss(LossKind::kBinaryLogistic, d, 1);
  const RegSpec reg = make_reg(RegKind::kL2, 0.1, 1, d, 1);
  double worst_excess = -INFINITY, best_ratio = 0.0;
  for (int i = 0; i < 1001; ++i) {
    AgentShard s = make_synthetic(1, m, static_cast<int>(d), 0.3, 5000 + i).front();
    AgentShard s2 = s;
    const Index j = i % m;
    const ModelMatrix wt = random_model(rng, d, 1, 2.0);
    if (i == 1000) {
      // Adversarial pair: a unit row replaced by its negation.
      s.features.row(j) = s.features.row(j) / s.features.row(j).norm();
      s2 = s;
      s2.features.row(j) = -s.features.row(j);
    } else {
      s2.features.row(j) = random_unit_ball(rng, d).transpose();
      s2.labels(j, 0) = (rng() & 1) ? 1.0 : -1.0;
    }
    const ModelMatrix wg = random_model(rng, d, 1, 1.0);
    const ModelMatrix gm = random_model(rng, d, 1, 1.0);
    const double rho = u(rng), eta = u(rng);
    const double dist = (dpadmm_primal(s, loss, reg, wt, wg, gm, rho, eta) -
                         dpadmm_primal(s2, loss, reg, wt, wg, gm, rho, eta))
                            .norm();
    const double bound = sensitivity_dpadmm(loss.c1, m, rho, eta);
    worst_excess = std::max(worst_excess, dist - bound);
    best_ratio = std::max(best_ratio, dist / bound);
  }
  return {worst_excess <= 1e-12 && best_ratio >= 0.5 - 1e-12,
          fmtn("max(dist - bound) = %.3e, best dist/bound = %.15f (>= 0.5)", worst_excess,
               best_ratio)};
}

// 5. Gradients against central differences.
Outcome gradient_checks() {
  std::mt19937_64 rng(505);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd a = random_unit_ball(rng, 7);
    const double b = (i % 2) ? 1.0 : -1.0;
    const ModelMatrix w = random_model(rng, 7, 1, 2.0);
    worst = std::max(worst, oracle::rel_error(binary_logistic_grad(a, b, w),
                                              oracle::numeric_gradient(
                                                  [&](const ModelMatrix& x) {
                                                    return binary_logistic_loss(a, b, x);
                                                  },
                                                  w)));
    Eigen::VectorXd onehot = Eigen::VectorXd::Zero(3);
    onehot(i % 3) = 1.0;
    const ModelMatrix w3 = random_model(rng, 7, 3, 2.0);
    worst = std::max(worst, oracle::rel_error(multiclass_logistic_grad(a, onehot, w3),
                                              oracle::numeric_gradient(
                                                  [&](const ModelMatrix& x) {
                                                    return multiclass_logistic_loss(a, onehot, x);
                                                  },
                                                  w3)));
    for (RegKind kind : {RegKind::kL1, RegKind::kL2}) {
      const RegSpec reg = make_reg(kind, 0.5, 2, 7, 3);
      ModelMatrix x = w3;
      for (Index k = 0; k < x.size(); ++k) {
        if (std::abs(x(k)) < 1e-3) x(k) = 0.5;
      }
      worst = std::max(worst, oracle::rel_error(reg_subgrad(reg, x),
                                                oracle::numeric_gradient(
                                                    [&](const ModelMatrix& y) {
                                                      return reg_value(reg, y);
                                                    },
                                                    x)));
    }
  }
  return {worst < 1e-5, fmt("max relative error %.3e (< 1e-5)", worst)};
}

// 6. Adult preprocessing.
Outcome preprocessing_fidelity() {
  if (!oracle::adult_available()) {
    return {false, "Adult files not found in " + oracle::adult_dir().string()};
  }
  const auto records = load_adult_dir(oracle::adult_dir());
  const Dataset data = preprocess(records);
  const double row_max = data.features.rowwise().norm().maxCoeff();
  const double col_max = data.features.cwiseAbs().colwise().maxCoeff().maxCoeff();
  bool labels_ok = true;
  for (Index r = 0; r < data.rows(); ++r) {
    labels_ok &= data.labels(r, 0) == 1.0 || data.labels(r, 0) == -1.0;
  }
  const bool ok = data.rows() == 45222 && data.dim() == 104 && row_max <= 1.0 + 1e-12 &&
                  col_max <= 1.0 + 1e-12 && labels_ok && records.size() == 48842;
  return {ok, fmtn("%zu records -> %lld rows, d=%lld, max row norm %.15f, max |col| %.15f",
                   records.size(), static_cast<long long>(data.rows()),
                   static_cast<long long>(data.dim()), row_max, col_max)};
}

double max_dual_sum = 0.0;  // criterion 8, fed by criteria 7 and 9

// 7. Non-private ADMM reaches consensus and the centralized optimum.
Outcome nonprivate_convergence() {
  constexpr int n = 5;
  constexpr double kLambdaOverN = 0.01;
  auto shards = make_synthetic(n, 200, 10, 2.0, 7);
  Problem problem;
  problem.shards = shards;
  problem.loss = make_loss(LossKind::kBinaryLogistic, 10, 1);
  problem.reg = make_reg(RegKind::kL2, kLambdaOverN * n, n, 10, 1);
  HyperParams hp;
  hp.rho = 0.1;
  hp.t = 200;
  const RunTrace trace = run_admm(problem, hp, {1e-10, 5000});

  oracle::Centralized c;
  for (const auto& s : shards) c.shards.push_back(&s);
  c.reg_weight = kLambdaOverN;
  const Eigen::VectorXd w_star = c.minimize(10);
  const double f_star = c.value(w_star);

  double gap = 0.0;
  for (const auto& a : trace.agents) {
    gap = std::max(gap, (a.avg_w_tilde - trace.global.avg_w).norm());
  }
  const double objective = trace.records.back().aug_objective;
  for (const auto& r : trace.records) max_dual_sum = std::max(max_dual_sum, r.dual_sum_norm);
  return {gap < 1e-3 && std::abs(objective - f_star) < 1e-3,
          fmtn("max consensus gap %.3e (< 1e-3), |objective - oracle| = %.3e (< 1e-3)", gap,
               std::abs(objective - f_star))};
}

struct AdultRuns {
  std::map<std::string, ExperimentResult> results;
  std::string error;
};

ExperimentConfig adult_config(const std::string& algorithm, double eps,
                              const std::filesystem::path& out) {
  ExperimentConfig c;
  c.algorithm = parse_algorithm(algorithm);
  c.dataset = DatasetKind::kAdult;
  c.adult_dir = oracle::adult_dir().string();
  c.reg = RegKind::kL2;
  c.eps = eps;
  c.delta = 1e-3;
  c.n = 100;
  c.t = 100;
  c.repeats = 10;
  c.master_seed = 2026;
  c.plot_metrics = {};
  c.output = (out / (algorithm + "_" + fmt("%g", eps))).string();
  return c;
}

const AdultRuns& adult_runs(const std::filesystem::path& out) {
  static AdultRuns runs = [&] {
    AdultRuns r;
    if (!oracle::adult_available()) {
      r.error = "Adult files not found in " + oracle::adult_dir().string();
      return r;
    }
    const std::vector<std::pair<std::string, double>> plan = {
        {"dpadmm", 0.05}, {"dpadmm", 0.1}, {"dpadmm", 0.2}, {"pvp", 0.1},
        {"dvp", 0.1},     {"dpsgd", 0.1},  {"admm", 0.1}};
    for (const auto& [alg, eps] : plan) {
      ExperimentConfig c = adult_config(alg, eps, out);
      if (alg == "admm") c.repeats = 3;
      const auto start = std::chrono::steady_clock::now();
      r.results.emplace(alg + "@" + fmt("%g", eps), run_experiment(c));
      std::fprintf(stderr, "  ran %s eps=%g in %.1fs\n", alg.c_str(), eps,
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                       .count());
    }
    for (const auto& [key, res] : r.results) {
      if (key.rfind("dpsgd", 0) == 0) continue;
      for (const auto& run : res.runs) {
        for (const auto& row : run) {
          max_dual_sum = std::max(max_dual_sum, row.values[metric_index("dual_sum_norm")]);
        }
      }
    }
    return r;
  }();
  return runs;
}

struct FinalStat {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
};

FinalStat final_stat(const ExperimentResult& r, std::string_view metric) {
  const std::size_t col = metric_index(metric);
  FinalStat s;
  s.mean = r.averaged.mean.back().values[col];
  s.se = r.averaged.stddev.back().values[col] / std::sqrt(static_cast<double>(r.runs.size()));
  return s;
}

// 9. Privacy-utility ordering on Adult.
Outcome privacy_utility(const std::filesystem::path& out) {
  const AdultRuns& runs = adult_runs(out);
  if (!runs.error.empty()) return {false, runs.error};
  auto loss = [&](const std::string& key) {
    return final_stat(runs.results.at(key), "empirical_loss");
  };
  const FinalStat e05 = loss("dpadmm@0.05"), e10 = loss("dpadmm@0.1"), e20 = loss("dpadmm@0.2");
  const FinalStat pvp = loss("pvp@0.1"), dvp = loss("dvp@0.1"), sgd = loss("dpsgd@0.1");
  auto le = [](const FinalStat& a, const FinalStat& b) {
    return a.mean <= b.mean + std::hypot(a.se, b.se);
  };
  const bool monotone = le(e20, e10) && le(e10, e05);
  const bool beats = e10.mean <= pvp.mean && e10.mean <= dvp.mean && e10.mean <= sgd.mean;
  return {monotone && beats,
          fmtn("dpadmm loss eps=0.2/0.1/0.05: %.5f/%.5f/%.5f (se %.1e/%.1e/%.1e); at eps=0.1 "
               "pvp %.5f dvp %.5f dpsgd %.5f",
               e20.mean, e10.mean, e05.mean, e20.se, e10.se, e05.se, pvp.mean, dvp.mean,
               sgd.mean)};
}

// 10. Noise-free smooth-schedule DP-ADMM: gap decay and bound scaling.
Outcome bound_decay() {
  constexpr int n = 4;
  constexpr double kLambdaOverN = 0.01;
  auto shards = make_synthetic(n, 100, 6, 1.0, 10);
  Problem problem;
  problem.shards = shards;
  problem.loss = make_loss(LossKind::kBinaryLogistic, 6, 1);
  problem.reg = make_reg(RegKind::kL2, kLambdaOverN * n, n, 6, 1);

  oracle::Centralized c;
  for (const auto& s : shards) c.shards.push_back(&s);
  c.reg_weight = kLambdaOverN;
  const Eigen::VectorXd w_star = c.minimize(6);
  const double f_star = c.value(w_star);

  HyperParams hp;
  hp.rho = 0.1;
  hp.t = 256;
  hp.budget = PrivacyBudget{0.1, 1e-3};
  hp.c_w = w_star.norm();
  hp.noise_multiplier = 0.0;
  const RunTrace trace = run_dpadmm(problem, hp, Schedule::kSmooth, 1);
  std::vector<double> gaps;
  for (int t : {64, 128, 256}) gaps.push_back(trace.records[t - 1].aug_objective - f_star);
  const bool decays = gaps[1] <= gaps[0] && gaps[2] <= gaps[1];

  // Bound with the trailing constant made negligible.
  std::vector<double> m(n, 100.0);
  BoundInputs in;
  in.epsilon = 0.1;
  in.delta = 1e-3;
  in.c_w = 1e-3;
  in.lambda = kLambdaOverN * n;
  in.d = 6;
  in.m = m;
  in.rho = 0.1;
  in.beta = 1e-6;
  const auto consts = smooth_bound_constants(in);
  double worst = 0.0;
  for (int t : {64, 128, 256}) {
    worst = std::max(worst,
                     std::abs(utility_bound_smooth(4 * t, in) / utility_bound_smooth(t, in) - 0.5));
  }
  const bool halves = worst <= 0.05;
  return {decays && halves,
          fmtn("gap at t=64/128/256: %.4e/%.4e/%.4e; bound ratio deviation %.2e (M4/M3 = %.1e)",
               gaps[0], gaps[1], gaps[2], worst, consts.trailing / consts.leading)};
}

// 11. Solver wall-clock ordering on Adult.
Outcome timing_ordering(const std::filesystem::path& out) {
  const AdultRuns& runs = adult_runs(out);
  if (!runs.error.empty()) return {false, runs.error};
  const double dp = final_stat(runs.results.at("dpadmm@0.1"), "elapsed_s").mean;
  const double admm = final_stat(runs.results.at("admm@0.1"), "elapsed_s").mean;
  const double pvp = final_stat(runs.results.at("pvp@0.1"), "elapsed_s").mean;
  return {dp < admm && dp < pvp,
          fmtn("mean solver time for 100 iterations: dpadmm %.3fs, admm %.3fs, pvp %.3fs", dp,
               admm, pvp)};
}

// 8. Sum of duals stays at zero.
Outcome consensus_sum() {
  return {max_dual_sum <= 1e-10,
          fmt("max ||sum_i gamma_i^k|| = %.3e over criterion 7 and 9 runs (<= 1e-10)",
              max_dual_sum)};
}

// 12. Gaussian noise moments.
Outcome noise_statistics() {
  Rng rng = make_stream(12, {stream::kNoise});
  const ModelMatrix x = sample_noise(1000, 1000, 1.0, rng);
  const double mean = x.mean();
  const double var = (x.array() - mean).square().sum() / (x.size() - 1.0);
  return {std::abs(mean) <= 0.005 && var >= 0.99 && var <= 1.01,
          fmtn("mean %.5f, variance %.5f over 1e6 samples", mean, var)};
}

}  // namespace

int main() {
  oracle::TempDir out;
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  // Criterion 8 aggregates over 7 and 9, so it runs after them.
  const std::vector<Criterion> criteria = {
      {1, "accountant golden values", accountant_golden},
      {2, "accountant lower bound", accountant_lower_bound},
      {3, "closed-form primal optimality", closed_form_optimality},
      {4, "sensitivity oracle", sensitivity_oracle},
      {5, "gradient checks", gradient_checks},
      {6, "Adult preprocessing fidelity", preprocessing_fidelity},
      {7, "non-private convergence", nonprivate_convergence},
      {9, "privacy-utility monotonicity", [&] { return privacy_utility(out.path()); }},
      {8, "consensus-sum invariant", consensus_sum},
      {10, "bound decay", bound_decay},
      {11, "timing ordering", [&] { return timing_ordering(out.path()); }},
      {12, "noise statistics", noise_statistics},
  };
  std::map<int, std::string> lines;
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += o.pass ? 0 : 1;
    lines[c.id] = fmtn("[%s] criterion %2d %-32s %s [%.2fs]", o.pass ? "PASS" : "FAIL", c.id,
                       c.name, o.detail.c_str(), secs);
    std::fprintf(stderr, "%s\n", lines[c.id].c_str());
  }
  std::printf("\nAcceptance summary\n");
  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
