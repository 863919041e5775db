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

#ifndef DPADMM_SOLVERS_HPP_
#define DPADMM_SOLVERS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpadmm/data_ingest.hpp"
#include "dpadmm/losses.hpp"
#include "dpadmm/privacy.hpp"

namespace dpadmm {

// Which convergence regime drives the step size and the running average of
// the noisy primals.
//   kNonSmooth: eta ~ 1/sqrt(k), average of w_tilde over k = 0 .. t-1
//   kSmooth:    eta^-1 grows like sqrt(k), average over k = 1 .. t
enum class Schedule { kNonSmooth, kSmooth };

struct ScheduleInputs {
  double c_w = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 0.25;
  double c4 = 1.0;
  double lambda = 0.0;
  int n = 1;
  Index d = 1;
  Index p = 1;
  double epsilon = 0.1;
  double delta = 1e-3;
};

// eta_i^k = c_w / sqrt(2k) * ((c1 + lambda c2 / n)^2
//                             + 8 d p c1^2 ln(1.25/delta) / (m_i^2 eps^2))^-1/2
double step_size_nonsmooth(int k, const ScheduleInputs& in, double m_i);

// eta_i^k = (c3 + lambda c4 / n
//            + 4 c1 sqrt(d p k ln(1.25/delta)) / (m_i eps c_w))^-1
double step_size_smooth(int k, const ScheduleInputs& in, double m_i);

struct HyperParams {
  double rho = 0.1;
  int t = 100;
  std::optional<PrivacyBudget> budget;
  double c_w = 1.0;
  // Scales every noise standard deviation. 0 gives noise-free runs with the
  // private step-size schedule intact.
  double noise_multiplier = 1.0;
  // Replaces the step-size schedule of DP-ADMM with a constant.
  std::optional<double> fixed_eta;
};

void validate(const HyperParams& hp);

// Proximal gradient descent with backtracking for the exact primal
// subproblems. The residual is the norm of the gradient mapping, which equals
// the gradient norm when there is no l1 term.
struct InnerSolverParams {
  double tolerance = 1e-6;
  int max_iters = 500;
};

struct InnerResult {
  ModelMatrix w;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Smooth part of a composite objective: returns the value and, when grad is
// non-null, writes the gradient.
using SmoothObjective =
    std::function<double(const ModelMatrix& w, ModelMatrix* grad)>;

// Minimizes smooth(w) + l1_weight * ||w||_1 from x0. lipschitz is an initial
// curvature estimate; backtracking corrects it when too small. Throws
// SolverError on non-finite values or a failed line search.
InnerResult minimize_composite(const SmoothObjective& smooth, double l1_weight,
                               ModelMatrix x0, double lipschitz,
                               const InnerSolverParams& params);

// Closed-form minimizer of the linearized augmented Lagrangian
//   f_i(w~) + <f_i'(w~), w - w~> - <gamma, w - w_global>
//     + rho/2 ||w - w_global||^2 + ||w - w~||^2 / (2 eta)
// i.e. (-f_i'(w~) + gamma + rho w_global + w~/eta) / (rho + 1/eta).
ModelMatrix dpadmm_primal(const AgentShard& shard, const LossSpec& loss,
                          const RegSpec& reg, const ModelMatrix& w_tilde_prev,
                          const ModelMatrix& w_global, const ModelMatrix& gamma,
                          double rho, double eta, Exec exec = Exec::kParallel);

// argmin_w f_i(w) - <gamma, w - w_global> + rho/2 ||w - w_global||^2, solved
// iteratively from warm_start (zeros when absent).
InnerResult admm_primal(const AgentShard& shard, const LossSpec& loss,
                        const RegSpec& reg, const ModelMatrix& w_global,
                        const ModelMatrix& gamma, double rho,
                        const InnerSolverParams& inner,
                        const ModelMatrix* warm_start = nullptr,
                        Exec exec = Exec::kParallel);

// mean(w_tilde) - mean(gamma) / rho
ModelMatrix aggregate(std::span<const ModelMatrix> w_tilde,
                      std::span<const ModelMatrix> gamma, double rho);

// gamma - rho (w_tilde - w_global)
ModelMatrix dual_update(const ModelMatrix& gamma, const ModelMatrix& w_tilde,
                        const ModelMatrix& w_global, double rho);

struct AgentState {
  ModelMatrix w;            // latest local primal
  ModelMatrix w_tilde;      // latest shared (noisy) primal
  ModelMatrix gamma;        // latest dual
  ModelMatrix avg_w_tilde;  // running average, indexing per algorithm
  ModelMatrix avg_gamma;    // average of gamma^1 .. gamma^t
};

struct GlobalState {
  ModelMatrix w;
  ModelMatrix avg_w;  // average of w^1 .. w^k
  int k = 0;
};

struct TraceRecord {
  int k = 0;
  double aug_objective = 0.0;       // on running averages
  double empirical_loss = 0.0;      // on current shared primals
  double test_error = 0.0;          // of the current global model
  double elapsed_s = 0.0;           // cumulative solver time
  double aug_objective_last = 0.0;  // on current iterates
  long inner_iters = 0;             // summed over agents this iteration
  double dual_sum_norm = 0.0;       // ||sum_i gamma_i^k||_F
  double sigma = 0.0;               // agent 0 noise standard deviation
  double eta = 0.0;                 // agent 0 step size (DP-ADMM only)
};

struct RunTrace {
  std::string algorithm;
  std::vector<TraceRecord> records;
  std::vector<AgentState> agents;
  GlobalState global;
  // Set for reconstructions that only approximate the reference baseline.
  bool approximate = false;
};

struct Problem {
  std::span<const AgentShard> shards;
  LossSpec loss;
  RegSpec reg;
  const SampleSet* test = nullptr;  // optional, for test_error
};

struct RunOptions {
  Exec exec = Exec::kParallel;
  // When false only the final iteration computes metrics; earlier records
  // carry NaN in the metric columns.
  bool evaluate_metrics = true;
};

struct DpsgdParams {
  double learning_rate = 0.1;
  double clip = 1.0;
};

// Model column count for a problem: 1 for binary, the label width otherwise.
Index model_cols(const Problem& problem);

ScheduleInputs schedule_inputs(const Problem& problem, const HyperParams& hp);

RunTrace run_dpadmm(const Problem& problem, const HyperParams& hp,
                    Schedule schedule, std::uint64_t seed,
                    const RunOptions& options = {});

RunTrace run_admm(const Problem& problem, const HyperParams& hp,
                  const InnerSolverParams& inner,
                  const RunOptions& options = {});

RunTrace run_pvp(const Problem& problem, const HyperParams& hp,
                 const InnerSolverParams& inner, std::uint64_t seed,
                 const RunOptions& options = {});

// Dual variable perturbation, reconstructed: the dual fed to each exact
// primal step carries Gaussian noise of the primal-perturbation magnitude;
// aggregation and the dual update use the unperturbed dual.
RunTrace run_dvp(const Problem& problem, const HyperParams& hp,
                 const InnerSolverParams& inner, std::uint64_t seed,
                 const RunOptions& options = {});

RunTrace run_dpsgd(const Problem& problem, const HyperParams& hp,
                   const DpsgdParams& sgd, std::uint64_t seed,
                   const RunOptions& options = {});

}  // namespace dpadmm

#endif  // DPADMM_SOLVERS_HPP_
