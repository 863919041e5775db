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

#include "dpadmm/solvers.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "dpadmm/kernels.hpp"
#include "dpadmm/metrics.hpp"

namespace dpadmm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

// Runs fn(i) for i in [0, n), in parallel when requested. The first exception
// thrown by any worker is rethrown on the calling thread.
template <typename Fn>
void for_each_agent(std::size_t n, Exec exec, Fn&& fn) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(static) if (exec == Exec::kParallel)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(dpadmm_solver_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

ModelMatrix soft_threshold(const ModelMatrix& x, double tau) {
  return x.unaryExpr([tau](double v) {
    return v > tau ? v - tau : (v < -tau ? v + tau : 0.0);
  });
}

void check_problem(const Problem& problem) {
  if (problem.shards.empty()) throw ArgumentError("no agent shards");
  validate(problem.loss);
  validate(problem.reg);
  if (static_cast<std::size_t>(problem.reg.n) != problem.shards.size()) {
    throw ArgumentError("regularizer agent count " +
                        std::to_string(problem.reg.n) + " != shard count " +
                        std::to_string(problem.shards.size()));
  }
  const Index d = problem.shards.front().dim();
  const Index q = problem.shards.front().label_dim();
  for (const auto& s : problem.shards) {
    if (s.rows() < 1) throw ArgumentError("empty agent shard");
    if (s.dim() != d || s.label_dim() != q) {
      throw ArgumentError("agent shards disagree on dimensions");
    }
  }
  if (problem.loss.kind == LossKind::kBinaryLogistic && q != 1) {
    throw ArgumentError("binary logistic loss needs a single label column");
  }
}

const PrivacyBudget& require_budget(const HyperParams& hp, const char* who) {
  if (!hp.budget) {
    throw ArgumentError(std::string(who) + " needs a privacy budget");
  }
  validate(*hp.budget);
  return *hp.budget;
}

void require_strongly_convex(const Problem& problem, const char* who) {
  if (problem.reg.kind != RegKind::kL2) {
    throw PreconditionError(std::string(who) +
                            " requires a smooth, strongly convex (l2) "
                            "regularizer");
  }
  if (!(problem.reg.lambda > 0.0)) {
    throw PreconditionError(std::string(who) + " requires lambda > 0");
  }
}

// How the running average of the shared primal is indexed.
enum class Averaging { kFromZero, kFromOne };

// Shared iteration skeleton of the four consensus variants: per-agent step,
// aggregation at the barrier, dual update, running averages and metrics.
class ConsensusDriver {
 public:
  ConsensusDriver(const Problem& problem, const HyperParams& hp,
                  const RunOptions& options, Averaging averaging)
      : problem_(problem),
        hp_(hp),
        options_(options),
        averaging_(averaging),
        n_(problem.shards.size()) {
    const Index d = problem.shards.front().dim();
    const Index p = model_cols(problem);
    const ModelMatrix zero = ModelMatrix::Zero(d, p);
    w_.assign(n_, zero);
    w_tilde_.assign(n_, zero);
    gamma_.assign(n_, zero);
    sum_w_tilde_.assign(n_, zero);
    sum_gamma_.assign(n_, zero);
    global_ = zero;
    sum_global_ = zero;
  }

  ModelMatrix& w(std::size_t i) { return w_[i]; }
  ModelMatrix& w_tilde(std::size_t i) { return w_tilde_[i]; }
  const ModelMatrix& gamma(std::size_t i) const { return gamma_[i]; }
  const ModelMatrix& global() const { return global_; }

  // step(i, k) updates w(i) and w_tilde(i) and returns the number of inner
  // iterations it spent.
  template <typename Step>
  RunTrace run(std::string name, Step&& step,
               const std::function<double(int)>& sigma_of_k,
               const std::function<double(int)>& eta_of_k) {
    RunTrace trace;
    trace.algorithm = std::move(name);
    trace.records.reserve(static_cast<std::size_t>(hp_.t));
    std::vector<long> inner(n_, 0);
    double elapsed = 0.0;

    for (int k = 1; k <= hp_.t; ++k) {
      if (averaging_ == Averaging::kFromZero) {
        for (std::size_t i = 0; i < n_; ++i) sum_w_tilde_[i] += w_tilde_[i];
      }

      const auto start = Clock::now();
      for_each_agent(n_, options_.exec,
                     [&](std::size_t i) { inner[i] = step(i, k); });
      global_ = aggregate(w_tilde_, gamma_, hp_.rho);
      for_each_agent(n_, options_.exec, [&](std::size_t i) {
        gamma_[i] = dual_update(gamma_[i], w_tilde_[i], global_, hp_.rho);
      });
      elapsed += std::chrono::duration<double>(Clock::now() - start).count();

      ModelMatrix gamma_sum = ModelMatrix::Zero(global_.rows(), global_.cols());
      for (std::size_t i = 0; i < n_; ++i) {
        if (averaging_ == Averaging::kFromOne) sum_w_tilde_[i] += w_tilde_[i];
        sum_gamma_[i] += gamma_[i];
        gamma_sum += gamma_[i];
      }
      sum_global_ += global_;

      TraceRecord rec;
      rec.k = k;
      rec.elapsed_s = elapsed;
      for (long v : inner) rec.inner_iters += v;
      rec.dual_sum_norm = gamma_sum.norm();
      rec.sigma = sigma_of_k ? sigma_of_k(k) : 0.0;
      rec.eta = eta_of_k ? eta_of_k(k) : kNaN;
      record_metrics(rec, k);
      trace.records.push_back(rec);
    }
    finish(trace);
    return trace;
  }

 private:
  std::vector<ModelMatrix> averages(const std::vector<ModelMatrix>& sums,
                                    int k) const {
    std::vector<ModelMatrix> out;
    out.reserve(sums.size());
    for (const auto& s : sums) out.push_back(s / static_cast<double>(k));
    return out;
  }

  void record_metrics(TraceRecord& rec, int k) const {
    if (!options_.evaluate_metrics && k != hp_.t) {
      rec.aug_objective = rec.aug_objective_last = kNaN;
      rec.empirical_loss = rec.test_error = kNaN;
      return;
    }
    const auto avg_agents = averages(sum_w_tilde_, k);
    const ModelMatrix avg_global = sum_global_ / static_cast<double>(k);
    rec.aug_objective =
        augmented_objective(problem_.shards, problem_.loss, problem_.reg,
                            avg_agents, avg_global, hp_.rho, options_.exec);
    rec.aug_objective_last =
        augmented_objective(problem_.shards, problem_.loss, problem_.reg,
                            w_tilde_, global_, hp_.rho, options_.exec);
    rec.empirical_loss = empirical_loss(problem_.shards, problem_.loss,
                                        w_tilde_, options_.exec);
    rec.test_error = problem_.test
                         ? classification_error(global_, *problem_.test)
                         : kNaN;
  }

  void finish(RunTrace& trace) const {
    const double t = static_cast<double>(hp_.t);
    trace.agents.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      trace.agents[i] = AgentState{w_[i], w_tilde_[i], gamma_[i],
                                   sum_w_tilde_[i] / t, sum_gamma_[i] / t};
    }
    trace.global = GlobalState{global_, sum_global_ / t, hp_.t};
  }

  const Problem& problem_;
  const HyperParams& hp_;
  const RunOptions& options_;
  Averaging averaging_;
  std::size_t n_;
  std::vector<ModelMatrix> w_, w_tilde_, gamma_, sum_w_tilde_, sum_gamma_;
  ModelMatrix global_, sum_global_;
};

// sigma of the constant-variance mechanisms (primal and dual perturbation).
double perturbation_sigma(const Problem& problem, const HyperParams& hp,
                          double m_i) {
  if (hp.noise_multiplier == 0.0) return 0.0;
  const PrivacyBudget& b = *hp.budget;
  return hp.noise_multiplier *
         gaussian_sigma(sensitivity_pvp(problem.loss.c1, m_i, hp.rho,
                                        problem.reg.lambda,
                                        static_cast<double>(problem.reg.n)),
                        b.epsilon, b.delta);
}

}  // namespace

double step_size_nonsmooth(int k, const ScheduleInputs& in, double m_i) {
  if (k < 1) throw ArgumentError("step size: iteration k must be >= 1");
  if (!(in.c_w > 0.0 && in.c1 > 0.0 && in.c2 > 0.0 && m_i > 0.0 &&
        in.epsilon > 0.0 && in.delta > 0.0 && in.n >= 1)) {
    throw ArgumentError("step_size_nonsmooth: constants must be positive");
  }
  const double lin = in.c1 + in.lambda * in.c2 / in.n;
  const double dp = static_cast<double>(in.d * in.p);
  const double noise = 8.0 * dp * in.c1 * in.c1 * std::log(1.25 / in.delta) /
                       (m_i * m_i * in.epsilon * in.epsilon);
  return in.c_w / std::sqrt(2.0 * k) / std::sqrt(lin * lin + noise);
}

double step_size_smooth(int k, const ScheduleInputs& in, double m_i) {
  if (k < 1) throw ArgumentError("step size: iteration k must be >= 1");
  if (!(in.c_w > 0.0 && in.c1 > 0.0 && in.c3 > 0.0 && in.c4 >= 0.0 &&
        m_i > 0.0 && in.epsilon > 0.0 && in.delta > 0.0 && in.n >= 1)) {
    throw ArgumentError("step_size_smooth: constants must be positive");
  }
  const double dp = static_cast<double>(in.d * in.p);
  const double noise = 4.0 * in.c1 *
                       std::sqrt(dp * k * std::log(1.25 / in.delta)) /
                       (m_i * in.epsilon * in.c_w);
  return 1.0 / (in.c3 + in.lambda * in.c4 / in.n + noise);
}

void validate(const HyperParams& hp) {
  if (!(hp.rho > 0.0)) throw ArgumentError("rho must be > 0");
  if (hp.t < 1) throw ArgumentError("iteration count t must be >= 1");
  if (!(hp.c_w > 0.0)) throw ArgumentError("c_w must be > 0");
  if (!(hp.noise_multiplier >= 0.0)) {
    throw ArgumentError("noise multiplier must be >= 0");
  }
  if (hp.fixed_eta && !(*hp.fixed_eta > 0.0)) {
    throw ArgumentError("fixed eta must be > 0");
  }
  if (hp.budget) validate(*hp.budget);
}

InnerResult minimize_composite(const SmoothObjective& smooth, double l1_weight,
                               ModelMatrix x0, double lipschitz,
                               const InnerSolverParams& params) {
  if (!(lipschitz > 0.0)) throw ArgumentError("lipschitz estimate must be > 0");
  if (!(l1_weight >= 0.0)) throw ArgumentError("l1 weight must be >= 0");
  constexpr int kMaxBacktracks = 60;

  InnerResult out;
  out.w = std::move(x0);
  ModelMatrix grad;
  double value = smooth(out.w, &grad);
  if (!std::isfinite(value)) throw SolverError("objective is not finite at start");
  double step = 1.0 / lipschitz;

  ModelMatrix trial, trial_grad;
  for (int it = 0;; ++it) {
    double residual = 0.0;
    double trial_value = 0.0;
    int backtracks = 0;
    while (true) {
      trial = out.w - step * grad;
      if (l1_weight > 0.0) trial = soft_threshold(trial, step * l1_weight);
      const ModelMatrix diff = trial - out.w;
      residual = l1_weight > 0.0 ? diff.norm() / step : grad.norm();
      if (residual <= params.tolerance || it >= params.max_iters) break;
      trial_value = smooth(trial, &trial_grad);
      const double model = value + grad.cwiseProduct(diff).sum() +
                           diff.squaredNorm() / (2.0 * step);
      if (std::isfinite(trial_value) &&
          trial_value <= model + 1e-12 * std::abs(value)) {
        break;
      }
      if (++backtracks > kMaxBacktracks) {
        throw SolverError("inner solver line search failed");
      }
      step *= 0.5;
    }
    out.residual = residual;
    out.iterations = it;
    if (residual <= params.tolerance) {
      out.converged = true;
      return out;
    }
    if (it >= params.max_iters) return out;
    out.w.swap(trial);
    grad.swap(trial_grad);
    value = trial_value;
  }
}

ModelMatrix dpadmm_primal(const AgentShard& shard, const LossSpec& loss,
                          const RegSpec& reg, const ModelMatrix& w_tilde_prev,
                          const ModelMatrix& w_global, const ModelMatrix& gamma,
                          double rho, double eta, Exec exec) {
  if (!(rho > 0.0) || !(eta > 0.0)) {
    throw ArgumentError("dpadmm_primal: rho and eta must be positive");
  }
  if (w_global.rows() != w_tilde_prev.rows() ||
      w_global.cols() != w_tilde_prev.cols() ||
      gamma.rows() != w_tilde_prev.rows() || gamma.cols() != w_tilde_prev.cols()) {
    throw ArgumentError("dpadmm_primal: dimension mismatch");
  }
  const ModelMatrix grad = f_i_subgrad(shard, loss, reg, w_tilde_prev, exec);
  const double inv_eta = 1.0 / eta;
  return (-grad + gamma + rho * w_global + inv_eta * w_tilde_prev) /
         (rho + inv_eta);
}

InnerResult admm_primal(const AgentShard& shard, const LossSpec& loss,
                        const RegSpec& reg, const ModelMatrix& w_global,
                        const ModelMatrix& gamma, double rho,
                        const InnerSolverParams& inner,
                        const ModelMatrix* warm_start, Exec exec) {
  if (!(rho > 0.0)) throw ArgumentError("admm_primal: rho must be positive");
  if (shard.rows() < 1) throw ArgumentError("admm_primal: empty shard");
  if (w_global.rows() != shard.dim() || gamma.rows() != w_global.rows() ||
      gamma.cols() != w_global.cols()) {
    throw ArgumentError("admm_primal: dimension mismatch");
  }
  const double weight = reg.weight();
  const bool l2 = reg.kind == RegKind::kL2;

  SmoothObjective smooth = [&](const ModelMatrix& w, ModelMatrix* g) {
    double v = kernels::evaluate(exec, loss.kind, shard.features, shard.labels,
                                 w, g);
    const ModelMatrix diff = w - w_global;
    v += -gamma.cwiseProduct(diff).sum() + 0.5 * rho * diff.squaredNorm();
    if (l2) v += 0.5 * weight * w.squaredNorm();
    if (g) {
      *g += rho * diff - gamma;
      if (l2) *g += weight * w;
    }
    return v;
  };

  const double row_sq = shard.features.rowwise().squaredNorm().maxCoeff();
  const double lipschitz = loss.c3 * row_sq + rho + (l2 ? weight : 0.0);
  ModelMatrix x0 = warm_start ? *warm_start
                              : ModelMatrix::Zero(w_global.rows(), w_global.cols());
  return minimize_composite(smooth, l2 ? 0.0 : weight, std::move(x0),
                            lipschitz, inner);
}

ModelMatrix aggregate(std::span<const ModelMatrix> w_tilde,
                      std::span<const ModelMatrix> gamma, double rho) {
  if (w_tilde.empty()) throw ArgumentError("aggregate: no agents");
  if (w_tilde.size() != gamma.size()) {
    throw ArgumentError("aggregate: primal/dual count mismatch");
  }
  if (!(rho > 0.0)) throw ArgumentError("aggregate: rho must be positive");
  ModelMatrix mean_w = ModelMatrix::Zero(w_tilde[0].rows(), w_tilde[0].cols());
  ModelMatrix mean_gamma = mean_w;
  for (std::size_t i = 0; i < w_tilde.size(); ++i) {
    mean_w += w_tilde[i];
    mean_gamma += gamma[i];
  }
  const double n = static_cast<double>(w_tilde.size());
  return mean_w / n - mean_gamma / (n * rho);
}

ModelMatrix dual_update(const ModelMatrix& gamma, const ModelMatrix& w_tilde,
                        const ModelMatrix& w_global, double rho) {
  return gamma - rho * (w_tilde - w_global);
}

Index model_cols(const Problem& problem) {
  return problem.loss.kind == LossKind::kBinaryLogistic
             ? 1
             : problem.shards.front().label_dim();
}

ScheduleInputs schedule_inputs(const Problem& problem, const HyperParams& hp) {
  const PrivacyBudget& b = require_budget(hp, "step-size schedule");
  ScheduleInputs in;
  in.c_w = hp.c_w;
  in.c1 = problem.loss.c1;
  in.c2 = problem.reg.c2.value_or(kNaN);
  in.c3 = problem.loss.c3;
  in.c4 = problem.reg.c4.value_or(kNaN);
  in.lambda = problem.reg.lambda;
  in.n = problem.reg.n;
  in.d = problem.shards.front().dim();
  in.p = model_cols(problem);
  in.epsilon = b.epsilon;
  in.delta = b.delta;
  return in;
}

RunTrace run_dpadmm(const Problem& problem, const HyperParams& hp,
                    Schedule schedule, std::uint64_t seed,
                    const RunOptions& options) {
  check_problem(problem);
  validate(hp);
  const PrivacyBudget budget = require_budget(hp, "DP-ADMM");
  const ScheduleInputs in = schedule_inputs(problem, hp);
  if (!hp.fixed_eta) {
    if (schedule == Schedule::kNonSmooth && !problem.reg.c2) {
      throw ArgumentError("non-smooth schedule needs the regularizer bound c2");
    }
    if (schedule == Schedule::kSmooth && !problem.reg.c4) {
      throw ArgumentError("smooth schedule needs the regularizer bound c4");
    }
  }

  auto eta_for = [&](int k, double m_i) {
    if (hp.fixed_eta) return *hp.fixed_eta;
    return schedule == Schedule::kSmooth ? step_size_smooth(k, in, m_i)
                                         : step_size_nonsmooth(k, in, m_i);
  };
  auto sigma_for = [&](double eta, double m_i) {
    if (hp.noise_multiplier == 0.0) return 0.0;
    return hp.noise_multiplier *
           gaussian_sigma(sensitivity_dpadmm(problem.loss.c1, m_i, hp.rho, eta),
                          budget.epsilon, budget.delta);
  };

  ConsensusDriver driver(problem, hp, options,
                         schedule == Schedule::kNonSmooth ? Averaging::kFromZero
                                                          : Averaging::kFromOne);
  const double m0 = static_cast<double>(problem.shards.front().rows());
  auto step = [&](std::size_t i, int k) -> long {
    const auto& shard = problem.shards[i];
    const double m_i = static_cast<double>(shard.rows());
    const double eta = eta_for(k, m_i);
    driver.w(i) = dpadmm_primal(shard, problem.loss, problem.reg,
                                driver.w_tilde(i), driver.global(),
                                driver.gamma(i), hp.rho, eta, options.exec);
    Rng rng = make_stream(seed, {stream::kNoise, i, static_cast<std::uint64_t>(k)});
    driver.w_tilde(i) =
        driver.w(i) + sample_noise(driver.w(i).rows(), driver.w(i).cols(),
                                   sigma_for(eta, m_i), rng);
    return 0;
  };
  return driver.run(
      "dpadmm", step, [&](int k) { return sigma_for(eta_for(k, m0), m0); },
      [&](int k) { return eta_for(k, m0); });
}

RunTrace run_admm(const Problem& problem, const HyperParams& hp,
                  const InnerSolverParams& inner, const RunOptions& options) {
  check_problem(problem);
  validate(hp);
  ConsensusDriver driver(problem, hp, options, Averaging::kFromOne);
  auto step = [&](std::size_t i, int) -> long {
    const ModelMatrix warm = driver.w(i);
    auto res = admm_primal(problem.shards[i], problem.loss, problem.reg,
                           driver.global(), driver.gamma(i), hp.rho, inner,
                           &warm, options.exec);
    driver.w(i) = std::move(res.w);
    driver.w_tilde(i) = driver.w(i);
    return res.iterations;
  };
  return driver.run("admm", step, nullptr, nullptr);
}

RunTrace run_pvp(const Problem& problem, const HyperParams& hp,
                 const InnerSolverParams& inner, std::uint64_t seed,
                 const RunOptions& options) {
  check_problem(problem);
  validate(hp);
  require_budget(hp, "PVP");
  require_strongly_convex(problem, "PVP");
  ConsensusDriver driver(problem, hp, options, Averaging::kFromOne);
  auto step = [&](std::size_t i, int k) -> long {
    const auto& shard = problem.shards[i];
    const ModelMatrix warm = driver.w(i);
    auto res = admm_primal(shard, problem.loss, problem.reg, driver.global(),
                           driver.gamma(i), hp.rho, inner, &warm, options.exec);
    driver.w(i) = std::move(res.w);
    const double sigma =
        perturbation_sigma(problem, hp, static_cast<double>(shard.rows()));
    Rng rng = make_stream(seed, {stream::kNoise, i, static_cast<std::uint64_t>(k)});
    driver.w_tilde(i) =
        driver.w(i) +
        sample_noise(driver.w(i).rows(), driver.w(i).cols(), sigma, rng);
    return res.iterations;
  };
  const double m0 = static_cast<double>(problem.shards.front().rows());
  return driver.run(
      "pvp", step, [&](int) { return perturbation_sigma(problem, hp, m0); },
      nullptr);
}

RunTrace run_dvp(const Problem& problem, const HyperParams& hp,
                 const InnerSolverParams& inner, std::uint64_t seed,
                 const RunOptions& options) {
  check_problem(problem);
  validate(hp);
  require_budget(hp, "DVP");
  require_strongly_convex(problem, "DVP");
  ConsensusDriver driver(problem, hp, options, Averaging::kFromOne);
  auto step = [&](std::size_t i, int k) -> long {
    const auto& shard = problem.shards[i];
    const double sigma =
        perturbation_sigma(problem, hp, static_cast<double>(shard.rows()));
    Rng rng = make_stream(seed, {stream::kNoise, i, static_cast<std::uint64_t>(k)});
    const ModelMatrix noisy_gamma =
        driver.gamma(i) + sample_noise(driver.gamma(i).rows(),
                                       driver.gamma(i).cols(), sigma, rng);
    const ModelMatrix warm = driver.w(i);
    auto res = admm_primal(shard, problem.loss, problem.reg, driver.global(),
                           noisy_gamma, hp.rho, inner, &warm, options.exec);
    driver.w(i) = std::move(res.w);
    driver.w_tilde(i) = driver.w(i);
    return res.iterations;
  };
  const double m0 = static_cast<double>(problem.shards.front().rows());
  RunTrace trace = driver.run(
      "dvp", step, [&](int) { return perturbation_sigma(problem, hp, m0); },
      nullptr);
  trace.approximate = true;
  return trace;
}

RunTrace run_dpsgd(const Problem& problem, const HyperParams& hp,
                   const DpsgdParams& sgd, std::uint64_t seed,
                   const RunOptions& options) {
  check_problem(problem);
  validate(hp);
  const PrivacyBudget budget = require_budget(hp, "DPSGD");
  if (!(sgd.learning_rate >= 0.0)) throw ArgumentError("learning rate must be >= 0");
  if (!(sgd.clip > 0.0)) throw ArgumentError("clip norm must be > 0");

  const std::size_t n = problem.shards.size();
  const Index d = problem.shards.front().dim();
  const Index p = model_cols(problem);
  auto sigma_for = [&](double m_i) {
    if (hp.noise_multiplier == 0.0) return 0.0;
    return hp.noise_multiplier *
           gaussian_sigma(2.0 * sgd.clip / m_i, budget.epsilon, budget.delta);
  };

  ModelMatrix w = ModelMatrix::Zero(d, p);
  ModelMatrix sum_w = w;
  std::vector<ModelMatrix> noisy_grads(n);
  RunTrace trace;
  trace.algorithm = "dpsgd";
  double elapsed = 0.0;

  for (int k = 1; k <= hp.t; ++k) {
    const auto start = Clock::now();
    for_each_agent(n, options.exec, [&](std::size_t i) {
      const auto& shard = problem.shards[i];
      ModelMatrix g;
      kernels::evaluate(options.exec, problem.loss.kind, shard.features,
                        shard.labels, w, &g, sgd.clip);
      Rng rng = make_stream(seed, {stream::kNoise, i, static_cast<std::uint64_t>(k)});
      noisy_grads[i] =
          g + sample_noise(d, p, sigma_for(static_cast<double>(shard.rows())), rng);
    });
    ModelMatrix avg = ModelMatrix::Zero(d, p);
    for (const auto& g : noisy_grads) avg += g;
    avg /= static_cast<double>(n);
    w -= sgd.learning_rate * (avg + problem.reg.weight() * reg_subgrad(problem.reg, w));
    elapsed += std::chrono::duration<double>(Clock::now() - start).count();
    sum_w += w;

    TraceRecord rec;
    rec.k = k;
    rec.elapsed_s = elapsed;
    rec.sigma = sigma_for(static_cast<double>(problem.shards.front().rows()));
    rec.eta = kNaN;
    if (options.evaluate_metrics || k == hp.t) {
      const ModelMatrix avg_w = sum_w / static_cast<double>(k);
      const std::vector<ModelMatrix> avg_models(n, avg_w);
      const std::vector<ModelMatrix> models(n, w);
      rec.aug_objective = augmented_objective(problem.shards, problem.loss,
                                              problem.reg, avg_models, avg_w,
                                              hp.rho, options.exec);
      rec.aug_objective_last = augmented_objective(
          problem.shards, problem.loss, problem.reg, models, w, hp.rho,
          options.exec);
      rec.empirical_loss =
          empirical_loss(problem.shards, problem.loss, models, options.exec);
      rec.test_error =
          problem.test ? classification_error(w, *problem.test) : kNaN;
    } else {
      rec.aug_objective = rec.aug_objective_last = kNaN;
      rec.empirical_loss = rec.test_error = kNaN;
    }
    trace.records.push_back(rec);
  }

  const double t = static_cast<double>(hp.t);
  const ModelMatrix zero = ModelMatrix::Zero(d, p);
  trace.agents.assign(n, AgentState{w, w, zero, sum_w / t, zero});
  trace.global = GlobalState{w, sum_w / t, hp.t};
  return trace;
}

}  // namespace dpadmm
