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

#include "dpadmm/metrics.hpp"

#include <cmath>
#include <exception>
#include <vector>


namespace dpadmm {
namespace {

void check_counts(std::size_t shards, std::size_t models, const char* what) {
  if (shards != models) {
    throw ArgumentError(std::string(what) + ": " + std::to_string(models) +
                        " models for " + std::to_string(shards) + " shards");
  }
  if (shards == 0) throw ArgumentError(std::string(what) + ": no shards");
}

// Evaluates fn(i) for every agent and sums in agent order.
template <typename Fn>
double ordered_sum(std::size_t n, Exec exec, Fn&& fn) {
  std::vector<double> parts(n);
  std::exception_ptr failure;
#pragma omp parallel for schedule(static) if (exec == Exec::kParallel)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      parts[i] = fn(i);
    } catch (...) {
#pragma omp critical(dpadmm_metrics_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  double total = 0.0;
  for (double v : parts) total += v;
  return total;
}

void check_bound_inputs(const BoundInputs& in) {
  if (in.m.empty()) throw ArgumentError("utility bound: no agents");
  if (!(in.epsilon > 0.0) || !(in.delta > 0.0 && in.delta < 1.0)) {
    throw ArgumentError("utility bound: invalid epsilon/delta");
  }
  if (!(in.rho > 0.0)) throw ArgumentError("utility bound: rho must be > 0");
  for (double mi : in.m) {
    if (!(mi > 0.0)) throw ArgumentError("utility bound: m_i must be > 0");
  }
}

}  // namespace

double augmented_objective(std::span<const AgentShard> shards,
                           const LossSpec& loss, const RegSpec& reg,
                           std::span<const ModelMatrix> avg_agent_models,
                           const ModelMatrix& avg_global, double rho,
                           Exec exec) {
  check_counts(shards.size(), avg_agent_models.size(), "augmented_objective");
  return ordered_sum(shards.size(), exec, [&](std::size_t i) {
    const auto& w = avg_agent_models[i];
    return objective_f_i(shards[i], loss, reg, w, exec) +
           rho * (w - avg_global).norm();
  });
}

double empirical_loss(std::span<const AgentShard> shards, const LossSpec& loss,
                      std::span<const ModelMatrix> models, Exec exec) {
  check_counts(shards.size(), models.size(), "empirical_loss");
  const double total = ordered_sum(shards.size(), exec, [&](std::size_t i) {
    return mean_loss(shards[i], loss, models[i], exec);
  });
  return total / static_cast<double>(shards.size());
}

double classification_error(const ModelMatrix& W, const SampleSet& test) {
  if (test.rows() == 0) throw ArgumentError("classification_error: empty test set");
  if (test.dim() != W.rows()) {
    throw ArgumentError("classification_error: dimension mismatch");
  }
  const Eigen::MatrixXd scores = test.features * W;
  Index wrong = 0;
  if (W.cols() == 1) {
    for (Index r = 0; r < test.rows(); ++r) {
      const double predicted = scores(r, 0) >= 0.0 ? 1.0 : -1.0;
      if (predicted != test.labels(r, 0)) ++wrong;
    }
  } else {
    for (Index r = 0; r < test.rows(); ++r) {
      Index predicted = 0;
      Index truth = 0;
      scores.row(r).maxCoeff(&predicted);
      test.labels.row(r).maxCoeff(&truth);
      if (predicted != truth) ++wrong;
    }
  }
  return static_cast<double>(wrong) / static_cast<double>(test.rows());
}

BoundConstants nonsmooth_bound_constants(const BoundInputs& in) {
  check_bound_inputs(in);
  const double n = static_cast<double>(in.m.size());
  const double dp = static_cast<double>(in.d * in.p);
  const double lin = in.c1 + in.lambda * in.c2 / n;
  const double log_term = std::log(1.25 / in.delta);
  BoundConstants out;
  out.beta = in.beta;
  for (double mi : in.m) {
    out.leading += in.c_w * std::sqrt(2.0 * lin * lin +
                                      16.0 * dp * in.c1 * in.c1 * log_term /
                                          (mi * mi * in.epsilon * in.epsilon));
  }
  out.trailing = n * (in.rho * in.c_w * in.c_w + in.beta * in.beta / in.rho) / 2.0;
  return out;
}

BoundConstants smooth_bound_constants(const BoundInputs& in) {
  check_bound_inputs(in);
  const double n = static_cast<double>(in.m.size());
  const double dp = static_cast<double>(in.d * in.p);
  const double root = std::sqrt(dp * std::log(1.25 / in.delta));
  BoundConstants out;
  out.beta = in.beta;
  for (double mi : in.m) {
    out.leading += 4.0 * in.c_w * in.c1 * root / (mi * in.epsilon);
  }
  out.trailing =
      (n * in.c_w * in.c_w * (in.c3 + in.lambda * in.c4 / n + in.rho) +
       n * in.beta * in.beta / in.rho) /
      2.0;
  return out;
}

double utility_bound_nonsmooth(int t, const BoundInputs& in) {
  if (t < 1) throw ArgumentError("utility bound: t must be >= 1");
  const auto c = nonsmooth_bound_constants(in);
  return c.leading / std::sqrt(static_cast<double>(t)) +
         c.trailing / static_cast<double>(t);
}

double utility_bound_smooth(int t, const BoundInputs& in) {
  if (t < 1) throw ArgumentError("utility bound: t must be >= 1");
  const auto c = smooth_bound_constants(in);
  return c.leading / std::sqrt(static_cast<double>(t)) +
         c.trailing / static_cast<double>(t);
}

}  // namespace dpadmm
