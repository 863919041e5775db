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

#ifndef DPADMM_METRICS_HPP_
#define DPADMM_METRICS_HPP_

#include <span>

#include "dpadmm/data_ingest.hpp"
#include "dpadmm/losses.hpp"

namespace dpadmm {

// sum_i ( f_i(avg_agent_i) + rho ||avg_agent_i - avg_global||_F ).
double augmented_objective(std::span<const AgentShard> shards,
                           const LossSpec& loss, const RegSpec& reg,
                           std::span<const ModelMatrix> avg_agent_models,
                           const ModelMatrix& avg_global, double rho,
                           Exec exec = Exec::kParallel);

// (1/n) sum_i mean loss of shard i at models[i]; no regularizer.
double empirical_loss(std::span<const AgentShard> shards, const LossSpec& loss,
                      std::span<const ModelMatrix> models,
                      Exec exec = Exec::kParallel);

// Fraction of misclassified rows. Binary: predicted label is sign(W^T a) with
// sign(0) = +1. Multi-class: argmax of W^T a against the one-hot label.
double classification_error(const ModelMatrix& W, const SampleSet& test);

// Inputs shared by the two utility bounds. m holds one sample count per
// agent, so n = m.size().
struct BoundInputs {
  double epsilon = 0.1;
  double delta = 1e-3;
  double c_w = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;  // non-smooth bound only
  double c3 = 0.25; // smooth bound only
  double c4 = 1.0;  // smooth bound only
  double lambda = 0.0;
  Index d = 1;
  Index p = 1;
  std::span<const double> m;
  double rho = 0.1;
  double beta = 0.1;
};

struct BoundConstants {
  double leading = 0.0;   // M1 or M3, multiplies 1/sqrt(t)
  double trailing = 0.0;  // M2 or M4, multiplies 1/t
  double beta = 0.0;
};

BoundConstants nonsmooth_bound_constants(const BoundInputs& in);
BoundConstants smooth_bound_constants(const BoundInputs& in);

// M1 / sqrt(t) + M2 / t
double utility_bound_nonsmooth(int t, const BoundInputs& in);
// M3 / sqrt(t) + M4 / t
double utility_bound_smooth(int t, const BoundInputs& in);

}  // namespace dpadmm

#endif  // DPADMM_METRICS_HPP_
