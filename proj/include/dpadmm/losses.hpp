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

#ifndef DPADMM_LOSSES_HPP_
#define DPADMM_LOSSES_HPP_

#include <optional>

#include "dpadmm/data_ingest.hpp"
#include "dpadmm/types.hpp"

namespace dpadmm {

using ConstVecRef = Eigen::Ref<const Eigen::VectorXd>;

enum class LossKind { kBinaryLogistic, kMulticlassLogistic };
enum class RegKind { kL1, kL2 };

// c1 bounds the l2 norm of a per-sample loss gradient, c3 the norm of its
// Hessian. Both logistic losses are smooth.
struct LossSpec {
  LossKind kind = LossKind::kBinaryLogistic;
  double c1 = 1.0;
  double c3 = 0.25;
};

// Regularizer lambda * R(W), split evenly over n agents as (lambda / n) R.
// c2 bounds ||R'||, c4 bounds ||R''||; either may be absent when no schedule
// consumes it.
struct RegSpec {
  RegKind kind = RegKind::kL2;
  double lambda = 0.0;
  int n = 1;
  std::optional<double> c2;
  std::optional<double> c4;

  double weight() const { return lambda / n; }
  bool smooth() const { return kind == RegKind::kL2; }
};

void validate(const LossSpec& loss);
void validate(const RegSpec& reg);

struct Bounds {
  double c1 = 0.0;
  double c3 = 0.0;
  std::optional<double> c2;
  std::optional<double> c4;
};

// Bounds for unit-norm feature rows:
//   binary logistic      c1 = 1,       c3 = 1/4
//   multi-class logistic c1 = sqrt(2), c3 = 1/2
//   l1                   c2 = sqrt(d p)
//   l2                   c4 = 1 (||R'|| = ||W|| is unbounded, so no c2)
Bounds standard_bounds(LossKind loss, RegKind reg, Index d, Index p);

LossSpec make_loss(LossKind kind, Index d, Index p);
RegSpec make_reg(RegKind kind, double lambda, int n, Index d, Index p);

// log(1 + exp(x)) without overflow.
double softplus(double x);
// 1 / (1 + exp(-x)) without overflow.
double sigmoid(double x);

double binary_logistic_loss(ConstVecRef a, double b, const ModelMatrix& W);
ModelMatrix binary_logistic_grad(ConstVecRef a, double b, const ModelMatrix& W);

// b must be one-hot over the p columns of W.
double multiclass_logistic_loss(ConstVecRef a, ConstVecRef b,
                                const ModelMatrix& W);
ModelMatrix multiclass_logistic_grad(ConstVecRef a, ConstVecRef b,
                                     const ModelMatrix& W);

double sample_loss(const LossSpec& loss, ConstVecRef a, ConstVecRef b,
                   const ModelMatrix& W);
ModelMatrix sample_grad(const LossSpec& loss, ConstVecRef a, ConstVecRef b,
                        const ModelMatrix& W);

// l1: ||W||_1 with subgradient sgn(W), sgn(0) = 0.
// l2: 0.5 ||W||_F^2 with gradient W.
double reg_value(const RegSpec& reg, const ModelMatrix& W);
ModelMatrix reg_subgrad(const RegSpec& reg, const ModelMatrix& W);

// Mean per-sample loss and its gradient over a sample set.
double mean_loss(const SampleSet& data, const LossSpec& loss,
                 const ModelMatrix& W, Exec exec = Exec::kParallel);
ModelMatrix mean_loss_grad(const SampleSet& data, const LossSpec& loss,
                           const ModelMatrix& W, Exec exec = Exec::kParallel);

// f_i(W) = mean loss + (lambda / n) R(W).
double objective_f_i(const AgentShard& shard, const LossSpec& loss,
                     const RegSpec& reg, const ModelMatrix& W,
                     Exec exec = Exec::kParallel);
ModelMatrix f_i_subgrad(const AgentShard& shard, const LossSpec& loss,
                        const RegSpec& reg, const ModelMatrix& W,
                        Exec exec = Exec::kParallel);

}  // namespace dpadmm

#endif  // DPADMM_LOSSES_HPP_
