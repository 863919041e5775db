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

#include "dpadmm/losses.hpp"

#include <cmath>
#include <string>

#include "dpadmm/kernels.hpp"

namespace dpadmm {
namespace {

void check_dims(ConstVecRef a, Index label_dim, const ModelMatrix& W,
                const char* what) {
  if (a.size() != W.rows() || label_dim != W.cols()) {
    throw ArgumentError(std::string(what) + ": dimension mismatch (a has " +
                        std::to_string(a.size()) + ", label has " +
                        std::to_string(label_dim) + ", W is " +
                        std::to_string(W.rows()) + "x" +
                        std::to_string(W.cols()) + ")");
  }
}

void check_one_hot(ConstVecRef b) {
  int ones = 0;
  for (Index i = 0; i < b.size(); ++i) {
    if (b(i) == 1.0) {
      ++ones;
    } else if (b(i) != 0.0) {
      ones = -1;
      break;
    }
  }
  if (ones != 1) throw ArgumentError("multiclass label is not one-hot");
}

double log_sum_exp(const Eigen::VectorXd& s) {
  const double m = s.maxCoeff();
  return m + std::log((s.array() - m).exp().sum());
}

}  // namespace

void validate(const LossSpec& loss) {
  if (!(loss.c1 > 0.0)) throw ArgumentError("loss bound c1 must be positive");
  if (!(loss.c3 > 0.0)) throw ArgumentError("loss bound c3 must be positive");
}

void validate(const RegSpec& reg) {
  if (!(reg.lambda >= 0.0)) throw ArgumentError("lambda must be >= 0");
  if (reg.n < 1) throw ArgumentError("regularizer agent count must be >= 1");
  if (reg.c2 && !(*reg.c2 > 0.0)) throw ArgumentError("c2 must be positive");
  if (reg.c4 && !(*reg.c4 >= 0.0)) throw ArgumentError("c4 must be >= 0");
}

Bounds standard_bounds(LossKind loss, RegKind reg, Index d, Index p) {
  if (d < 1 || p < 1) throw ArgumentError("standard_bounds: d, p must be >= 1");
  Bounds b;
  switch (loss) {
    case LossKind::kBinaryLogistic:
      b.c1 = 1.0;
      b.c3 = 0.25;
      break;
    case LossKind::kMulticlassLogistic:
      b.c1 = std::sqrt(2.0);
      b.c3 = 0.5;
      break;
  }
  switch (reg) {
    case RegKind::kL1:
      b.c2 = std::sqrt(static_cast<double>(d * p));
      b.c4 = 0.0;
      break;
    case RegKind::kL2:
      b.c4 = 1.0;
      break;
  }
  return b;
}

LossSpec make_loss(LossKind kind, Index d, Index p) {
  const Bounds b = standard_bounds(kind, RegKind::kL2, d, p);
  return LossSpec{kind, b.c1, b.c3};
}

RegSpec make_reg(RegKind kind, double lambda, int n, Index d, Index p) {
  const Bounds b = standard_bounds(LossKind::kBinaryLogistic, kind, d, p);
  RegSpec reg{kind, lambda, n, b.c2, b.c4};
  validate(reg);
  return reg;
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double binary_logistic_loss(ConstVecRef a, double b, const ModelMatrix& W) {
  check_dims(a, 1, W, "binary_logistic_loss");
  const double margin = b * W.col(0).dot(a);
  return softplus(-margin);
}

ModelMatrix binary_logistic_grad(ConstVecRef a, double b, const ModelMatrix& W) {
  check_dims(a, 1, W, "binary_logistic_grad");
  const double margin = b * W.col(0).dot(a);
  // 1 / (1 + exp(margin)) = sigmoid(-margin)
  return (-b * sigmoid(-margin)) * a;
}

double multiclass_logistic_loss(ConstVecRef a, ConstVecRef b,
                                const ModelMatrix& W) {
  check_dims(a, b.size(), W, "multiclass_logistic_loss");
  check_one_hot(b);
  const Eigen::VectorXd s = W.transpose() * a;
  return log_sum_exp(s) - b.dot(s);
}

ModelMatrix multiclass_logistic_grad(ConstVecRef a, ConstVecRef b,
                                     const ModelMatrix& W) {
  check_dims(a, b.size(), W, "multiclass_logistic_grad");
  check_one_hot(b);
  const Eigen::VectorXd s = W.transpose() * a;
  const Eigen::VectorXd softmax = (s.array() - log_sum_exp(s)).exp();
  return a * (softmax - b).transpose();
}

double sample_loss(const LossSpec& loss, ConstVecRef a, ConstVecRef b,
                   const ModelMatrix& W) {
  if (loss.kind == LossKind::kBinaryLogistic) {
    if (b.size() != 1) throw ArgumentError("binary label must be a scalar");
    return binary_logistic_loss(a, b(0), W);
  }
  return multiclass_logistic_loss(a, b, W);
}

ModelMatrix sample_grad(const LossSpec& loss, ConstVecRef a, ConstVecRef b,
                        const ModelMatrix& W) {
  if (loss.kind == LossKind::kBinaryLogistic) {
    if (b.size() != 1) throw ArgumentError("binary label must be a scalar");
    return binary_logistic_grad(a, b(0), W);
  }
  return multiclass_logistic_grad(a, b, W);
}

double reg_value(const RegSpec& reg, const ModelMatrix& W) {
  return reg.kind == RegKind::kL1 ? W.cwiseAbs().sum()
                                  : 0.5 * W.squaredNorm();
}

ModelMatrix reg_subgrad(const RegSpec& reg, const ModelMatrix& W) {
  if (reg.kind == RegKind::kL2) return W;
  return W.unaryExpr([](double v) {
    return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
  });
}

namespace {

void check_sample_set(const SampleSet& data, const ModelMatrix& W,
                      const char* what) {
  if (data.rows() == 0) throw ArgumentError(std::string(what) + ": empty data");
  if (data.dim() != W.rows() ||
      (data.label_dim() != W.cols() && !(data.label_dim() == 1 && W.cols() == 1))) {
    throw ArgumentError(std::string(what) + ": dimension mismatch");
  }
}

}  // namespace

double mean_loss(const SampleSet& data, const LossSpec& loss,
                 const ModelMatrix& W, Exec exec) {
  check_sample_set(data, W, "mean_loss");
  return kernels::evaluate(exec, loss.kind, data.features, data.labels, W,
                           nullptr);
}

ModelMatrix mean_loss_grad(const SampleSet& data, const LossSpec& loss,
                           const ModelMatrix& W, Exec exec) {
  check_sample_set(data, W, "mean_loss_grad");
  ModelMatrix g;
  kernels::evaluate(exec, loss.kind, data.features, data.labels, W, &g);
  return g;
}

double objective_f_i(const AgentShard& shard, const LossSpec& loss,
                     const RegSpec& reg, const ModelMatrix& W, Exec exec) {
  return mean_loss(shard, loss, W, exec) + reg.weight() * reg_value(reg, W);
}

ModelMatrix f_i_subgrad(const AgentShard& shard, const LossSpec& loss,
                        const RegSpec& reg, const ModelMatrix& W, Exec exec) {
  ModelMatrix g = mean_loss_grad(shard, loss, W, exec);
  g += reg.weight() * reg_subgrad(reg, W);
  return g;
}

}  // namespace dpadmm
