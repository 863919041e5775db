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

#include "dpadmm/kernels.hpp"

#include <cmath>
#include <vector>

namespace dpadmm::kernels {
namespace {

inline double clip_factor(double grad_norm, double clip) {
  return grad_norm > clip ? clip / grad_norm : 1.0;
}

}  // namespace

namespace serial {

double evaluate(LossKind kind, const FeatureMatrix& A, const LabelMatrix& B,
                const ModelMatrix& W, ModelMatrix* grad, double clip) {
  const Index m = A.rows();
  const Index d = A.cols();
  const Index p = W.cols();
  double total = 0.0;
  if (grad) grad->setZero(d, p);

  if (kind == LossKind::kBinaryLogistic) {
    for (Index j = 0; j < m; ++j) {
      double s = 0.0;
      double a_sq = 0.0;
      for (Index k = 0; k < d; ++k) {
        s += A(j, k) * W(k, 0);
        a_sq += A(j, k) * A(j, k);
      }
      const double margin = B(j, 0) * s;
      total += softplus(-margin);
      if (!grad) continue;
      double coef = -B(j, 0) * sigmoid(-margin);
      coef *= clip_factor(std::abs(coef) * std::sqrt(a_sq), clip);
      for (Index k = 0; k < d; ++k) (*grad)(k, 0) += coef * A(j, k);
    }
  } else {
    std::vector<double> s(static_cast<std::size_t>(p));
    for (Index j = 0; j < m; ++j) {
      double a_sq = 0.0;
      for (Index k = 0; k < d; ++k) a_sq += A(j, k) * A(j, k);
      double s_max = -std::numeric_limits<double>::infinity();
      for (Index l = 0; l < p; ++l) {
        double v = 0.0;
        for (Index k = 0; k < d; ++k) v += A(j, k) * W(k, l);
        s[static_cast<std::size_t>(l)] = v;
        s_max = std::max(s_max, v);
      }
      double z = 0.0;
      for (Index l = 0; l < p; ++l) z += std::exp(s[static_cast<std::size_t>(l)] - s_max);
      const double lse = s_max + std::log(z);
      double bs = 0.0;
      for (Index l = 0; l < p; ++l) bs += B(j, l) * s[static_cast<std::size_t>(l)];
      total += lse - bs;
      if (!grad) continue;
      double c_sq = 0.0;
      for (Index l = 0; l < p; ++l) {
        auto& c = s[static_cast<std::size_t>(l)];
        c = std::exp(c - lse) - B(j, l);
        c_sq += c * c;
      }
      const double f = clip_factor(std::sqrt(c_sq * a_sq), clip);
      for (Index l = 0; l < p; ++l) {
        const double c = f * s[static_cast<std::size_t>(l)];
        for (Index k = 0; k < d; ++k) (*grad)(k, l) += c * A(j, k);
      }
    }
  }
  if (grad) *grad /= static_cast<double>(m);
  return total / static_cast<double>(m);
}

}  // namespace serial

namespace parallel {
namespace {

// Loss sum and (unnormalized) gradient sum of one contiguous row block.
double binary_block(const FeatureMatrix& A, const LabelMatrix& B, Index r0,
                    Index len, const ModelMatrix& W, ModelMatrix* grad,
                    double clip) {
  const auto rows = A.middleRows(r0, len);
  const Eigen::VectorXd margin =
      (rows * W.col(0)).cwiseProduct(B.col(0).segment(r0, len));
  double total = 0.0;
  Eigen::VectorXd coef(len);
  for (Index j = 0; j < len; ++j) {
    total += softplus(-margin(j));
    coef(j) = -B(r0 + j, 0) * sigmoid(-margin(j));
  }
  if (grad) {
    if (std::isfinite(clip)) {
      for (Index j = 0; j < len; ++j) {
        coef(j) *= clip_factor(std::abs(coef(j)) * rows.row(j).norm(), clip);
      }
    }
    grad->noalias() = rows.transpose() * coef;
  }
  return total;
}

double multiclass_block(const FeatureMatrix& A, const LabelMatrix& B, Index r0,
                        Index len, const ModelMatrix& W, ModelMatrix* grad,
                        double clip) {
  const auto rows = A.middleRows(r0, len);
  Eigen::MatrixXd S = rows * W;  // len x p
  double total = 0.0;
  for (Index j = 0; j < len; ++j) {
    const double s_max = S.row(j).maxCoeff();
    const double lse =
        s_max + std::log((S.row(j).array() - s_max).exp().sum());
    total += lse - S.row(j).dot(B.row(r0 + j));
    S.row(j) = (S.row(j).array() - lse).exp().matrix() - B.row(r0 + j);
    if (std::isfinite(clip)) {
      S.row(j) *= clip_factor(S.row(j).norm() * rows.row(j).norm(), clip);
    }
  }
  if (grad) grad->noalias() = rows.transpose() * S;
  return total;
}

}  // namespace

double evaluate(LossKind kind, const FeatureMatrix& A, const LabelMatrix& B,
                const ModelMatrix& W, ModelMatrix* grad, double clip) {
  const Index m = A.rows();
  const Index chunks = (m + kChunkRows - 1) / kChunkRows;
  std::vector<double> totals(static_cast<std::size_t>(chunks), 0.0);
  std::vector<ModelMatrix> partial(grad ? static_cast<std::size_t>(chunks) : 0);

#pragma omp parallel for schedule(static) if (chunks > 1)
  for (Index c = 0; c < chunks; ++c) {
    const Index r0 = c * kChunkRows;
    const Index len = std::min(kChunkRows, m - r0);
    ModelMatrix* g = grad ? &partial[static_cast<std::size_t>(c)] : nullptr;
    totals[static_cast<std::size_t>(c)] =
        kind == LossKind::kBinaryLogistic
            ? binary_block(A, B, r0, len, W, g, clip)
            : multiclass_block(A, B, r0, len, W, g, clip);
  }

  double total = 0.0;
  for (double t : totals) total += t;
  if (grad) {
    grad->setZero(A.cols(), W.cols());
    for (const auto& g : partial) *grad += g;
    *grad /= static_cast<double>(m);
  }
  return total / static_cast<double>(m);
}

}  // namespace parallel
}  // namespace dpadmm::kernels
