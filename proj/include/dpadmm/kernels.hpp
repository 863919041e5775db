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

#ifndef DPADMM_KERNELS_HPP_
#define DPADMM_KERNELS_HPP_

#include <limits>

#include "dpadmm/losses.hpp"

// Batched loss/gradient evaluation over the rows of a shard. The serial
// namespace holds the per-sample reference loops; the parallel namespace
// splits rows into fixed-size chunks, evaluates chunks under OpenMP and sums
// the partial results in chunk order, so the output does not depend on the
// number of threads.
namespace dpadmm::kernels {

inline constexpr Index kChunkRows = 256;
inline constexpr double kNoClip = std::numeric_limits<double>::infinity();

namespace serial {

// Returns the mean loss. When grad is non-null it receives the mean of the
// per-sample gradients, each first rescaled to l2 norm <= clip.
double evaluate(LossKind kind, const FeatureMatrix& A, const LabelMatrix& B,
                const ModelMatrix& W, ModelMatrix* grad,
                double clip = kNoClip);

}  // namespace serial

namespace parallel {

double evaluate(LossKind kind, const FeatureMatrix& A, const LabelMatrix& B,
                const ModelMatrix& W, ModelMatrix* grad,
                double clip = kNoClip);

}  // namespace parallel

inline double evaluate(Exec exec, LossKind kind, const FeatureMatrix& A,
                       const LabelMatrix& B, const ModelMatrix& W,
                       ModelMatrix* grad, double clip = kNoClip) {
  return exec == Exec::kSerial ? serial::evaluate(kind, A, B, W, grad, clip)
                               : parallel::evaluate(kind, A, B, W, grad, clip);
}

}  // namespace dpadmm::kernels

#endif  // DPADMM_KERNELS_HPP_
