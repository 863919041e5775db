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

#include <gtest/gtest.h>

#include <omp.h>

#include <cmath>
#include <random>

#include "dpadmm/kernels.hpp"
#include "oracles.hpp"

namespace {

using namespace dpadmm;

struct Fixture {
  FeatureMatrix A;
  LabelMatrix B;
  ModelMatrix W;
};

Fixture binary_fixture(Index rows, Index d, std::uint64_t seed) {
  const auto shards = make_synthetic(1, static_cast<int>(rows), static_cast<int>(d), 0.3, seed);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 3.0);
  ModelMatrix W(d, 1);
  for (Index i = 0; i < d; ++i) W(i) = g(rng);
  return {shards[0].features, shards[0].labels, W};
}

Fixture multiclass_fixture(Index rows, Index d, Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Fixture f;
  f.A.resize(rows, d);
  f.B = LabelMatrix::Zero(rows, p);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < d; ++c) f.A(r, c) = g(rng);
    f.A.row(r) /= std::max(1.0, f.A.row(r).norm());
    f.B(r, static_cast<Index>(rng() % static_cast<std::uint64_t>(p))) = 1.0;
  }
  f.W.resize(d, p);
  for (Index i = 0; i < f.W.size(); ++i) f.W(i) = g(rng);
  return f;
}

// Direct per-sample formula for the binary case, including clipping.
double oracle_binary(const Fixture& f, ModelMatrix* grad, double clip) {
  double loss = 0.0;
  grad->setZero(f.W.rows(), 1);
  for (Index r = 0; r < f.A.rows(); ++r) {
    const Eigen::VectorXd a = f.A.row(r).transpose();
    const double b = f.B(r, 0);
    const double z = b * a.dot(f.W.col(0));
    loss += oracle::log1pexp(-z);
    Eigen::VectorXd g = -b * a / (1.0 + std::exp(z));
    if (g.norm() > clip) g *= clip / g.norm();
    *grad += g;
  }
  *grad /= static_cast<double>(f.A.rows());
  return loss / static_cast<double>(f.A.rows());
}

TEST(Kernels, SerialMatchesOracle) {
  for (double clip : {kernels::kNoClip, 0.05}) {
    const Fixture f = binary_fixture(700, 9, 3);
    ModelMatrix g, expect;
    const double v = kernels::serial::evaluate(LossKind::kBinaryLogistic, f.A, f.B, f.W, &g, clip);
    const double e = oracle_binary(f, &expect, clip);
    EXPECT_NEAR(v, e, 1e-13);
    EXPECT_LT(oracle::rel_error(g, expect), 1e-13);
  }
}

TEST(Kernels, ParallelMatchesSerialBinary) {
  for (Index rows : {1, 255, 256, 257, 1000, 5000}) {
    for (double clip : {kernels::kNoClip, 0.1}) {
      const Fixture f = binary_fixture(rows, 12, static_cast<std::uint64_t>(rows));
      ModelMatrix gs, gp;
      const double vs = kernels::serial::evaluate(LossKind::kBinaryLogistic, f.A, f.B, f.W, &gs, clip);
      const double vp = kernels::parallel::evaluate(LossKind::kBinaryLogistic, f.A, f.B, f.W, &gp, clip);
      EXPECT_NEAR(vs, vp, 1e-12 * std::max(1.0, std::abs(vs))) << rows;
      EXPECT_LT(oracle::rel_error(gs, gp), 1e-12) << rows;
    }
  }
}

TEST(Kernels, ParallelMatchesSerialMulticlass) {
  for (Index rows : {3, 300, 2000}) {
    const Fixture f = multiclass_fixture(rows, 7, 4, 11);
    ModelMatrix gs, gp;
    const double vs = kernels::serial::evaluate(LossKind::kMulticlassLogistic, f.A, f.B, f.W, &gs);
    const double vp = kernels::parallel::evaluate(LossKind::kMulticlassLogistic, f.A, f.B, f.W, &gp);
    EXPECT_NEAR(vs, vp, 1e-12 * std::max(1.0, std::abs(vs)));
    EXPECT_LT(oracle::rel_error(gs, gp), 1e-12);
  }
}

TEST(Kernels, ParallelIsIndependentOfThreadCount) {
  const Fixture f = binary_fixture(4000, 20, 5);
  const int saved = omp_get_max_threads();
  ModelMatrix ref;
  omp_set_num_threads(1);
  const double vref = kernels::parallel::evaluate(LossKind::kBinaryLogistic, f.A, f.B, f.W, &ref);
  for (int threads : {2, 3, 8}) {
    omp_set_num_threads(threads);
    ModelMatrix g;
    const double v = kernels::parallel::evaluate(LossKind::kBinaryLogistic, f.A, f.B, f.W, &g);
    EXPECT_EQ(v, vref);
    EXPECT_EQ(g, ref);
  }
  omp_set_num_threads(saved);
}

TEST(Kernels, ValueOnlyCallLeavesGradientUntouched) {
  const Fixture f = binary_fixture(50, 4, 2);
  ModelMatrix g;
  const double with = kernels::parallel::evaluate(LossKind::kBinaryLogistic, f.A, f.B, f.W, &g);
  const double without = kernels::parallel::evaluate(LossKind::kBinaryLogistic, f.A, f.B, f.W, nullptr);
  EXPECT_EQ(with, without);
}

TEST(Kernels, ClippedGradientsRespectBound) {
  const Fixture f = binary_fixture(300, 6, 8);
  ModelMatrix g;
  kernels::parallel::evaluate(LossKind::kBinaryLogistic, f.A, f.B, f.W, &g, 0.01);
  EXPECT_LE(g.norm(), 0.01 + 1e-15);
}

}  // namespace
