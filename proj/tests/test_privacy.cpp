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

#include <algorithm>
#include <cmath>
#include <random>

#include "dpadmm/privacy.hpp"
#include "dpadmm/solvers.hpp"
#include "oracles.hpp"

namespace {

using namespace dpadmm;

// Brute-force scan of the accountant objective, written independently.
double scan_epsilon_bar(double eps, double delta, int t, int* tau_out = nullptr) {
  double best = INFINITY;
  for (int tau = 1; tau <= 10000; ++tau) {
    const double v = (t * tau * (tau + 1.0) * eps * eps / (4.0 * std::log(1.25 / delta)) +
                      std::log(1.0 / delta)) /
                     tau;
    if (v < best) {
      best = v;
      if (tau_out) *tau_out = tau;
    }
  }
  return best;
}

TEST(Sensitivity, DpadmmFormula) {
  EXPECT_NEAR(sensitivity_dpadmm(1.0, 400.0, 0.1, 1.0), 2.0 / (400.0 * 1.1), 1e-18);
  EXPECT_NEAR(sensitivity_dpadmm(1.0, 400.0, 0.1, 1.0), 4.5455e-3, 1e-7);
  double prev = sensitivity_dpadmm(1.0, 400.0, 0.1, 2.0);
  for (double eta : {1.0, 0.5, 0.1, 0.01}) {
    const double s = sensitivity_dpadmm(1.0, 400.0, 0.1, eta);
    EXPECT_LT(s, prev);
    prev = s;
  }
  EXPECT_THROW(sensitivity_dpadmm(0.0, 400.0, 0.1, 1.0), ArgumentError);
  EXPECT_THROW(sensitivity_dpadmm(1.0, 400.0, -0.1, 1.0), ArgumentError);
  EXPECT_THROW(sensitivity_dpadmm(1.0, 400.0, 0.1, 0.0), ArgumentError);
}

TEST(Sensitivity, PvpFormula) {
  // lambda = n * 1e-6 with n = 100.
  EXPECT_NEAR(sensitivity_pvp(1.0, 400.0, 0.1, 1e-4, 100.0), 2.0 / (400.0 * 0.100001),
              1e-18);
  EXPECT_LT(sensitivity_pvp(1.0, 400.0, 0.2, 1e-4, 100.0),
            sensitivity_pvp(1.0, 400.0, 0.1, 1e-4, 100.0));
  EXPECT_THROW(sensitivity_pvp(1.0, 400.0, 0.1, 0.0, 100.0), PreconditionError);
}

TEST(Sensitivity, PvpEmpiricalOnQuadraticSurrogate) {
  // Linear loss -b a^T w has gradient norm ||a|| <= 1 = c1; the PVP primal
  // objective is then quadratic with minimizer
  //   (mean(b a) + gamma + rho w_g) / (lambda/n + rho).
  const int m = 50, d = 6;
  const double rho = 0.3, lam_n = 0.05;
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  auto unit_ball = [&] {
    Eigen::VectorXd a(d);
    for (int i = 0; i < d; ++i) a(i) = g(rng);
    return Eigen::VectorXd(a / std::max(1.0, a.norm()));
  };
  const double bound = sensitivity_pvp(1.0, m, rho, lam_n * 10, 10);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Eigen::VectorXd> a(m);
    std::vector<double> b(m);
    for (int j = 0; j < m; ++j) {
      a[j] = unit_ball();
      b[j] = g(rng) > 0 ? 1.0 : -1.0;
    }
    const Eigen::VectorXd gamma = unit_ball(), wg = unit_ball();
    auto argmin = [&](const std::vector<Eigen::VectorXd>& as, const std::vector<double>& bs) {
      Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
      for (int j = 0; j < m; ++j) s += bs[j] * as[j];
      return Eigen::VectorXd((s / m + gamma + rho * wg) / (lam_n + rho));
    };
    auto a2 = a;
    auto b2 = b;
    const int j = trial % m;
    if (trial % 2) {
      a2[j] = -a[j] / a[j].norm();
      a[j] = a[j] / a[j].norm();
    } else {
      a2[j] = unit_ball();
      b2[j] = -b[j];
    }
    const double dist = (argmin(a, b) - argmin(a2, b2)).norm();
    EXPECT_LE(dist, bound + 1e-12);
    worst = std::max(worst, dist / bound);
  }
  EXPECT_GT(worst, 1.0 - 1e-9);
}

TEST(Sensitivity, DpadmmEmpiricalNeighbours) {
  const int m = 40;
  const Index d = 5;
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  const LossSpec loss = make_loss(LossKind::kBinaryLogistic, d, 1);
  const RegSpec reg = make_reg(RegKind::kL2, 0.01, 1, d, 1);
  for (int trial = 0; trial < 200; ++trial) {
    AgentShard s = make_synthetic(1, m, static_cast<int>(d), 0.2, trial + 100).front();
    AgentShard s2 = s;
    const Index j = trial % m;
    Eigen::RowVectorXd a(d);
    for (Index i = 0; i < d; ++i) a(i) = g(rng);
    s2.features.row(j) = a / std::max(1.0, a.norm());
    s2.labels(j, 0) = g(rng) > 0 ? 1.0 : -1.0;
    ModelMatrix wt(d, 1), wg(d, 1), gm(d, 1);
    for (Index i = 0; i < d; ++i) {
      wt(i) = g(rng);
      wg(i) = g(rng);
      gm(i) = g(rng);
    }
    const double rho = 0.1 + std::abs(g(rng)), eta = 0.01 + std::abs(g(rng));
    const double dist = (dpadmm_primal(s, loss, reg, wt, wg, gm, rho, eta) -
                         dpadmm_primal(s2, loss, reg, wt, wg, gm, rho, eta))
                            .norm();
    EXPECT_LE(dist, sensitivity_dpadmm(1.0, m, rho, eta) + 1e-12);
  }
}

TEST(GaussianSigma, ArrangedLogarithm) {
  EXPECT_NEAR(gaussian_sigma(1.0, 1.0, 1e-3), std::sqrt(2.0 * std::log(1250.0)), 1e-14);
  EXPECT_NEAR(gaussian_sigma(0.5, 0.25, 1e-2), 2.0 * std::sqrt(2.0 * std::log(125.0)), 1e-13);
}

TEST(GaussianSigma, ComposesToClosedFormExpression) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double c1 = u(rng) * 2, m = 1 + 1000 * u(rng), rho = u(rng), eta = u(rng);
    const double eps = u(rng), delta = 0.01 * u(rng);
    const double direct =
        2.0 * c1 * std::sqrt(2.0 * std::log(1.25 / delta)) / (m * eps * (rho + 1.0 / eta));
    EXPECT_NEAR(gaussian_sigma(sensitivity_dpadmm(c1, m, rho, eta), eps, delta), direct,
                1e-12 * direct);
  }
}

TEST(GaussianSigma, InverseInEpsilonAndRanges) {
  EXPECT_NEAR(gaussian_sigma(0.3, 0.5, 1e-3), 2.0 * gaussian_sigma(0.3, 1.0, 1e-3), 1e-14);
  EXPECT_THROW(gaussian_sigma(1.0, 0.0, 1e-3), ArgumentError);
  EXPECT_THROW(gaussian_sigma(1.0, 1.5, 1e-3), ArgumentError);
  EXPECT_THROW(gaussian_sigma(1.0, 0.5, 0.02), ArgumentError);
  EXPECT_THROW(gaussian_sigma(0.0, 0.5, 1e-3), ArgumentError);
}

TEST(Noise, ZeroSigmaAndDeterminism) {
  Rng rng(1);
  EXPECT_EQ(sample_noise(4, 3, 0.0, rng), ModelMatrix::Zero(4, 3));
  Rng r1 = make_stream(5, {stream::kNoise, 2, 7});
  Rng r2 = make_stream(5, {stream::kNoise, 2, 7});
  EXPECT_EQ(sample_noise(10, 2, 1.5, r1), sample_noise(10, 2, 1.5, r2));
  Rng r3 = make_stream(5, {stream::kNoise, 3, 7});
  Rng r4 = make_stream(5, {stream::kNoise, 2, 7});
  EXPECT_NE(sample_noise(10, 2, 1.5, r3), sample_noise(10, 2, 1.5, r4));
}

TEST(Noise, MomentsAtOneMillionSamples) {
  Rng rng = make_stream(2026, {stream::kNoise});
  const ModelMatrix x = sample_noise(1000, 1000, 1.0, rng);
  const double mean = x.mean();
  const double var = (x.array() - mean).square().sum() / (x.size() - 1.0);
  EXPECT_LT(std::abs(mean), 0.005);
  EXPECT_GT(var, 0.99);
  EXPECT_LT(var, 1.01);
}

TEST(Noise, KolmogorovSmirnov) {
  const double sigma = 2.5;
  Rng rng = make_stream(7, {stream::kNoise});
  const ModelMatrix x = sample_noise(100000, 1, sigma, rng);
  std::vector<double> v(x.data(), x.data() + x.size());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-v[i] / (sigma * std::sqrt(2.0)));
    dmax = std::max({dmax, (i + 1) / n - cdf, cdf - i / n});
  }
  EXPECT_LT(dmax, 1.628 / std::sqrt(n));  // 1% critical value
}

TEST(LogMoment, ValuesAndMonotonicity) {
  EXPECT_NEAR(log_moment(1, 1.0, 1e-3), 0.5 / std::log(1250.0), 1e-15);
  EXPECT_NEAR(log_moment(3, 0.2, 1e-2), 12.0 * 0.04 / (4.0 * std::log(125.0)), 1e-15);
  for (int tau = 1; tau < 100; ++tau) {
    EXPECT_LT(log_moment(tau, 0.1, 1e-3), log_moment(tau + 1, 0.1, 1e-3));
  }
  EXPECT_THROW(log_moment(0, 0.1, 1e-3), ArgumentError);
}

TEST(Accountant, GoldenValues) {
  const AccountantReport a = epsilon_bar(0.05, 1e-3, 100);
  EXPECT_NEAR(a.epsilon_bar, 0.5009, 5e-4);
  EXPECT_EQ(a.tau_star, 28);
  const AccountantReport b = epsilon_bar(0.1, 1e-3, 100);
  EXPECT_NEAR(b.epsilon_bar, 1.0193, 5e-4);
  EXPECT_EQ(b.tau_star, 14);
  EXPECT_EQ(b.t, 100);
}

TEST(Accountant, MatchesIndependentScan) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double eps = 0.001 + 0.999 * u(rng);
    const double delta = std::pow(10.0, -2.0 - 6.0 * u(rng));
    const int t = 1 + static_cast<int>(500 * u(rng));
    int tau = 0;
    const double expect = scan_epsilon_bar(eps, delta, t, &tau);
    const AccountantReport r = epsilon_bar(eps, delta, t);
    EXPECT_NEAR(r.epsilon_bar, expect, 1e-12 * expect);
  }
}

TEST(Accountant, MonotoneAndLowerBound) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double eps = 0.001 + 0.999 * u(rng);
    const double delta = std::pow(10.0, -2.0 - 6.0 * u(rng));
    const int t = 1 + static_cast<int>(1000 * u(rng));
    const double e = epsilon_bar(eps, delta, t).epsilon_bar;
    EXPECT_GE(e, eps * std::sqrt(t * std::log(1 / delta) / std::log(1.25 / delta)) - 1e-12);
    EXPECT_LE(e, epsilon_bar(eps, delta, t + 1).epsilon_bar);
    EXPECT_LE(e, epsilon_bar(std::min(1.0, eps * 1.1), delta, t).epsilon_bar);
  }
  EXPECT_LE(epsilon_bar(0.1, 1e-3, 1).epsilon_bar, epsilon_bar(0.1, 1e-3, 2).epsilon_bar);
}

TEST(Accountant, RangeErrors) {
  EXPECT_THROW(epsilon_bar(0.0, 1e-3, 10), ArgumentError);
  EXPECT_THROW(epsilon_bar(1.1, 1e-3, 10), ArgumentError);
  EXPECT_THROW(epsilon_bar(0.1, 0.05, 10), ArgumentError);
  EXPECT_THROW(epsilon_bar(0.1, 1e-3, 0), ArgumentError);
}

TEST(PerIterationEpsilon, RoundTripAndErrors) {
  const double target = epsilon_bar(0.05, 1e-3, 100).epsilon_bar;
  EXPECT_NEAR(per_iteration_epsilon(target, 1e-3, 100), 0.05, 1e-6);
  EXPECT_NEAR(per_iteration_epsilon(0.5009, 1e-3, 100), 0.05, 1e-4);
  EXPECT_THROW(per_iteration_epsilon(1e-9, 1e-3, 100), InfeasibleError);
  EXPECT_THROW(per_iteration_epsilon(1e6, 1e-3, 100), InfeasibleError);
  EXPECT_GT(per_iteration_epsilon(delta_floor(1e-3) * 1.01, 1e-3, 1), 0.0);
}

}  // namespace
