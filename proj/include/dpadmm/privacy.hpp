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

#ifndef DPADMM_PRIVACY_HPP_
#define DPADMM_PRIVACY_HPP_

#include "dpadmm/rng.hpp"
#include "dpadmm/types.hpp"

namespace dpadmm {

// Per-iteration (epsilon, delta). The Gaussian calibration used here is only
// valid for 0 < epsilon <= 1 and 0 < delta <= 0.01.
struct PrivacyBudget {
  double epsilon = 0.1;
  double delta = 1e-3;
};

void validate(const PrivacyBudget& budget);

// Largest moment order searched by the accountant.
inline constexpr int kMaxMomentOrder = 10000;

struct AccountantReport {
  double epsilon_bar = 0.0;  // total epsilon after t iterations
  int tau_star = 0;          // minimizing moment order
  int t = 0;
};

// l2 sensitivity of the linearized primal update: 2 c1 / (m_i (rho + 1/eta)).
double sensitivity_dpadmm(double c1, double m_i, double rho, double eta);

// l2 sensitivity of the exact primal update with a strongly convex
// regularizer: 2 c1 / ((lambda / n + rho) m_i). Throws PreconditionError when
// lambda <= 0.
double sensitivity_pvp(double c1, double m_i, double rho, double lambda,
                       double n);

// Gaussian mechanism: sensitivity * sqrt(2 ln(1.25 / delta)) / epsilon.
double gaussian_sigma(double sensitivity, double epsilon, double delta);

// d x p matrix of iid N(0, sigma^2) draws. sigma = 0 yields zeros and does
// not advance the generator.
ModelMatrix sample_noise(Index d, Index p, double sigma, Rng& rng);

// Log moment of one Gaussian-mechanism step at order tau:
// tau (tau + 1) epsilon^2 / (4 ln(1.25 / delta)).
double log_moment(int tau, double epsilon, double delta);

// Total epsilon of t composed steps at fixed delta, minimizing the moments
// tail bound over integer orders 1..kMaxMomentOrder.
AccountantReport epsilon_bar(double epsilon, double delta, int t);

// Smallest total epsilon reachable at this delta as epsilon -> 0:
// ln(1/delta) / kMaxMomentOrder.
double delta_floor(double delta);

// Inverts epsilon_bar by bisection on epsilon in (0, 1]. Throws
// InfeasibleError when the target lies at or below the floor or needs
// epsilon > 1.
double per_iteration_epsilon(double epsilon_bar_target, double delta, int t);

}  // namespace dpadmm

#endif  // DPADMM_PRIVACY_HPP_
