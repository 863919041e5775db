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

#include "dpadmm/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dpadmm {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ArgumentError(std::string(name) + " must be positive and finite");
  }
}

// [t tau (tau+1) eps^2 / (4 L) + ln(1/delta)] / tau
double tail_bound_epsilon(int tau, double per_step_coeff, double log_inv_delta) {
  const double tau_d = static_cast<double>(tau);
  return (per_step_coeff * tau_d * (tau_d + 1.0) + log_inv_delta) / tau_d;
}

}  // namespace

void validate(const PrivacyBudget& budget) {
  if (!(budget.epsilon > 0.0 && budget.epsilon <= 1.0)) {
    throw ArgumentError("epsilon must lie in (0, 1], got " +
                        std::to_string(budget.epsilon));
  }
  if (!(budget.delta > 0.0 && budget.delta <= 0.01)) {
    throw ArgumentError("delta must lie in (0, 0.01], got " +
                        std::to_string(budget.delta));
  }
}

double sensitivity_dpadmm(double c1, double m_i, double rho, double eta) {
  require_positive(c1, "c1");
  require_positive(m_i, "m_i");
  require_positive(rho, "rho");
  require_positive(eta, "eta");
  return 2.0 * c1 / (m_i * (rho + 1.0 / eta));
}

double sensitivity_pvp(double c1, double m_i, double rho, double lambda,
                       double n) {
  if (!(lambda > 0.0)) {
    throw PreconditionError(
        "primal perturbation needs a strongly convex regularizer (lambda > 0)");
  }
  require_positive(c1, "c1");
  require_positive(m_i, "m_i");
  require_positive(rho, "rho");
  require_positive(n, "n");
  return 2.0 * c1 / ((lambda / n + rho) * m_i);
}

double gaussian_sigma(double sensitivity, double epsilon, double delta) {
  require_positive(sensitivity, "sensitivity");
  validate(PrivacyBudget{epsilon, delta});
  return sensitivity * std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
}

ModelMatrix sample_noise(Index d, Index p, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw ArgumentError("noise sigma must be >= 0");
  ModelMatrix out = ModelMatrix::Zero(d, p);
  if (sigma == 0.0) return out;
  std::normal_distribution<double> gauss(0.0, sigma);
  // Column-major fill: entry order is part of the reproducibility contract.
  for (Index c = 0; c < p; ++c) {
    for (Index r = 0; r < d; ++r) out(r, c) = gauss(rng);
  }
  return out;
}

double log_moment(int tau, double epsilon, double delta) {
  if (tau < 1) throw ArgumentError("moment order tau must be >= 1");
  validate(PrivacyBudget{epsilon, delta});
  const double tau_d = static_cast<double>(tau);
  return tau_d * (tau_d + 1.0) * epsilon * epsilon /
         (4.0 * std::log(1.25 / delta));
}

AccountantReport epsilon_bar(double epsilon, double delta, int t) {
  validate(PrivacyBudget{epsilon, delta});
  if (t < 1) throw ArgumentError("iteration count t must be >= 1");

  const double coeff =
      static_cast<double>(t) * epsilon * epsilon / (4.0 * std::log(1.25 / delta));
  const double log_inv_delta = std::log(1.0 / delta);

  AccountantReport best{tail_bound_epsilon(1, coeff, log_inv_delta), 1, t};
  for (int tau = 2; tau <= kMaxMomentOrder; ++tau) {
    const double e = tail_bound_epsilon(tau, coeff, log_inv_delta);
    if (e < best.epsilon_bar) best = {e, tau, t};
  }

  // The objective coeff (tau + 1) + log_inv_delta / tau is convex in tau with
  // real minimizer sqrt(log_inv_delta / coeff); the scan must agree with its
  // integer neighbours.
  const double tau_real = std::sqrt(log_inv_delta / coeff);
  const int lo = static_cast<int>(std::clamp(std::floor(tau_real), 1.0,
                                             double{kMaxMomentOrder}));
  const int hi = static_cast<int>(std::clamp(std::ceil(tau_real), 1.0,
                                             double{kMaxMomentOrder}));
  const double neighbour = std::min(tail_bound_epsilon(lo, coeff, log_inv_delta),
                                    tail_bound_epsilon(hi, coeff, log_inv_delta));
  if (std::abs(neighbour - best.epsilon_bar) > 1e-12 * best.epsilon_bar) {
    throw Error("epsilon_bar: scan and analytic minimizer disagree");
  }
  return best;
}

double delta_floor(double delta) {
  if (!(delta > 0.0 && delta <= 0.01)) {
    throw ArgumentError("delta must lie in (0, 0.01]");
  }
  return std::log(1.0 / delta) / kMaxMomentOrder;
}

double per_iteration_epsilon(double epsilon_bar_target, double delta, int t) {
  const double floor = delta_floor(delta);
  if (!(epsilon_bar_target > floor)) {
    throw InfeasibleError("total epsilon " + std::to_string(epsilon_bar_target) +
                          " is at or below the floor " + std::to_string(floor) +
                          " for delta " + std::to_string(delta));
  }
  const double at_one = epsilon_bar(1.0, delta, t).epsilon_bar;
  if (epsilon_bar_target > at_one) {
    throw InfeasibleError("total epsilon " + std::to_string(epsilon_bar_target) +
                          " needs a per-iteration epsilon above 1");
  }
  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0) break;
    if (epsilon_bar(mid, delta, t).epsilon_bar < epsilon_bar_target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace dpadmm
