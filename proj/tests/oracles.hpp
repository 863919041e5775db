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


// Independent reference computations shared by the tests. Nothing here calls
// into the library's loss or solver code.

#ifndef DPADMM_TESTS_ORACLES_HPP_
#define DPADMM_TESTS_ORACLES_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>

#include "dpadmm/data_ingest.hpp"

namespace oracle {

using Mat = Eigen::MatrixXd;

// Central differences, entry by entry.
inline Mat numeric_gradient(const std::function<double(const Mat&)>& f,
                            const Mat& x, double h = 1e-6) {
  Mat g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Mat xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline double rel_error(const Mat& a, const Mat& b) {
  return (a - b).norm() / std::max({1e-12, a.norm(), b.norm()});
}

// log(1 + exp(z)) written out directly.
inline double log1pexp(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Sum over agents of [mean logistic loss + (lambda/n)/2 ||w||^2].
struct Centralized {
  std::vector<const dpadmm::AgentShard*> shards;
  double reg_weight = 0.0;  // lambda / n, applied once per agent

  double value(const Eigen::VectorXd& w) const {
    double v = 0.0;
    for (const auto* s : shards) {
      double sum = 0.0;
      for (Eigen::Index j = 0; j < s->rows(); ++j) {
        const double z = s->labels(j, 0) * s->features.row(j).dot(w);
        sum += log1pexp(-z);
      }
      v += sum / static_cast<double>(s->rows()) + 0.5 * reg_weight * w.squaredNorm();
    }
    return v;
  }

  // Newton's method with exact Hessian; converges quadratically on this
  // strongly convex objective.
  Eigen::VectorXd minimize(Eigen::Index d, int iters = 100) const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    for (int it = 0; it < iters; ++it) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d, d);
      for (const auto* s : shards) {
        const double inv_m = 1.0 / static_cast<double>(s->rows());
        for (Eigen::Index j = 0; j < s->rows(); ++j) {
          const Eigen::VectorXd a = s->features.row(j).transpose();
          const double b = s->labels(j, 0);
          const double sig = 1.0 / (1.0 + std::exp(b * a.dot(w)));  // sigma(-z)
          g -= inv_m * b * sig * a;
          H += inv_m * sig * (1.0 - sig) * a * a.transpose();
        }
        g += reg_weight * w;
        H.diagonal().array() += reg_weight;
      }
      const Eigen::VectorXd step = H.ldlt().solve(g);
      double t = 1.0;
      const double f0 = value(w);
      while (value(w - t * step) > f0 - 1e-4 * t * g.dot(step) && t > 1e-10) t *= 0.5;
      w -= t * step;
      if (g.norm() < 1e-13) break;
    }
    return w;
  }
};

// Fresh scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("dpadmm_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path adult_dir() {
  if (const char* env = std::getenv("DPADMM_DATA_DIR"); env && *env) return env;
  return DPADMM_ADULT_DIR;
}

inline bool adult_available() {
  return std::filesystem::exists(adult_dir() / "adult.data") &&
         std::filesystem::exists(adult_dir() / "adult.test");
}

}  // namespace oracle

#endif  // DPADMM_TESTS_ORACLES_HPP_
