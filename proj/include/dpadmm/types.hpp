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

#ifndef DPADMM_TYPES_HPP_
#define DPADMM_TYPES_HPP_

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dpadmm {

// A d x p model. Plays the role of the global model, local primals, noisy
// primals, duals, noise draws and their running averages.
using ModelMatrix = Eigen::MatrixXd;

// Row-major feature storage: one sample per contiguous row.
using FeatureMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// rows x q labels. q = 1 with entries in {+1, -1} for binary problems and
// q = p one-hot rows for multi-class problems.
using LabelMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Index = Eigen::Index;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Execution policy for the data-parallel kernels. kSerial selects the plain
// reference loops; kParallel selects the OpenMP kernels. Both are
// deterministic and independent of the thread count.
enum class Exec { kSerial, kParallel };

}  // namespace dpadmm

#endif  // DPADMM_TYPES_HPP_
