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

#ifndef DPADMM_DATA_INGEST_HPP_
#define DPADMM_DATA_INGEST_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpadmm/types.hpp"

namespace dpadmm {

inline constexpr int kAdultAttributeCount = 14;

// One line of the UCI Adult files, whitespace-trimmed but otherwise raw.
struct RawRecord {
  std::array<std::string, kAdultAttributeCount> attributes;
  std::string label;
  std::size_t line = 0;  // 1-based line number in the source file
};

// Feature rows plus labels. Binary data uses a single label column with
// values in {+1, -1}.
struct SampleSet {
  FeatureMatrix features;
  LabelMatrix labels;

  Index rows() const { return features.rows(); }
  Index dim() const { return features.cols(); }
  Index label_dim() const { return labels.cols(); }
};

struct Dataset : SampleSet {};

// One agent's private data. Never empty once produced by partition().
struct AgentShard : SampleSet {};

// Reads a comma-separated Adult file (adult.data or adult.test layout). Blank
// lines and the "|1x3 Cross validator" style comment lines are skipped.
// Records holding the "?" marker are kept; preprocess() drops them.
std::vector<RawRecord> load_adult(const std::filesystem::path& path);

// Loads adult.data followed by adult.test from a directory.
std::vector<RawRecord> load_adult_dir(const std::filesystem::path& dir);

bool has_missing_value(const RawRecord& record);

// Fixed Adult encoding: six continuous attributes kept as-is and eight
// categorical attributes one-hot encoded over the levels that occur in the
// complete-case corpus (104 columns in total). Column scale factors are the
// per-column maxima of |value| over the records passed to fit().
class AdultEncoder {
 public:
  static AdultEncoder fit(std::span<const RawRecord> records);

  // Drops records with missing values, encodes, divides each column by its
  // fitted scale and finally divides each row by max(1, ||row||_2).
  Dataset transform(std::span<const RawRecord> records) const;

  static Index feature_dim();
  const Eigen::VectorXd& column_scale() const { return column_scale_; }

 private:
  Eigen::VectorXd column_scale_;
};

// fit + transform on the same records.
Dataset preprocess(std::span<const RawRecord> records);

// Uniform random split without replacement. The first element of the pair
// holds n_train rows.
std::pair<Dataset, Dataset> split_train_test(const Dataset& data,
                                             Index n_train,
                                             std::uint64_t seed);

// Index-level version of split_train_test, used when normalization statistics
// must come from the training rows only.
std::pair<std::vector<Index>, std::vector<Index>> split_indices(
    Index rows, Index n_train, std::uint64_t seed);

// Shuffles rows and deals them into n contiguous shards. When n does not
// divide the row count the first (rows % n) shards get one extra row.
std::vector<AgentShard> partition(const Dataset& train, int n,
                                  std::uint64_t seed);

// Planted-separator data: a random unit direction u, points drawn in the unit
// ball and pushed by +/- separation/2 along u, labels sign(u^T x) (ties +1),
// rows rescaled to l2 norm <= 1. Always linearly separable by u; the margin
// grows with separation.
std::vector<AgentShard> make_synthetic(int n_agents, int m_per_agent, int d,
                                       double separation, std::uint64_t seed);

// Concatenates shards back into one dataset.
Dataset pool(std::span<const AgentShard> shards);

template <typename S>
S select_rows(const SampleSet& src, std::span<const Index> rows) {
  S out;
  out.features.resize(static_cast<Index>(rows.size()), src.dim());
  out.labels.resize(static_cast<Index>(rows.size()), src.label_dim());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.features.row(static_cast<Index>(r)) = src.features.row(rows[r]);
    out.labels.row(static_cast<Index>(r)) = src.labels.row(rows[r]);
  }
  return out;
}

// CSV dump with header f0..f{d-1},label (binary datasets only).
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace dpadmm

#endif  // DPADMM_DATA_INGEST_HPP_
