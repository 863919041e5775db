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

#include "dpadmm/data_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>

#include "dpadmm/csv.hpp"
#include "dpadmm/rng.hpp"

namespace dpadmm {
namespace {

constexpr std::string_view kMissing = "?";

struct Attribute {
  std::string_view name;
  std::vector<std::string_view> levels;  // empty for continuous attributes
};

// Level lists follow adult.names, restricted to levels that survive
// complete-case filtering. "Never-worked" only ever appears together with a
// missing occupation, so it never reaches the encoder.
const std::vector<Attribute>& adult_schema() {
  static const std::vector<Attribute> kSchema = {
      {"age", {}},
      {"workclass",
       {"Private", "Self-emp-not-inc", "Self-emp-inc", "Federal-gov",
        "Local-gov", "State-gov", "Without-pay"}},
      {"fnlwgt", {}},
      {"education",
       {"Bachelors", "Some-college", "11th", "HS-grad", "Prof-school",
        "Assoc-acdm", "Assoc-voc", "9th", "7th-8th", "12th", "Masters",
        "1st-4th", "10th", "Doctorate", "5th-6th", "Preschool"}},
      {"education-num", {}},
      {"marital-status",
       {"Married-civ-spouse", "Divorced", "Never-married", "Separated",
        "Widowed", "Married-spouse-absent", "Married-AF-spouse"}},
      {"occupation",
       {"Tech-support", "Craft-repair", "Other-service", "Sales",
        "Exec-managerial", "Prof-specialty", "Handlers-cleaners",
        "Machine-op-inspct", "Adm-clerical", "Farming-fishing",
        "Transport-moving", "Priv-house-serv", "Protective-serv",
        "Armed-Forces"}},
      {"relationship",
       {"Wife", "Own-child", "Husband", "Not-in-family", "Other-relative",
        "Unmarried"}},
      {"race",
       {"White", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other",
        "Black"}},
      {"sex", {"Female", "Male"}},
      {"capital-gain", {}},
      {"capital-loss", {}},
      {"hours-per-week", {}},
      {"native-country",
       {"United-States", "Cambodia", "England", "Puerto-Rico", "Canada",
        "Germany", "Outlying-US(Guam-USVI-etc)", "India", "Japan", "Greece",
        "South", "China", "Cuba", "Iran", "Honduras", "Philippines", "Italy",
        "Poland", "Jamaica", "Vietnam", "Mexico", "Portugal", "Ireland",
        "France", "Dominican-Republic", "Laos", "Ecuador", "Taiwan", "Haiti",
        "Columbia", "Hungary", "Guatemala", "Nicaragua", "Scotland",
        "Thailand", "Yugoslavia", "El-Salvador", "Trinadad&Tobago", "Peru",
        "Hong", "Holand-Netherlands"}},
  };
  return kSchema;
}

Index schema_width() {
  Index w = 0;
  for (const auto& a : adult_schema()) {
    w += a.levels.empty() ? 1 : static_cast<Index>(a.levels.size());
  }
  return w;
}

double encode_label(const RawRecord& r) {
  std::string_view label = r.label;
  if (!label.empty() && label.back() == '.') label.remove_suffix(1);
  if (label == ">50K") return 1.0;
  if (label == "<=50K") return -1.0;
  throw SchemaError("line " + std::to_string(r.line) + ": unknown label '" +
                    r.label + "'");
}

void encode_row(const RawRecord& r, Eigen::Ref<Eigen::RowVectorXd> out) {
  out.setZero();
  Index col = 0;
  const auto& schema = adult_schema();
  for (std::size_t a = 0; a < schema.size(); ++a) {
    const auto& attr = schema[a];
    const std::string& value = r.attributes[a];
    if (attr.levels.empty()) {
      try {
        out(col) = csv::parse_double(value);
      } catch (const ParseError&) {
        throw SchemaError("line " + std::to_string(r.line) + ": attribute " +
                          std::string(attr.name) + " is not numeric: '" +
                          value + "'");
      }
      ++col;
      continue;
    }
    const auto it = std::find(attr.levels.begin(), attr.levels.end(), value);
    if (it == attr.levels.end()) {
      throw SchemaError("line " + std::to_string(r.line) +
                        ": unknown level '" + value + "' for attribute " +
                        std::string(attr.name));
    }
    out(col + (it - attr.levels.begin())) = 1.0;
    col += static_cast<Index>(attr.levels.size());
  }
}

std::vector<const RawRecord*> complete_cases(std::span<const RawRecord> records) {
  std::vector<const RawRecord*> kept;
  kept.reserve(records.size());
  for (const auto& r : records) {
    if (!has_missing_value(r)) kept.push_back(&r);
  }
  return kept;
}

}  // namespace

std::vector<RawRecord> load_adult(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = csv::trim(line);
    if (body.empty() || body.front() == '|') continue;
    auto fields = csv::split(body);
    if (fields.size() != kAdultAttributeCount + 1) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected " +
                       std::to_string(kAdultAttributeCount + 1) +
                       " fields, got " + std::to_string(fields.size()));
    }
    RawRecord rec;
    std::move(fields.begin(), fields.begin() + kAdultAttributeCount,
              rec.attributes.begin());
    rec.label = std::move(fields.back());
    rec.line = line_no;
    records.push_back(std::move(rec));
  }
  if (in.bad()) throw IoError("read failure on " + path.string());
  return records;
}

std::vector<RawRecord> load_adult_dir(const std::filesystem::path& dir) {
  auto records = load_adult(dir / "adult.data");
  auto test = load_adult(dir / "adult.test");
  records.insert(records.end(), std::make_move_iterator(test.begin()),
                 std::make_move_iterator(test.end()));
  return records;
}

bool has_missing_value(const RawRecord& record) {
  for (const auto& a : record.attributes) {
    if (a == kMissing) return true;
  }
  return record.label == kMissing;
}

Index AdultEncoder::feature_dim() { return schema_width(); }

AdultEncoder AdultEncoder::fit(std::span<const RawRecord> records) {
  const Index d = schema_width();
  AdultEncoder enc;
  enc.column_scale_ = Eigen::VectorXd::Zero(d);
  Eigen::RowVectorXd row(d);
  for (const RawRecord* r : complete_cases(records)) {
    encode_row(*r, row);
    enc.column_scale_ = enc.column_scale_.cwiseMax(row.cwiseAbs().transpose());
  }
  for (Index c = 0; c < d; ++c) {
    if (enc.column_scale_(c) == 0.0) enc.column_scale_(c) = 1.0;
  }
  return enc;
}

Dataset AdultEncoder::transform(std::span<const RawRecord> records) const {
  const auto kept = complete_cases(records);
  const Index d = schema_width();
  Dataset out;
  out.features.resize(static_cast<Index>(kept.size()), d);
  out.labels.resize(static_cast<Index>(kept.size()), 1);
  const Eigen::RowVectorXd inv_scale = column_scale_.cwiseInverse().transpose();
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const auto r = static_cast<Index>(i);
    encode_row(*kept[i], out.features.row(r));
    out.features.row(r).array() *= inv_scale.array();
    const double norm = out.features.row(r).norm();
    if (norm > 1.0) out.features.row(r) /= norm;
    out.labels(r, 0) = encode_label(*kept[i]);
  }
  return out;
}

Dataset preprocess(std::span<const RawRecord> records) {
  return AdultEncoder::fit(records).transform(records);
}

std::pair<std::vector<Index>, std::vector<Index>> split_indices(
    Index rows, Index n_train, std::uint64_t seed) {
  if (n_train < 0 || n_train > rows) {
    throw ArgumentError("split: n_train=" + std::to_string(n_train) +
                        " outside [0, " + std::to_string(rows) + "]");
  }
  std::vector<Index> perm(static_cast<std::size_t>(rows));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng = make_stream(seed, {stream::kSplit});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Index> train(perm.begin(), perm.begin() + n_train);
  std::vector<Index> test(perm.begin() + n_train, perm.end());
  return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& data,
                                             Index n_train,
                                             std::uint64_t seed) {
  auto [train_idx, test_idx] = split_indices(data.rows(), n_train, seed);
  return {select_rows<Dataset>(data, train_idx),
          select_rows<Dataset>(data, test_idx)};
}

std::vector<AgentShard> partition(const Dataset& train, int n,
                                  std::uint64_t seed) {
  if (n <= 0 || n > train.rows()) {
    throw ArgumentError("partition: agent count " + std::to_string(n) +
                        " invalid for " + std::to_string(train.rows()) +
                        " rows");
  }
  std::vector<Index> perm(static_cast<std::size_t>(train.rows()));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng = make_stream(seed, {stream::kPartition});
  std::shuffle(perm.begin(), perm.end(), rng);

  const Index base = train.rows() / n;
  const Index extra = train.rows() % n;
  std::vector<AgentShard> shards;
  shards.reserve(static_cast<std::size_t>(n));
  Index offset = 0;
  for (int i = 0; i < n; ++i) {
    const Index size = base + (i < extra ? 1 : 0);
    std::span<const Index> rows(perm.data() + offset,
                                static_cast<std::size_t>(size));
    shards.push_back(select_rows<AgentShard>(train, rows));
    offset += size;
  }
  return shards;
}

std::vector<AgentShard> make_synthetic(int n_agents, int m_per_agent, int d,
                                       double separation, std::uint64_t seed) {
  if (n_agents <= 0 || m_per_agent <= 0 || d <= 0) {
    throw ArgumentError("make_synthetic: dimensions must be positive");
  }
  if (!(separation >= 0.0) || !std::isfinite(separation)) {
    throw ArgumentError("make_synthetic: separation must be finite and >= 0");
  }
  Rng rng = make_stream(seed, {stream::kSynthetic});
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Eigen::VectorXd u(d);
  for (int j = 0; j < d; ++j) u(j) = gauss(rng);
  u.normalize();

  std::vector<AgentShard> shards(static_cast<std::size_t>(n_agents));
  Eigen::VectorXd x(d);
  for (auto& shard : shards) {
    shard.features.resize(m_per_agent, d);
    shard.labels.resize(m_per_agent, 1);
    for (int r = 0; r < m_per_agent; ++r) {
      for (int j = 0; j < d; ++j) x(j) = gauss(rng);
      const double radius = std::pow(unif(rng), 1.0 / d);
      x *= radius / x.norm();
      const double side = unif(rng) < 0.5 ? -1.0 : 1.0;
      x += side * 0.5 * separation * u;
      const double norm = x.norm();
      if (norm > 1.0) x /= norm;
      shard.features.row(r) = x.transpose();
      shard.labels(r, 0) = u.dot(x) >= 0.0 ? 1.0 : -1.0;
    }
  }
  return shards;
}

Dataset pool(std::span<const AgentShard> shards) {
  Dataset out;
  if (shards.empty()) return out;
  Index rows = 0;
  for (const auto& s : shards) rows += s.rows();
  out.features.resize(rows, shards.front().dim());
  out.labels.resize(rows, shards.front().label_dim());
  Index offset = 0;
  for (const auto& s : shards) {
    out.features.middleRows(offset, s.rows()) = s.features;
    out.labels.middleRows(offset, s.rows()) = s.labels;
    offset += s.rows();
  }
  return out;
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  if (data.label_dim() != 1) {
    throw ArgumentError("write_dataset_csv: only binary datasets are supported");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (Index c = 0; c < data.dim(); ++c) out << 'f' << c << ',';
  out << "label\n";
  for (Index r = 0; r < data.rows(); ++r) {
    for (Index c = 0; c < data.dim(); ++c) {
      out << csv::format_double(data.features(r, c)) << ',';
    }
    out << csv::format_double(data.labels(r, 0)) << '\n';
  }
  if (!out) throw IoError("write failure on " + path.string());
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  const auto header = csv::split(line);
  if (header.size() < 2 || header.back() != "label") {
    throw ParseError(path.string() + ": bad header");
  }
  const Index d = static_cast<Index>(header.size()) - 1;
  std::vector<double> values;
  std::size_t line_no = 1;
  Index rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    if (static_cast<Index>(fields.size()) != d + 1) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": wrong field count");
    }
    for (const auto& f : fields) values.push_back(csv::parse_double(f));
    ++rows;
  }
  Dataset out;
  out.features.resize(rows, d);
  out.labels.resize(rows, 1);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < d; ++c) {
      out.features(r, c) = values[static_cast<std::size_t>(r * (d + 1) + c)];
    }
    out.labels(r, 0) = values[static_cast<std::size_t>(r * (d + 1) + d)];
  }
  return out;
}

}  // namespace dpadmm
