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

#include "dpadmm/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dpadmm/csv.hpp"
#include "dpadmm/data_ingest.hpp"
#include "dpadmm/privacy.hpp"

namespace dpadmm {
namespace {

namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::pair<std::string_view, E>, N>& table,
             std::string_view what) {
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  std::string allowed;
  for (const auto& [name, value] : table) {
    if (!allowed.empty()) allowed += ", ";
    allowed += name;
  }
  throw ConfigError("unknown " + std::string(what) + " '" + std::string(s) +
                    "' (expected one of: " + allowed + ")");
}

template <typename E, std::size_t N>
std::string_view enum_name(E value,
                           const std::array<std::pair<std::string_view, E>, N>& table) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::array<std::pair<std::string_view, Algorithm>, 5> kAlgorithms = {{
    {"admm", Algorithm::kAdmm},
    {"pvp", Algorithm::kPvp},
    {"dvp", Algorithm::kDvp},
    {"dpadmm", Algorithm::kDpadmm},
    {"dpsgd", Algorithm::kDpsgd},
}};
constexpr std::array<std::pair<std::string_view, DatasetKind>, 2> kDatasets = {{
    {"adult", DatasetKind::kAdult},
    {"synthetic", DatasetKind::kSynthetic},
}};
constexpr std::array<std::pair<std::string_view, RegKind>, 2> kRegs = {{
    {"l1", RegKind::kL1},
    {"l2", RegKind::kL2},
}};
constexpr std::array<std::pair<std::string_view, ScheduleChoice>, 3> kSchedules = {{
    {"auto", ScheduleChoice::kAuto},
    {"nonsmooth", ScheduleChoice::kNonSmooth},
    {"smooth", ScheduleChoice::kSmooth},
}};
constexpr std::array<std::pair<std::string_view, ColumnStats>, 2> kColumnStats = {{
    {"full", ColumnStats::kFull},
    {"train", ColumnStats::kTrain},
}};
constexpr std::array<std::pair<std::string_view, Exec>, 2> kExecs = {{
    {"serial", Exec::kSerial},
    {"parallel", Exec::kParallel},
}};
constexpr std::array<std::pair<std::string_view, bool>, 2> kBools = {{
    {"false", false},
    {"true", true},
}};

int to_int(std::string_view v) {
  const long long x = csv::parse_int(v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw ParseError("integer out of range: " + std::string(v));
  }
  return static_cast<int>(x);
}

std::uint64_t to_u64(std::string_view v) {
  std::uint64_t x = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end || v.empty()) {
    throw ParseError("not an unsigned integer: '" + std::string(v) + "'");
  }
  return x;
}

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  if (csv::trim(v).empty()) return out;
  for (auto& item : csv::split(v)) {
    if (item.empty()) throw ParseError("empty list element");
    out.push_back(std::move(item));
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& items) {
  std::string out;
  for (const auto& x : items) {
    if (!out.empty()) out += ',';
    if constexpr (std::is_same_v<T, std::string>) {
      out += x;
    } else {
      out += std::to_string(x);
    }
  }
  return out;
}

struct Field {
  std::string_view key;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename M>
Field int_field(std::string_view key, M member) {
  return {key, [member](ExperimentConfig& c, std::string_view v) { c.*member = to_int(v); },
          [member](const ExperimentConfig& c) { return std::to_string(c.*member); }};
}

template <typename M>
Field double_field(std::string_view key, M member) {
  return {key,
          [member](ExperimentConfig& c, std::string_view v) {
            c.*member = csv::parse_double(v);
          },
          [member](const ExperimentConfig& c) { return csv::format_double(c.*member); }};
}

template <typename M, typename Table>
Field enum_field(std::string_view key, M member, const Table& table) {
  return {key,
          [member, &table, key](ExperimentConfig& c, std::string_view v) {
            c.*member = parse_enum(v, table, key);
          },
          [member, &table](const ExperimentConfig& c) {
            return std::string(enum_name(c.*member, table));
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    using C = ExperimentConfig;
    std::vector<Field> f;
    f.push_back(Field{"adult_dir",
                      [](C& c, std::string_view v) { c.adult_dir = std::string(v); },
                      [](const C& c) { return c.adult_dir; }});
    f.push_back(enum_field("algorithm", &C::algorithm, kAlgorithms));
    f.push_back(Field{"c_w",
                      [](C& c, std::string_view v) {
                        if (v == "auto") {
                          c.c_w.reset();
                        } else {
                          c.c_w = csv::parse_double(v);
                        }
                      },
                      [](const C& c) {
                        return c.c_w ? csv::format_double(*c.c_w) : std::string("auto");
                      }});
    f.push_back(double_field("clip", &C::clip));
    f.push_back(enum_field("column_stats", &C::column_stats, kColumnStats));
    f.push_back(enum_field("dataset", &C::dataset, kDatasets));
    f.push_back(double_field("delta", &C::delta));
    f.push_back(double_field("eps", &C::eps));
    f.push_back(enum_field("exec", &C::exec, kExecs));
    f.push_back(int_field("inner_max_iters", &C::inner_max_iters));
    f.push_back(double_field("inner_tolerance", &C::inner_tolerance));
    f.push_back(double_field("lambda_over_n", &C::lambda_over_n));
    f.push_back(double_field("lr", &C::lr));
    f.push_back(Field{"master_seed",
                      [](C& c, std::string_view v) { c.master_seed = to_u64(v); },
                      [](const C& c) { return std::to_string(c.master_seed); }});
    f.push_back(int_field("n", &C::n));
    f.push_back(int_field("n_train", &C::n_train));
    f.push_back(double_field("noise_multiplier", &C::noise_multiplier));
    f.push_back(Field{"output",
                      [](C& c, std::string_view v) { c.output = std::string(v); },
                      [](const C& c) { return c.output; }});
    f.push_back(Field{"plot_metrics",
                      [](C& c, std::string_view v) { c.plot_metrics = split_list(v); },
                      [](const C& c) { return join(c.plot_metrics); }});
    f.push_back(enum_field("pretrain", &C::pretrain, kBools));
    f.push_back(enum_field("reg", &C::reg, kRegs));
    f.push_back(int_field("repeats", &C::repeats));
    f.push_back(double_field("rho", &C::rho));
    f.push_back(enum_field("schedule", &C::schedule, kSchedules));
    f.push_back(Field{"seeds",
                      [](C& c, std::string_view v) {
                        c.seeds.clear();
                        for (const auto& s : split_list(v)) c.seeds.push_back(to_u64(s));
                      },
                      [](const C& c) { return join(c.seeds); }});
    f.push_back(int_field("synthetic_d", &C::synthetic_d));
    f.push_back(int_field("synthetic_m", &C::synthetic_m));
    f.push_back(double_field("synthetic_separation", &C::synthetic_separation));
    f.push_back(int_field("t", &C::t));
    f.push_back(int_field("threads", &C::threads));
    return f;
  }();
  return table;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return in;
}

std::string trace_header(bool with_stddev) {
  std::string h = "k";
  for (auto name : kMetricNames) h += "," + std::string(name);
  if (with_stddev) {
    for (auto name : kMetricNames) h += "," + std::string(name) + "_stddev";
  }
  return h;
}

std::vector<std::vector<double>> read_numeric_csv(const fs::path& path,
                                                  const std::string& header) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || csv::trim(line) != header) {
    throw ParseError(path.string() + ": unexpected header");
  }
  const std::size_t width = csv::split(header).size();
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (csv::trim(line).empty()) continue;
    const auto cells = csv::split(line);
    if (cells.size() != width) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": expected " + std::to_string(width) + " fields");
    }
    std::vector<double> row;
    row.reserve(width);
    for (const auto& c : cells) row.push_back(csv::parse_double(c));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_row(std::ostream& out, const TraceRow& row) {
  out << row.k;
  for (double v : row.values) out << ',' << csv::format_double(v);
}

// Shards and held-out rows for one repetition.
struct SeedData {
  std::vector<AgentShard> shards;
  SampleSet test;
};

class DataSource {
 public:
  explicit DataSource(const ExperimentConfig& config) : config_(config) {
    if (config.dataset != DatasetKind::kAdult) return;
    const fs::path dir = config.resolved_adult_dir();
    if (!fs::is_directory(dir)) {
      throw IoError("Adult data directory not found: " + dir.string() +
                    " (set adult_dir or " + kDataDirEnv + ")");
    }
    for (auto& r : load_adult_dir(dir)) {
      if (!has_missing_value(r)) complete_.push_back(std::move(r));
    }
    if (config.column_stats == ColumnStats::kFull) full_ = preprocess(complete_);
  }

  SeedData prepare(std::uint64_t seed) const {
    SeedData out;
    if (config_.dataset == DatasetKind::kSynthetic) {
      auto all = make_synthetic(config_.n + 1, config_.synthetic_m,
                                config_.synthetic_d,
                                config_.synthetic_separation, seed);
      out.test = std::move(all.back());
      all.pop_back();
      out.shards = std::move(all);
      return out;
    }
    Dataset train;
    if (config_.column_stats == ColumnStats::kFull) {
      auto [tr, te] = split_train_test(full_, config_.n_train, seed);
      train = std::move(tr);
      out.test = std::move(te);
    } else {
      auto [tr_idx, te_idx] = split_indices(
          static_cast<Index>(complete_.size()), config_.n_train, seed);
      auto gather = [&](const std::vector<Index>& idx) {
        std::vector<RawRecord> recs;
        recs.reserve(idx.size());
        for (Index i : idx) recs.push_back(complete_[static_cast<std::size_t>(i)]);
        return recs;
      };
      const auto train_records = gather(tr_idx);
      const AdultEncoder enc = AdultEncoder::fit(train_records);
      train = enc.transform(train_records);
      out.test = enc.transform(gather(te_idx));
    }
    out.shards = partition(train, config_.n, seed);
    return out;
  }

 private:
  const ExperimentConfig& config_;
  std::vector<RawRecord> complete_;
  Dataset full_;
};

struct SeedOutcome {
  RunTrace trace;
  double c_w = 0.0;
};

SeedOutcome run_seed(const ExperimentConfig& config, const SeedData& data,
                     std::uint64_t seed) {
  const Index d = data.shards.front().dim();
  Problem problem;
  problem.shards = data.shards;
  problem.loss = make_loss(LossKind::kBinaryLogistic, d, 1);
  problem.reg = make_reg(config.reg, config.lambda_over_n * config.n, config.n, d, 1);
  problem.test = data.test.rows() > 0 ? &data.test : nullptr;

  const InnerSolverParams inner{config.inner_tolerance, config.inner_max_iters};
  const RunOptions options{config.exec, true};

  HyperParams hp;
  hp.rho = config.rho;
  hp.t = config.t;
  hp.c_w = config.resolved_c_w();
  hp.noise_multiplier = config.noise_multiplier;
  if (config.pretrain) {
    const RunTrace pre = run_admm(problem, hp, inner, RunOptions{config.exec, false});
    const double norm = pre.global.avg_w.norm();
    if (norm > 0.0) hp.c_w = norm;
  }
  if (config.is_private()) hp.budget = PrivacyBudget{config.eps, config.delta};

  SeedOutcome out;
  out.c_w = hp.c_w;
  switch (config.algorithm) {
    case Algorithm::kAdmm:
      out.trace = run_admm(problem, hp, inner, options);
      break;
    case Algorithm::kPvp:
      out.trace = run_pvp(problem, hp, inner, seed, options);
      break;
    case Algorithm::kDvp:
      out.trace = run_dvp(problem, hp, inner, seed, options);
      break;
    case Algorithm::kDpadmm:
      out.trace = run_dpadmm(problem, hp, config.resolved_schedule(), seed, options);
      break;
    case Algorithm::kDpsgd:
      out.trace = run_dpsgd(problem, hp, DpsgdParams{config.lr, config.clip}, seed,
                            options);
      break;
  }
  return out;
}

std::string hex64(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << x;
  return os.str();
}

}  // namespace

std::string_view to_string(Algorithm a) { return enum_name(a, kAlgorithms); }

Algorithm parse_algorithm(std::string_view s) {
  return parse_enum(s, kAlgorithms, "algorithm");
}

double ExperimentConfig::resolved_c_w() const {
  if (c_w) return *c_w;
  return reg == RegKind::kL1 ? 23.0 : 89.0;
}

Schedule ExperimentConfig::resolved_schedule() const {
  switch (schedule) {
    case ScheduleChoice::kNonSmooth:
      return Schedule::kNonSmooth;
    case ScheduleChoice::kSmooth:
      return Schedule::kSmooth;
    case ScheduleChoice::kAuto:
      break;
  }
  return reg == RegKind::kL1 ? Schedule::kNonSmooth : Schedule::kSmooth;
}

std::vector<std::uint64_t> ExperimentConfig::resolved_seeds() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> out;
  for (int r = 0; r < repeats; ++r) {
    out.push_back(derive_seed(master_seed,
                              {stream::kRepetition, static_cast<std::uint64_t>(r)}));
  }
  return out;
}

std::filesystem::path ExperimentConfig::resolved_adult_dir() const {
  if (!adult_dir.empty()) return adult_dir;
  if (const char* env = std::getenv(kDataDirEnv); env && *env) return env;
  return fs::path("data") / "adult";
}

ExperimentConfig parse_config(std::string_view text, std::string_view origin) {
  ExperimentConfig config;
  std::set<std::string, std::less<>> seen;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = csv::trim(line);
    if (line.empty()) continue;

    const std::string where = std::string(origin) + ":" + std::to_string(lineno) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    const std::string_view key = csv::trim(line.substr(0, eq));
    const std::string_view value = csv::trim(line.substr(eq + 1));
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Field& f) { return f.key == key; });
    if (it == table.end()) throw ConfigError(where + "unknown key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError(where + "duplicate key '" + std::string(key) + "'");
    }
    try {
      it->set(config, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    } catch (const ParseError& e) {
      throw ConfigError(where + "bad value for '" + std::string(key) + "': " + e.what());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(c.n >= 1, "n must be >= 1");
  require(c.t >= 1, "t must be >= 1");
  require(c.rho > 0.0 && std::isfinite(c.rho), "rho must be > 0");
  require(c.lambda_over_n >= 0.0 && std::isfinite(c.lambda_over_n),
          "lambda_over_n must be >= 0");
  require(!c.c_w || (*c.c_w > 0.0 && std::isfinite(*c.c_w)), "c_w must be > 0");
  require(c.seeds.empty() ? c.repeats >= 1 : true, "repeats must be >= 1");
  require(c.inner_tolerance > 0.0, "inner_tolerance must be > 0");
  require(c.inner_max_iters >= 1, "inner_max_iters must be >= 1");
  require(c.lr >= 0.0 && std::isfinite(c.lr), "lr must be >= 0");
  require(c.clip > 0.0, "clip must be > 0");
  require(c.noise_multiplier >= 0.0 && std::isfinite(c.noise_multiplier),
          "noise_multiplier must be >= 0");
  require(c.threads >= 0, "threads must be >= 0");
  require(!c.output.empty(), "output must be set");
  for (const auto& m : c.plot_metrics) {
    require(std::find(kMetricNames.begin(), kMetricNames.end(), m) != kMetricNames.end(),
            "unknown plot metric '" + m + "'");
  }
  if (c.dataset == DatasetKind::kAdult) {
    require(c.n_train >= 1, "n_train must be >= 1");
    require(c.n <= c.n_train, "n must not exceed n_train");
  } else {
    require(c.synthetic_m >= 1 && c.synthetic_d >= 1,
            "synthetic_m and synthetic_d must be >= 1");
    require(c.synthetic_separation >= 0.0, "synthetic_separation must be >= 0");
  }
  if (c.is_private()) {
    require(c.eps > 0.0 && c.eps <= 1.0, "eps must lie in (0, 1]");
    require(c.delta > 0.0 && c.delta <= 0.01, "delta must lie in (0, 0.01]");
  }
  if (c.algorithm == Algorithm::kPvp || c.algorithm == Algorithm::kDvp) {
    require(c.reg == RegKind::kL2, std::string(to_string(c.algorithm)) +
                                       " requires reg = l2");
    require(c.lambda_over_n > 0.0, std::string(to_string(c.algorithm)) +
                                       " requires lambda_over_n > 0");
  }
  if (c.algorithm == Algorithm::kDpadmm) {
    const Schedule s = c.resolved_schedule();
    require(!(c.reg == RegKind::kL1 && s == Schedule::kSmooth),
            "dpadmm with reg = l1 requires the nonsmooth schedule");
    require(!(c.reg == RegKind::kL2 && s == Schedule::kNonSmooth),
            "dpadmm with reg = l2 uses the smooth schedule");
  }
}

std::string canonical_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    out += std::string(f.key) + " = " + f.get(config) + "\n";
  }
  return out;
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return hex64(h);
}

std::size_t metric_index(std::string_view metric) {
  const auto it = std::find(kMetricNames.begin(), kMetricNames.end(), metric);
  if (it == kMetricNames.end()) {
    throw ArgumentError("unknown metric '" + std::string(metric) + "'");
  }
  return static_cast<std::size_t>(it - kMetricNames.begin());
}

std::vector<TraceRow> to_rows(const RunTrace& trace) {
  std::vector<TraceRow> rows;
  rows.reserve(trace.records.size());
  for (const auto& r : trace.records) {
    rows.push_back(TraceRow{r.k,
                            {r.aug_objective, r.empirical_loss, r.test_error, r.elapsed_s,
                             r.aug_objective_last, static_cast<double>(r.inner_iters),
                             r.dual_sum_norm}});
  }
  return rows;
}

AveragedTrace average_traces(const std::vector<std::vector<TraceRow>>& runs) {
  if (runs.empty()) throw ArgumentError("no runs to average");
  const std::size_t len = runs.front().size();
  for (const auto& r : runs) {
    if (r.size() != len) throw ArgumentError("runs differ in length");
  }
  const double count = static_cast<double>(runs.size());
  AveragedTrace out;
  out.mean.resize(len);
  out.stddev.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    out.mean[i].k = out.stddev[i].k = runs.front()[i].k;
    for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
      double sum = 0.0;
      for (const auto& r : runs) sum += r[i].values[m];
      const double mean = sum / count;
      double ss = 0.0;
      for (const auto& r : runs) ss += (r[i].values[m] - mean) * (r[i].values[m] - mean);
      out.mean[i].values[m] = mean;
      out.stddev[i].values[m] = runs.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
    }
  }
  return out;
}

void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<TraceRow>& rows) {
  std::ofstream out = open_output(path);
  out << trace_header(false) << '\n';
  for (const auto& row : rows) {
    write_row(out, row);
    out << '\n';
  }
  close_output(out, path);
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
  std::vector<TraceRow> rows;
  for (const auto& cells : read_numeric_csv(path, trace_header(false))) {
    TraceRow row;
    row.k = static_cast<int>(cells[0]);
    std::copy(cells.begin() + 1, cells.end(), row.values.begin());
    rows.push_back(row);
  }
  return rows;
}

void write_averaged_csv(const std::filesystem::path& path, const AveragedTrace& trace) {
  if (trace.mean.size() != trace.stddev.size()) {
    throw ArgumentError("averaged trace: mean/stddev length mismatch");
  }
  std::ofstream out = open_output(path);
  out << trace_header(true) << '\n';
  for (std::size_t i = 0; i < trace.mean.size(); ++i) {
    write_row(out, trace.mean[i]);
    for (double v : trace.stddev[i].values) out << ',' << csv::format_double(v);
    out << '\n';
  }
  close_output(out, path);
}

AveragedTrace read_averaged_csv(const std::filesystem::path& path) {
  AveragedTrace out;
  constexpr std::size_t m = kMetricNames.size();
  for (const auto& cells : read_numeric_csv(path, trace_header(true))) {
    TraceRow mean, sd;
    mean.k = sd.k = static_cast<int>(cells[0]);
    std::copy(cells.begin() + 1, cells.begin() + 1 + m, mean.values.begin());
    std::copy(cells.begin() + 1 + m, cells.end(), sd.values.begin());
    out.mean.push_back(mean);
    out.stddev.push_back(sd);
  }
  return out;
}

void emit_plotdata(const AveragedTrace& trace, std::string_view metric,
                   const PlotHeader& header, const std::filesystem::path& path) {
  if (metric.empty()) throw ArgumentError("no metric selected");
  const std::size_t col = metric_index(metric);
  if (trace.mean.empty()) throw ArgumentError("empty trace");

  std::ofstream out = open_output(path);
  out << "# config_hash " << header.config_hash << '\n';
  out << "# algorithm " << header.algorithm << '\n';
  out << "# t " << header.t << '\n';
  if (header.budget) {
    const AccountantReport acc =
        epsilon_bar(header.budget->epsilon, header.budget->delta, header.t);
    out << "# epsilon " << csv::format_double(header.budget->epsilon) << '\n';
    out << "# delta " << csv::format_double(header.budget->delta) << '\n';
    out << "# epsilon_bar " << std::fixed << std::setprecision(4) << acc.epsilon_bar
        << std::defaultfloat << '\n';
    out << "# tau_star " << acc.tau_star << '\n';
  }
  out << "# k " << metric << '\n';
  for (const auto& row : trace.mean) {
    out << row.k << ' ' << csv::format_double(row.values[col]) << '\n';
  }
  close_output(out, path);
}

PlotData read_plotdata(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  PlotData data;
  std::optional<double> eps, delta;
  std::string line;
  while (std::getline(in, line)) {
    if (csv::trim(line).empty()) continue;
    std::istringstream ls(line);
    if (line.front() == '#') {
      std::string hash, key, value, extra;
      ls >> hash >> key >> value;
      if (key == "config_hash") data.header.config_hash = value;
      else if (key == "algorithm") data.header.algorithm = value;
      else if (key == "t") data.header.t = static_cast<int>(csv::parse_int(value));
      else if (key == "epsilon") eps = csv::parse_double(value);
      else if (key == "delta") delta = csv::parse_double(value);
      else if (key == "epsilon_bar") data.epsilon_bar = csv::parse_double(value);
      else if (key == "k") data.metric = value;
      continue;
    }
    std::string k, v;
    ls >> k >> v;
    data.points.emplace_back(static_cast<int>(csv::parse_int(k)), csv::parse_double(v));
  }
  if (eps && delta) data.header.budget = PrivacyBudget{*eps, *delta};
  return data;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
#ifdef _OPENMP
  if (config.threads > 0) omp_set_num_threads(config.threads);
#endif
  ExperimentResult result;
  result.config_hash = config_hash(config);
  result.seeds = config.resolved_seeds();
  if (config.is_private()) result.accountant = epsilon_bar(config.eps, config.delta, config.t);

  const DataSource source(config);
  const fs::path dir = config.output;
  const std::string stem(to_string(config.algorithm));
  double c_w_sum = 0.0;
  for (std::uint64_t seed : result.seeds) {
    const SeedData data = source.prepare(seed);
    SeedOutcome outcome = run_seed(config, data, seed);
    c_w_sum += outcome.c_w;
    result.approximate = outcome.trace.approximate;
    result.runs.push_back(to_rows(outcome.trace));
    const fs::path file = dir / (stem + "_seed" + std::to_string(seed) + ".csv");
    write_trace_csv(file, result.runs.back());
    result.csv_files.push_back(file);
  }
  result.c_w = c_w_sum / static_cast<double>(result.seeds.size());
  result.averaged = average_traces(result.runs);
  const fs::path avg = dir / (stem + "_avg.csv");
  write_averaged_csv(avg, result.averaged);
  result.csv_files.push_back(avg);

  PlotHeader header{result.config_hash, stem, std::nullopt, config.t};
  if (config.is_private()) header.budget = PrivacyBudget{config.eps, config.delta};
  for (const auto& metric : config.plot_metrics) {
    const fs::path file = dir / (stem + "_" + metric + ".dat");
    emit_plotdata(result.averaged, metric, header, file);
    result.plot_files.push_back(file);
  }

  result.manifest = dir / (stem + "_manifest.txt");
  std::ofstream out = open_output(result.manifest);
  out << "# config_hash " << result.config_hash << '\n';
  out << canonical_config(config);
  out << "# c_w_used " << csv::format_double(result.c_w) << '\n';
  if (result.approximate) out << "# approximate_baseline true\n";
  if (result.accountant) {
    out << "# epsilon_bar " << csv::format_double(result.accountant->epsilon_bar)
        << " tau_star " << result.accountant->tau_star << '\n';
  }
  for (std::size_t i = 0; i < result.seeds.size(); ++i) {
    out << "# run " << i << " seed " << result.seeds[i] << '\n';
  }
  close_output(out, result.manifest);
  return result;
}

std::vector<std::filesystem::path> list_configs(const std::filesystem::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".cfg") {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

SweepResult sweep(const std::vector<std::filesystem::path>& configs) {
  SweepResult result;
  std::set<std::pair<std::string, Algorithm>> claimed;
  for (const auto& path : configs) {
    try {
      const ExperimentConfig config = load_config(path);
      validate(config);
      const std::string out = std::filesystem::absolute(config.output).lexically_normal().string();
      if (!claimed.emplace(out, config.algorithm).second) {
        throw ConfigError(path.string() + ": output '" + config.output +
                          "' is already used by an earlier " +
                          std::string(to_string(config.algorithm)) + " config");
      }
      const ExperimentResult run = run_experiment(config);
      const TraceRow& last = run.averaged.mean.back();
      SweepRow row;
      row.source = path.string();
      row.config_hash = run.config_hash;
      row.algorithm = config.algorithm;
      row.eps = config.eps;
      row.delta = config.delta;
      row.epsilon_bar = run.accountant ? run.accountant->epsilon_bar : kNaN;
      row.final_empirical_loss = last.values[metric_index("empirical_loss")];
      row.final_test_error = last.values[metric_index("test_error")];
      row.runtime_s = last.values[metric_index("elapsed_s")];
      result.rows.push_back(std::move(row));
    } catch (const Error& e) {
      result.failures.push_back({path.string(), e.what()});
    }
  }
  return result;
}

namespace {
constexpr std::string_view kSummaryHeader =
    "source,config_hash,algorithm,eps,delta,epsilon_bar,final_empirical_loss,"
    "final_test_error,runtime_s";
}  // namespace

void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<SweepRow>& rows) {
  std::ofstream out = open_output(path);
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << r.source << ',' << r.config_hash << ',' << to_string(r.algorithm) << ','
        << csv::format_double(r.eps) << ',' << csv::format_double(r.delta) << ','
        << csv::format_double(r.epsilon_bar) << ','
        << csv::format_double(r.final_empirical_loss) << ','
        << csv::format_double(r.final_test_error) << ','
        << csv::format_double(r.runtime_s) << '\n';
  }
  close_output(out, path);
}

std::vector<SweepRow> read_summary_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || csv::trim(line) != kSummaryHeader) {
    throw ParseError(path.string() + ": unexpected header");
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (csv::trim(line).empty()) continue;
    const auto c = csv::split(line);
    if (c.size() != 9) throw ParseError(path.string() + ": expected 9 fields");
    SweepRow r;
    r.source = c[0];
    r.config_hash = c[1];
    r.algorithm = parse_algorithm(c[2]);
    r.eps = csv::parse_double(c[3]);
    r.delta = csv::parse_double(c[4]);
    r.epsilon_bar = csv::parse_double(c[5]);
    r.final_empirical_loss = csv::parse_double(c[6]);
    r.final_test_error = csv::parse_double(c[7]);
    r.runtime_s = csv::parse_double(c[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace dpadmm
