// Copyright 2026 The mimlal Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mimlal/experiment.h"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include "mimlal/dataset.h"
#include "mimlal/model.h"

namespace mimlal {
namespace {

namespace fs = std::filesystem;

// Stream identifiers for DeriveSeed.
enum Purpose : uint64_t {
  kTruthSeed = 1,
  kDataSeed = 2,
  kSplitSeed = 3,
  kMaskSeed = 4,
  kSelectSeed = 5,
};

std::string Quoted(std::string_view key) { return "'" + std::string(key) + "'"; }

long ToLong(std::string_view key, std::string_view value) {
  std::string text(value);
  char* end = nullptr;
  errno = 0;
  long v = std::strtol(text.c_str(), &end, 10);
  if (text.empty() || *end != '\0' || errno == ERANGE) {
    throw ValidationError("invalid integer for " + Quoted(key) + ": '" + text +
                          "'");
  }
  return v;
}

uint64_t ToU64(std::string_view key, std::string_view value) {
  std::string text(value);
  char* end = nullptr;
  errno = 0;
  unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (text.empty() || text[0] == '-' || *end != '\0' || errno == ERANGE) {
    throw ValidationError("invalid seed for " + Quoted(key) + ": '" + text +
                          "'");
  }
  return v;
}

double ToDouble(std::string_view key, std::string_view value) {
  std::string text(value);
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0' || errno == ERANGE) {
    throw ValidationError("invalid number for " + Quoted(key) + ": '" + text +
                          "'");
  }
  return v;
}

bool ToBool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") {
    return true;
  }
  if (value == "0" || value == "false" || value == "no" || value == "off") {
    return false;
  }
  throw ValidationError("invalid boolean for " + Quoted(key) + ": '" +
                        std::string(value) + "'");
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

struct Field {
  std::string key;
  Setter set;
};

template <typename T>
Field MakeField(const char* key, T ExperimentConfig::*member) {
  return {key, [key, member](ExperimentConfig& cfg, std::string_view v) {
            if constexpr (std::is_same_v<T, std::string>) {
              cfg.*member = std::string(v);
            } else if constexpr (std::is_same_v<T, bool>) {
              cfg.*member = ToBool(key, v);
            } else if constexpr (std::is_same_v<T, int>) {
              cfg.*member = static_cast<int>(ToLong(key, v));
            } else if constexpr (std::is_same_v<T, uint64_t>) {
              cfg.*member = ToU64(key, v);
            } else {
              cfg.*member = ToDouble(key, v);
            }
          }};
}

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      MakeField("features", &ExperimentConfig::features),
      MakeField("labels", &ExperimentConfig::labels),
      MakeField("test_features", &ExperimentConfig::test_features),
      MakeField("test_labels", &ExperimentConfig::test_labels),
      MakeField("params", &ExperimentConfig::params),
      MakeField("synthetic", &ExperimentConfig::synthetic),
      MakeField("bags", &ExperimentConfig::bags),
      MakeField("test_bags", &ExperimentConfig::test_bags),
      MakeField("classes", &ExperimentConfig::classes),
      MakeField("dim", &ExperimentConfig::dim),
      MakeField("bag_min", &ExperimentConfig::bag_min),
      MakeField("bag_max", &ExperimentConfig::bag_max),
      MakeField("separation", &ExperimentConfig::separation),
      MakeField("criterion", &ExperimentConfig::criterion),
      MakeField("mode", &ExperimentConfig::mode),
      MakeField("queries", &ExperimentConfig::queries),
      MakeField("folds", &ExperimentConfig::folds),
      MakeField("seeds", &ExperimentConfig::seeds),
      MakeField("seed", &ExperimentConfig::seed),
      MakeField("lambda", &ExperimentConfig::lambda),
      MakeField("c_prime", &ExperimentConfig::c_prime),
      MakeField("c_dprime", &ExperimentConfig::c_dprime),
      MakeField("max_epochs", &ExperimentConfig::max_epochs),
      MakeField("retrain_max_epochs", &ExperimentConfig::retrain_max_epochs),
      MakeField("grad_tol", &ExperimentConfig::grad_tol),
      MakeField("steps_per_query", &ExperimentConfig::steps_per_query),
      MakeField("regularized_sgd", &ExperimentConfig::regularized_sgd),
      MakeField("reset_step_counter", &ExperimentConfig::reset_step_counter),
      MakeField("threshold", &ExperimentConfig::threshold),
      MakeField("k", &ExperimentConfig::k),
      MakeField("init_fraction", &ExperimentConfig::init_fraction),
      MakeField("init_count", &ExperimentConfig::init_count),
      MakeField("eval_every", &ExperimentConfig::eval_every),
      MakeField("zscore", &ExperimentConfig::zscore),
      MakeField("subset_accuracy", &ExperimentConfig::subset_accuracy),
      MakeField("out", &ExperimentConfig::out),
  };
  return fields;
}

void RequireFile(const std::string& key, const std::string& path) {
  if (path.empty()) throw ValidationError("missing required setting '" + key + "'");
  if (!fs::is_regular_file(path)) {
    throw ValidationError(key + " file not found: " + path);
  }
}

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

void ApplyZScore(Dataset& train, Dataset& test) {
  ZScore z = ComputeZScore(train);
  train.TransformFeatures(z.mean, z.scale);
  test.TransformFeatures(z.mean, z.scale);
}

SyntheticSpec MakeSpec(const ExperimentConfig& cfg, int num_bags) {
  SyntheticSpec spec;
  spec.num_bags = num_bags;
  spec.num_classes = cfg.classes;
  spec.feature_dim = cfg.dim;
  spec.min_bag_size = cfg.bag_min;
  spec.max_bag_size = cfg.bag_max;
  return spec;
}

MaskPolicy MakeMaskPolicy(const ExperimentConfig& cfg) {
  MaskPolicy policy;
  policy.fraction = cfg.init_fraction;
  if (cfg.init_count >= 0) policy.count = cfg.init_count;
  return policy;
}

// One train/test realization for a fold x seed.
struct RunData {
  Dataset train;  // fully labeled
  OracleTruth oracle;
  Dataset test;
};

}  // namespace

const std::vector<std::string>& ExperimentConfigKeys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const Field& f : Fields()) out.push_back(f.key);
    return out;
  }();
  return keys;
}

void ApplySetting(ExperimentConfig& cfg, std::string_view key,
                  std::string_view value) {
  std::string name(key);
  std::replace(name.begin(), name.end(), '-', '_');
  for (const Field& f : Fields()) {
    if (f.key == name) {
      f.set(cfg, value);
      return;
    }
  }
  throw ValidationError("unknown setting " + Quoted(key));
}

void LoadConfigFile(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config file not found: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": expected key = value");
    }
    ApplySetting(cfg, Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
  }
}

TrainConfig ExperimentConfig::MakeTrainConfig() const {
  TrainConfig t;
  t.lambda = lambda;
  t.c_prime = c_prime;
  t.c_dprime = c_dprime;
  t.max_epochs = max_epochs;
  t.grad_tol = grad_tol;
  t.mode = ParseUpdateMode(mode);
  t.steps_per_query = steps_per_query;
  t.regularized_sgd = regularized_sgd;
  t.reset_step_counter = reset_step_counter;
  return t;
}

void ExperimentConfig::Validate() const {
  ParseCriterion(criterion);
  MakeTrainConfig().Validate();
  if (queries < 0) throw ValidationError("queries must be >= 0");
  if (folds < 1) throw ValidationError("folds must be >= 1");
  if (seeds < 1) throw ValidationError("seeds must be >= 1");
  if (retrain_max_epochs < 0) {
    throw ValidationError("retrain_max_epochs must be >= 0");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ValidationError("threshold must lie in (0, 1)");
  }
  if (!(k >= 1.0)) throw ValidationError("k must be >= 1");
  if (!(init_fraction >= 0.0 && init_fraction <= 1.0)) {
    throw ValidationError("init_fraction must lie in [0, 1]");
  }
  if (!(eval_every > 0.0)) throw ValidationError("eval_every must be > 0");
  if (synthetic) {
    if (bags < 1) throw ValidationError("bags must be >= 1");
    if (test_bags < 0) throw ValidationError("test_bags must be >= 0");
    if (classes < 2) throw ValidationError("classes must be >= 2");
    if (dim < 1) throw ValidationError("dim must be >= 1");
    if (bag_min < 1 || bag_max < bag_min) {
      throw ValidationError("bag sizes need 1 <= bag_min <= bag_max");
    }
    if (!(separation >= 0.0)) throw ValidationError("separation must be >= 0");
  }
  for (const auto& [key, path] :
       {std::pair<std::string, std::string>{"features", features},
        {"labels", labels},
        {"test_features", test_features},
        {"test_labels", test_labels},
        {"params", params}}) {
    if (!path.empty()) RequireFile(key, path);
  }
}

ExperimentResult RunExperiment(const ExperimentConfig& cfg,
                               bool write_files) {
  cfg.Validate();
  if (cfg.synthetic) {
    if (cfg.folds == 1 && cfg.test_bags < 1) {
      throw ValidationError("folds = 1 needs test_bags >= 1");
    }
    if (cfg.folds > 1 && cfg.folds > cfg.bags) {
      throw ValidationError("folds exceed the number of bags");
    }
  } else {
    RequireFile("features", cfg.features);
    RequireFile("labels", cfg.labels);
    if (cfg.folds == 1) {
      RequireFile("test_features", cfg.test_features);
      RequireFile("test_labels", cfg.test_labels);
    }
  }

  RunConfig run_cfg;
  run_cfg.criterion = ParseCriterion(cfg.criterion);
  run_cfg.train = cfg.MakeTrainConfig();
  run_cfg.queries = cfg.queries;
  run_cfg.eval_every = cfg.eval_every;
  run_cfg.threshold = cfg.threshold;
  run_cfg.cost_divisor = cfg.k;
  run_cfg.retrain_max_epochs = cfg.retrain_max_epochs;
  run_cfg.Validate();

  Dataset file_data;
  Dataset file_test;
  if (!cfg.synthetic) {
    file_data = LoadDataset(cfg.features, cfg.labels);
    OracleFromDataset(file_data);
    if (cfg.folds == 1) {
      file_test = LoadDataset(cfg.test_features, cfg.test_labels);
      OracleFromDataset(file_test);
    }
  }

  if (write_files) fs::create_directories(cfg.out);
  ExperimentResult result;
  for (int r = 0; r < cfg.seeds; ++r) {
    Dataset pool;
    Dataset holdout;
    if (cfg.synthetic) {
      ParamMatrix w_true = RandomTrueParams(
          cfg.classes, cfg.dim, cfg.separation, DeriveSeed(cfg.seed, kTruthSeed, r));
      const int extra = cfg.folds == 1 ? cfg.test_bags : 0;
      SyntheticData data =
          GenerateSynthetic(MakeSpec(cfg, cfg.bags + extra), w_true,
                            DeriveSeed(cfg.seed, kDataSeed, r));
      std::vector<int> head(cfg.bags), tail(extra);
      for (int b = 0; b < cfg.bags; ++b) head[b] = b;
      for (int b = 0; b < extra; ++b) tail[b] = cfg.bags + b;
      pool = SubsetBags(data.dataset, head);
      if (extra > 0) holdout = SubsetBags(data.dataset, tail);
    } else {
      pool = file_data;
      holdout = file_test;
    }

    std::vector<FoldSplit> splits;
    if (cfg.folds == 1) {
      FoldSplit all;
      for (int b = 0; b < pool.num_bags(); ++b) all.train.push_back(b);
      splits.push_back(std::move(all));
    } else {
      splits = CrossValidationSplits(pool.num_bags(), cfg.folds,
                                     DeriveSeed(cfg.seed, kSplitSeed, r));
    }

    for (int f = 0; f < static_cast<int>(splits.size()); ++f) {
      Dataset train_full = SubsetBags(pool, splits[f].train);
      Dataset test =
          cfg.folds == 1 ? holdout : SubsetBags(pool, splits[f].test);
      if (cfg.zscore) ApplyZScore(train_full, test);
      OracleTruth oracle = OracleFromDataset(train_full);
      Dataset train = MaskLabels(train_full, oracle, MakeMaskPolicy(cfg),
                                 DeriveSeed(cfg.seed, kMaskSeed, f, r));
      RunConfig this_run = run_cfg;
      this_run.seed = DeriveSeed(cfg.seed, kSelectSeed, f, r);
      RunResult run = RunActiveLearning(train, oracle, test, this_run);

      if (write_files) {
        const std::string tag =
            "_f" + std::to_string(f) + "_s" + std::to_string(r) + ".csv";
        WriteQueries(run.queries, run.train,
                     (fs::path(cfg.out) / ("queries" + tag)).string());
        WriteCurves(run.curve, (fs::path(cfg.out) / ("curves" + tag)).string(),
                    cfg.subset_accuracy);
      }
      result.curves.push_back(std::move(run.curve));
      result.queries.push_back(std::move(run.queries));
    }
  }
  result.aggregate = AggregateRuns(result.curves);
  if (write_files) {
    WriteAggregate(result.aggregate,
                   (fs::path(cfg.out) / "curves.csv").string());
  }
  return result;
}

GdResult TrainCommand(const ExperimentConfig& cfg) {
  cfg.Validate();
  RequireFile("features", cfg.features);
  RequireFile("labels", cfg.labels);
  Dataset ds = LoadDataset(cfg.features, cfg.labels);
  TrainConfig train = cfg.MakeTrainConfig();
  train.mode = UpdateMode::kFullGd;
  GdResult result = FullGd(
      ds, train, ParamMatrix::Zero(ds.num_classes(), ds.feature_dim()));
  fs::create_directories(cfg.out);
  WriteParams(result.w, (fs::path(cfg.out) / "params.csv").string());
  WriteTrace(result.trace, (fs::path(cfg.out) / "trace.csv").string());
  return result;
}

void GenerateCommand(const ExperimentConfig& cfg) {
  cfg.Validate();
  ParamMatrix w_true = RandomTrueParams(cfg.classes, cfg.dim, cfg.separation,
                                        DeriveSeed(cfg.seed, kTruthSeed, 0));
  SyntheticData data = GenerateSynthetic(MakeSpec(cfg, cfg.bags), w_true,
                                         DeriveSeed(cfg.seed, kDataSeed, 0));
  Dataset masked = MaskLabels(data.dataset, data.truth, MakeMaskPolicy(cfg),
                              DeriveSeed(cfg.seed, kMaskSeed, 0));
  fs::create_directories(cfg.out);
  const fs::path out(cfg.out);
  WriteFeatures(data.dataset, (out / "features.csv").string());
  WriteOracleTruth(data.truth, data.dataset, (out / "labels.csv").string());
  WriteLabels(masked, (out / "labels_masked.csv").string());
  WriteParams(w_true, (out / "w_true.csv").string());
}

MetricsRow EvaluateCommand(const ExperimentConfig& cfg) {
  cfg.Validate();
  RequireFile("features", cfg.features);
  RequireFile("labels", cfg.labels);
  RequireFile("params", cfg.params);
  Dataset ds = LoadDataset(cfg.features, cfg.labels);
  ParamMatrix w = LoadParams(cfg.params);
  if (w.rows() != ds.num_classes() || w.cols() != ds.feature_dim()) {
    throw ValidationError("parameter shape does not match the dataset");
  }
  OracleFromDataset(ds);
  return Evaluate(w, ds, cfg.threshold);
}

bool VerifyCommand(const VerifyOptions& options, std::ostream& os) {
  bool all = true;
  for (const PropertyReport& r : RunVerifySuite(options)) {
    os << (r.passed ? "PASS " : "FAIL ") << r.name
       << "  worst=" << FormatDouble(r.worst)
       << "  tol=" << FormatDouble(r.tolerance) << "  cases=" << r.cases
       << '\n';
    all = all && r.passed;
  }
  return all;
}

}  // namespace mimlal
