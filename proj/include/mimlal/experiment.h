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

#ifndef MIMLAL_EXPERIMENT_H_
#define MIMLAL_EXPERIMENT_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mimlal/active_loop.h"
#include "mimlal/common.h"
#include "mimlal/metrics.h"
#include "mimlal/selection.h"
#include "mimlal/trainer.h"
#include "mimlal/verify.h"

namespace mimlal {

// Everything the command-line tool can be told. Keys of the key=value
// config file are the member names below; command-line flags use the same
// names with '-' in place of '_'.
struct ExperimentConfig {
  // File data. `labels` must be fully labeled for active-run (it acts as
  // the oracle); `test_features`/`test_labels` give a held-out test set.
  std::string features;
  std::string labels;
  std::string test_features;
  std::string test_labels;
  std::string params;  // parameter file for `evaluate`

  // Synthetic data.
  bool synthetic = false;
  int bags = 100;
  int test_bags = 0;
  int classes = 4;
  int dim = 8;
  int bag_min = 2;
  int bag_max = 5;
  double separation = 2.0;

  std::string criterion = "egl-pair";
  std::string mode = "full-gd";
  int queries = 0;
  int folds = 10;
  int seeds = 1;
  uint64_t seed = 1;
  double lambda = 1e-3;
  double c_prime = 1.0;
  double c_dprime = 1.0;
  int max_epochs = 2000;
  int retrain_max_epochs = 2000;
  double grad_tol = 1e-6;
  int steps_per_query = 1;
  bool regularized_sgd = true;
  bool reset_step_counter = false;
  double threshold = 0.5;
  double k = 1.0;
  double init_fraction = 0.05;
  int init_count = -1;  // overrides init_fraction when >= 0
  double eval_every = 5.0;
  bool zscore = false;
  bool subset_accuracy = false;
  std::string out = "out";

  // Checks every field against the owning module's constraints.
  void Validate() const;
  TrainConfig MakeTrainConfig() const;
};

// Recognized keys, in declaration order.
const std::vector<std::string>& ExperimentConfigKeys();

// Sets one field from its text form. Unknown keys and unparsable values
// raise ValidationError.
void ApplySetting(ExperimentConfig& cfg, std::string_view key,
                  std::string_view value);

// Reads `key = value` lines; '#' starts a comment.
void LoadConfigFile(ExperimentConfig& cfg, const std::string& path);

struct ExperimentResult {
  std::vector<std::vector<MetricsRow>> curves;  // one per fold x seed
  std::vector<std::vector<QueryRecord>> queries;
  std::vector<AggregateRow> aggregate;
};

// Runs the active loop for every fold x seed and writes
//   <out>/queries_f<fold>_s<seed>.csv, <out>/curves_f<fold>_s<seed>.csv,
//   <out>/curves.csv (aggregate).
// Files are skipped when write_files is false.
ExperimentResult RunExperiment(const ExperimentConfig& cfg,
                               bool write_files = true);

// Full-gd fit; writes <out>/params.csv and <out>/trace.csv.
GdResult TrainCommand(const ExperimentConfig& cfg);

// Writes <out>/features.csv, <out>/labels.csv (truth),
// <out>/labels_masked.csv and <out>/w_true.csv.
void GenerateCommand(const ExperimentConfig& cfg);

// Metrics of <params> on the (fully labeled) features/labels files.
MetricsRow EvaluateCommand(const ExperimentConfig& cfg);

// Prints one line per property; returns true when all pass.
bool VerifyCommand(const VerifyOptions& options, std::ostream& os);

}  // namespace mimlal

#endif  // MIMLAL_EXPERIMENT_H_
