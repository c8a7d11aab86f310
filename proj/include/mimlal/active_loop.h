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

#ifndef MIMLAL_ACTIVE_LOOP_H_
#define MIMLAL_ACTIVE_LOOP_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mimlal/common.h"
#include "mimlal/dataset.h"
#include "mimlal/metrics.h"
#include "mimlal/selection.h"
#include "mimlal/trainer.h"

namespace mimlal {

struct RunConfig {
  Criterion criterion = Criterion::kEglPair;
  TrainConfig train;
  // Number of queries; whole-bag queries count once each.
  int queries = 0;
  // A metrics row is recorded whenever the cumulative cost crosses a
  // multiple of eval_every, and after the last query.
  double eval_every = 5.0;
  double threshold = 0.5;
  // Whole-bag queries cost C / cost_divisor units.
  double cost_divisor = 1.0;
  // Epoch cap for each full-gd retrain inside the loop (the initial fit
  // uses train.max_epochs).
  int retrain_max_epochs = 2000;
  uint64_t seed = 0;

  void Validate() const;
};

struct QueryRecord {
  int q = 0;
  SelectionResult selection;
  std::vector<std::pair<PairIndex, int>> revealed;
  double cumulative_cost = 0.0;
};

struct RunResult {
  std::vector<QueryRecord> queries;
  std::vector<MetricsRow> curve;
  ParamMatrix w;
  Dataset train;  // training set after all reveals
  long sgd_steps = 0;
  long full_retrains = 0;
};

// Ground-truth answer to a query.
int SimulatedOracle(const OracleTruth& oracle, int b, int c);

// Initial full-gd fit from w = 0, then Q rounds of
// select -> query oracle -> reveal -> model update.
RunResult RunActiveLearning(Dataset train, const OracleTruth& oracle,
                            const Dataset& test, const RunConfig& cfg);

// `q,kind,bag,class,score,revealed,cost`; bag is the bag id, class is
// 1-based, whole-bag queries list revealed values as class:value pairs
// separated by ';'.
void WriteQueries(const std::vector<QueryRecord>& queries, const Dataset& ds,
                  const std::string& path);

}  // namespace mimlal

#endif  // MIMLAL_ACTIVE_LOOP_H_
