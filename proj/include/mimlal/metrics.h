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

#ifndef MIMLAL_METRICS_H_
#define MIMLAL_METRICS_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mimlal/common.h"
#include "mimlal/dataset.h"

namespace mimlal {

struct MetricsRow {
  double cost = 0.0;
  double bag_accuracy = 0.0;     // mean Jaccard of positive sets
  double hamming_loss = 0.0;
  double avg_precision = 0.0;
  double one_error = 0.0;
  double subset_accuracy = 0.0;  // exact match of the label vector
};

// `probs` is B x C with P(Y_bc = 1); `truth` holds 0/1 labels.
// Bags without a true positive are left out of AP and one-error.
MetricsRow EvaluateScores(const Eigen::MatrixXd& probs,
                          const std::vector<LabelVector>& truth,
                          double threshold = 0.5);

MetricsRow Evaluate(const ParamMatrix& w, const Dataset& test,
                    double threshold = 0.5);

struct AggregateRow {
  double cost = 0.0;
  MetricsRow mean;
  MetricsRow stddev;  // sample standard deviation, 0 for a single run
  int runs = 0;
};

// Aligns runs on the union of their cost points (last observation carried
// forward) and reports the pointwise mean and sample std.
std::vector<AggregateRow> AggregateRuns(
    const std::vector<std::vector<MetricsRow>>& runs);

// Header `cost,bag_accuracy,hamming_loss,avg_precision,one_error`, plus
// subset_accuracy when requested.
void WriteCurves(const std::vector<MetricsRow>& rows, const std::string& path,
                 bool with_subset_accuracy = false);
void WriteAggregate(const std::vector<AggregateRow>& rows,
                    const std::string& path);

}  // namespace mimlal

#endif  // MIMLAL_METRICS_H_
