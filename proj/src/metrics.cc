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

#include "mimlal/metrics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "mimlal/model.h"

namespace mimlal {

MetricsRow EvaluateScores(const Eigen::MatrixXd& probs,
                          const std::vector<LabelVector>& truth,
                          double threshold) {
  const int num_bags = static_cast<int>(truth.size());
  if (num_bags == 0) throw ValidationError("empty test set");
  if (probs.rows() != num_bags) {
    throw ValidationError("score matrix and truth differ in bag count");
  }
  const int num_classes = static_cast<int>(probs.cols());

  long mismatches = 0;
  double jaccard_sum = 0.0;
  int exact = 0;
  double ap_sum = 0.0;
  int one_errors = 0;
  int ranked_bags = 0;
  std::vector<int> order(num_classes);

  for (int b = 0; b < num_bags; ++b) {
    if (static_cast<int>(truth[b].size()) != num_classes) {
      throw ValidationError("truth row has wrong length");
    }
    int inter = 0, uni = 0, positives = 0;
    bool same = true;
    for (int c = 0; c < num_classes; ++c) {
      if (truth[b][c] == TriLabel::kUnknown) {
        throw ValidationError("test labels must be fully known");
      }
      const bool actual = truth[b][c] == TriLabel::kPositive;
      const bool predicted = probs(b, c) > threshold;
      mismatches += actual != predicted;
      same = same && actual == predicted;
      inter += actual && predicted;
      uni += actual || predicted;
      positives += actual;
    }
    jaccard_sum += uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
    exact += same;
    if (positives == 0) continue;

    // Rank by decreasing probability, ties by class index.
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
      return probs(b, x) > probs(b, y);
    });
    ++ranked_bags;
    one_errors += truth[b][order[0]] != TriLabel::kPositive;
    double precision_sum = 0.0;
    int hits = 0;
    for (int r = 0; r < num_classes; ++r) {
      if (truth[b][order[r]] != TriLabel::kPositive) continue;
      ++hits;
      precision_sum += static_cast<double>(hits) / (r + 1);
    }
    ap_sum += precision_sum / positives;
  }

  MetricsRow row;
  row.hamming_loss =
      static_cast<double>(mismatches) / (static_cast<double>(num_bags) * num_classes);
  row.bag_accuracy = jaccard_sum / num_bags;
  row.subset_accuracy = static_cast<double>(exact) / num_bags;
  // With no positive bag at all, ranking metrics are vacuous.
  row.avg_precision = ranked_bags > 0 ? ap_sum / ranked_bags : 1.0;
  row.one_error =
      ranked_bags > 0 ? static_cast<double>(one_errors) / ranked_bags : 0.0;
  return row;
}

MetricsRow Evaluate(const ParamMatrix& w, const Dataset& test,
                    double threshold) {
  if (test.num_bags() == 0) throw ValidationError("empty test set");
  Eigen::MatrixXd probs(test.num_bags(), test.num_classes());
  for (int b = 0; b < test.num_bags(); ++b) {
    BagEvaluation eval(w, test.bag(b));
    for (int c = 0; c < test.num_classes(); ++c) {
      probs(b, c) = eval.prob_positive(c);
    }
  }
  return EvaluateScores(probs, test.all_labels(), threshold);
}

std::vector<AggregateRow> AggregateRuns(
    const std::vector<std::vector<MetricsRow>>& runs) {
  if (runs.empty()) throw ValidationError("no runs to aggregate");
  std::vector<double> grid;
  for (const auto& run : runs) {
    if (run.empty()) throw ValidationError("run without metrics rows");
    for (const MetricsRow& row : run) grid.push_back(row.cost);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const double r = static_cast<double>(runs.size());
  std::vector<AggregateRow> out;
  for (double cost : grid) {
    std::vector<const MetricsRow*> at;
    for (const auto& run : runs) {
      const MetricsRow* pick = &run.front();
      for (const MetricsRow& row : run) {
        if (row.cost <= cost) pick = &row;
      }
      at.push_back(pick);
    }
    AggregateRow agg;
    agg.cost = cost;
    agg.runs = static_cast<int>(runs.size());
    auto fill = [&](double MetricsRow::*field) {
      // Shifted by the first run so identical runs give an exact mean.
      const double shift = at.front()->*field;
      double mean = 0.0;
      for (const MetricsRow* row : at) mean += row->*field - shift;
      mean = shift + mean / r;
      double ss = 0.0;
      for (const MetricsRow* row : at) {
        ss += (row->*field - mean) * (row->*field - mean);
      }
      agg.mean.*field = mean;
      agg.stddev.*field = runs.size() > 1 ? std::sqrt(ss / (r - 1.0)) : 0.0;
    };
    fill(&MetricsRow::bag_accuracy);
    fill(&MetricsRow::hamming_loss);
    fill(&MetricsRow::avg_precision);
    fill(&MetricsRow::one_error);
    fill(&MetricsRow::subset_accuracy);
    agg.mean.cost = agg.stddev.cost = cost;
    out.push_back(agg);
  }
  return out;
}

void WriteCurves(const std::vector<MetricsRow>& rows, const std::string& path,
                 bool with_subset_accuracy) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "cost,bag_accuracy,hamming_loss,avg_precision,one_error";
  if (with_subset_accuracy) out << ",subset_accuracy";
  out << '\n';
  for (const MetricsRow& row : rows) {
    out << FormatDouble(row.cost) << ',' << FormatDouble(row.bag_accuracy)
        << ',' << FormatDouble(row.hamming_loss) << ','
        << FormatDouble(row.avg_precision) << ','
        << FormatDouble(row.one_error);
    if (with_subset_accuracy) out << ',' << FormatDouble(row.subset_accuracy);
    out << '\n';
  }
}

void WriteAggregate(const std::vector<AggregateRow>& rows,
                    const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "cost,runs,bag_accuracy,bag_accuracy_std,hamming_loss,"
         "hamming_loss_std,avg_precision,avg_precision_std,one_error,"
         "one_error_std,subset_accuracy,subset_accuracy_std\n";
  for (const AggregateRow& row : rows) {
    out << FormatDouble(row.cost) << ',' << row.runs;
    for (auto field :
         {&MetricsRow::bag_accuracy, &MetricsRow::hamming_loss,
          &MetricsRow::avg_precision, &MetricsRow::one_error,
          &MetricsRow::subset_accuracy}) {
      out << ',' << FormatDouble(row.mean.*field) << ','
          << FormatDouble(row.stddev.*field);
    }
    out << '\n';
  }
}

}  // namespace mimlal
