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

#ifndef MIMLAL_OBJECTIVE_H_
#define MIMLAL_OBJECTIVE_H_

#include <utility>
#include <vector>

#include "mimlal/common.h"
#include "mimlal/dataset.h"
#include "mimlal/model.h"

namespace mimlal {

// Negative marginal log-likelihood of one observed bag-class label:
// label 0 -> -A_bc, label 1 -> -log(1 - exp(A_bc)).
double PairLoss(const ParamMatrix& w, const Bag& bag, int c, int label);

// (1 / sum_b |S_b|) * sum_{(b,c) in L} PairLoss + (lambda / 2) ||w||^2.
// With no known labels only the regularizer remains.
double MmlObjective(const ParamMatrix& w, const Dataset& ds, double lambda);

// Exact gradient of MmlObjective.
Gradient MmlGradient(const ParamMatrix& w, const Dataset& ds, double lambda);

// The labeled part of a dataset with all instances stacked into one
// matrix, so repeated evaluations (line search, GD epochs) avoid per-bag
// allocations. Holds a snapshot of the labels at construction.
class MmlProblem {
 public:
  explicit MmlProblem(const Dataset& ds);

  double Value(const ParamMatrix& w, double lambda) const;
  // Returns the objective and writes its gradient to *grad.
  double ValueAndGradient(const ParamMatrix& w, double lambda,
                          Gradient* grad) const;

  long num_labels() const { return static_cast<long>(pair_bag_.size()); }

 private:
  double Evaluate(const ParamMatrix& w, double lambda, Gradient* grad) const;

  Eigen::MatrixXd x_;               // stacked instances of labeled bags
  std::vector<int> offset_;         // first row of each kept bag, plus end
  std::vector<int> pair_bag_;       // kept-bag index of each label
  std::vector<int> pair_cls_;
  std::vector<int> pair_value_;
};

// Gradient of PairLoss plus lambda * w.
Gradient PairGradient(const ParamMatrix& w, const Bag& bag, int c, int label,
                      double lambda);

// (class, value) pairs of one bag.
using BagLabels = std::vector<std::pair<int, int>>;

// Known labels of bag b in ds.
BagLabels AvailableLabels(const Dataset& ds, int b);

// Sum of pair gradients over `labels` plus lambda * w once.
Gradient BagGradient(const ParamMatrix& w, const Bag& bag,
                     const BagLabels& labels, double lambda);

// Gradient of log P(Y_bc = y | X_b, w).
Gradient LogProbGradientForLabel(const ParamMatrix& w, const Bag& bag, int c,
                                 int y);

// d PairLoss / d A for the clamped A: -1 for label 0,
// exp(A) / (1 - exp(A)) for label 1.
double PairLossSlope(double a, int label);

}  // namespace mimlal

#endif  // MIMLAL_OBJECTIVE_H_
