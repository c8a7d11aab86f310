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

#ifndef MIMLAL_MODEL_H_
#define MIMLAL_MODEL_H_

#include <vector>

#include <Eigen/Dense>

#include "mimlal/common.h"
#include "mimlal/dataset.h"

namespace mimlal {

// log(sum_k exp(v_k)) with max shift. Returns -inf for an empty range.
double LogSumExp(const Eigen::Ref<const Eigen::VectorXd>& v);

// 1 - exp(a) for a <= 0 without cancellation near a = 0.
double OneMinusExp(double a);

// Softmax of the class scores w_c^T x.
Eigen::VectorXd InstancePosterior(const ParamMatrix& w,
                                  const Eigen::Ref<const Eigen::VectorXd>& x);

// log P(y != t | x, w) = logsumexp_{k != t}(s_k) - logsumexp_k(s_k).
double LogProbNotClass(const ParamMatrix& w,
                       const Eigen::Ref<const Eigen::VectorXd>& x, int t);

// Clamps A_bt into [log eps, log(1 - eps)].
double ClampBagLogProb(double a);

// A_bt = sum_i log P(y_bi != t), clamped. exp(A_bt) = P(Y_bt = 0).
double BagClassLogProb(const ParamMatrix& w, const Bag& bag, int t);

// P(Y_bt = 1) = 1 - exp(A_bt).
double BagClassProbPositive(const ParamMatrix& w, const Bag& bag, int t);

// Everything the objective, gradients and selection criteria need from
// one bag under one parameter matrix: scores, posteriors and the matrix of
// log P(y_bi != t). Computing it once per bag keeps per-class work at
// O(n_b * C * d).
class BagEvaluation {
 public:
  BagEvaluation(const ParamMatrix& w, const Bag& bag);

  int size() const { return static_cast<int>(posterior_.rows()); }
  int num_classes() const { return static_cast<int>(posterior_.cols()); }

  // P(y_bi = c).
  const Eigen::MatrixXd& posterior() const { return posterior_; }
  // log P(y_bi != t).
  const Eigen::MatrixXd& log_not() const { return log_not_; }

  // Clamped A_bt.
  double log_prob_negative(int t) const;
  double prob_positive(int t) const { return OneMinusExp(log_prob_negative(t)); }

  // n_b x C coefficients R with dA_bt/dw = R^T X. Derivative of the
  // unclamped sum.
  Eigen::MatrixXd LogProbNegativeCoefficients(int t) const;
  // dA_bt/dw as a C x d matrix.
  Gradient LogProbNegativeGradient(int t) const;

  const Bag& bag() const { return *bag_; }

 private:
  const Bag* bag_;
  Eigen::MatrixXd scores_;     // n_b x C
  Eigen::MatrixXd posterior_;  // n_b x C
  Eigen::MatrixXd log_not_;    // n_b x C
  Eigen::VectorXd log_norm_;   // logsumexp of each score row
};

struct BagPrediction {
  std::vector<int> labels;  // 0/1 per class
  Eigen::VectorXd scores;   // P(Y_bc = 1) per class
};

// Y_hat_c = 1 iff P(Y_bc = 1) > threshold.
BagPrediction PredictBag(const ParamMatrix& w, const Bag& bag,
                         double threshold = 0.5);

// Plain-text parameter file, one line per class: `c,w_c1,...,w_cd` with c
// 1-based.
void WriteParams(const ParamMatrix& w, const std::string& path);
ParamMatrix LoadParams(const std::string& path);

}  // namespace mimlal

#endif  // MIMLAL_MODEL_H_
