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

#include "mimlal/objective.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mimlal {
namespace {

void CheckLabel(int label) {
  if (label != 0 && label != 1) {
    throw ValidationError("label must be 0 or 1, got " +
                          std::to_string(label));
  }
}

double LossFromLogProb(double a, int label) {
  return label == 0 ? -a : -std::log(OneMinusExp(a));
}

}  // namespace

double PairLossSlope(double a, int label) {
  CheckLabel(label);
  return label == 0 ? -1.0 : std::exp(a) / OneMinusExp(a);
}

double PairLoss(const ParamMatrix& w, const Bag& bag, int c, int label) {
  CheckLabel(label);
  return LossFromLogProb(BagClassLogProb(w, bag, c), label);
}

MmlProblem::MmlProblem(const Dataset& ds) {
  long rows = 0;
  for (int b = 0; b < ds.num_bags(); ++b) {
    if (ds.num_available(b) > 0) rows += ds.bag(b).size();
  }
  x_.resize(rows, ds.feature_dim());
  offset_.push_back(0);
  for (int b = 0; b < ds.num_bags(); ++b) {
    if (ds.num_available(b) == 0) continue;
    const Bag& bag = ds.bag(b);
    const int kept = static_cast<int>(offset_.size()) - 1;
    x_.middleRows(offset_.back(), bag.size()) = bag.instances;
    offset_.push_back(offset_.back() + bag.size());
    for (int c = 0; c < ds.num_classes(); ++c) {
      TriLabel y = ds.label(b, c);
      if (y == TriLabel::kUnknown) continue;
      pair_bag_.push_back(kept);
      pair_cls_.push_back(c);
      pair_value_.push_back(TriLabelToInt(y));
    }
  }
}

double MmlProblem::Value(const ParamMatrix& w, double lambda) const {
  return Evaluate(w, lambda, nullptr);
}

double MmlProblem::ValueAndGradient(const ParamMatrix& w, double lambda,
                                    Gradient* grad) const {
  return Evaluate(w, lambda, grad);
}

double MmlProblem::Evaluate(const ParamMatrix& w, double lambda,
                            Gradient* grad) const {
  if (x_.cols() != w.cols()) {
    throw ValidationError("parameter dimension does not match the dataset");
  }
  const int num_classes = static_cast<int>(w.rows());
  const Eigen::Index n = x_.rows();
  double total = 0.0;
  Eigen::MatrixXd coef;
  if (grad != nullptr) coef = Eigen::MatrixXd::Zero(n, num_classes);

  if (n > 0) {
    const Eigen::MatrixXd s = x_ * w.transpose();  // N x C
    Eigen::MatrixXd p(n, num_classes);
    Eigen::MatrixXd log_not(n, num_classes);  // log P(y_i != t)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lse = LogSumExp(s.row(i).transpose());
      for (int t = 0; t < num_classes; ++t) {
        p(i, t) = std::exp(s(i, t) - lse);
        if (p(i, t) < 0.5) {
          log_not(i, t) = std::log1p(-p(i, t));
          continue;
        }
        // p_t near 1: sum the other classes directly.
        double m = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < num_classes; ++k) {
          if (k != t) m = std::max(m, s(i, k));
        }
        double sum = 0.0;
        for (int k = 0; k < num_classes; ++k) {
          if (k != t) sum += std::exp(s(i, k) - m);
        }
        log_not(i, t) = m + std::log(sum) - lse;
      }
    }

    for (size_t j = 0; j < pair_bag_.size(); ++j) {
      const int t = pair_cls_[j];
      const int first = offset_[pair_bag_[j]];
      const int last = offset_[pair_bag_[j] + 1];
      double a = 0.0;
      for (int i = first; i < last; ++i) a += log_not(i, t);
      const double clamped = ClampBagLogProb(a);
      total += LossFromLogProb(clamped, pair_value_[j]);
      if (grad == nullptr) continue;
      const double slope = PairLossSlope(clamped, pair_value_[j]);
      for (int i = first; i < last; ++i) {
        // dA/ds_ic = -p_t for c = t, p_c * p_t / (1 - p_t) otherwise.
        const double odds = std::exp(std::log(p(i, t)) - log_not(i, t));
        for (int c = 0; c < num_classes; ++c) {
          coef(i, c) += slope * (c == t ? -p(i, t) : p(i, c) * odds);
        }
      }
    }
  }

  const long count = num_labels();
  double value = 0.5 * lambda * w.squaredNorm();
  if (count > 0) value += total / static_cast<double>(count);
  if (grad != nullptr) {
    *grad = lambda * w;
    if (count > 0) {
      grad->noalias() += (coef.transpose() * x_) / static_cast<double>(count);
    }
  }
  return value;
}

double MmlObjective(const ParamMatrix& w, const Dataset& ds, double lambda) {
  return MmlProblem(ds).Value(w, lambda);
}

Gradient MmlGradient(const ParamMatrix& w, const Dataset& ds, double lambda) {
  Gradient g;
  MmlProblem(ds).ValueAndGradient(w, lambda, &g);
  return g;
}

Gradient PairGradient(const ParamMatrix& w, const Bag& bag, int c, int label,
                      double lambda) {
  if (c < 0 || c >= w.rows()) throw ValidationError("class out of range");
  BagEvaluation eval(w, bag);
  const double slope = PairLossSlope(eval.log_prob_negative(c), label);
  return slope * eval.LogProbNegativeGradient(c) + lambda * w;
}

BagLabels AvailableLabels(const Dataset& ds, int b) {
  BagLabels labels;
  for (int c = 0; c < ds.num_classes(); ++c) {
    TriLabel y = ds.label(b, c);
    if (y != TriLabel::kUnknown) labels.emplace_back(c, TriLabelToInt(y));
  }
  return labels;
}

Gradient BagGradient(const ParamMatrix& w, const Bag& bag,
                     const BagLabels& labels, double lambda) {
  if (labels.empty()) {
    throw ValidationError("bag '" + bag.id + "' has no available labels");
  }
  BagEvaluation eval(w, bag);
  Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(bag.size(), w.rows());
  for (const auto& [c, label] : labels) {
    if (c < 0 || c >= w.rows()) throw ValidationError("class out of range");
    coef += PairLossSlope(eval.log_prob_negative(c), label) *
            eval.LogProbNegativeCoefficients(c);
  }
  return coef.transpose() * bag.instances + lambda * w;
}

Gradient LogProbGradientForLabel(const ParamMatrix& w, const Bag& bag, int c,
                                 int y) {
  return -PairGradient(w, bag, c, y, 0.0);
}

}  // namespace mimlal
