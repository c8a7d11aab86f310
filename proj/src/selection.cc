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

#include "mimlal/selection.h"

#include <cmath>
#include <limits>

#include "mimlal/model.h"
#include "mimlal/objective.h"

namespace mimlal {
namespace {

double EglFromEvaluation(const BagEvaluation& eval, int c, long num_labeled) {
  const double a = eval.log_prob_negative(c);
  const double p0 = std::exp(a);
  const double p1 = OneMinusExp(a);
  // grad log P0 = dA/dw and grad log P1 = -(P0 / P1) dA/dw.
  const double norm0 = eval.LogProbNegativeGradient(c).norm();
  const double norm1 = (p0 / p1) * norm0;
  return (p1 * norm1 + p0 * norm0) / static_cast<double>(num_labeled + 1);
}

double Uncertainty(double p) { return 2.0 * p * (1.0 - p); }

}  // namespace

Criterion ParseCriterion(std::string_view name) {
  if (name == "egl-pair") return Criterion::kEglPair;
  if (name == "unc-pair") return Criterion::kUncPair;
  if (name == "rand-pair") return Criterion::kRandPair;
  if (name == "bag-then-label") return Criterion::kBagThenLabel;
  if (name == "bag-all") return Criterion::kBagAll;
  throw ValidationError(
      "unknown criterion '" + std::string(name) +
      "' (expected egl-pair, unc-pair, rand-pair, bag-then-label or bag-all)");
}

std::string_view CriterionName(Criterion criterion) {
  switch (criterion) {
    case Criterion::kEglPair:
      return "egl-pair";
    case Criterion::kUncPair:
      return "unc-pair";
    case Criterion::kRandPair:
      return "rand-pair";
    case Criterion::kBagThenLabel:
      return "bag-then-label";
    case Criterion::kBagAll:
      return "bag-all";
  }
  return "?";
}

bool IsPairCriterion(Criterion criterion) {
  return criterion != Criterion::kBagAll;
}

double EglPairScore(const ParamMatrix& w, const Bag& bag, int c,
                    long num_labeled) {
  if (c < 0 || c >= w.rows()) throw ValidationError("class out of range");
  return EglFromEvaluation(BagEvaluation(w, bag), c, num_labeled);
}

double UncertaintyPairScore(const ParamMatrix& w, const Bag& bag, int c) {
  return Uncertainty(BagClassProbPositive(w, bag, c));
}

SelectionResult SelectPair(const Dataset& ds, const ParamMatrix& w,
                           Criterion criterion, std::mt19937_64& rng,
                           bool egl_divisor) {
  if (ds.num_unavailable() == 0) {
    throw ValidationError("no unlabeled bag-class pairs left");
  }
  SelectionResult result;
  result.kind = SelectionResult::Kind::kPair;
  result.cost_units = 1.0;

  if (criterion == Criterion::kRandPair) {
    std::vector<PairIndex> pool = DeriveIndexSets(ds).unavailable;
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    const PairIndex chosen = pool[pick(rng)];
    result.bag = chosen.bag;
    result.cls = chosen.cls;
    return result;
  }
  if (criterion != Criterion::kEglPair && criterion != Criterion::kUncPair) {
    throw ValidationError("SelectPair handles egl-pair, unc-pair, rand-pair");
  }

  const long num_labeled = egl_divisor ? ds.num_available() : 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int b = 0; b < ds.num_bags(); ++b) {
    if (ds.fully_labeled(b)) continue;
    BagEvaluation eval(w, ds.bag(b));
    for (int c = 0; c < ds.num_classes(); ++c) {
      if (ds.label(b, c) != TriLabel::kUnknown) continue;
      const double score = criterion == Criterion::kEglPair
                               ? EglFromEvaluation(eval, c, num_labeled)
                               : Uncertainty(eval.prob_positive(c));
      if (score > best) {
        best = score;
        result.bag = b;
        result.cls = c;
        result.score = score;
      }
    }
  }
  return result;
}

double AverageCardinality(const Dataset& ds) {
  double total = 0.0;
  int full = 0;
  for (int b = 0; b < ds.num_bags(); ++b) {
    if (!ds.fully_labeled(b)) continue;
    ++full;
    for (TriLabel y : ds.labels(b)) total += y == TriLabel::kPositive;
  }
  if (full == 0) return ds.num_classes() / 2.0;
  return total / full;
}

SelectionResult SelectBagThenLabel(const Dataset& ds, const ParamMatrix& w,
                                   double avg_cardinality, double threshold) {
  SelectionResult result;
  result.kind = SelectionResult::Kind::kPair;
  result.cost_units = 1.0;
  double best = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_scores;
  for (int b = 0; b < ds.num_bags(); ++b) {
    const int unlabeled = ds.num_classes() - ds.num_available(b);
    if (unlabeled == 0) continue;
    BagPrediction pred = PredictBag(w, ds.bag(b), threshold);
    int positives = 0;
    for (int v : pred.labels) positives += v;
    const double diversity = static_cast<double>(unlabeled) / ds.num_classes();
    const double score = std::abs(positives - avg_cardinality) * diversity;
    if (score > best) {
      best = score;
      result.bag = b;
      result.score = score;
      best_scores = pred.scores;
    }
  }
  if (result.bag < 0) {
    throw ValidationError("no bag has unlabeled classes");
  }
  double closest = std::numeric_limits<double>::infinity();
  for (int c = 0; c < ds.num_classes(); ++c) {
    if (ds.label(result.bag, c) != TriLabel::kUnknown) continue;
    const double gap = std::abs(best_scores(c) - 0.5);
    if (gap < closest) {
      closest = gap;
      result.cls = c;
    }
  }
  return result;
}

SelectionResult SelectBagAll(const Dataset& ds, const ParamMatrix& w,
                             double cost_divisor) {
  if (!(cost_divisor >= 1.0)) throw ValidationError("k must be >= 1");
  SelectionResult result;
  result.kind = SelectionResult::Kind::kBag;
  result.cost_units = ds.num_classes() / cost_divisor;
  double best = -std::numeric_limits<double>::infinity();
  for (int b = 0; b < ds.num_bags(); ++b) {
    if (ds.fully_labeled(b)) continue;
    BagEvaluation eval(w, ds.bag(b));
    double sum = 0.0;
    int count = 0;
    for (int c = 0; c < ds.num_classes(); ++c) {
      if (ds.label(b, c) != TriLabel::kUnknown) continue;
      sum += Uncertainty(eval.prob_positive(c));
      ++count;
    }
    const double score = sum / count;
    if (score > best) {
      best = score;
      result.bag = b;
      result.score = score;
    }
  }
  if (result.bag < 0) throw ValidationError("no bag has unlabeled classes");
  return result;
}

}  // namespace mimlal
