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

#include "mimlal/model.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace mimlal {
namespace {

// log sum_{k != skip} exp(v_k), shifted by the max over the same range so
// a dominant excluded entry cannot underflow the rest.
double LogSumExpExcluding(const Eigen::Ref<const Eigen::RowVectorXd>& v,
                          int skip) {
  double m = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < v.size(); ++k) {
    if (k != skip) m = std::max(m, v(k));
  }
  if (!std::isfinite(m)) return m;
  double sum = 0.0;
  for (int k = 0; k < v.size(); ++k) {
    if (k != skip) sum += std::exp(v(k) - m);
  }
  return m + std::log(sum);
}

// log(1 - p_t) given the row scores and their log-normalizer. For small
// p_t the difference of two close log-sums loses digits, so go via log1p.
double LogNotClassFromScores(const Eigen::Ref<const Eigen::RowVectorXd>& s,
                             int t, double lse) {
  const double log_p_t = s(t) - lse;
  if (log_p_t < -std::numbers::ln2) return std::log1p(-std::exp(log_p_t));
  return LogSumExpExcluding(s, t) - lse;
}

void CheckClass(const ParamMatrix& w, int t) {
  if (t < 0 || t >= w.rows()) {
    throw ValidationError("class index " + std::to_string(t) +
                          " out of range");
  }
}

}  // namespace

double LogSumExp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() == 0) return -std::numeric_limits<double>::infinity();
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

double OneMinusExp(double a) { return -std::expm1(a); }

Eigen::VectorXd InstancePosterior(const ParamMatrix& w,
                                  const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != w.cols()) {
    throw ValidationError("feature dimension " + std::to_string(x.size()) +
                          " does not match parameters (" +
                          std::to_string(w.cols()) + ")");
  }
  Eigen::VectorXd s = w * x;
  return (s.array() - LogSumExp(s)).exp();
}

double LogProbNotClass(const ParamMatrix& w,
                       const Eigen::Ref<const Eigen::VectorXd>& x, int t) {
  CheckClass(w, t);
  if (x.size() != w.cols()) throw ValidationError("feature dimension mismatch");
  Eigen::RowVectorXd s = (w * x).transpose();
  return LogNotClassFromScores(s, t, LogSumExp(s.transpose()));
}

double ClampBagLogProb(double a) {
  static const double kLow = std::log(kProbabilityFloor);
  static const double kHigh = std::log1p(-kProbabilityFloor);
  return std::clamp(a, kLow, kHigh);
}

double BagClassLogProb(const ParamMatrix& w, const Bag& bag, int t) {
  CheckClass(w, t);
  double a = 0.0;
  for (int i = 0; i < bag.size(); ++i) {
    a += LogProbNotClass(w, bag.instances.row(i).transpose(), t);
  }
  return ClampBagLogProb(a);
}

double BagClassProbPositive(const ParamMatrix& w, const Bag& bag, int t) {
  return OneMinusExp(BagClassLogProb(w, bag, t));
}

BagEvaluation::BagEvaluation(const ParamMatrix& w, const Bag& bag)
    : bag_(&bag) {
  if (bag.instances.cols() != w.cols()) {
    throw ValidationError("bag '" + bag.id +
                          "' dimension does not match parameters");
  }
  const int n = bag.size();
  const int num_classes = static_cast<int>(w.rows());
  scores_ = bag.instances * w.transpose();
  posterior_.resize(n, num_classes);
  log_not_.resize(n, num_classes);
  log_norm_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double lse = LogSumExp(scores_.row(i).transpose());
    log_norm_(i) = lse;
    posterior_.row(i) = (scores_.row(i).array() - lse).exp();
    for (int t = 0; t < num_classes; ++t) {
      const double p = posterior_(i, t);
      log_not_(i, t) = p < 0.5 ? std::log1p(-p)
                               : LogSumExpExcluding(scores_.row(i), t) - lse;
    }
  }
}

double BagEvaluation::log_prob_negative(int t) const {
  return ClampBagLogProb(log_not_.col(t).sum());
}

Eigen::MatrixXd BagEvaluation::LogProbNegativeCoefficients(int t) const {
  const int n = size();
  const int num_classes = this->num_classes();
  Eigen::MatrixXd coef(n, num_classes);
  for (int i = 0; i < n; ++i) {
    // p_t * p_c / (1 - p_t), formed in log space.
    const double log_p_t = scores_(i, t) - log_norm_(i);
    const double lse_rest = log_not_(i, t) + log_norm_(i);
    for (int c = 0; c < num_classes; ++c) {
      coef(i, c) = c == t ? -posterior_(i, t)
                          : std::exp(log_p_t + scores_(i, c) - lse_rest);
    }
  }
  return coef;
}

Gradient BagEvaluation::LogProbNegativeGradient(int t) const {
  return LogProbNegativeCoefficients(t).transpose() * bag_->instances;
}

BagPrediction PredictBag(const ParamMatrix& w, const Bag& bag,
                         double threshold) {
  BagEvaluation eval(w, bag);
  const int num_classes = static_cast<int>(w.rows());
  BagPrediction pred;
  pred.scores.resize(num_classes);
  pred.labels.resize(num_classes);
  for (int c = 0; c < num_classes; ++c) {
    pred.scores(c) = eval.prob_positive(c);
    pred.labels[c] = pred.scores(c) > threshold ? 1 : 0;
  }
  return pred;
}

void WriteParams(const ParamMatrix& w, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (int c = 0; c < w.rows(); ++c) {
    out << c + 1;
    for (int j = 0; j < w.cols(); ++j) out << ',' << FormatDouble(w(c, j));
    out << '\n';
  }
}

ParamMatrix LoadParams(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::map<long, std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    if (fields.size() < 2) throw ValidationError(where + "malformed row");
    char* end = nullptr;
    long c = std::strtol(fields[0].c_str(), &end, 10);
    if (*end != '\0' && !std::isspace(static_cast<unsigned char>(*end))) {
      throw ValidationError(where + "invalid class index");
    }
    std::vector<double> values;
    for (size_t j = 1; j < fields.size(); ++j) {
      double v = std::strtod(fields[j].c_str(), &end);
      if (end == fields[j].c_str() || !std::isfinite(v)) {
        throw ValidationError(where + "invalid number '" + fields[j] + "'");
      }
      values.push_back(v);
    }
    if (dim == 0) dim = values.size();
    if (values.size() != dim) throw ValidationError(where + "ragged row");
    if (!rows.emplace(c, std::move(values)).second) {
      throw ValidationError(where + "duplicate class index");
    }
  }
  if (rows.empty()) throw ValidationError(path + ": no parameter rows");
  ParamMatrix w(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(dim));
  long expected = 1;
  for (const auto& [c, values] : rows) {
    if (c != expected) {
      throw ValidationError(path + ": class indices must be 1..C");
    }
    for (size_t j = 0; j < dim; ++j) w(c - 1, j) = values[j];
    ++expected;
  }
  return w;
}

}  // namespace mimlal
