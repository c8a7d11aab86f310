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

#include "mimlal/dataset.h"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "mimlal/model.h"

namespace mimlal {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(Trim(line.substr(start)));
      break;
    }
    fields.push_back(Trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

std::string Where(const std::string& path, int line_no) {
  return path + ":" + std::to_string(line_no) + ": ";
}

double ParseReal(std::string_view field, const std::string& where) {
  std::string text(field);
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE ||
      !std::isfinite(v)) {
    throw ValidationError(where + "invalid number '" + text + "'");
  }
  return v;
}

long ParseInteger(std::string_view field, const std::string& where) {
  std::string text(field);
  char* end = nullptr;
  long v = std::strtol(text.c_str(), &end, 10);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw ValidationError(where + "invalid label value '" + text + "'");
  }
  return v;
}

std::ifstream OpenForRead(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  return in;
}

std::ofstream OpenForWrite(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

// Rows of a `bag_id,v1,...,vC` file keyed by bag id.
std::unordered_map<std::string, LabelVector> ReadLabelRows(
    const std::string& path, std::vector<std::string>* order) {
  std::ifstream in = OpenForRead(path);
  std::unordered_map<std::string, LabelVector> rows;
  std::string line;
  int line_no = 0;
  size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto fields = SplitCommas(line);
    std::string where = Where(path, line_no);
    if (fields.size() < 2) throw ValidationError(where + "no label columns");
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw ValidationError(where + "inconsistent number of label columns");
    }
    std::string id(fields[0]);
    LabelVector labels;
    for (size_t j = 1; j < fields.size(); ++j) {
      long v = ParseInteger(fields[j], where);
      if (v < -1 || v > 1) {
        throw ValidationError(where + "invalid label value " +
                              std::to_string(v));
      }
      labels.push_back(static_cast<TriLabel>(v));
    }
    if (!rows.emplace(id, std::move(labels)).second) {
      throw ValidationError(where + "duplicate bag id '" + id + "'");
    }
    if (order != nullptr) order->push_back(id);
  }
  return rows;
}

}  // namespace

TriLabel TriLabelFromInt(long value) {
  if (value < -1 || value > 1) {
    throw ValidationError("invalid label value " + std::to_string(value));
  }
  return static_cast<TriLabel>(value);
}

int TriLabelToInt(TriLabel label) { return static_cast<int>(label); }

ClassSets DeriveClassSets(const LabelVector& labels) {
  ClassSets sets;
  for (int c = 0; c < static_cast<int>(labels.size()); ++c) {
    switch (labels[c]) {
      case TriLabel::kPositive:
        sets.available.push_back(c);
        sets.positive.push_back(c);
        break;
      case TriLabel::kNegative:
        sets.available.push_back(c);
        sets.negative.push_back(c);
        break;
      case TriLabel::kUnknown:
        sets.unavailable.push_back(c);
        break;
    }
  }
  return sets;
}

Dataset::Dataset(std::vector<Bag> bags, std::vector<LabelVector> labels,
                 int num_classes, int feature_dim)
    : bags_(std::move(bags)),
      labels_(std::move(labels)),
      num_classes_(num_classes),
      feature_dim_(feature_dim) {
  if (num_classes_ < 2) {
    throw ValidationError("at least two classes are required");
  }
  if (feature_dim_ < 1) throw ValidationError("feature dimension must be >= 1");
  if (bags_.size() != labels_.size()) {
    throw ValidationError("bags and label vectors differ in count");
  }
  for (size_t b = 0; b < bags_.size(); ++b) {
    const Bag& bag = bags_[b];
    if (bag.size() < 1) throw ValidationError("empty bag '" + bag.id + "'");
    if (bag.instances.cols() != feature_dim_) {
      throw ValidationError("bag '" + bag.id + "' has feature dimension " +
                            std::to_string(bag.instances.cols()) +
                            ", expected " + std::to_string(feature_dim_));
    }
    if (!bag.instances.allFinite()) {
      throw ValidationError("bag '" + bag.id + "' has non-finite features");
    }
    if (static_cast<int>(labels_[b].size()) != num_classes_) {
      throw ValidationError("label vector of bag '" + bag.id +
                            "' has wrong length");
    }
    for (TriLabel y : labels_[b]) {
      TriLabelFromInt(static_cast<int>(y));
      if (y != TriLabel::kUnknown) ++num_available_;
    }
  }
}

int Dataset::max_bag_size() const {
  int m = 0;
  for (const Bag& bag : bags_) m = std::max(m, bag.size());
  return m;
}

long Dataset::num_instances() const {
  long n = 0;
  for (const Bag& bag : bags_) n += bag.size();
  return n;
}

int Dataset::num_available(int b) const {
  const LabelVector& y = labels_.at(b);
  return static_cast<int>(
      std::count_if(y.begin(), y.end(),
                    [](TriLabel v) { return v != TriLabel::kUnknown; }));
}

void Dataset::Reveal(int b, int c, int value) {
  if (b < 0 || b >= num_bags() || c < 0 || c >= num_classes_) {
    throw ValidationError("reveal index out of range: (" + std::to_string(b) +
                          ", " + std::to_string(c) + ")");
  }
  if (value != 0 && value != 1) {
    throw ValidationError("revealed value must be 0 or 1");
  }
  TriLabel& slot = labels_[b][c];
  if (slot != TriLabel::kUnknown) {
    throw ValidationError("pair (" + std::to_string(b) + ", " +
                          std::to_string(c) + ") is already labeled");
  }
  slot = static_cast<TriLabel>(value);
  ++num_available_;
}

void Dataset::TransformFeatures(const Eigen::RowVectorXd& mean,
                                const Eigen::RowVectorXd& scale) {
  if (mean.size() != feature_dim_ || scale.size() != feature_dim_) {
    throw ValidationError("transform dimension mismatch");
  }
  for (Bag& bag : bags_) {
    bag.instances = (bag.instances.rowwise() - mean).array().rowwise() /
                    scale.array();
  }
}

IndexSets DeriveIndexSets(const Dataset& ds) {
  IndexSets sets;
  for (int b = 0; b < ds.num_bags(); ++b) {
    for (int c = 0; c < ds.num_classes(); ++c) {
      if (ds.label(b, c) == TriLabel::kUnknown) {
        sets.unavailable.push_back({b, c});
      } else {
        sets.available.push_back({b, c});
      }
    }
  }
  return sets;
}

Dataset RevealLabel(Dataset ds, int b, int c, int value) {
  ds.Reveal(b, c, value);
  return ds;
}

OracleTruth::OracleTruth(std::vector<LabelVector> labels)
    : labels_(std::move(labels)) {
  for (const LabelVector& row : labels_) {
    if (row.size() != labels_.front().size()) {
      throw ValidationError("oracle rows differ in length");
    }
    for (TriLabel y : row) {
      if (y == TriLabel::kUnknown) {
        throw ValidationError("oracle truth may not contain unknown labels");
      }
    }
  }
}

int OracleTruth::value(int b, int c) const {
  if (b < 0 || b >= num_bags() || c < 0 || c >= num_classes()) {
    throw ValidationError("oracle index out of range: (" + std::to_string(b) +
                          ", " + std::to_string(c) + ")");
  }
  return TriLabelToInt(labels_[b][c]);
}

OracleTruth OracleFromDataset(const Dataset& ds) {
  for (int b = 0; b < ds.num_bags(); ++b) {
    if (!ds.fully_labeled(b)) {
      throw ValidationError("bag '" + ds.bag(b).id +
                            "' is not fully labeled; cannot act as oracle");
    }
  }
  return OracleTruth(ds.all_labels());
}

void CheckConsistent(const Dataset& ds, const OracleTruth& truth) {
  if (ds.num_bags() != truth.num_bags() ||
      ds.num_classes() != truth.num_classes()) {
    throw ValidationError("oracle and dataset differ in shape");
  }
  for (int b = 0; b < ds.num_bags(); ++b) {
    for (int c = 0; c < ds.num_classes(); ++c) {
      TriLabel y = ds.label(b, c);
      if (y != TriLabel::kUnknown && TriLabelToInt(y) != truth.value(b, c)) {
        throw ValidationError("known label of bag '" + ds.bag(b).id +
                              "' contradicts the oracle");
      }
    }
  }
}

Dataset MaskLabels(const Dataset& features, const OracleTruth& truth,
                   const MaskPolicy& policy, uint64_t seed) {
  if (features.num_bags() != truth.num_bags() ||
      features.num_classes() != truth.num_classes()) {
    throw ValidationError("oracle and dataset differ in shape");
  }
  const int num_bags = features.num_bags();
  int count = 0;
  if (policy.count.has_value()) {
    count = *policy.count;
    if (count < 0 || count > num_bags) {
      throw ValidationError("initial labeled bag count out of range");
    }
  } else {
    if (!(policy.fraction >= 0.0 && policy.fraction <= 1.0)) {
      throw ValidationError("initial labeled fraction must lie in [0, 1]");
    }
    count = static_cast<int>(std::llround(policy.fraction * num_bags));
  }
  std::vector<int> order(num_bags);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<LabelVector> labels(
      num_bags, LabelVector(features.num_classes(), TriLabel::kUnknown));
  for (int i = 0; i < count; ++i) labels[order[i]] = truth.labels(order[i]);
  return Dataset(features.bags(), std::move(labels), features.num_classes(),
                 features.feature_dim());
}

Dataset SubsetBags(const Dataset& ds, const std::vector<int>& bag_indices) {
  std::vector<Bag> bags;
  std::vector<LabelVector> labels;
  for (int b : bag_indices) {
    bags.push_back(ds.bag(b));
    labels.push_back(ds.labels(b));
  }
  return Dataset(std::move(bags), std::move(labels), ds.num_classes(),
                 ds.feature_dim());
}

OracleTruth SubsetBags(const OracleTruth& truth,
                       const std::vector<int>& bag_indices) {
  std::vector<LabelVector> labels;
  for (int b : bag_indices) labels.push_back(truth.labels(b));
  return OracleTruth(std::move(labels));
}

ParamMatrix RandomTrueParams(int num_classes, int feature_dim,
                             double separation, uint64_t seed) {
  if (num_classes < 2 || feature_dim < 1) {
    throw ValidationError("invalid parameter shape");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ParamMatrix w(num_classes, feature_dim);
  for (int c = 0; c < num_classes; ++c) {
    for (int j = 0; j < feature_dim; ++j) w(c, j) = separation * normal(rng);
  }
  return w;
}

SyntheticData GenerateSynthetic(const SyntheticSpec& spec,
                                const ParamMatrix& w_true, uint64_t seed) {
  if (spec.num_bags < 1) throw ValidationError("need at least one bag");
  if (spec.min_bag_size < 1 || spec.max_bag_size < spec.min_bag_size) {
    throw ValidationError("invalid bag size range");
  }
  if (spec.num_classes < 2 || spec.feature_dim < 1 ||
      w_true.rows() != spec.num_classes || w_true.cols() != spec.feature_dim) {
    throw ValidationError("w_true must have shape C x d");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> bag_size(spec.min_bag_size,
                                              spec.max_bag_size);

  SyntheticData out;
  std::vector<Bag> bags;
  std::vector<LabelVector> labels;
  for (int b = 0; b < spec.num_bags; ++b) {
    Bag bag;
    bag.id = spec.id_prefix + std::to_string(b);
    const int n = bag_size(rng);
    bag.instances.resize(n, spec.feature_dim);
    LabelVector y(spec.num_classes, TriLabel::kNegative);
    std::vector<int> latent;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < spec.feature_dim; ++j) {
        bag.instances(i, j) = normal(rng);
      }
      Eigen::VectorXd p = InstancePosterior(w_true, bag.instances.row(i));
      std::discrete_distribution<int> pick(p.data(), p.data() + p.size());
      int cls = pick(rng);
      latent.push_back(cls);
      y[cls] = TriLabel::kPositive;
    }
    bags.push_back(std::move(bag));
    labels.push_back(std::move(y));
    out.instance_classes.push_back(std::move(latent));
  }
  out.truth = OracleTruth(labels);
  out.dataset = Dataset(std::move(bags), std::move(labels), spec.num_classes,
                        spec.feature_dim);
  return out;
}

std::vector<FoldSplit> CrossValidationSplits(int num_bags, int folds,
                                             uint64_t seed) {
  if (folds < 2) throw ValidationError("folds must be >= 2");
  if (folds > num_bags) throw ValidationError("folds exceed the number of bags");
  std::vector<int> order(num_bags);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<int> fold_of(num_bags);
  for (int i = 0; i < num_bags; ++i) fold_of[order[i]] = i % folds;
  std::vector<FoldSplit> splits(folds);
  for (int b = 0; b < num_bags; ++b) {
    for (int f = 0; f < folds; ++f) {
      (fold_of[b] == f ? splits[f].test : splits[f].train).push_back(b);
    }
  }
  return splits;
}

Dataset LoadDataset(const std::string& features_path,
                    const std::string& labels_path) {
  std::ifstream in = OpenForRead(features_path);
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<std::vector<double>>> rows;
  std::string line;
  int line_no = 0;
  int dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto fields = SplitCommas(line);
    std::string where = Where(features_path, line_no);
    if (fields.size() < 2) throw ValidationError(where + "no feature columns");
    const int d = static_cast<int>(fields.size()) - 1;
    if (dim < 0) dim = d;
    if (d != dim) {
      throw ValidationError(where + "ragged feature row: " +
                            std::to_string(d) + " values, expected " +
                            std::to_string(dim));
    }
    std::string id(fields[0]);
    if (id.empty()) throw ValidationError(where + "empty bag id");
    std::vector<double> x(d);
    for (int j = 0; j < d; ++j) x[j] = ParseReal(fields[j + 1], where);
    auto [it, inserted] = rows.try_emplace(id);
    if (inserted) order.push_back(id);
    it->second.push_back(std::move(x));
  }
  if (order.empty()) {
    throw ValidationError(features_path + ": no instances found");
  }

  std::unordered_map<std::string, LabelVector> label_rows =
      ReadLabelRows(labels_path, nullptr);
  if (label_rows.empty()) {
    throw ValidationError(labels_path + ": no label rows found");
  }
  const int num_classes =
      static_cast<int>(label_rows.begin()->second.size());
  for (const auto& [id, y] : label_rows) {
    if (!rows.count(id)) {
      throw ValidationError(labels_path + ": bag '" + id +
                            "' has no instances in " + features_path);
    }
  }

  std::vector<Bag> bags;
  std::vector<LabelVector> labels;
  for (const std::string& id : order) {
    auto it = label_rows.find(id);
    if (it == label_rows.end()) {
      throw ValidationError(features_path + ": bag '" + id +
                            "' is missing from " + labels_path);
    }
    const auto& xs = rows[id];
    Bag bag;
    bag.id = id;
    bag.instances.resize(static_cast<Eigen::Index>(xs.size()), dim);
    for (size_t i = 0; i < xs.size(); ++i) {
      for (int j = 0; j < dim; ++j) bag.instances(i, j) = xs[i][j];
    }
    bags.push_back(std::move(bag));
    labels.push_back(it->second);
  }
  return Dataset(std::move(bags), std::move(labels), num_classes, dim);
}

OracleTruth LoadOracleTruth(const std::string& path, const Dataset& ds) {
  auto rows = ReadLabelRows(path, nullptr);
  std::vector<LabelVector> labels;
  for (const Bag& bag : ds.bags()) {
    auto it = rows.find(bag.id);
    if (it == rows.end()) {
      throw ValidationError(path + ": bag '" + bag.id + "' is missing");
    }
    if (static_cast<int>(it->second.size()) != ds.num_classes()) {
      throw ValidationError(path + ": wrong number of classes");
    }
    labels.push_back(it->second);
  }
  if (rows.size() != labels.size()) {
    throw ValidationError(path + ": contains bags not in the dataset");
  }
  OracleTruth truth(std::move(labels));
  CheckConsistent(ds, truth);
  return truth;
}

void WriteFeatures(const Dataset& ds, const std::string& path) {
  std::ofstream out = OpenForWrite(path);
  for (const Bag& bag : ds.bags()) {
    for (int i = 0; i < bag.size(); ++i) {
      out << bag.id;
      for (int j = 0; j < ds.feature_dim(); ++j) {
        out << ',' << FormatDouble(bag.instances(i, j));
      }
      out << '\n';
    }
  }
}

namespace {

void WriteLabelRows(const std::vector<Bag>& bags,
                    const std::vector<LabelVector>& labels,
                    const std::string& path) {
  std::ofstream out = OpenForWrite(path);
  for (size_t b = 0; b < bags.size(); ++b) {
    out << bags[b].id;
    for (TriLabel y : labels[b]) out << ',' << TriLabelToInt(y);
    out << '\n';
  }
}

}  // namespace

void WriteLabels(const Dataset& ds, const std::string& path) {
  WriteLabelRows(ds.bags(), ds.all_labels(), path);
}

void WriteOracleTruth(const OracleTruth& truth, const Dataset& ds,
                      const std::string& path) {
  if (truth.num_bags() != ds.num_bags()) {
    throw ValidationError("oracle and dataset differ in shape");
  }
  WriteLabelRows(ds.bags(), truth.all_labels(), path);
}

ZScore ComputeZScore(const Dataset& ds) {
  const int d = ds.feature_dim();
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(d);
  Eigen::RowVectorXd sum_sq = Eigen::RowVectorXd::Zero(d);
  const double n = static_cast<double>(ds.num_instances());
  for (const Bag& bag : ds.bags()) {
    sum += bag.instances.colwise().sum();
    sum_sq += bag.instances.array().square().matrix().colwise().sum();
  }
  ZScore z;
  z.mean = sum / n;
  Eigen::RowVectorXd var =
      (sum_sq / n - z.mean.array().square().matrix()).cwiseMax(0.0);
  z.scale = var.cwiseSqrt();
  for (int j = 0; j < d; ++j) {
    if (z.scale(j) < 1e-12) z.scale(j) = 1.0;
  }
  return z;
}

}  // namespace mimlal
