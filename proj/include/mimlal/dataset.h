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

#ifndef MIMLAL_DATASET_H_
#define MIMLAL_DATASET_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mimlal/common.h"

namespace mimlal {

// Bag-level label state for one class.
enum class TriLabel : int8_t { kUnknown = -1, kNegative = 0, kPositive = 1 };

// Accepts exactly -1, 0 and 1; anything else is "invalid label value".
TriLabel TriLabelFromInt(long value);
int TriLabelToInt(TriLabel label);

using LabelVector = std::vector<TriLabel>;

struct Bag {
  std::string id;
  Eigen::MatrixXd instances;  // n_b x d, one instance per row

  int size() const { return static_cast<int>(instances.rows()); }
};

// A (bag, class) coordinate of the label matrix. Both indices are 0-based
// inside the library; text formats and the Python bindings use 1-based
// classes.
struct PairIndex {
  int bag = 0;
  int cls = 0;

  auto operator<=>(const PairIndex&) const = default;
};

// Per-bag class index sets.
struct ClassSets {
  std::vector<int> available;    // S_b
  std::vector<int> positive;     // S_b+
  std::vector<int> negative;     // S_b-
  std::vector<int> unavailable;  // complement of S_b
};

ClassSets DeriveClassSets(const LabelVector& labels);

// Bags with tri-state labels. Keeps a running count of known labels so that
// |L| is O(1); Reveal is the only mutator of the label matrix.
class Dataset {
 public:
  Dataset() = default;
  // Validates shapes, finiteness and C >= 2.
  Dataset(std::vector<Bag> bags, std::vector<LabelVector> labels,
          int num_classes, int feature_dim);

  int num_bags() const { return static_cast<int>(bags_.size()); }
  int num_classes() const { return num_classes_; }
  int feature_dim() const { return feature_dim_; }
  int max_bag_size() const;
  long num_instances() const;

  const std::vector<Bag>& bags() const { return bags_; }
  const Bag& bag(int b) const { return bags_.at(b); }
  const LabelVector& labels(int b) const { return labels_.at(b); }
  const std::vector<LabelVector>& all_labels() const { return labels_; }
  TriLabel label(int b, int c) const { return labels_.at(b).at(c); }

  // |L| and |U|.
  long num_available() const { return num_available_; }
  long num_unavailable() const {
    return static_cast<long>(num_bags()) * num_classes_ - num_available_;
  }
  // |S_b|.
  int num_available(int b) const;
  bool fully_labeled(int b) const { return num_available(b) == num_classes_; }

  // Sets Y_bc for a currently unknown pair. value must be 0 or 1.
  void Reveal(int b, int c, int value);

  // Applies (x - mean) / scale to every instance; used for z-scoring.
  void TransformFeatures(const Eigen::RowVectorXd& mean,
                         const Eigen::RowVectorXd& scale);

 private:
  std::vector<Bag> bags_;
  std::vector<LabelVector> labels_;
  int num_classes_ = 0;
  int feature_dim_ = 0;
  long num_available_ = 0;
};

struct IndexSets {
  std::vector<PairIndex> available;    // L, lexicographic order
  std::vector<PairIndex> unavailable;  // U, lexicographic order
};

IndexSets DeriveIndexSets(const Dataset& ds);

// Functional form of Dataset::Reveal.
Dataset RevealLabel(Dataset ds, int b, int c, int value);

// Complete 0/1 label matrix used to answer simulated queries.
class OracleTruth {
 public:
  OracleTruth() = default;
  explicit OracleTruth(std::vector<LabelVector> labels);

  int num_bags() const { return static_cast<int>(labels_.size()); }
  int num_classes() const {
    return labels_.empty() ? 0 : static_cast<int>(labels_.front().size());
  }
  int value(int b, int c) const;
  const LabelVector& labels(int b) const { return labels_.at(b); }
  const std::vector<LabelVector>& all_labels() const { return labels_; }

 private:
  std::vector<LabelVector> labels_;
};

// Builds the oracle from a dataset whose labels are all known.
OracleTruth OracleFromDataset(const Dataset& ds);

// Checks B, C agreement and that every known label of ds equals the oracle.
void CheckConsistent(const Dataset& ds, const OracleTruth& truth);

// Choose `count` bags, or round(fraction * B) when count is unset.
struct MaskPolicy {
  std::optional<int> count;
  double fraction = 0.05;
};

// Returns the bags of `features` with the chosen bags fully labeled from
// `truth` and every other entry unknown.
Dataset MaskLabels(const Dataset& features, const OracleTruth& truth,
                   const MaskPolicy& policy, uint64_t seed);

// Keeps the listed bags, in the given order.
Dataset SubsetBags(const Dataset& ds, const std::vector<int>& bag_indices);
OracleTruth SubsetBags(const OracleTruth& truth,
                       const std::vector<int>& bag_indices);

struct SyntheticSpec {
  int num_bags = 100;
  int num_classes = 4;
  int feature_dim = 8;
  int min_bag_size = 2;
  int max_bag_size = 5;
  std::string id_prefix = "bag";
};

struct SyntheticData {
  OracleTruth truth;
  Dataset dataset;  // fully labeled copy of truth
  std::vector<std::vector<int>> instance_classes;  // latent y_bi, 0-based
};

// Draws a C x d weight matrix with N(0, separation^2) entries.
ParamMatrix RandomTrueParams(int num_classes, int feature_dim,
                             double separation, uint64_t seed);

// Features ~ N(0, I); latent instance classes ~ softmax(w_true x);
// bag labels by the OR rule.
SyntheticData GenerateSynthetic(const SyntheticSpec& spec,
                                const ParamMatrix& w_true, uint64_t seed);

struct FoldSplit {
  std::vector<int> train;
  std::vector<int> test;
};

// Random partition of 0..num_bags-1 into `folds` test sets whose sizes
// differ by at most one.
std::vector<FoldSplit> CrossValidationSplits(int num_bags, int folds,
                                             uint64_t seed);

// ---- Text formats ----
//
// features: `bag_id,f1,...,fd` one line per instance
// labels:   `bag_id,y1,...,yC` one line per bag, y in {-1,0,1}
Dataset LoadDataset(const std::string& features_path,
                    const std::string& labels_path);
// Same layout as the labels file, values restricted to {0,1}; rows are
// matched to the dataset's bags by id.
OracleTruth LoadOracleTruth(const std::string& path, const Dataset& ds);

void WriteFeatures(const Dataset& ds, const std::string& path);
void WriteLabels(const Dataset& ds, const std::string& path);
void WriteOracleTruth(const OracleTruth& truth, const Dataset& ds,
                      const std::string& path);

struct ZScore {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;
};

// Per-feature mean and standard deviation over all instances; constant
// features get scale 1.
ZScore ComputeZScore(const Dataset& ds);

}  // namespace mimlal

#endif  // MIMLAL_DATASET_H_
