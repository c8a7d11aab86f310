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

#ifndef MIMLAL_COMMON_H_
#define MIMLAL_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mimlal {

// Class weight vectors stacked row-wise: row c holds w_c (C x d).
using ParamMatrix = Eigen::MatrixXd;

// Same shape as ParamMatrix.
using Gradient = Eigen::MatrixXd;

// Raised for inputs that break a documented precondition (bad files,
// out-of-range indices, invalid configuration). The CLI maps it to exit 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Probability floor applied to P(Y=0) and P(Y=1) for every bag-class pair.
inline constexpr double kProbabilityFloor = 1e-12;

// Mixes (master, a, b, c) into an independent 64-bit stream seed.
uint64_t DeriveSeed(uint64_t master, uint64_t a, uint64_t b = 0,
                    uint64_t c = 0);

// Formats a double with enough digits to round-trip.
std::string FormatDouble(double v);

}  // namespace mimlal

#endif  // MIMLAL_COMMON_H_
