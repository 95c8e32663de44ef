// Copyright 2026 The bentexp Authors
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

#pragma once

#include <Eigen/Dense>

#include <cstddef>

#include "bentexp/errors.hpp"

namespace bentexp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Condition-number ceiling shared by every linear solve in the library.
inline constexpr double kMaxConditionNumber = 1e12;

/// Expectile level tau, strictly inside (0, 1).
class ExpectileLevel {
 public:
  explicit ExpectileLevel(double tau) : tau_(tau) {
    if (!(tau > 0.0 && tau < 1.0)) {
      throw ConfigError("expectile level must lie in (0, 1), got " +
                        std::to_string(tau));
    }
  }

  double value() const noexcept { return tau_; }
  operator double() const noexcept { return tau_; }

  /// The mirrored level 1 - tau.
  ExpectileLevel complement() const { return ExpectileLevel(1.0 - tau_); }

 private:
  double tau_;
};

/// Response y, threshold covariate x and an optional n x p covariate block z.
/// All entries are finite and the three blocks share the row count n >= 1.
class Dataset {
 public:
  Dataset(Vector y, Vector x, Matrix z);
  Dataset(Vector y, Vector x);

  const Vector& y() const noexcept { return y_; }
  const Vector& x() const noexcept { return x_; }
  const Matrix& z() const noexcept { return z_; }

  Index n() const noexcept { return y_.size(); }
  Index p() const noexcept { return z_.cols(); }

  /// Number of distinct values in x.
  Index distinct_x() const;

  /// Null-model design W = (1, X, Z), n x (p + 2).
  Matrix null_design() const;

 private:
  Vector y_;
  Vector x_;
  Matrix z_;
};

/// Worker count for the embarrassingly parallel loops. Zero picks the
/// hardware concurrency. Results never depend on this value.
struct Parallelism {
  unsigned threads = 0;
};

}  // namespace bentexp
