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

#include <algorithm>
#include <string>
#include <vector>

#include "bentexp/types.hpp"

namespace bentexp {

Dataset::Dataset(Vector y, Vector x, Matrix z)
    : y_(std::move(y)), x_(std::move(x)), z_(std::move(z)) {
  if (y_.size() < 1) throw DataError("dataset must contain at least one row");
  if (x_.size() != y_.size() || z_.rows() != y_.size()) {
    throw DataError("dataset blocks disagree on row count: y=" +
                    std::to_string(y_.size()) + ", x=" +
                    std::to_string(x_.size()) + ", z=" +
                    std::to_string(z_.rows()));
  }
  if (!y_.allFinite() || !x_.allFinite() || !z_.allFinite()) {
    throw DataError("dataset contains non-finite values");
  }
}

Dataset::Dataset(Vector y, Vector x) {
  const Index rows = y.size();
  *this = Dataset(std::move(y), std::move(x), Matrix(rows, 0));
}

Index Dataset::distinct_x() const {
  std::vector<double> v(x_.data(), x_.data() + x_.size());
  std::sort(v.begin(), v.end());
  return std::unique(v.begin(), v.end()) - v.begin();
}

Matrix Dataset::null_design() const {
  Matrix w(n(), p() + 2);
  w.col(0).setOnes();
  w.col(1) = x_;
  w.rightCols(p()) = z_;
  return w;
}

}  // namespace bentexp
