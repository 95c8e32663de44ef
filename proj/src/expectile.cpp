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

#include "bentexp/expectile.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace bentexp {

double scalar_expectile(const Eigen::Ref<const Vector>& sample,
                        ExpectileLevel tau) {
  const Index n = sample.size();
  if (n == 0) throw DataError("scalar_expectile: empty sample");
  if (!sample.allFinite()) {
    throw DataError("scalar_expectile: sample contains non-finite values");
  }

  std::vector<double> s(sample.data(), sample.data() + n);
  std::sort(s.begin(), s.end());
  const double lo_w = 1.0 - tau.value();
  const double hi_w = tau.value();

  std::vector<double> prefix(n + 1, 0.0);
  for (Index i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + s[i];
  const double total = prefix[n];

  // g(nu) = sum_i w_i (y_i - nu) is decreasing; find the last order
  // statistic where it is still nonnegative, then solve on that segment.
  auto split_root = [&](Index j) {
    const double cnt_lo = static_cast<double>(j + 1);
    const double cnt_hi = static_cast<double>(n - j - 1);
    return (lo_w * prefix[j + 1] + hi_w * (total - prefix[j + 1])) /
           (lo_w * cnt_lo + hi_w * cnt_hi);
  };
  auto foc_at = [&](Index j) {
    const double v = s[j];
    const double cnt_lo = static_cast<double>(j + 1);
    const double cnt_hi = static_cast<double>(n - j - 1);
    return lo_w * (prefix[j + 1] - cnt_lo * v) +
           hi_w * ((total - prefix[j + 1]) - cnt_hi * v);
  };

  Index lo = 0;
  Index hi = n - 1;
  if (foc_at(0) <= 0.0) return s[0];
  while (lo < hi) {
    const Index mid = lo + (hi - lo + 1) / 2;
    if (foc_at(mid) >= 0.0) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  const double upper = lo + 1 < n ? s[lo + 1] : s[lo];
  return std::clamp(split_root(lo), s[lo], upper);
}

Vector weighted_least_squares(const Eigen::Ref<const Matrix>& design,
                              const Eigen::Ref<const Vector>& y,
                              const Eigen::Ref<const Vector>& weights) {
  const Vector root_w = weights.cwiseSqrt();
  const Matrix scaled = root_w.asDiagonal() * design;
  Eigen::ColPivHouseholderQR<Matrix> qr(scaled);

  const Index k = design.cols();
  const auto r_diag = qr.matrixQR().diagonal().cwiseAbs();
  const double largest = k > 0 ? r_diag(0) : 0.0;
  const double smallest = k > 0 ? r_diag(k - 1) : 0.0;
  if (k == 0 || largest == 0.0 || smallest == 0.0 ||
      largest / smallest > kMaxConditionNumber) {
    throw SingularSystemError(
        "design matrix is rank deficient or ill-conditioned (" +
        std::to_string(design.rows()) + " x " + std::to_string(k) + ")");
  }
  return qr.solve(root_w.cwiseProduct(y));
}

LinearFit fit_linear_expectile(const Eigen::Ref<const Matrix>& design,
                               const Eigen::Ref<const Vector>& y,
                               ExpectileLevel tau, IrlsOptions options) {
  const Index n = design.rows();
  const Index k = design.cols();
  if (y.size() != n) {
    throw DataError("fit_linear_expectile: response has " +
                    std::to_string(y.size()) + " rows, design has " +
                    std::to_string(n));
  }
  if (n < k) {
    throw SingularSystemError("fit_linear_expectile: fewer rows (" +
                              std::to_string(n) + ") than columns (" +
                              std::to_string(k) + ")");
  }

  LinearFit fit;
  fit.alpha = weighted_least_squares(design, y, Vector::Ones(n));

  using Partition = Eigen::Array<bool, Eigen::Dynamic, 1>;
  Vector residual = y - design * fit.alpha;
  Partition below = residual.array() <= 0.0;

  for (int it = 1; it <= options.max_iterations; ++it) {
    const Vector w = below.select(Vector::Constant(n, 1.0 - tau.value()),
                                  Vector::Constant(n, tau.value()));
    Vector next = weighted_least_squares(design, y, w);
    const double change = (next - fit.alpha).cwiseAbs().maxCoeff();
    fit.alpha = std::move(next);
    fit.iterations = it;

    residual = y - design * fit.alpha;
    Partition next_below = residual.array() <= 0.0;
    const bool repeated = (next_below == below).all();
    below = std::move(next_below);
    if (repeated || change < options.tolerance) {
      fit.converged = true;
      break;
    }
  }

  fit.objective = mean_asymmetric_loss(residual, tau);
  return fit;
}

}  // namespace bentexp
