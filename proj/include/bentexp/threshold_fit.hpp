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

#include <vector>

#include "bentexp/expectile.hpp"
#include "bentexp/types.hpp"

namespace bentexp {

/// Rows V_i(t) = (1, X_i, (X_i - t)_+, Z_i) of the continuous-threshold model.
struct ThresholdBasis {
  double t = 0.0;
  Matrix rows;
};

/// (a)_+ = a I(a > 0).
template <typename Scalar>
inline Scalar positive_part(Scalar a) {
  return a > Scalar(0) ? a : Scalar(0);
}

ThresholdBasis build_basis(const Dataset& data, double t);

/// Sorted unique X values in the trimmed interior of the X support.
///
/// Bounds are the inverse-ECDF quantiles of X at `trim` and `1 - trim`
/// (inclusive); the sample minimum and maximum are always excluded since the
/// basis is rank deficient there. Throws ConfigError for trim outside
/// [0, 0.5) and DataError when fewer than three candidates remain.
Vector default_grid(const Dataset& data, double trim = 0.05);

struct ProfileFit {
  Vector xi;
  double objective = 0.0;
  bool converged = false;
};

/// Coefficients minimizing the mean asymmetric loss with the threshold held
/// at t.
ProfileFit profile_fit(const Dataset& data, ExpectileLevel tau, double t);

struct ThresholdFit {
  /// (beta0, beta1, beta2, gamma...)
  Vector xi;
  double t_hat = 0.0;
  ExpectileLevel tau{0.5};
  double objective = 0.0;
  bool converged = false;
  Vector grid;
  /// Aligned with grid; NaN where the basis was rank deficient.
  Vector profile_objectives;
  Index skipped = 0;

  double beta0() const { return xi(0); }
  double beta1() const { return xi(1); }
  double beta2() const { return xi(2); }
  double left_slope() const { return xi(1); }
  double right_slope() const { return xi(1) + xi(2); }

  /// Full parameter vector (xi, t).
  Vector theta() const;

  /// Fitted expectile at covariate value x with Z held at z.
  double predict(double x, const Eigen::Ref<const Vector>& z) const;
};

/// Profile grid search: evaluates profile_fit at every grid point and keeps
/// the smallest objective, breaking ties toward the smallest t. Grid points
/// whose basis is rank deficient are skipped and counted. Throws
/// NumericalError when every point is skipped.
ThresholdFit fit_threshold_model(const Dataset& data, ExpectileLevel tau,
                                 const Eigen::Ref<const Vector>& grid,
                                 Parallelism par = {});

}  // namespace bentexp
