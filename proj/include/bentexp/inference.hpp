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

#include <cmath>

#include "bentexp/threshold_fit.hpp"
#include "bentexp/types.hpp"

namespace bentexp {

/// K(u) = 3/4 (1 - u^2) on |u| <= 1.
template <typename Scalar>
inline Scalar epanechnikov(Scalar u) {
  using std::abs;
  return abs(u) <= Scalar(1) ? Scalar(0.75) * (Scalar(1) - u * u) : Scalar(0);
}

/// Rule-of-thumb bandwidth 1.06 sigma n^(-1/5) from a known spread.
double silverman_bandwidth(double sigma, Index n);

/// Same rule with sigma the sample standard deviation of x. Requires n >= 2
/// and a non-degenerate sample.
double silverman_bandwidth(const Eigen::Ref<const Vector>& x);

/// Kernel density estimate (nh)^-1 sum_i K((x_i - point) / h).
double kde_at(const Eigen::Ref<const Vector>& x, double point, double h);

/// Plug-in covariance of the threshold-model estimator.
///
/// `cov` is the asymptotic covariance of sqrt(n)(theta_hat - theta0),
/// ordered (beta0, beta1, beta2, gamma..., t); `se` divides its diagonal
/// by n before the square root, so a 95% Wald interval is
/// theta_hat +- 1.96 se.
struct CovarianceEstimate {
  Matrix cov;
  Vector se;
  Vector ci_lower;
  Vector ci_upper;
  double bandwidth_h = 0.0;
  double fx_at_t = 0.0;
  /// The two pieces of the sandwich, kept for diagnostics.
  Matrix hessian;
  Matrix score_covariance;
};

inline constexpr double kWaldZ95 = 1.96;

/// Per-observation score contributions, one row per observation:
/// (-2 w_i e_i V_i(t), 2 beta2 w_i e_i I(X_i > t)).
Matrix threshold_scores(const Dataset& data, const ThresholdFit& fit);

/// Hessian estimate with the kernel density of X at t_hat supplied.
Matrix threshold_hessian(const Dataset& data, const ThresholdFit& fit,
                         double fx_at_t);

/// H^-1 Sigma H^-1 with Silverman/Epanechnikov density at t_hat. Throws
/// SingularSystemError when H is numerically singular, which in practice
/// means the threshold is not identified (beta2 close to zero).
CovarianceEstimate sandwich_covariance(const Dataset& data,
                                       const ThresholdFit& fit);

}  // namespace bentexp
