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

#include "bentexp/types.hpp"

namespace bentexp {

/// |tau - I(u <= 0)|. A residual of exactly zero takes the (1 - tau) branch.
template <typename Scalar>
inline Scalar expectile_weight(Scalar u, ExpectileLevel tau) {
  return u <= Scalar(0) ? Scalar(1.0 - tau.value()) : Scalar(tau.value());
}

/// Asymmetric squared loss rho_tau(u) = |tau - I(u <= 0)| u^2.
template <typename Scalar>
inline Scalar asymmetric_loss(Scalar u, ExpectileLevel tau) {
  return expectile_weight(u, tau) * u * u;
}

/// Elementwise expectile weights of a residual expression.
template <typename Derived>
auto expectile_weights(const Eigen::MatrixBase<Derived>& residuals,
                       ExpectileLevel tau) {
  using Scalar = typename Derived::Scalar;
  return residuals.unaryExpr(
      [tau](Scalar u) { return expectile_weight(u, tau); });
}

/// n^-1 sum_i rho_tau(u_i).
template <typename Derived>
typename Derived::Scalar mean_asymmetric_loss(
    const Eigen::MatrixBase<Derived>& residuals, ExpectileLevel tau) {
  using Scalar = typename Derived::Scalar;
  if (residuals.size() == 0) return Scalar(0);
  Scalar total(0);
  for (Index i = 0; i < residuals.size(); ++i) {
    total += asymmetric_loss(Scalar(residuals(i)), tau);
  }
  return total / Scalar(residuals.size());
}

/// Minimizer of sum_i rho_tau(y_i - nu) over nu. Exact: the first-order
/// condition is piecewise linear between order statistics.
double scalar_expectile(const Eigen::Ref<const Vector>& sample,
                        ExpectileLevel tau);

struct IrlsOptions {
  int max_iterations = 100;
  double tolerance = 1e-10;
};

struct LinearFit {
  Vector alpha;
  bool converged = false;
  int iterations = 0;
  /// Mean asymmetric loss at alpha.
  double objective = 0.0;
};

/// Weighted least squares min sum_i w_i (y_i - d_i^T b)^2 through a
/// column-pivoted QR. Throws SingularSystemError when the weighted design is
/// rank deficient or its condition estimate exceeds kMaxConditionNumber.
Vector weighted_least_squares(const Eigen::Ref<const Matrix>& design,
                              const Eigen::Ref<const Vector>& y,
                              const Eigen::Ref<const Vector>& weights);

/// Linear asymmetric least squares by iteratively reweighted least squares.
///
/// Starts from ordinary least squares and alternates between fixing the
/// residual-sign partition and solving the weighted problem. Stops when the
/// partition repeats or no coefficient moves by more than
/// `options.tolerance`. Hitting the iteration cap returns with
/// `converged == false`.
LinearFit fit_linear_expectile(const Eigen::Ref<const Matrix>& design,
                               const Eigen::Ref<const Vector>& y,
                               ExpectileLevel tau, IrlsOptions options = {});

}  // namespace bentexp
