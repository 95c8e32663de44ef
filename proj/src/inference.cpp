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

#include "bentexp/inference.hpp"

#include <string>

#include "bentexp/expectile.hpp"

namespace bentexp {

double silverman_bandwidth(double sigma, Index n) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DataError("bandwidth undefined: covariate has zero spread");
  }
  if (n < 1) throw DataError("bandwidth undefined for an empty sample");
  return 1.06 * sigma * std::pow(static_cast<double>(n), -0.2);
}

double silverman_bandwidth(const Eigen::Ref<const Vector>& x) {
  const Index n = x.size();
  if (n < 2) throw DataError("bandwidth needs at least two observations");
  const double mean = x.mean();
  const double var = (x.array() - mean).square().sum() / static_cast<double>(n - 1);
  return silverman_bandwidth(std::sqrt(var), n);
}

double kde_at(const Eigen::Ref<const Vector>& x, double point, double h) {
  if (!(h > 0.0)) throw ConfigError("kernel bandwidth must be positive");
  if (x.size() == 0) return 0.0;
  double total = 0.0;
  for (Index i = 0; i < x.size(); ++i) total += epanechnikov((x(i) - point) / h);
  return total / (static_cast<double>(x.size()) * h);
}

Matrix threshold_scores(const Dataset& data, const ThresholdFit& fit) {
  const Matrix v = build_basis(data, fit.t_hat).rows;
  const Vector e = data.y() - v * fit.xi;
  const Vector w = expectile_weights(e, fit.tau);
  const Index k = v.cols();

  Matrix g(data.n(), k + 1);
  for (Index i = 0; i < data.n(); ++i) {
    const double we = w(i) * e(i);
    g.row(i).head(k) = -2.0 * we * v.row(i);
    g(i, k) = data.x()(i) > fit.t_hat ? 2.0 * fit.beta2() * we : 0.0;
  }
  return g;
}

Matrix threshold_hessian(const Dataset& data, const ThresholdFit& fit,
                         double fx_at_t) {
  const Matrix v = build_basis(data, fit.t_hat).rows;
  const Vector e = data.y() - v * fit.xi;
  const Vector w = expectile_weights(e, fit.tau);
  const Index n = data.n();
  const Index k = v.cols();
  const double b2 = fit.beta2();

  Matrix h = Matrix::Zero(k + 1, k + 1);
  h.topLeftCorner(k, k) = v.transpose() * w.asDiagonal() * v;

  Vector cross = Vector::Zero(k);
  double corner = 0.0;
  double density_term = 0.0;
  for (Index i = 0; i < n; ++i) {
    density_term += -b2 * w(i) * e(i) * fx_at_t;
    if (data.x()(i) <= fit.t_hat) continue;
    cross += -b2 * w(i) * v.row(i).transpose();
    cross(2) += w(i) * e(i);
    corner += w(i) * b2 * b2;
  }
  h.topRightCorner(k, 1) = cross;
  h.bottomLeftCorner(1, k) = cross.transpose();
  h(k, k) = corner + density_term;
  return (2.0 / static_cast<double>(n)) * h;
}

CovarianceEstimate sandwich_covariance(const Dataset& data,
                                       const ThresholdFit& fit) {
  if (!fit.converged) {
    throw NumericalError("covariance requested for a non-converged fit");
  }
  if (fit.beta2() == 0.0) {
    throw SingularSystemError(
        "covariance undefined: beta2 is zero, threshold not identified");
  }

  CovarianceEstimate est;
  est.bandwidth_h = silverman_bandwidth(data.x());
  est.fx_at_t = kde_at(data.x(), fit.t_hat, est.bandwidth_h);

  const Matrix g = threshold_scores(data, fit);
  const auto n = static_cast<double>(data.n());
  est.score_covariance = g.transpose() * g / n;
  est.hessian = threshold_hessian(data, fit, est.fx_at_t);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(est.hessian);
  const Vector abs_eval = eig.eigenvalues().cwiseAbs();
  const double largest = abs_eval.maxCoeff();
  const double smallest = abs_eval.minCoeff();
  if (smallest == 0.0 || largest / smallest > kMaxConditionNumber) {
    throw SingularSystemError(
        "Hessian is numerically singular (condition " +
        std::to_string(smallest == 0.0 ? INFINITY : largest / smallest) +
        "); beta2 is likely near zero and the threshold not identified");
  }
  const Matrix& q = eig.eigenvectors();
  const Matrix h_inv =
      q * eig.eigenvalues().cwiseInverse().asDiagonal() * q.transpose();

  const Matrix cov = h_inv * est.score_covariance * h_inv;
  est.cov = 0.5 * (cov + cov.transpose());
  est.se = (est.cov.diagonal().cwiseMax(0.0) / n).cwiseSqrt();

  const Vector theta = fit.theta();
  est.ci_lower = theta - kWaldZ95 * est.se;
  est.ci_upper = theta + kWaldZ95 * est.se;
  return est;
}

}  // namespace bentexp
