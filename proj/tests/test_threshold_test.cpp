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

#include <doctest.h>

#include <cmath>
#include <random>

#include "bentexp/threshold_fit.hpp"
#include "bentexp/threshold_test.hpp"
#include "oracles.hpp"

using namespace bentexp;

namespace {

Dataset linear_exact(Index n) {
  Vector x = Vector::LinSpaced(n, -2.0, 4.0);
  Matrix z(n, 1);
  for (Index i = 0; i < n; ++i) z(i, 0) = std::sin(1.7 * static_cast<double>(i));
  Vector y = (1.0 + 3.0 * x.array() + 0.5 * z.col(0).array()).matrix();
  return Dataset(y, x, z);
}

// Direct re-evaluations by definition on a small instance.
struct Direct {
  const Dataset& d;
  const NullFit& nf;
  Vector w_row(Index i) const {
    Vector w(d.p() + 2);
    w(0) = 1.0;
    w(1) = d.x()(i);
    for (Index k = 0; k < d.p(); ++k) w(2 + k) = d.z()(i, k);
    return w;
  }
  Matrix swn() const {
    Matrix s = Matrix::Zero(d.p() + 2, d.p() + 2);
    for (Index i = 0; i < d.n(); ++i) s += nf.weights(i) * w_row(i) * w_row(i).transpose();
    return s / static_cast<double>(d.n());
  }
  Vector s1(double t) const {
    Vector s = Vector::Zero(d.p() + 2);
    for (Index i = 0; i < d.n(); ++i) {
      if (d.x()(i) <= t) s += nf.weights(i) * w_row(i) * (d.x()(i) - t);
    }
    return s / static_cast<double>(d.n());
  }
  Vector s2(double t, double b2) const {
    Vector s = Vector::Zero(d.p() + 2);
    for (Index i = 0; i < d.n(); ++i) {
      if (d.x()(i) >= t) s += nf.weights(i) * w_row(i) * b2 * (d.x()(i) - t);
    }
    return s / static_cast<double>(d.n());
  }
  double rn(double t) const {
    double s = 0.0;
    for (Index i = 0; i < d.n(); ++i) {
      if (d.x()(i) <= t) s += nf.weights(i) * nf.residuals(i) * (d.x()(i) - t);
    }
    return s / std::sqrt(static_cast<double>(d.n()));
  }
};

}  // namespace

TEST_CASE("null fit") {
  const Dataset exact = linear_exact(30);
  const NullFit nf = fit_null(exact, ExpectileLevel(0.3));
  CHECK(nf.residuals.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(nf.converged);

  const Dataset d = oracle::random_bent_line(12, 25, 1, -1.0);
  const NullFit half = fit_null(d, ExpectileLevel(0.5));
  const Matrix w = d.null_design();
  const Vector ols = w.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(d.y());
  CHECK((half.alpha - ols).cwiseAbs().maxCoeff() < 1e-8);

  const NullFit skew = fit_null(d, ExpectileLevel(0.8));
  const Vector cd = oracle::coordinate_descent_als(w, d.y(), 0.8);
  CHECK((skew.alpha - cd).cwiseAbs().maxCoeff() < 1e-8);
  for (Index i = 0; i < d.n(); ++i) {
    CHECK(skew.weights(i) == (skew.residuals(i) <= 0.0 ? doctest::Approx(0.2) : doctest::Approx(0.8)));
  }

  const Vector same = Vector::Constant(5, 2.0);
  CHECK_THROWS_AS(fit_null(Dataset(Vector::Ones(5), same), ExpectileLevel(0.5)),
                  SingularSystemError);
}

TEST_CASE("weighted Gram and hinge moments") {
  const Dataset d = oracle::random_bent_line(5, 10, 1);
  const NullFit nf = fit_null(d, ExpectileLevel(0.35));
  const Direct direct{d, nf};

  CHECK((s_wn(nf, d) - direct.swn()).cwiseAbs().maxCoeff() < 1e-12);

  const NullFit half = fit_null(d, ExpectileLevel(0.5));
  const Matrix w = d.null_design();
  CHECK((s_wn(half, d) - 0.5 * w.transpose() * w / 10.0).cwiseAbs().maxCoeff() < 1e-12);

  NullFit single;
  single.weights = Vector::Constant(1, 0.7);
  single.residuals = Vector::Zero(1);
  const Dataset one(Vector::Ones(1), Vector::Zero(1));
  CHECK(s_wn(single, one)(0, 0) == doctest::Approx(0.7));

  const double xmin = d.x().minCoeff(), xmax = d.x().maxCoeff();
  CHECK(s_1n(nf, d, xmin - 0.1).isZero(0.0));
  Vector all = Vector::Zero(3);
  for (Index i = 0; i < 10; ++i) all += nf.weights(i) * direct.w_row(i) * (d.x()(i) - xmax);
  CHECK((s_1n(nf, d, xmax) - all / 10.0).cwiseAbs().maxCoeff() < 1e-12);
  const double mid = 0.5 * (xmin + xmax);
  CHECK((s_1n(nf, d, mid) - direct.s1(mid)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s_2n(nf, d, mid, -1.5) - direct.s2(mid, -1.5)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("CUSUM statistic and its supremum") {
  const Dataset exact = linear_exact(40);
  const NullFit zero = fit_null(exact, ExpectileLevel(0.5));
  const Vector grid = default_grid(exact, 0.05);
  for (Index g = 0; g < grid.size(); ++g) {
    CHECK(std::abs(rn_statistic(zero, exact, grid(g))) < 1e-12);
  }
  CHECK(tn_statistic(zero, exact, grid).t_n < 1e-12);

  const Dataset d = oracle::random_bent_line(6, 10, 1);
  const NullFit nf = fit_null(d, ExpectileLevel(0.6));
  const Direct direct{d, nf};
  CHECK(rn_statistic(nf, d, d.x().minCoeff() - 1.0) == 0.0);
  for (double t : {-1.0, 0.3, 1.5, 2.9}) {
    CHECK(rn_statistic(nf, d, t) == doctest::Approx(direct.rn(t)).epsilon(1e-12));
  }
  const auto single = tn_statistic(nf, d, Vector::Constant(1, 0.3));
  CHECK(single.t_n == std::abs(direct.rn(0.3)));
  CHECK_THROWS_AS(tn_statistic(nf, d, Vector(0)), ConfigError);

  const Vector g2 = Eigen::Vector3d(-1.0, 0.3, 1.5);
  const auto sup = tn_statistic(nf, d, g2);
  CHECK(sup.t_n == sup.trace.cwiseAbs().maxCoeff());
}

TEST_CASE("multiplier bootstrap on zero residuals") {
  const Dataset exact = linear_exact(50);
  NullFit nf = fit_null(exact, ExpectileLevel(0.5));
  nf.residuals.setZero();
  const auto res = multiplier_bootstrap(nf, exact, default_grid(exact, 0.05), 100, 3);
  CHECK(res.t_n == 0.0);
  CHECK(res.bootstrap_stats.isZero(0.0));
  CHECK(res.p_value == 1.0);
  CHECK(res.nb == 100);
  CHECK_THROWS_AS(multiplier_bootstrap(nf, exact, default_grid(exact, 0.05), 0, 3),
                  ConfigError);
}

TEST_CASE("multiplier bootstrap is reproducible and thread independent") {
  const Dataset d = oracle::random_bent_line(61, 150, 1, 0.0);
  const NullFit nf = fit_null(d, ExpectileLevel(0.4));
  const Vector grid = default_grid(d, 0.05);
  const auto a = multiplier_bootstrap(nf, d, grid, 300, 77, {1});
  const auto b = multiplier_bootstrap(nf, d, grid, 300, 77, {4});
  const auto c = multiplier_bootstrap(nf, d, grid, 300, 77, {3});
  CHECK(a.bootstrap_stats == b.bootstrap_stats);
  CHECK(a.bootstrap_stats == c.bootstrap_stats);
  CHECK(a.p_value == b.p_value);
  const auto other = multiplier_bootstrap(nf, d, grid, 300, 78, {1});
  CHECK(other.bootstrap_stats != a.bootstrap_stats);

  const auto exceed = (a.bootstrap_stats.array() >= a.t_n).count();
  CHECK(a.p_value == static_cast<double>(exceed) / 300.0);
  CHECK(a.t_n == a.rn_trace.cwiseAbs().maxCoeff());
}

TEST_CASE("bootstrap processes average out to zero") {
  const Dataset d = oracle::random_bent_line(62, 120, 1, 0.0);
  const NullFit nf = fit_null(d, ExpectileLevel(0.5));
  const Vector grid = default_grid(d, 0.05);
  const Index nb = 2000;
  const Matrix proc = bootstrap_processes(nf, d, grid, nb, 5);
  int violations = 0;
  for (Index g = 0; g < grid.size(); ++g) {
    const double mean = proc.row(g).mean();
    const double sd = std::sqrt((proc.row(g).array() - mean).square().sum() / (nb - 1));
    if (std::abs(mean) > 3.0 * sd / std::sqrt(static_cast<double>(nb))) ++violations;
  }
  // Rows are strongly correlated; allow the odd 3-sigma excursion.
  CHECK(violations <= grid.size() / 20 + 1);
}

TEST_CASE("bootstrap processes are invariant to linear shifts of the response") {
  const Dataset d = oracle::random_bent_line(63, 100, 1, 0.0);
  const Vector grid = default_grid(d, 0.05);
  const Eigen::Vector3d c(0.7, -1.3, 2.0);
  const Vector shifted = d.y() + d.null_design() * c;
  const Dataset d2(shifted, d.x(), d.z());
  for (double tau : {0.3, 0.5, 0.8}) {
    const NullFit a = fit_null(d, ExpectileLevel(tau));
    const NullFit b = fit_null(d2, ExpectileLevel(tau));
    CHECK((a.residuals - b.residuals).cwiseAbs().maxCoeff() < 1e-9);
    const Matrix pa = bootstrap_processes(a, d, grid, 50, 9);
    const Matrix pb = bootstrap_processes(b, d2, grid, 50, 9);
    CHECK((pa - pb).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("strong threshold is detected") {
  const Dataset d = oracle::random_bent_line(64, 200, 1, -2.0);
  const NullFit nf = fit_null(d, ExpectileLevel(0.5));
  const auto res = multiplier_bootstrap(nf, d, default_grid(d, 0.05), 400, 1);
  CHECK(res.p_value < 0.05);
}

TEST_CASE("drift diagnostic") {
  const Dataset d = oracle::random_bent_line(65, 10, 1);
  const NullFit nf = fit_null(d, ExpectileLevel(0.45));
  const Direct direct{d, nf};
  CHECK(drift_diagnostic(nf, d, 1.0, 0.0) == 0.0);
  CHECK(drift_diagnostic(nf, d, d.x().minCoeff() - 0.5, 2.0) == 0.0);
  for (double t : {0.0, 1.0, 2.5}) {
    const double expected = direct.s1(t).dot(direct.swn().inverse() * direct.s2(t, 1.3));
    CHECK(drift_diagnostic(nf, d, t, 1.3) == doctest::Approx(expected).epsilon(1e-10));
  }

  NullFit degenerate = nf;
  degenerate.weights.setZero();
  CHECK_THROWS_AS(drift_diagnostic(degenerate, d, 1.0, 1.0), SingularSystemError);
  CHECK_THROWS_AS(multiplier_bootstrap(degenerate, d, Vector::Constant(1, 1.0), 5, 1),
                  SingularSystemError);
}
