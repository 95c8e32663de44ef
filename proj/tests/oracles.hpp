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

// Test-only reference computations. None of these call into the IRLS solver
// or the grid search they are used to check.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bentexp/types.hpp"

namespace bentexp::oracle {

inline double loss(double u, double tau) {
  return (u <= 0.0 ? 1.0 - tau : tau) * u * u;
}

inline double mean_loss(const Vector& r, double tau) {
  double s = 0.0;
  for (Index i = 0; i < r.size(); ++i) s += loss(r(i), tau);
  return s / static_cast<double>(r.size());
}

/// Minimizes sum rho(y_i - nu) by scanning a uniform grid, then zooming in.
inline double brute_scalar_expectile(const std::vector<double>& y, double tau) {
  // Bisection on the monotone first-order condition sum |tau - I(y <= nu)| (y - nu) = 0.
  double lo = *std::min_element(y.begin(), y.end());
  double hi = *std::max_element(y.begin(), y.end());
  auto grad = [&](double nu) {
    double g = 0.0;
    for (double yi : y) g += (yi - nu <= 0.0 ? 1.0 - tau : tau) * (yi - nu);
    return g;
  };
  for (int it = 0; it < 200 && lo < hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (grad(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Exact minimizer over s of sum_i rho(r_i - s q_i). The derivative is
/// monotone and piecewise linear with kinks at r_i / q_i; bisect over the
/// sorted kinks and solve the linear piece.
inline double line_minimize(const Vector& r, const Vector& q, double tau) {
  auto slope = [&](double s) {  // -(1/2) d/ds of the objective
    double h = 0.0;
    for (Index i = 0; i < r.size(); ++i) {
      const double u = r(i) - s * q(i);
      h += (u <= 0.0 ? 1.0 - tau : tau) * q(i) * u;
    }
    return h;
  };
  std::vector<double> kinks;
  for (Index i = 0; i < r.size(); ++i) {
    if (q(i) != 0.0) kinks.push_back(r(i) / q(i));
  }
  std::sort(kinks.begin(), kinks.end());
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  if (!kinks.empty()) {
    std::size_t a = 0, b = kinks.size();  // slope(kinks[k]) >= 0 for k < a
    while (a < b) {
      const std::size_t mid = (a + b) / 2;
      if (slope(kinks[mid]) >= 0.0) {
        a = mid + 1;
      } else {
        b = mid;
      }
    }
    if (a > 0) lo = kinks[a - 1];
    if (a < kinks.size()) hi = kinks[a];
  }
  // Fixed weights on (lo, hi): pick a probe point inside the piece.
  double probe;
  if (std::isfinite(lo) && std::isfinite(hi)) {
    probe = 0.5 * (lo + hi);
  } else if (std::isfinite(lo)) {
    probe = lo + 1.0;
  } else if (std::isfinite(hi)) {
    probe = hi - 1.0;
  } else {
    probe = 0.0;
  }
  double num = 0.0, den = 0.0;
  for (Index i = 0; i < r.size(); ++i) {
    const double w = (r(i) - probe * q(i) <= 0.0) ? 1.0 - tau : tau;
    num += w * q(i) * r(i);
    den += w * q(i) * q(i);
  }
  if (den == 0.0) return 0.0;
  double s = num / den;
  if (std::isfinite(lo)) s = std::max(s, lo);
  if (std::isfinite(hi)) s = std::min(s, hi);
  return s;
}

/// Linear asymmetric least squares by cyclic coordinate descent with exact
/// line minimization, run in an orthonormalized basis of the design.
inline Vector coordinate_descent_als(const Matrix& design, const Vector& y,
                                     double tau, int max_sweeps = 2000) {
  Eigen::HouseholderQR<Matrix> qr(design);
  const Index k = design.cols();
  const Matrix q = qr.householderQ() * Matrix::Identity(design.rows(), k);
  const Matrix r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();

  Vector g = Vector::Zero(k);
  Vector resid = y;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double moved = 0.0;
    for (Index j = 0; j < k; ++j) {
      const Vector col = q.col(j);
      const double s = line_minimize(resid, col, tau);
      g(j) += s;
      resid -= s * col;
      moved = std::max(moved, std::abs(s));
    }
    if (moved < 1e-14) break;
  }
  return r.triangularView<Eigen::Upper>().solve(g);
}

/// Basis (1, X, (X - t)_+, Z) built independently of the library.
inline Matrix threshold_design(const Dataset& d, double t) {
  Matrix v(d.n(), d.p() + 3);
  for (Index i = 0; i < d.n(); ++i) {
    v(i, 0) = 1.0;
    v(i, 1) = d.x()(i);
    v(i, 2) = d.x()(i) > t ? d.x()(i) - t : 0.0;
    for (Index k = 0; k < d.p(); ++k) v(i, 3 + k) = d.z()(i, k);
  }
  return v;
}

struct BruteThreshold {
  double objective = std::numeric_limits<double>::infinity();
  double t = 0.0;
  Vector xi;
};

/// Nested brute force: every grid t, coordinate-descent coefficients.
inline BruteThreshold brute_threshold(const Dataset& d, double tau,
                                      const Vector& grid) {
  BruteThreshold best;
  for (Index g = 0; g < grid.size(); ++g) {
    const Matrix v = threshold_design(d, grid(g));
    Eigen::FullPivLU<Matrix> lu(v);
    if (lu.rank() < v.cols()) continue;
    const Vector xi = coordinate_descent_als(v, d.y(), tau);
    const double obj = mean_loss(d.y() - v * xi, tau);
    if (obj < best.objective) {
      best = {obj, grid(g), xi};
    }
  }
  return best;
}

/// Segmented least squares with an SVD solve at every grid t.
inline BruteThreshold segmented_ols(const Dataset& d, const Vector& grid) {
  BruteThreshold best;
  for (Index g = 0; g < grid.size(); ++g) {
    const Matrix v = threshold_design(d, grid(g));
    const Vector xi = v.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(d.y());
    const double obj = 0.5 * (d.y() - v * xi).squaredNorm() / static_cast<double>(d.n());
    if (obj < best.objective) best = {obj, grid(g), xi};
  }
  return best;
}

/// Composite Simpson rule on [a, b] with an even number of panels.
template <typename F>
double simpson(F&& f, double a, double b, int panels = 20000) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Random dataset from a bent line with normal noise, for property tests.
inline Dataset random_bent_line(std::uint64_t seed, Index n, Index p,
                                double beta2 = -2.0, double t = 1.5,
                                double noise = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-2.0, 4.0);
  std::normal_distribution<double> nz(1.0, 0.5);
  std::normal_distribution<double> ne(0.0, noise);
  Vector y(n), x(n);
  Matrix z(n, p);
  for (Index i = 0; i < n; ++i) {
    x(i) = ux(rng);
    double yi = 1.0 + 3.0 * x(i) + beta2 * (x(i) > t ? x(i) - t : 0.0);
    for (Index k = 0; k < p; ++k) {
      z(i, k) = nz(rng);
      yi += z(i, k);
    }
    y(i) = yi + ne(rng);
  }
  return Dataset(y, x, z);
}

}  // namespace bentexp::oracle
