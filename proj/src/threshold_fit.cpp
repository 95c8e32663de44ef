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

#include "bentexp/threshold_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bentexp/parallel.hpp"

namespace bentexp {

namespace {

// Inverse of the empirical CDF: smallest order statistic with F_n >= prob.
double inverse_ecdf(const std::vector<double>& sorted, double prob) {
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(prob * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

}  // namespace

ThresholdBasis build_basis(const Dataset& data, double t) {
  const Index n = data.n();
  ThresholdBasis basis;
  basis.t = t;
  basis.rows.resize(n, data.p() + 3);
  basis.rows.col(0).setOnes();
  basis.rows.col(1) = data.x();
  basis.rows.col(2) =
      data.x().unaryExpr([t](double xi) { return positive_part(xi - t); });
  basis.rows.rightCols(data.p()) = data.z();
  return basis;
}

Vector default_grid(const Dataset& data, double trim) {
  if (!(trim >= 0.0 && trim < 0.5)) {
    throw ConfigError("grid trim must lie in [0, 0.5), got " +
                      std::to_string(trim));
  }
  std::vector<double> sorted(data.x().data(), data.x().data() + data.n());
  std::sort(sorted.begin(), sorted.end());
  const double lower = inverse_ecdf(sorted, trim);
  const double upper = inverse_ecdf(sorted, 1.0 - trim);
  const double x_min = sorted.front();
  const double x_max = sorted.back();

  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> kept;
  for (double v : sorted) {
    if (v >= lower && v <= upper && v > x_min && v < x_max) kept.push_back(v);
  }
  if (kept.size() < 3) {
    throw DataError("threshold grid has " + std::to_string(kept.size()) +
                    " candidate(s) at trim " + std::to_string(trim) +
                    "; use a smaller trim or more distinct X values");
  }
  return Eigen::Map<Vector>(kept.data(), static_cast<Index>(kept.size()));
}

ProfileFit profile_fit(const Dataset& data, ExpectileLevel tau, double t) {
  if (!std::isfinite(t)) throw ConfigError("threshold candidate must be finite");
  const ThresholdBasis basis = build_basis(data, t);
  const LinearFit lf = fit_linear_expectile(basis.rows, data.y(), tau);
  return {lf.alpha, lf.objective, lf.converged};
}

Vector ThresholdFit::theta() const {
  Vector th(xi.size() + 1);
  th << xi, t_hat;
  return th;
}

double ThresholdFit::predict(double x, const Eigen::Ref<const Vector>& z) const {
  double v = xi(0) + xi(1) * x + xi(2) * positive_part(x - t_hat);
  if (z.size() > 0) v += xi.tail(z.size()).dot(z);
  return v;
}

ThresholdFit fit_threshold_model(const Dataset& data, ExpectileLevel tau,
                                 const Eigen::Ref<const Vector>& grid,
                                 Parallelism par) {
  const Index g = grid.size();
  if (g == 0) throw ConfigError("threshold grid is empty");

  std::vector<ProfileFit> fits(static_cast<std::size_t>(g));
  std::vector<char> ok(static_cast<std::size_t>(g), 0);
  parallel_for(static_cast<std::size_t>(g), par, [&](std::size_t j) {
    try {
      fits[j] = profile_fit(data, tau, grid(static_cast<Index>(j)));
      ok[j] = 1;
    } catch (const SingularSystemError&) {
      ok[j] = 0;
    }
  });

  ThresholdFit out;
  out.tau = tau;
  out.grid = grid;
  out.profile_objectives =
      Vector::Constant(g, std::numeric_limits<double>::quiet_NaN());

  Index best = -1;
  for (Index j = 0; j < g; ++j) {
    const auto& f = fits[static_cast<std::size_t>(j)];
    if (!ok[static_cast<std::size_t>(j)]) {
      ++out.skipped;
      continue;
    }
    out.profile_objectives(j) = f.objective;
    if (best < 0) {
      best = j;
      continue;
    }
    const double cur = fits[static_cast<std::size_t>(best)].objective;
    const double tb = grid(best);
    if (f.objective < cur || (f.objective == cur && grid(j) < tb)) best = j;
  }
  if (best < 0) {
    throw NumericalError(
        "every threshold candidate gave a rank-deficient basis");
  }

  const auto& winner = fits[static_cast<std::size_t>(best)];
  out.xi = winner.xi;
  out.t_hat = grid(best);
  out.objective = winner.objective;
  out.converged = winner.converged;
  return out;
}

}  // namespace bentexp
