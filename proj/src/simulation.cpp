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

#include "bentexp/simulation.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include "bentexp/inference.hpp"
#include "bentexp/parallel.hpp"
#include "bentexp/random.hpp"
#include "bentexp/threshold_fit.hpp"
#include "bentexp/threshold_test.hpp"

namespace bentexp {

namespace {

constexpr double kMixtureHeavyShare = 0.1;

// Upper partial moment E[(e - c)_+] of each law.
double normal_upper_moment(double c) {
  const double pdf = std::exp(-0.5 * c * c) / std::sqrt(2.0 * std::numbers::pi);
  const double sf = 0.5 * std::erfc(c / std::numbers::sqrt2);
  return pdf - c * sf;
}

double t4_upper_moment(double c) {
  const double r = 1.0 + c * c / 4.0;
  const double pdf = 0.375 * std::pow(r, -2.5);
  const double cdf =
      0.5 + 0.375 * (c / std::sqrt(r)) * (1.0 - c * c / (12.0 * r));
  return (4.0 + c * c) / 3.0 * pdf - c * (1.0 - cdf);
}

double upper_moment(ErrorLaw law, double c) {
  switch (law) {
    case ErrorLaw::kNormal:
      return normal_upper_moment(c);
    case ErrorLaw::kStudentT4:
      return t4_upper_moment(c);
    case ErrorLaw::kMixture:
      return (1.0 - kMixtureHeavyShare) * normal_upper_moment(c) +
             kMixtureHeavyShare * t4_upper_moment(c);
    case ErrorLaw::kNone:
      break;
  }
  return 0.0;
}

template <typename Engine>
double draw_error(ErrorLaw law, Engine& rng) {
  switch (law) {
    case ErrorLaw::kNormal:
      return draw_standard_normal(rng);
    case ErrorLaw::kStudentT4:
      return draw_student_t4(rng);
    case ErrorLaw::kMixture: {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      return unif(rng) < kMixtureHeavyShare ? draw_student_t4(rng)
                                            : draw_standard_normal(rng);
    }
    case ErrorLaw::kNone:
      break;
  }
  return 0.0;
}

struct ReplicateEstimate {
  Vector theta;
  Vector se;
  Vector lower;
  Vector upper;
};

}  // namespace

double error_law_expectile(ErrorLaw law, ExpectileLevel tau) {
  if (law == ErrorLaw::kNone || tau.value() == 0.5) return 0.0;
  // Zero-mean law: tau E(e - nu)_+ = (1 - tau) E(nu - e)_+ reduces to
  // (2 tau - 1) E(e - nu)_+ = (1 - tau) nu, strictly decreasing in nu.
  const double a = 2.0 * tau.value() - 1.0;
  const double b = 1.0 - tau.value();
  auto foc = [&](double nu) { return a * upper_moment(law, nu) - b * nu; };
  double lo = -50.0;
  double hi = 50.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (foc(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Dataset generate(const ScenarioSpec& spec, Index replicate) {
  const Index n = spec.n;
  if (n < 1) throw ConfigError("scenario sample size must be positive");
  const double shift = error_law_expectile(spec.error_law, spec.tau);
  const ModelParams& m = spec.params;

  auto rng = substream(spec.seed, StreamPurpose::kData,
                       static_cast<std::uint64_t>(replicate));
  std::uniform_real_distribution<double> x_law(-2.0, 4.0);
  std::normal_distribution<double> z_law(1.0, 0.5);

  Vector y(n), x(n);
  Matrix z(n, 1);
  for (Index i = 0; i < n; ++i) {
    x(i) = x_law(rng);
    z(i, 0) = z_law(rng);
    double e = 0.0;
    if (spec.error_law != ErrorLaw::kNone) e = draw_error(spec.error_law, rng) - shift;
    if (spec.design == Design::kHeteroscedastic) e *= 1.0 + 0.2 * z(i, 0);
    y(i) = m.beta0 + m.beta1 * x(i) + m.beta2 * positive_part(x(i) - m.t) +
           m.gamma * z(i, 0) + e;
  }
  return Dataset(std::move(y), std::move(x), std::move(z));
}

SimulationReport mc_estimation_table(const ScenarioSpec& spec,
                                     Parallelism par) {
  if (spec.params.beta2 == 0.0) {
    throw ConfigError("estimation table needs beta2 != 0 (threshold identified)");
  }
  if (spec.replications < 1) throw ConfigError("replications must be >= 1");

  const auto reps = static_cast<std::size_t>(spec.replications);
  std::vector<std::optional<ReplicateEstimate>> results(reps);
  parallel_for(reps, par, [&](std::size_t r) {
    try {
      const Dataset data = generate(spec, static_cast<Index>(r));
      const Vector grid = default_grid(data, spec.grid_trim);
      const ThresholdFit fit = fit_threshold_model(data, spec.tau, grid, {1});
      const CovarianceEstimate cov = sandwich_covariance(data, fit);
      results[r] = ReplicateEstimate{fit.theta(), cov.se, cov.ci_lower, cov.ci_upper};
    } catch (const Error&) {
      results[r].reset();
    }
  });

  const ModelParams& m = spec.params;
  const std::vector<std::pair<std::string, double>> truth = {
      {"beta0", m.beta0}, {"beta1", m.beta1}, {"beta2", m.beta2},
      {"gamma", m.gamma}, {"t", m.t}};

  SimulationReport report;
  for (const auto& r : results) {
    if (r) {
      ++report.replications_used;
    } else {
      ++report.failures;
    }
  }
  if (static_cast<double>(report.failures) >
      kMaxFailureRate * static_cast<double>(spec.replications)) {
    throw NumericalError("estimation table aborted: " +
                         std::to_string(report.failures) + " of " +
                         std::to_string(spec.replications) +
                         " replicates failed");
  }

  const auto used = static_cast<double>(report.replications_used);
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const auto idx = static_cast<Index>(k);
    double sum = 0.0, se_sum = 0.0, covered = 0.0;
    for (const auto& r : results) {
      if (!r) continue;
      sum += r->theta(idx);
      se_sum += r->se(idx);
      if (r->lower(idx) <= truth[k].second && truth[k].second <= r->upper(idx)) {
        covered += 1.0;
      }
    }
    const double mean = sum / used;
    double ss = 0.0;
    for (const auto& r : results) {
      if (r) ss += (r->theta(idx) - mean) * (r->theta(idx) - mean);
    }

    ParameterSummary row;
    row.name = truth[k].first;
    row.truth = truth[k].second;
    row.bias = mean - row.truth;
    row.sd_defined = report.replications_used > 1;
    row.sd = row.sd_defined ? std::sqrt(ss / (used - 1.0))
                            : std::numeric_limits<double>::quiet_NaN();
    row.ese = se_sum / used;
    row.cp = covered / used;
    report.rows.push_back(row);
  }
  return report;
}

PowerReport mc_power_table(const ScenarioSpec& spec,
                           const std::vector<double>& beta2_list, Index nb,
                           Parallelism par) {
  if (spec.replications < 1) throw ConfigError("replications must be >= 1");
  if (nb < 1) throw ConfigError("bootstrap replicate count must be >= 1");

  PowerReport report;
  report.nb = nb;
  const auto reps = static_cast<std::size_t>(spec.replications);
  for (double beta2 : beta2_list) {
    ScenarioSpec s = spec;
    s.params.beta2 = beta2;
    // 1 = reject, 0 = accept, -1 = failed
    std::vector<int> outcome(reps, -1);
    parallel_for(reps, par, [&](std::size_t r) {
      try {
        const Dataset data = generate(s, static_cast<Index>(r));
        const Vector grid = default_grid(data, s.grid_trim);
        const NullFit nf = fit_null(data, s.tau);
        const auto res = multiplier_bootstrap(
            nf, data, grid, nb, derive_seed(s.seed, static_cast<std::uint64_t>(r)), {1});
        outcome[r] = res.p_value < report.level ? 1 : 0;
      } catch (const Error&) {
        outcome[r] = -1;
      }
    });

    PowerPoint pt;
    pt.beta2 = beta2;
    Index rejected = 0;
    for (int o : outcome) {
      if (o < 0) {
        ++pt.failures;
      } else {
        ++pt.replications_used;
        rejected += o;
      }
    }
    if (static_cast<double>(pt.failures) >
        kMaxFailureRate * static_cast<double>(spec.replications)) {
      throw NumericalError("power table aborted at beta2 = " +
                           std::to_string(beta2) + ": " +
                           std::to_string(pt.failures) + " replicates failed");
    }
    pt.rejection_rate = static_cast<double>(rejected) /
                        static_cast<double>(pt.replications_used);
    report.points.push_back(pt);
  }
  return report;
}

}  // namespace bentexp
