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

#include <cstdint>
#include <string>
#include <vector>

#include "bentexp/types.hpp"

namespace bentexp {

enum class Design { kIid, kHeteroscedastic };

/// kNone switches the error term off (noiseless data).
enum class ErrorLaw { kNormal, kStudentT4, kMixture, kNone };

struct ModelParams {
  double beta0 = 1.0;
  double beta1 = 3.0;
  double beta2 = -2.0;
  double gamma = 1.0;
  double t = 1.5;
};

/// One Monte Carlo design: X ~ U(-2, 4), Z ~ N(1, 0.5^2),
/// Y = beta0 + beta1 X + beta2 (X - t)_+ + gamma Z + s(Z) e with s = 1 (IID)
/// or 1 + 0.2 Z (heteroscedastic).
struct ScenarioSpec {
  Design design = Design::kIid;
  ErrorLaw error_law = ErrorLaw::kNormal;
  ExpectileLevel tau{0.5};
  Index n = 400;
  ModelParams params;
  Index replications = 500;
  std::uint64_t seed = 20240101;
  double grid_trim = 0.05;
};

/// Population tau-expectile of the error law, subtracted from every draw so
/// the conditional tau-expectile of Y is the model line.
double error_law_expectile(ErrorLaw law, ExpectileLevel tau);

/// Replicate `replicate` of the scenario; a pure function of (spec, replicate).
Dataset generate(const ScenarioSpec& spec, Index replicate);

struct ParameterSummary {
  std::string name;
  double truth = 0.0;
  double bias = 0.0;
  /// Empirical standard deviation; NaN (and sd_defined false) with one replicate.
  double sd = 0.0;
  bool sd_defined = true;
  /// Mean estimated standard error.
  double ese = 0.0;
  /// Fraction of 95% Wald intervals covering the truth.
  double cp = 0.0;
};

struct SimulationReport {
  std::vector<ParameterSummary> rows;
  Index replications_used = 0;
  Index failures = 0;
};

/// Ceiling on the failed-replicate share before a table is abandoned.
inline constexpr double kMaxFailureRate = 0.05;

/// Bias / SD / ESE / CP of the grid-search estimator and sandwich standard
/// errors over spec.replications datasets. Replicates whose fit or covariance
/// fails are dropped and counted; more than 5% failures throws
/// NumericalError.
SimulationReport mc_estimation_table(const ScenarioSpec& spec,
                                     Parallelism par = {});

struct PowerPoint {
  double beta2 = 0.0;
  double rejection_rate = 0.0;
  Index replications_used = 0;
  Index failures = 0;
};

struct PowerReport {
  std::vector<PowerPoint> points;
  Index nb = 0;
  double level = 0.05;
};

/// Rejection rate of the multiplier-bootstrap test at the 5% level for each
/// beta2 in the list; the remaining parameters come from spec.params.
PowerReport mc_power_table(const ScenarioSpec& spec,
                           const std::vector<double>& beta2_list, Index nb,
                           Parallelism par = {});

}  // namespace bentexp
