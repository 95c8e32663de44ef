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
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bentexp/simulation.hpp"
#include "bentexp/types.hpp"

namespace bentexp {

enum class Command { kFit, kTest, kSimulate, kCurves };
enum class OutputFormat { kJson, kCsv };
enum class Transform { kNone, kLog, kSqrt };

std::string to_string(Command c);
std::string to_string(OutputFormat f);
std::string to_string(Transform t);
Transform parse_transform(const std::string& name);

struct ColumnMap {
  std::string y;
  std::string x;
  std::vector<std::string> z;
  /// Optional per-column transform applied at load time.
  std::map<std::string, Transform> transforms;
};

struct RunConfig {
  Command command = Command::kFit;
  std::string input_path;
  std::vector<double> tau_list;
  double grid_trim = 0.05;
  Index nb = 1000;
  std::uint64_t seed = 1;
  OutputFormat output_format = OutputFormat::kJson;
  ColumnMap columns;
  unsigned threads = 0;
  /// Points per curve for the curves command (the kink is added on top).
  Index curve_points = 201;

  /// Throws ConfigError on an empty or out-of-range tau list, bad trim or
  /// nb, or a missing y/x mapping.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Reads a comma-separated file with a header row. Only mapped columns are
/// parsed; others are ignored. Blank, missing or non-numeric mapped cells
/// raise DataError naming the data row (1-based, header excluded).
Dataset load_csv(const std::string& path, const ColumnMap& columns);
Dataset load_csv(std::istream& in, const ColumnMap& columns,
                 const std::string& source = "<stream>");

/// Results for one expectile level. Parameter vectors follow
/// FitReport::parameter_names.
struct TauResult {
  double tau = 0.5;
  std::optional<double> p_value;
  std::optional<double> t_n;
  bool fitted = false;
  Vector theta;
  Vector se;
  Vector ci_lower;
  Vector ci_upper;
  double objective = 0.0;
  bool converged = false;
  Index skipped_grid_points = 0;
  double bandwidth_h = 0.0;
  double fx_at_t = 0.0;
  std::optional<std::string> error;
  std::vector<std::string> warnings;
};

struct FitReport {
  nlohmann::json config;
  std::vector<std::string> parameter_names;
  std::vector<TauResult> results;
  std::vector<std::string> warnings;
  /// Data summary used by emit_curves.
  double x_min = 0.0;
  double x_max = 0.0;
  Vector z_mean;
};

/// Per tau: bootstrap threshold test, then (for the fit and curves commands)
/// the grid-search fit and sandwich covariance. A failure at one tau is
/// recorded in its row and does not stop the others.
FitReport run_fit(const RunConfig& cfg, const Dataset& data);
FitReport run_fit(const RunConfig& cfg);

nlohmann::json to_json(const FitReport& report);
FitReport fit_report_from_json(const nlohmann::json& j);

/// Fixed layout: tau, p_value, then value/se pairs per parameter ending in t.
/// Three decimals.
std::string to_csv(const FitReport& report);

struct CurvePoint {
  double tau = 0.5;
  double x = 0.0;
  double fitted = 0.0;
  bool kink = false;
};

/// Dense evaluation of each fitted expectile line over [min X, max X] with Z
/// held at its sample mean. The kink t_hat is inserted as its own point.
std::vector<CurvePoint> emit_curves(const RunConfig& cfg,
                                    const FitReport& fits);
std::string curves_to_csv(const std::vector<CurvePoint>& curve);
nlohmann::json curves_to_json(const std::vector<CurvePoint>& curve);

nlohmann::json to_json(const SimulationReport& report);
nlohmann::json to_json(const PowerReport& report);
std::string to_csv(const SimulationReport& report);
std::string to_csv(const PowerReport& report);

}  // namespace bentexp
