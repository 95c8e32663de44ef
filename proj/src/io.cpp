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

#include "bentexp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "bentexp/inference.hpp"
#include "bentexp/parallel.hpp"
#include "bentexp/random.hpp"
#include "bentexp/threshold_fit.hpp"
#include "bentexp/threshold_test.hpp"

namespace bentexp {

using nlohmann::json;

std::string to_string(Command c) {
  switch (c) {
    case Command::kFit: return "fit";
    case Command::kTest: return "test";
    case Command::kSimulate: return "simulate";
    case Command::kCurves: return "curves";
  }
  return "fit";
}

std::string to_string(OutputFormat f) {
  return f == OutputFormat::kCsv ? "csv" : "json";
}

std::string to_string(Transform t) {
  switch (t) {
    case Transform::kLog: return "log";
    case Transform::kSqrt: return "sqrt";
    case Transform::kNone: break;
  }
  return "none";
}

Transform parse_transform(const std::string& name) {
  if (name == "log") return Transform::kLog;
  if (name == "sqrt") return Transform::kSqrt;
  if (name == "none") return Transform::kNone;
  throw ConfigError("unknown transform '" + name + "' (expected log or sqrt)");
}

void RunConfig::validate() const {
  if (tau_list.empty()) throw ConfigError("tau list is empty");
  for (double t : tau_list) ExpectileLevel{t};
  if (!(grid_trim >= 0.0 && grid_trim < 0.5)) {
    throw ConfigError("trim must lie in [0, 0.5)");
  }
  if (nb < 1) throw ConfigError("nb must be >= 1");
  if (columns.y.empty() || columns.x.empty()) {
    throw ConfigError("both --y and --x columns are required");
  }
  if (curve_points < 2) throw ConfigError("curve points must be >= 2");
}

json RunConfig::to_json() const {
  json transforms = json::object();
  for (const auto& [col, tr] : columns.transforms) transforms[col] = to_string(tr);
  return json{{"command", to_string(command)},
              {"input", input_path},
              {"tau", tau_list},
              {"trim", grid_trim},
              {"nb", nb},
              {"seed", seed},
              {"format", to_string(output_format)},
              {"columns", {{"y", columns.y}, {"x", columns.x}, {"z", columns.z}}},
              {"transforms", transforms}};
}

// ---------------------------------------------------------------------------
// CSV input

namespace {

std::string trim_ws(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim_ws(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim_ws(cur));
  return out;
}

double apply_transform(Transform tr, double v, const std::string& col,
                       std::size_t row) {
  switch (tr) {
    case Transform::kLog:
      if (!(v > 0.0)) {
        throw DataError("log transform of non-positive value in column '" +
                        col + "' at row " + std::to_string(row));
      }
      return std::log(v);
    case Transform::kSqrt:
      if (v < 0.0) {
        throw DataError("sqrt transform of negative value in column '" + col +
                        "' at row " + std::to_string(row));
      }
      return std::sqrt(v);
    case Transform::kNone:
      break;
  }
  return v;
}

}  // namespace

Dataset load_csv(std::istream& in, const ColumnMap& columns,
                 const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(source + ": missing header row");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);

  std::vector<std::string> wanted = {columns.y, columns.x};
  wanted.insert(wanted.end(), columns.z.begin(), columns.z.end());
  std::vector<std::size_t> pos;
  for (const auto& name : wanted) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw DataError(source + ": unknown column '" + name + "'");
    }
    pos.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  for (const auto& [col, tr] : columns.transforms) {
    if (std::find(wanted.begin(), wanted.end(), col) == wanted.end()) {
      throw ConfigError("transform given for unmapped column '" + col + "'");
    }
  }

  std::vector<std::vector<double>> values(wanted.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim_ws(line).empty()) continue;
    ++row;
    const auto cells = split_csv_line(line);
    for (std::size_t k = 0; k < wanted.size(); ++k) {
      const std::string where = source + ": row " + std::to_string(row) +
                                ", column '" + wanted[k] + "'";
      if (pos[k] >= cells.size() || cells[pos[k]].empty()) {
        throw DataError(where + ": missing value");
      }
      const std::string& cell = cells[pos[k]];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw DataError(where + ": non-numeric value '" + cell + "'");
      }
      const auto tr = columns.transforms.find(wanted[k]);
      if (tr != columns.transforms.end()) v = apply_transform(tr->second, v, wanted[k], row);
      values[k].push_back(v);
    }
  }
  if (row == 0) throw DataError(source + ": no data rows");

  const auto n = static_cast<Index>(row);
  auto as_vector = [&](std::size_t k) {
    return Vector(Eigen::Map<const Vector>(values[k].data(), n));
  };
  Matrix z(n, static_cast<Index>(columns.z.size()));
  for (std::size_t k = 0; k < columns.z.size(); ++k) {
    z.col(static_cast<Index>(k)) = as_vector(k + 2);
  }
  return Dataset(as_vector(0), as_vector(1), std::move(z));
}

Dataset load_csv(const std::string& path, const ColumnMap& columns) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file '" + path + "'");
  return load_csv(in, columns, path);
}

// ---------------------------------------------------------------------------
// Fitting workflow

namespace {

std::vector<std::string> parameter_names(const ColumnMap& columns, Index p) {
  std::vector<std::string> names = {"beta0", "beta1", "beta2"};
  for (Index k = 0; k < p; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    names.push_back("gamma_" + (uk < columns.z.size() ? columns.z[uk]
                                                      : std::to_string(k + 1)));
  }
  names.push_back("t");
  return names;
}

TauResult run_one_tau(const RunConfig& cfg, const Dataset& data,
                      const Vector& grid, std::size_t tau_index,
                      Parallelism par) {
  TauResult res;
  res.tau = cfg.tau_list[tau_index];
  const ExpectileLevel tau(res.tau);

  try {
    const NullFit nf = fit_null(data, tau);
    const auto test = multiplier_bootstrap(
        nf, data, grid, cfg.nb, derive_seed(cfg.seed, tau_index), par);
    res.p_value = test.p_value;
    res.t_n = test.t_n;
    if (test.p_value >= 0.05) {
      res.warnings.push_back(
          "no significant threshold at the 5% level; t is weakly identified");
    }
  } catch (const Error& e) {
    res.error = std::string("threshold test failed: ") + e.what();
    return res;
  }

  if (cfg.command == Command::kTest) return res;

  try {
    const ThresholdFit fit = fit_threshold_model(data, tau, grid, par);
    res.theta = fit.theta();
    res.objective = fit.objective;
    res.converged = fit.converged;
    res.skipped_grid_points = fit.skipped;
    res.fitted = true;
    if (fit.skipped > 0) {
      res.warnings.push_back(std::to_string(fit.skipped) +
                             " rank-deficient grid point(s) skipped");
    }
    const CovarianceEstimate cov = sandwich_covariance(data, fit);
    res.se = cov.se;
    res.ci_lower = cov.ci_lower;
    res.ci_upper = cov.ci_upper;
    res.bandwidth_h = cov.bandwidth_h;
    res.fx_at_t = cov.fx_at_t;
  } catch (const Error& e) {
    res.error = std::string("fit failed: ") + e.what();
  }
  return res;
}

}  // namespace

FitReport run_fit(const RunConfig& cfg, const Dataset& data) {
  cfg.validate();
  FitReport report;
  report.config = cfg.to_json();
  report.parameter_names = parameter_names(cfg.columns, data.p());
  report.x_min = data.x().minCoeff();
  report.x_max = data.x().maxCoeff();
  report.z_mean = data.p() > 0 ? Vector(data.z().colwise().mean().transpose())
                               : Vector(0);

  const Vector grid = default_grid(data, cfg.grid_trim);
  const std::size_t levels = cfg.tau_list.size();
  report.results.resize(levels);
  const Parallelism outer{cfg.threads};
  const Parallelism inner{levels > 1 ? 1u : cfg.threads};
  parallel_for(levels, outer, [&](std::size_t k) {
    report.results[k] = run_one_tau(cfg, data, grid, k, inner);
  });

  for (const auto& r : report.results) {
    if (r.error) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "tau=%.17g: ", r.tau);
      report.warnings.push_back(buf + *r.error);
    }
  }
  return report;
}

FitReport run_fit(const RunConfig& cfg) {
  cfg.validate();
  return run_fit(cfg, load_csv(cfg.input_path, cfg.columns));
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json vec_json(const Vector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector json_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

json opt_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> json_opt(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

std::string fixed3(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

json to_json(const FitReport& report) {
  json results = json::array();
  for (const auto& r : report.results) {
    json row{{"tau", r.tau},
             {"p_value", opt_json(r.p_value)},
             {"t_n", opt_json(r.t_n)},
             {"fitted", r.fitted},
             {"error", r.error ? json(*r.error) : json(nullptr)},
             {"warnings", r.warnings}};
    if (r.fitted) {
      row["estimate"] = vec_json(r.theta);
      row["objective"] = r.objective;
      row["converged"] = r.converged;
      row["skipped_grid_points"] = r.skipped_grid_points;
      if (r.se.size() > 0) {
        row["se"] = vec_json(r.se);
        row["ci_lower"] = vec_json(r.ci_lower);
        row["ci_upper"] = vec_json(r.ci_upper);
        row["bandwidth_h"] = r.bandwidth_h;
        row["fx_at_t"] = r.fx_at_t;
      }
    }
    results.push_back(std::move(row));
  }
  return json{{"config", report.config},
              {"parameters", report.parameter_names},
              {"data", {{"x_min", report.x_min},
                        {"x_max", report.x_max},
                        {"z_mean", vec_json(report.z_mean)}}},
              {"results", results},
              {"warnings", report.warnings}};
}

FitReport fit_report_from_json(const json& j) {
  FitReport report;
  report.config = j.at("config");
  report.parameter_names = j.at("parameters").get<std::vector<std::string>>();
  report.x_min = j.at("data").at("x_min").get<double>();
  report.x_max = j.at("data").at("x_max").get<double>();
  report.z_mean = json_vec(j.at("data").at("z_mean"));
  report.warnings = j.at("warnings").get<std::vector<std::string>>();
  for (const auto& row : j.at("results")) {
    TauResult r;
    r.tau = row.at("tau").get<double>();
    r.p_value = json_opt(row.at("p_value"));
    r.t_n = json_opt(row.at("t_n"));
    r.fitted = row.at("fitted").get<bool>();
    if (!row.at("error").is_null()) r.error = row.at("error").get<std::string>();
    r.warnings = row.at("warnings").get<std::vector<std::string>>();
    if (r.fitted) {
      r.theta = json_vec(row.at("estimate"));
      r.objective = row.at("objective").get<double>();
      r.converged = row.at("converged").get<bool>();
      r.skipped_grid_points = row.at("skipped_grid_points").get<Index>();
      if (row.contains("se")) {
        r.se = json_vec(row.at("se"));
        r.ci_lower = json_vec(row.at("ci_lower"));
        r.ci_upper = json_vec(row.at("ci_upper"));
        r.bandwidth_h = row.at("bandwidth_h").get<double>();
        r.fx_at_t = row.at("fx_at_t").get<double>();
      }
    }
    report.results.push_back(std::move(r));
  }
  return report;
}

std::string to_csv(const FitReport& report) {
  std::ostringstream out;
  out << "tau,p_value";
  for (const auto& name : report.parameter_names) out << ',' << name << ",se_" << name;
  out << '\n';
  const auto width = report.parameter_names.size();
  for (const auto& r : report.results) {
    out << fixed3(r.tau) << ',' << (r.p_value ? fixed3(*r.p_value) : "NA");
    for (std::size_t k = 0; k < width; ++k) {
      const auto idx = static_cast<Index>(k);
      const bool has_est = r.fitted && idx < r.theta.size();
      const bool has_se = idx < r.se.size();
      out << ',' << (has_est ? fixed3(r.theta(idx)) : "NA") << ','
          << (has_se ? fixed3(r.se(idx)) : "NA");
    }
    out << '\n';
  }
  return out.str();
}

std::vector<CurvePoint> emit_curves(const RunConfig& cfg, const FitReport& fits) {
  const Index m = std::max<Index>(cfg.curve_points, 2);
  std::vector<CurvePoint> out;
  for (const auto& r : fits.results) {
    if (!r.fitted) continue;
    const Index k = r.theta.size() - 1;  // position of t
    const double t_hat = r.theta(k);
    const double b0 = r.theta(0), b1 = r.theta(1), b2 = r.theta(2);
    double z_shift = 0.0;
    for (Index j = 3; j < k; ++j) z_shift += r.theta(j) * fits.z_mean(j - 3);
    auto line = [&](double x) {
      return b0 + b1 * x + b2 * positive_part(x - t_hat) + z_shift;
    };

    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(m) + 1);
    for (Index i = 0; i < m; ++i) {
      const double frac = static_cast<double>(i) / static_cast<double>(m - 1);
      xs.push_back(i == m - 1 ? fits.x_max
                              : fits.x_min + frac * (fits.x_max - fits.x_min));
    }
    if (t_hat >= fits.x_min && t_hat <= fits.x_max) xs.push_back(t_hat);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    for (double x : xs) out.push_back({r.tau, x, line(x), x == t_hat});
  }
  return out;
}

std::string curves_to_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream out;
  out << "tau,x,fitted,kink\n";
  char buf[128];
  for (const auto& c : curve) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", c.tau, c.x,
                  c.fitted, c.kink ? 1 : 0);
    out << buf;
  }
  return out.str();
}

json curves_to_json(const std::vector<CurvePoint>& curve) {
  json arr = json::array();
  for (const auto& c : curve) {
    arr.push_back({{"tau", c.tau}, {"x", c.x}, {"fitted", c.fitted}, {"kink", c.kink}});
  }
  return arr;
}

json to_json(const SimulationReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"parameter", r.name},
                    {"truth", r.truth},
                    {"bias", r.bias},
                    {"sd", r.sd_defined ? json(r.sd) : json(nullptr)},
                    {"ese", r.ese},
                    {"cp", r.cp}});
  }
  return json{{"rows", rows},
              {"replications_used", report.replications_used},
              {"failures", report.failures}};
}

json to_json(const PowerReport& report) {
  json pts = json::array();
  for (const auto& p : report.points) {
    pts.push_back({{"beta2", p.beta2},
                   {"rejection_rate", p.rejection_rate},
                   {"replications_used", p.replications_used},
                   {"failures", p.failures}});
  }
  return json{{"nb", report.nb}, {"level", report.level}, {"power", pts}};
}

std::string to_csv(const SimulationReport& report) {
  std::ostringstream out;
  out << "parameter,true,bias,sd,ese,cp\n";
  for (const auto& r : report.rows) {
    out << r.name << ',' << fixed3(r.truth) << ',' << fixed3(r.bias) << ','
        << (r.sd_defined ? fixed3(r.sd) : "NA") << ',' << fixed3(r.ese) << ','
        << fixed3(r.cp) << '\n';
  }
  return out.str();
}

std::string to_csv(const PowerReport& report) {
  std::ostringstream out;
  out << "beta2,rejection_rate,replications_used,failures\n";
  for (const auto& p : report.points) {
    out << fixed3(p.beta2) << ',' << fixed3(p.rejection_rate) << ','
        << p.replications_used << ',' << p.failures << '\n';
  }
  return out.str();
}

}  // namespace bentexp
