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

// Command-line front end: fit, test, curves and simulate.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bentexp/io.hpp"
#include "bentexp/simulation.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kConfig = 2,
  kData = 3,
  kNumerical = 4,
};

struct DataOptions {
  bentexp::RunConfig cfg;
  std::vector<std::string> transforms;
  std::string output;
  std::string format = "json";
};

void add_data_options(CLI::App* cmd, DataOptions& o, bool curves) {
  cmd->add_option("--input", o.cfg.input_path, "CSV file with a header row")->required();
  cmd->add_option("--y", o.cfg.columns.y, "response column")->required();
  cmd->add_option("--x", o.cfg.columns.x, "threshold covariate column")->required();
  cmd->add_option("--z", o.cfg.columns.z, "covariate columns (comma separated)")
      ->delimiter(',');
  cmd->add_option("--tau", o.cfg.tau_list, "expectile levels (comma separated)")
      ->delimiter(',')
      ->required();
  cmd->add_option("--trim", o.cfg.grid_trim, "quantile trim of the threshold grid")
      ->capture_default_str();
  cmd->add_option("--nb", o.cfg.nb, "bootstrap replicates")->capture_default_str();
  cmd->add_option("--seed", o.cfg.seed, "random seed")->capture_default_str();
  cmd->add_option("--format", o.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd->add_option("--transform", o.transforms,
                  "column transform COL=log|sqrt (repeatable)");
  cmd->add_option("--threads", o.cfg.threads, "worker threads (0 = all cores)");
  cmd->add_option("--output,-o", o.output, "output file (default stdout)");
  if (curves) {
    cmd->add_option("--points", o.cfg.curve_points, "points per curve")
        ->capture_default_str();
  }
}

void finalize(DataOptions& o, bentexp::Command command) {
  o.cfg.command = command;
  o.cfg.output_format =
      o.format == "csv" ? bentexp::OutputFormat::kCsv : bentexp::OutputFormat::kJson;
  for (const auto& spec : o.transforms) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw bentexp::ConfigError("transform must look like COL=log, got '" + spec + "'");
    }
    o.cfg.columns.transforms[spec.substr(0, eq)] =
        bentexp::parse_transform(spec.substr(eq + 1));
  }
  o.cfg.validate();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw bentexp::ConfigError("cannot write output file '" + path + "'");
  out << text;
}

std::string render_fit(const bentexp::RunConfig& cfg,
                       const bentexp::FitReport& report) {
  if (cfg.output_format == bentexp::OutputFormat::kCsv) return bentexp::to_csv(report);
  return bentexp::to_json(report).dump(2) + "\n";
}

std::string render_curves(const bentexp::RunConfig& cfg,
                          const bentexp::FitReport& report) {
  const auto curve = bentexp::emit_curves(cfg, report);
  if (cfg.output_format == bentexp::OutputFormat::kCsv) {
    return bentexp::curves_to_csv(curve);
  }
  nlohmann::json j{{"config", report.config},
                   {"curves", bentexp::curves_to_json(curve)},
                   {"warnings", report.warnings}};
  return j.dump(2) + "\n";
}

struct SimulateOptions {
  std::string scenario = "iid";
  std::string error = "normal";
  double tau = 0.5;
  bentexp::Index n = 400;
  bentexp::Index reps = 500;
  std::vector<double> beta2;
  bentexp::Index nb = 400;
  std::uint64_t seed = 20240101;
  double trim = 0.05;
  unsigned threads = 0;
  bool full_scale = false;
  std::string format = "json";
  std::string output;
};

std::string run_simulate(const SimulateOptions& o) {
  bentexp::ScenarioSpec spec;
  spec.design = o.scenario == "hetero" ? bentexp::Design::kHeteroscedastic
                                       : bentexp::Design::kIid;
  spec.error_law = o.error == "t4"        ? bentexp::ErrorLaw::kStudentT4
                   : o.error == "mixture" ? bentexp::ErrorLaw::kMixture
                                          : bentexp::ErrorLaw::kNormal;
  spec.tau = bentexp::ExpectileLevel(o.tau);
  spec.n = o.n;
  spec.replications = o.full_scale ? 1000 : o.reps;
  spec.seed = o.seed;
  spec.grid_trim = o.trim;
  const bentexp::Index nb = o.full_scale ? 1000 : o.nb;
  const bentexp::Parallelism par{o.threads};

  nlohmann::json meta{{"scenario", o.scenario}, {"error", o.error},
                      {"tau", o.tau},           {"n", spec.n},
                      {"replications", spec.replications},
                      {"seed", spec.seed},      {"trim", spec.grid_trim}};
  if (!o.beta2.empty()) {
    const auto power = bentexp::mc_power_table(spec, o.beta2, nb, par);
    if (o.format == "csv") return bentexp::to_csv(power);
    nlohmann::json j{{"config", meta}, {"results", bentexp::to_json(power)},
                     {"warnings", nlohmann::json::array()}};
    return j.dump(2) + "\n";
  }
  const auto table = bentexp::mc_estimation_table(spec, par);
  if (o.format == "csv") return bentexp::to_csv(table);
  nlohmann::json warnings = nlohmann::json::array();
  if (table.failures > 0) {
    warnings.push_back(std::to_string(table.failures) + " replicate(s) failed and were excluded");
  }
  nlohmann::json j{{"config", meta}, {"results", bentexp::to_json(table)},
                   {"warnings", warnings}};
  return j.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-threshold expectile regression"};
  app.require_subcommand(1);

  DataOptions fit_opts, test_opts, curve_opts;
  auto* fit = app.add_subcommand("fit", "threshold test, fit and standard errors per tau");
  add_data_options(fit, fit_opts, false);
  auto* test = app.add_subcommand("test", "bootstrap test for a threshold per tau");
  add_data_options(test, test_opts, false);
  auto* curves = app.add_subcommand("curves", "fitted expectile curves for plotting");
  add_data_options(curves, curve_opts, true);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimation or power table");
  simulate->add_option("--scenario", sim.scenario)
      ->check(CLI::IsMember({"iid", "hetero"}))
      ->capture_default_str();
  simulate->add_option("--error", sim.error)
      ->check(CLI::IsMember({"normal", "t4", "mixture"}))
      ->capture_default_str();
  simulate->add_option("--tau", sim.tau)->capture_default_str();
  simulate->add_option("--n", sim.n)->capture_default_str();
  simulate->add_option("--reps", sim.reps)->capture_default_str();
  simulate->add_option("--beta2", sim.beta2, "power run over these beta2 values")
      ->delimiter(',');
  simulate->add_option("--nb", sim.nb)->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--trim", sim.trim)->capture_default_str();
  simulate->add_option("--threads", sim.threads);
  simulate->add_flag("--full-scale", sim.full_scale, "1000 replications and nb = 1000");
  simulate->add_option("--format", sim.format)
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  simulate->add_option("--output,-o", sim.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (fit->parsed()) {
      finalize(fit_opts, bentexp::Command::kFit);
      write_output(fit_opts.output,
                   render_fit(fit_opts.cfg, bentexp::run_fit(fit_opts.cfg)));
    } else if (test->parsed()) {
      finalize(test_opts, bentexp::Command::kTest);
      write_output(test_opts.output,
                   render_fit(test_opts.cfg, bentexp::run_fit(test_opts.cfg)));
    } else if (curves->parsed()) {
      finalize(curve_opts, bentexp::Command::kCurves);
      write_output(curve_opts.output,
                   render_curves(curve_opts.cfg, bentexp::run_fit(curve_opts.cfg)));
    } else if (simulate->parsed()) {
      write_output(sim.output, run_simulate(sim));
    }
  } catch (const bentexp::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const bentexp::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const bentexp::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUnexpected;
  }
  return kOk;
}
