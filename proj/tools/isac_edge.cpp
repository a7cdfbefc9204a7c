// isac_edge command-line front end.
//
//   isac_edge solve SCENARIO [--out report.json] [--mode equal_samples]
//   isac_edge sweep SCENARIO --param t_s --grid log:1e-3:1:25 [--mode ...] [--jobs 4]
//   isac_edge gain SCENARIO
//   isac_edge fit samples.csv
//   isac_edge tau-surface [--sinr-db ...] [--t-s ...]
//
// Exit status: 0 success, 2 infeasible sensing threshold, 1 anything else.
// ISAC_EDGE_LOG=quiet|error|info|debug sets stderr verbosity (default error).

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "isac_edge/error.hpp"
#include "isac_edge/pipeline.hpp"
#include "isac_edge/scenario.hpp"
#include "isac_edge/timealloc.hpp"

namespace {

using namespace isac_edge;

enum class Level { Quiet = 0, Error = 1, Info = 2, Debug = 3 };

Level log_level() {
  const char* env = std::getenv("ISAC_EDGE_LOG");
  const std::string v = env ? env : "";
  if (v == "quiet" || v == "0") return Level::Quiet;
  if (v == "info" || v == "2") return Level::Info;
  if (v == "debug" || v == "3") return Level::Debug;
  return Level::Error;
}

const Level kLevel = log_level();

void log(Level level, const std::string& msg) {
  if (static_cast<int>(level) > static_cast<int>(kLevel) || level == Level::Quiet) return;
  static const char* tags[] = {"", "error", "info", "debug"};
  std::cerr << "isac_edge: " << tags[static_cast<int>(level)] << ": " << msg << '\n';
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
  log(Level::Info, "wrote " + path);
}

CompareOptions compare_options(const Scenario& s, const std::string& mode) {
  CompareOptions o;
  o.mode = parse_compare_mode(mode);
  o.target_error = s.target_error.value_or(0.0);
  if (kLevel >= Level::Debug) {
    o.beamform.observer = [](const sdp::IterateRecord& r) {
      std::ostringstream os;
      os << "sdp it " << r.iteration << " gap " << r.relative_gap << " pinf "
         << r.primal_infeasibility << " dinf " << r.dual_infeasibility;
      log(Level::Debug, os.str());
    };
  }
  return o;
}

int cmd_solve(const std::string& path, const std::string& out, const std::string& mode) {
  const Scenario s = load_scenario(path);
  log(Level::Info, "loaded " + path + " with " + std::to_string(s.system.num_tasks()) + " tasks");
  const RunReport rep = compare(s.system, s.channels(), compare_options(s, mode));
  emit(out, report_to_json(rep, s.system));
  return 0;
}

int cmd_sweep(const std::string& path, const std::string& param, const std::string& grid,
              const std::string& mode, int jobs, const std::string& out) {
  const Scenario s = load_scenario(path);
  SweepSpec spec;
  spec.param = param;
  spec.grid = parse_grid(grid);
  spec.options = compare_options(s, mode);
  spec.jobs = jobs;
  log(Level::Info, "sweeping " + param + " over " + std::to_string(spec.grid.size()) + " points");
  const auto rows = sweep(s.system, s.channels(), spec);
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  emit(out, csv.str());
  return 0;
}

int cmd_gain(const std::string& path) {
  const Scenario s = load_scenario(path);
  const ChannelSet ch = s.channels();
  const SystemConfig& cfg = s.system;
  const double x = cfg.sensing_time_per_sample * cfg.bandwidth * mrc_rate(cfg, ch.uplink) /
                   cfg.sample_bits;
  const RunReport rep = compare(cfg, ch, compare_options(s, "equal_samples"));
  std::ostringstream os;
  os.precision(10);
  os << "x = " << x << "\n"
     << "gain_analytic = " << rep.gain_analytic << "\n"
     << "gain_measured = " << rep.gain_measured << "\n"
     << "regime = " << to_string(rep.regime) << "\n";
  std::cout << os.str();
  return 0;
}

int cmd_fit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::vector<FitPoint> points;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string a, b;
    std::getline(ss, a, ',');
    std::getline(ss, b);
    char* end_a = nullptr;
    char* end_b = nullptr;
    const double v = std::strtod(a.c_str(), &end_a);
    const double e = std::strtod(b.c_str(), &end_b);
    if (end_a == a.c_str() || *end_a != '\0' || end_b == b.c_str() || *end_b != '\0') {
      if (points.empty() && lineno == 1) continue;  // header
      throw Error(ErrorCode::Schema, path + ":" + std::to_string(lineno) + ": expected v,E");
    }
    points.push_back({v, e});
  }
  const FitResult fit = fit_error_model(points);
  if (fit.nonpositive_exponent) log(Level::Error, "fitted exponent is not positive");
  std::ostringstream os;
  os.precision(6);
  os << "a,b\n" << fit.model.coefficient << ',' << fit.model.exponent << '\n';
  std::cout << os.str();
  return 0;
}

int cmd_tau_surface(const std::string& sinr_grid, const std::string& ts_grid,
                    const std::string& out) {
  std::ostringstream csv;
  write_remark_csv(csv, sweep_remark(parse_grid(sinr_grid), parse_grid(ts_grid), remark_config()));
  emit(out, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ISAC beamforming and time allocation for edge learning"};
  app.require_subcommand(1);

  std::string scenario, out, mode = "equal_samples", param, grid, csv;
  std::string sinr_grid = "lin:-10:30:9", ts_grid = "log:0.01:1:9";
  int jobs = 1;

  auto* solve = app.add_subcommand("solve", "Run the ISAC pipeline and the baseline; JSON report");
  solve->add_option("scenario", scenario, "Scenario JSON")->required();
  solve->add_option("--out,-o", out, "Report path (default stdout)");
  solve->add_option("--mode", mode, "equal_samples | equal_time | equal_error");

  auto* sw = app.add_subcommand("sweep", "Sweep one parameter; CSV");
  sw->add_option("scenario", scenario, "Scenario JSON")->required();
  sw->add_option("--param", param, "t_s | B | P | T | target_error")->required();
  sw->add_option("--grid", grid, "a,b,c or lin:start:stop:n or log:start:stop:n")->required();
  sw->add_option("--mode", mode, "equal_samples | equal_time | equal_error");
  sw->add_option("--jobs,-j", jobs, "Worker threads (0 = all cores)");
  sw->add_option("--out,-o", out, "CSV path (default stdout)");

  auto* gain = app.add_subcommand("gain", "Analytic and measured ISAC gain of a scenario");
  gain->add_option("scenario", scenario, "Scenario JSON")->required();

  auto* fit = app.add_subcommand("fit", "Fit E = a v^-b to a v,E CSV");
  fit->add_option("csv", csv, "Two-column CSV")->required();

  auto* tau = app.add_subcommand("tau-surface", "Two-task time split over SINR and t_S; CSV");
  tau->add_option("--sinr-db", sinr_grid, "SINR grid in dB");
  tau->add_option("--t-s", ts_grid, "Sensing time grid in seconds");
  tau->add_option("--out,-o", out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*solve) return cmd_solve(scenario, out, mode);
    if (*sw) return cmd_sweep(scenario, param, grid, mode, jobs, out);
    if (*gain) return cmd_gain(scenario);
    if (*fit) return cmd_fit(csv);
    if (*tau) return cmd_tau_surface(sinr_grid, ts_grid, out);
  } catch (const InfeasibleTask& e) {
    log(Level::Error, e.what());
    return 2;
  } catch (const Error& e) {
    log(Level::Error, std::string(to_string(e.code())) + ": " + e.what());
    return 1;
  } catch (const std::exception& e) {
    log(Level::Error, e.what());
    return 1;
  }
  return 1;
}
