#include "isac_edge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <future>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "isac_edge/error.hpp"
#include "text_format.hpp"

namespace isac_edge {

namespace {

void check_channel_set(const SystemConfig& cfg, const ChannelSet& channels) {
  if (channels.echoes.size() != cfg.num_tasks()) {
    std::ostringstream os;
    os << "scenario has " << cfg.num_tasks() << " tasks but " << channels.echoes.size()
       << " echo channels";
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  if (channels.uplink.size() != cfg.num_antennas) {
    throw Error(ErrorCode::DimensionMismatch, "uplink length differs from num_antennas");
  }
}

// Samples needed for the error model to reach `target`.
std::int64_t samples_for_error(double target, const ErrorModel& model) {
  const double v = std::pow(model.coefficient / target, 1.0 / model.exponent);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(v - 1e-9)));
}

void set_duration(TaskPhase& phase, double duration, const SystemConfig& cfg,
                  const ErrorModel& model) {
  phase.duration = duration;
  phase.budget = sample_budget(duration, phase.sinr_com, cfg);
  phase.error = realized_error(phase.budget.samples, model);
}

void summarise(IsacSolution& s) {
  s.total_time = 0.0;
  s.max_error = 0.0;
  for (const TaskPhase& p : s.phases) {
    s.total_time += p.duration;
    s.max_error = std::max(s.max_error, p.error);
  }
}

void summarise(ConventionalReport& r) {
  r.total_time = 0.0;
  r.max_error = 0.0;
  for (const ConventionalPhase& p : r.phases) {
    r.total_time += p.sensing_time + p.comm_time;
    r.max_error = std::max(r.max_error, p.error);
  }
}

}  // namespace

double realized_error(std::int64_t samples, const ErrorModel& model) {
  return classification_error(static_cast<double>(std::max<std::int64_t>(samples, 1)), model);
}

IsacSolution run_isac(const SystemConfig& cfg, const ChannelSet& channels,
                      const BeamformOptions& options) {
  cfg.validate();
  check_channel_set(cfg, channels);

  IsacSolution sol;
  std::vector<double> sinr_com;
  for (std::size_t m = 0; m < cfg.num_tasks(); ++m) {
    const BeamformOutcome bf = solve_beamforming(channels.uplink, channels.echoes[m],
                                                 cfg.tasks[m].sensing_threshold, cfg, options);
    if (bf.status == BeamformStatus::Infeasible) {
      std::ostringstream os;
      os << "task " << m << ": " << bf.message;
      throw InfeasibleTask(m, os.str());
    }
    if (bf.status != BeamformStatus::Optimal) {
      std::ostringstream os;
      os << "task " << m << ": " << bf.message;
      throw Error(ErrorCode::Numerical, os.str());
    }
    TaskPhase phase;
    phase.beams = bf.pair;
    phase.sinr_com = bf.sinr_com;
    phase.sinr_sen = bf.sinr_sen;
    sol.phases.push_back(phase);
    sinr_com.push_back(bf.sinr_com);
  }

  const RateProfile profile = make_rate_profile(sinr_com, cfg);
  const TimeAllocation alloc = solve_time_allocation(profile, cfg);
  sol.mu_star = alloc.mu_star;
  for (std::size_t m = 0; m < sol.phases.size(); ++m) {
    TaskPhase& p = sol.phases[m];
    p.sample_rate = profile.minimum[m];
    p.binding = alloc.binding[m];
    set_duration(p, alloc.durations[m], cfg, cfg.tasks[m].error);
  }
  summarise(sol);
  return sol;
}

double mrc_rate(const SystemConfig& cfg, const ComplexVector& uplink) {
  return rate(cfg.max_power * uplink.squaredNorm() / cfg.noise_power);
}

double sequential_sample_cost(const SystemConfig& cfg, const ComplexVector& uplink) {
  return cfg.sensing_time_per_sample + 1.0 / comm_sample_rate(
      cfg.max_power * uplink.squaredNorm() / cfg.noise_power, cfg);
}

ConventionalReport run_conventional(const SystemConfig& cfg, const ChannelSet& channels,
                                    const std::vector<std::int64_t>& target_samples) {
  cfg.validate();
  check_channel_set(cfg, channels);
  if (target_samples.size() != cfg.num_tasks()) {
    throw Error(ErrorCode::DimensionMismatch, "one target sample count per task is required");
  }
  ConventionalReport r;
  r.rate = mrc_rate(cfg, channels.uplink);
  r.sample_cost = sequential_sample_cost(cfg, channels.uplink);
  const double upload = r.sample_cost - cfg.sensing_time_per_sample;
  for (std::size_t m = 0; m < cfg.num_tasks(); ++m) {
    const std::int64_t v = target_samples[m];
    if (v < 0) throw Error(ErrorCode::InvalidArgument, "target sample counts must be >= 0");
    ConventionalPhase p;
    p.samples = v;
    p.sensing_time = static_cast<double>(v) * cfg.sensing_time_per_sample;
    p.comm_time = static_cast<double>(v) * upload;
    p.error = realized_error(v, cfg.tasks[m].error);
    r.phases.push_back(p);
  }
  summarise(r);
  r.mu_star = r.max_error;
  return r;
}

ConventionalReport run_conventional(const SystemConfig& cfg, const ChannelSet& channels) {
  cfg.validate();
  check_channel_set(cfg, channels);
  ConventionalReport r;
  r.rate = mrc_rate(cfg, channels.uplink);
  r.sample_cost = sequential_sample_cost(cfg, channels.uplink);
  const double upload = r.sample_cost - cfg.sensing_time_per_sample;
  const TimeAllocation alloc =
      solve_time_allocation(uniform_rate_profile(1.0 / r.sample_cost, cfg.num_tasks()), cfg);
  r.mu_star = alloc.mu_star;
  for (std::size_t m = 0; m < cfg.num_tasks(); ++m) {
    const double tau = alloc.durations[m];
    ConventionalPhase p;
    p.samples = realized_samples(tau / r.sample_cost);
    p.sensing_time = tau * cfg.sensing_time_per_sample / r.sample_cost;
    p.comm_time = tau * upload / r.sample_cost;
    p.error = realized_error(p.samples, cfg.tasks[m].error);
    r.phases.push_back(p);
  }
  summarise(r);
  return r;
}

double isac_gain_analytic(const SystemConfig& cfg, const ComplexVector& uplink) {
  const double x = cfg.sensing_time_per_sample * cfg.bandwidth * mrc_rate(cfg, uplink) /
                   cfg.sample_bits;
  return 1.0 / (x + 1.0);
}

const char* to_string(CompareMode mode) noexcept {
  switch (mode) {
    case CompareMode::EqualSamples: return "equal_samples";
    case CompareMode::EqualTime: return "equal_time";
    case CompareMode::EqualError: return "equal_error";
  }
  return "unknown";
}

const char* to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::SensingDominant: return "sensing_dominant";
    case Regime::CommDominant: return "comm_dominant";
    case Regime::Mixed: return "mixed";
  }
  return "unknown";
}

CompareMode parse_compare_mode(const std::string& text) {
  for (CompareMode m : {CompareMode::EqualSamples, CompareMode::EqualTime,
                        CompareMode::EqualError}) {
    if (text == to_string(m)) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown comparison mode '" + text + "'");
}

Regime classify_regime(const std::vector<TaskPhase>& phases) {
  bool all_sensing = true, all_comm = true;
  for (const TaskPhase& p : phases) {
    if (p.binding == Binding::Communication) all_sensing = false;
    if (p.binding != Binding::Communication) all_comm = false;
  }
  if (all_sensing) return Regime::SensingDominant;
  if (all_comm) return Regime::CommDominant;
  return Regime::Mixed;
}

RunReport compare(const SystemConfig& cfg, const ChannelSet& channels,
                  const CompareOptions& options) {
  RunReport rep;
  rep.mode = options.mode;
  rep.isac = run_isac(cfg, channels, options.beamform);
  rep.regime = classify_regime(rep.isac.phases);
  rep.gain_analytic = isac_gain_analytic(cfg, channels.uplink);

  switch (options.mode) {
    case CompareMode::EqualSamples: {
      std::vector<std::int64_t> v;
      rep.isac_time = 0.0;
      for (const TaskPhase& p : rep.isac.phases) {
        v.push_back(p.budget.samples);
        rep.isac_time += static_cast<double>(p.budget.samples) / p.sample_rate;
      }
      rep.conventional = run_conventional(cfg, channels, v);
      rep.conv_time = rep.conventional.total_time;
      break;
    }
    case CompareMode::EqualTime: {
      rep.conventional = run_conventional(cfg, channels);
      rep.isac_time = rep.isac.total_time;
      rep.conv_time = rep.conventional.total_time;
      break;
    }
    case CompareMode::EqualError: {
      if (!(options.target_error > 0.0) || !std::isfinite(options.target_error)) {
        throw Error(ErrorCode::InvalidArgument, "equal_error mode needs a positive target_error");
      }
      std::vector<std::int64_t> v;
      for (std::size_t m = 0; m < rep.isac.phases.size(); ++m) {
        TaskPhase& p = rep.isac.phases[m];
        const std::int64_t need = samples_for_error(options.target_error, cfg.tasks[m].error);
        v.push_back(need);
        set_duration(p, static_cast<double>(need) / p.sample_rate, cfg, cfg.tasks[m].error);
      }
      summarise(rep.isac);
      rep.isac.mu_star = rep.isac.max_error;
      rep.conventional = run_conventional(cfg, channels, v);
      rep.isac_time = rep.isac.total_time;
      rep.conv_time = rep.conventional.total_time;
      break;
    }
  }

  rep.max_err_isac = rep.isac.max_error;
  rep.max_err_conv = rep.conventional.max_error;
  if (options.mode == CompareMode::EqualTime) {
    rep.gain_measured = 1.0 - rep.max_err_isac / rep.max_err_conv;
  } else {
    rep.gain_measured = rep.conv_time > 0.0 ? 1.0 - rep.isac_time / rep.conv_time : 0.0;
  }
  return rep;
}

void apply_sweep_value(const std::string& param, double value, SystemConfig& cfg,
                       CompareOptions& options) {
  if (param == "t_s") {
    cfg.sensing_time_per_sample = value;
  } else if (param == "B") {
    cfg.bandwidth = value;
  } else if (param == "P") {
    cfg.max_power = value;
  } else if (param == "T") {
    cfg.total_time = value;
  } else if (param == "target_error") {
    options.target_error = value;
  } else {
    throw Error(ErrorCode::InvalidArgument,
                "unknown sweep parameter '" + param + "' (expected t_s, B, P, T or target_error)");
  }
}

std::vector<SweepRow> sweep(const SystemConfig& cfg, const ChannelSet& channels,
                            const SweepSpec& spec) {
  {
    // Reject a bad parameter name even for an empty grid.
    SystemConfig c = cfg;
    CompareOptions o = spec.options;
    apply_sweep_value(spec.param, 1.0, c, o);
  }
  const std::size_t n = spec.grid.size();
  std::vector<SweepRow> rows(n);
  std::vector<std::exception_ptr> failures(n);

  auto run_point = [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.param = spec.param;
    row.value = spec.grid[i];
    try {
      SystemConfig c = cfg;
      CompareOptions o = spec.options;
      apply_sweep_value(spec.param, row.value, c, o);
      row.report = compare(c, channels, o);
    } catch (const InfeasibleTask&) {
      row.feasible = false;
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };

  std::size_t workers = spec.jobs > 0 ? static_cast<std::size_t>(spec.jobs)
                                      : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) run_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.push_back(std::async(std::launch::async, [&] {
        for (std::size_t i = next++; i < n; i = next++) run_point(i);
      }));
    }
    for (auto& f : pool) f.get();
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return rows;
}

std::vector<double> parse_grid(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) {
      throw Error(ErrorCode::InvalidArgument, "bad number '" + s + "' in grid '" + text + "'");
    }
    return x;
  };
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
  };

  std::vector<double> grid;
  if (text.empty()) return grid;
  if (text.rfind("lin:", 0) == 0 || text.rfind("log:", 0) == 0) {
    const auto parts = split(text, ':');
    if (parts.size() != 4) {
      throw Error(ErrorCode::InvalidArgument, "range grids look like log:start:stop:count");
    }
    const double a = number(parts[1]), b = number(parts[2]);
    const double count = number(parts[3]);
    if (count < 1 || count != std::floor(count)) {
      throw Error(ErrorCode::InvalidArgument, "grid count must be a positive integer");
    }
    const bool logarithmic = parts[0] == "log";
    if (logarithmic && !(a > 0.0 && b > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "log grids need positive end points");
    }
    const int n = static_cast<int>(count);
    for (int i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      grid.push_back(logarithmic ? a * std::pow(b / a, f) : a + (b - a) * f);
    }
    if (n > 1) grid.back() = b;
    return grid;
  }
  for (const auto& part : split(text, ',')) grid.push_back(number(part));
  return grid;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  using detail::shortest;
  out << "param,value,isac_time_s,conv_time_s,gain_measured,gain_analytic,regime,"
         "max_err_isac,max_err_conv\n";
  for (const SweepRow& r : rows) {
    out << r.param << ',' << shortest(r.value) << ',';
    if (!r.feasible) {
      out << ",,,,infeasible,,\n";
      continue;
    }
    const RunReport& p = r.report;
    out << shortest(p.isac_time) << ',' << shortest(p.conv_time) << ','
        << shortest(p.gain_measured) << ',' << shortest(p.gain_analytic) << ','
        << to_string(p.regime) << ',' << shortest(p.max_err_isac) << ','
        << shortest(p.max_err_conv) << '\n';
  }
}

}  // namespace isac_edge
