#pragma once

// End-to-end solve: per-task beamforming, then time allocation, then
// realized integer sample counts. Also the sequential sense-then-upload
// baseline and the comparisons and parameter sweeps built on both.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "isac_edge/beamform.hpp"
#include "isac_edge/channels.hpp"
#include "isac_edge/model.hpp"
#include "isac_edge/timealloc.hpp"

namespace isac_edge {

struct TaskPhase {
  BeamformerPair beams;
  double duration = 0.0;  // seconds
  double sinr_com = 0.0;
  double sinr_sen = 0.0;
  double sample_rate = 0.0;  // min(sensing, communication) samples/s
  SampleBudget budget;
  double error = 0.0;  // realized, at budget.samples
  Binding binding = Binding::Both;
};

struct IsacSolution {
  std::vector<TaskPhase> phases;
  double mu_star = 0.0;     // continuous min-max error
  double total_time = 0.0;  // sum of durations
  double max_error = 0.0;   // over realized errors
};

/// Beamform every task, then split the time budget. Throws InfeasibleTask
/// naming the first task whose sensing threshold cannot be met and
/// Error(Numerical) when a solve breaks down.
IsacSolution run_isac(const SystemConfig& cfg, const ChannelSet& channels,
                      const BeamformOptions& options = {});

/// Uplink spectral efficiency of the baseline: MRC at full power with no
/// radar interference.
double mrc_rate(const SystemConfig& cfg, const ComplexVector& uplink);

/// Seconds per sample for the baseline: t_S + D / (B * mrc_rate).
double sequential_sample_cost(const SystemConfig& cfg, const ComplexVector& uplink);

struct ConventionalPhase {
  double sensing_time = 0.0;
  double comm_time = 0.0;
  std::int64_t samples = 0;
  double error = 0.0;
};

struct ConventionalReport {
  double rate = 0.0;         // bit/s/Hz
  double sample_cost = 0.0;  // s per sample
  std::vector<ConventionalPhase> phases;
  double total_time = 0.0;
  double mu_star = 0.0;  // continuous min-max error (budget variant only)
  double max_error = 0.0;
};

/// Baseline delivering exactly the given per-task sample counts.
ConventionalReport run_conventional(const SystemConfig& cfg, const ChannelSet& channels,
                                    const std::vector<std::int64_t>& target_samples);

/// Baseline with total time cfg.total_time split by the min-max allocator.
ConventionalReport run_conventional(const SystemConfig& cfg, const ChannelSet& channels);

/// 1 / (t_S * B * mrc_rate / D + 1).
double isac_gain_analytic(const SystemConfig& cfg, const ComplexVector& uplink);

/// Error of a realized sample count; a task left with no whole sample is
/// charged the one-sample error a.
double realized_error(std::int64_t samples, const ErrorModel& model);

enum class CompareMode { EqualSamples, EqualTime, EqualError };
enum class Regime { SensingDominant, CommDominant, Mixed };

const char* to_string(CompareMode mode) noexcept;
const char* to_string(Regime regime) noexcept;
/// Accepts the to_string spellings; throws Error(InvalidArgument).
CompareMode parse_compare_mode(const std::string& text);

/// SensingDominant when every phase is limited by sensing (ties included),
/// CommDominant when every phase is limited by the uplink.
Regime classify_regime(const std::vector<TaskPhase>& phases);

struct CompareOptions {
  CompareMode mode = CompareMode::EqualSamples;
  double target_error = 0.0;  // EqualError only
  BeamformOptions beamform;
};

struct RunReport {
  CompareMode mode = CompareMode::EqualSamples;
  IsacSolution isac;
  ConventionalReport conventional;
  // EqualSamples: time each scheme needs for ISAC's realized samples.
  // EqualTime: both equal cfg.total_time.
  // EqualError: time each scheme needs to bring every task to target_error.
  double isac_time = 0.0;
  double conv_time = 0.0;
  // 1 - isac_time / conv_time, except EqualTime where it is the relative
  // error reduction 1 - max_err_isac / max_err_conv.
  double gain_measured = 0.0;
  double gain_analytic = 0.0;
  Regime regime = Regime::Mixed;
  double max_err_isac = 0.0;
  double max_err_conv = 0.0;
};

RunReport compare(const SystemConfig& cfg, const ChannelSet& channels,
                  const CompareOptions& options = {});

struct SweepSpec {
  std::string param;  // t_s, B, P, T or target_error
  std::vector<double> grid;
  CompareOptions options;
  int jobs = 1;
};

struct SweepRow {
  std::string param;
  double value = 0.0;
  bool feasible = true;
  RunReport report;  // meaningful only when feasible
};

/// Applies one sweep value to a copy of the configuration / options.
void apply_sweep_value(const std::string& param, double value, SystemConfig& cfg,
                       CompareOptions& options);

/// One compare() per grid point, rows in grid order regardless of `jobs`.
/// Points whose sensing threshold becomes unreachable are kept and marked
/// infeasible.
std::vector<SweepRow> sweep(const SystemConfig& cfg, const ChannelSet& channels,
                            const SweepSpec& spec);

/// "a,b,c", "lin:start:stop:count" or "log:start:stop:count" (end points
/// included). Throws Error(InvalidArgument) on malformed text.
std::vector<double> parse_grid(const std::string& text);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace isac_edge
