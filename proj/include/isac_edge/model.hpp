#pragma once

// Closed-form link and learning model: SINRs, Shannon rate, sample budgets
// and the power-law classification-error model.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace isac_edge {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;

/// Power-law learning curve E(v) = coefficient * v^(-exponent).
struct ErrorModel {
  double coefficient = 1.0;
  double exponent = 1.0;
};

/// Per-task inputs: sensing SINR threshold (linear) and learning curve.
struct TaskSpec {
  double sensing_threshold = 0.0;
  ErrorModel error;
};

/// Scenario scalars, all in linear SI units (watts, hertz, bits, seconds).
struct SystemConfig {
  int num_antennas = 4;
  double max_power = 1.0;
  double noise_power = 1e-12;
  double clutter_power = 1e-10;
  double bandwidth = 5e6;
  double sample_bits = 1e6;
  double total_time = 200.0;
  double sensing_time_per_sample = 0.1;
  std::vector<TaskSpec> tasks;

  std::size_t num_tasks() const noexcept { return tasks.size(); }

  /// Throws Error(InvalidArgument) unless every scalar is strictly positive,
  /// there is at least one task and every task is well formed.
  void validate() const;
};

struct SampleBudget {
  double sensing_limit = 0.0;
  double comm_limit = 0.0;
  std::int64_t samples = 0;
};

enum class SampleQuality { Qualified, NotQualified };

struct FitPoint {
  double samples;
  double error;
};

struct FitResult {
  ErrorModel model;
  double residual_norm = 0.0;  // in log space
  double exponent_stderr = 0.0;
  bool nonpositive_exponent = false;
};

// dB conversions; only the scenario ingestion layer should need these.
double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// |g^H w|^2 / (noise + clutter).
double sensing_sinr(const ComplexVector& radar_beam, const ComplexVector& echo_channel,
                    double noise_power, double clutter_power);

/// |h^H f|^2 / (noise + |h^H w|^2).
double comm_sinr(const ComplexVector& data_beam, const ComplexVector& radar_beam,
                 const ComplexVector& channel, double noise_power);

/// Spectral efficiency log2(1 + sinr) in bit/s/Hz.
double rate(double sinr);

/// Samples per second the uplink sustains at the given SINR: B*rate/D.
double comm_sample_rate(double sinr, const SystemConfig& cfg);

SampleBudget sample_budget(double duration, double sinr_com, const SystemConfig& cfg);

/// Realized integer count of a continuous sample budget. Values within 1e-9
/// of the next integer are rounded up to it to absorb representation error.
std::int64_t realized_samples(double continuous_samples);

double classification_error(double samples, const ErrorModel& model);

SampleQuality quality_gate(double sensing_sinr, double threshold);

/// Least-squares fit of log E = log a - b log v.
FitResult fit_error_model(std::span<const FitPoint> points);

}  // namespace isac_edge
