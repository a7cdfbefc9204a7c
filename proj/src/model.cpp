#include "isac_edge/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "isac_edge/error.hpp"

namespace isac_edge {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::NotApplicable: return "not applicable";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::Numerical: return "numerical failure";
    case ErrorCode::Schema: return "schema error";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown";
}

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << name << " must be positive and finite (got " << value << ")";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

void require_same_size(const ComplexVector& a, const ComplexVector& b) {
  if (a.size() != b.size()) {
    std::ostringstream os;
    os << "vector lengths differ: " << a.size() << " vs " << b.size();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

}  // namespace

void SystemConfig::validate() const {
  if (num_antennas < 1) {
    throw Error(ErrorCode::InvalidArgument, "num_antennas must be >= 1");
  }
  if (tasks.empty()) {
    throw Error(ErrorCode::InvalidArgument, "at least one task is required");
  }
  require_positive(max_power, "max_power");
  require_positive(noise_power, "noise_power");
  require_positive(clutter_power, "clutter_power");
  require_positive(bandwidth, "bandwidth");
  require_positive(sample_bits, "sample_bits");
  require_positive(total_time, "total_time");
  require_positive(sensing_time_per_sample, "sensing_time_per_sample");
  for (const TaskSpec& task : tasks) {
    if (!(task.sensing_threshold >= 0.0) || !std::isfinite(task.sensing_threshold)) {
      throw Error(ErrorCode::InvalidArgument, "sensing threshold must be finite and >= 0");
    }
    require_positive(task.error.coefficient, "error coefficient");
    require_positive(task.error.exponent, "error exponent");
  }
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double sensing_sinr(const ComplexVector& radar_beam, const ComplexVector& echo_channel,
                    double noise_power, double clutter_power) {
  require_same_size(radar_beam, echo_channel);
  const double floor_power = noise_power + clutter_power;
  if (!(floor_power > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise + clutter power must be positive");
  }
  return std::norm(echo_channel.dot(radar_beam)) / floor_power;
}

double comm_sinr(const ComplexVector& data_beam, const ComplexVector& radar_beam,
                 const ComplexVector& channel, double noise_power) {
  require_same_size(data_beam, channel);
  require_same_size(radar_beam, channel);
  if (!(noise_power > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise power must be positive");
  }
  // Eigen's dot() conjugates the left operand: h.dot(f) == h^H f.
  const double signal = std::norm(channel.dot(data_beam));
  const double leakage = std::norm(channel.dot(radar_beam));
  return signal / (noise_power + leakage);
}

double rate(double sinr) {
  if (!(sinr >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "SINR must be non-negative");
  }
  return std::log2(1.0 + sinr);
}

double comm_sample_rate(double sinr, const SystemConfig& cfg) {
  return cfg.bandwidth * rate(sinr) / cfg.sample_bits;
}

std::int64_t realized_samples(double continuous_samples) {
  if (!(continuous_samples > 0.0)) return 0;
  return static_cast<std::int64_t>(std::floor(continuous_samples + 1e-9));
}

SampleBudget sample_budget(double duration, double sinr_com, const SystemConfig& cfg) {
  if (!(duration >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "duration must be non-negative");
  }
  SampleBudget budget;
  budget.sensing_limit = duration / cfg.sensing_time_per_sample;
  budget.comm_limit = duration * comm_sample_rate(sinr_com, cfg);
  budget.samples = realized_samples(std::min(budget.sensing_limit, budget.comm_limit));
  return budget;
}

double classification_error(double samples, const ErrorModel& model) {
  if (!(samples >= 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "error model is undefined below one training sample");
  }
  require_positive(model.coefficient, "error coefficient");
  require_positive(model.exponent, "error exponent");
  return model.coefficient * std::pow(samples, -model.exponent);
}

SampleQuality quality_gate(double sensing_sinr, double threshold) {
  return sensing_sinr >= threshold ? SampleQuality::Qualified : SampleQuality::NotQualified;
}

FitResult fit_error_model(std::span<const FitPoint> points) {
  if (points.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "at least two (v, E) points are required");
  }
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const FitPoint& p : points) {
    if (!(p.samples >= 1.0) || !(p.error > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "fit points need v >= 1 and E > 0");
    }
    sx += std::log(p.samples);
    sy += std::log(p.error);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const FitPoint& p : points) {
    const double dx = std::log(p.samples) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(p.error) - my);
  }
  if (sxx <= 1e-300) {
    throw Error(ErrorCode::InvalidArgument, "degenerate fit: all sample counts are equal");
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;

  FitResult fit;
  fit.model.coefficient = std::exp(intercept);
  fit.model.exponent = -slope;
  double rss = 0;
  for (const FitPoint& p : points) {
    const double r = std::log(p.error) - (intercept + slope * std::log(p.samples));
    rss += r * r;
  }
  fit.residual_norm = std::sqrt(rss);
  fit.exponent_stderr = points.size() > 2
                            ? std::sqrt(rss / (n - 2.0) / sxx)
                            : std::numeric_limits<double>::quiet_NaN();
  fit.nonpositive_exponent = fit.model.exponent <= 0.0;
  return fit;
}

}  // namespace isac_edge
