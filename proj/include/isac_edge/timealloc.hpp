#pragma once

// Min-max error time allocation across sensing/upload phases. For a fixed
// per-task sample rate the optimal durations equalise the task errors, so
// the whole problem collapses to a scalar search for the common error level.

#include <iosfwd>
#include <vector>

#include "isac_edge/model.hpp"

namespace isac_edge {

/// Per-task sample rates in samples/second.
struct RateProfile {
  std::vector<double> comm;     // B * log2(1 + sinr) / D
  std::vector<double> sensing;  // 1 / t_S
  std::vector<double> minimum;  // min(comm, sensing)

  std::size_t size() const noexcept { return minimum.size(); }
  void validate() const;
};

enum class Binding { Sensing, Communication, Both };

const char* to_string(Binding binding) noexcept;

struct TimeAllocation {
  std::vector<double> durations;  // seconds per task
  double mu_star = 0.0;           // common (maximal) task error
  std::vector<Binding> binding;
  int iterations = 0;
};

/// Builds the profile from the per-task uplink SINRs of the beamforming step.
RateProfile make_rate_profile(const std::vector<double>& sinr_com, const SystemConfig& cfg);

/// Profile where every task runs at the same given rate (sequential baseline).
RateProfile uniform_rate_profile(double samples_per_second, std::size_t tasks);

/// Which limit sets the per-task rate; near-ties count as both.
std::vector<Binding> binding_flags(const RateProfile& profile);

/// Durations that bring every task exactly to error level `mu`.
std::vector<double> tau_of_mu(double mu, const RateProfile& profile, const SystemConfig& cfg);

/// Durations summing to cfg.total_time that minimise the largest task error.
TimeAllocation solve_time_allocation(const RateProfile& profile, const SystemConfig& cfg);

/// Two-task illustration: equal uplink SINR for both tasks, swept jointly
/// with the per-sample sensing time.
struct RemarkPoint {
  double sinr_db = 0.0;
  double t_s = 0.0;
  double tau_1 = 0.0;
  double tau_2 = 0.0;
  double mu_star = 0.0;
};

/// Learning curves (1, 0.5) and (2, 1) with T = 200 s; other scalars from
/// the default SystemConfig.
SystemConfig remark_config();

/// Row-major over sinr_db (outer) then t_s (inner). `cfg` must hold two tasks.
std::vector<RemarkPoint> sweep_remark(const std::vector<double>& sinr_db,
                                      const std::vector<double>& t_s, const SystemConfig& cfg);

void write_remark_csv(std::ostream& out, const std::vector<RemarkPoint>& points);

}  // namespace isac_edge
