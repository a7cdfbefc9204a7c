#include "isac_edge/timealloc.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "isac_edge/error.hpp"
#include "text_format.hpp"

namespace isac_edge {

namespace {

constexpr double kTieTolerance = 1e-12;

void require_rate(double value, const char* what, std::size_t m) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << what << " rate of task " << m << " must be positive and finite (got " << value << ")";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

double total(const std::vector<double>& tau) {
  double s = 0.0;
  for (double t : tau) s += t;
  return s;
}

}  // namespace

const char* to_string(Binding binding) noexcept {
  switch (binding) {
    case Binding::Sensing: return "sensing";
    case Binding::Communication: return "communication";
    case Binding::Both: return "both";
  }
  return "unknown";
}

void RateProfile::validate() const {
  if (minimum.empty()) throw Error(ErrorCode::InvalidArgument, "rate profile is empty");
  if (comm.size() != minimum.size() || sensing.size() != minimum.size()) {
    throw Error(ErrorCode::DimensionMismatch, "rate profile vectors differ in length");
  }
  for (std::size_t m = 0; m < minimum.size(); ++m) {
    require_rate(comm[m], "communication", m);
    require_rate(sensing[m], "sensing", m);
    require_rate(minimum[m], "effective", m);
  }
}

RateProfile make_rate_profile(const std::vector<double>& sinr_com, const SystemConfig& cfg) {
  if (sinr_com.size() != cfg.num_tasks()) {
    throw Error(ErrorCode::DimensionMismatch, "one uplink SINR per task required");
  }
  RateProfile p;
  const double sensing = 1.0 / cfg.sensing_time_per_sample;
  for (double sinr : sinr_com) {
    const double comm = comm_sample_rate(sinr, cfg);
    p.comm.push_back(comm);
    p.sensing.push_back(sensing);
    p.minimum.push_back(std::min(comm, sensing));
  }
  p.validate();
  return p;
}

RateProfile uniform_rate_profile(double samples_per_second, std::size_t tasks) {
  RateProfile p;
  p.comm.assign(tasks, samples_per_second);
  p.sensing.assign(tasks, samples_per_second);
  p.minimum.assign(tasks, samples_per_second);
  p.validate();
  return p;
}

std::vector<Binding> binding_flags(const RateProfile& profile) {
  std::vector<Binding> flags;
  flags.reserve(profile.size());
  for (std::size_t m = 0; m < profile.size(); ++m) {
    const double s = profile.sensing[m], c = profile.comm[m];
    if (std::abs(s - c) <= kTieTolerance * std::max(s, c)) {
      flags.push_back(Binding::Both);
    } else {
      flags.push_back(s < c ? Binding::Sensing : Binding::Communication);
    }
  }
  return flags;
}

std::vector<double> tau_of_mu(double mu, const RateProfile& profile, const SystemConfig& cfg) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw Error(ErrorCode::InvalidArgument, "error level must be positive and finite");
  }
  if (profile.size() != cfg.num_tasks()) {
    throw Error(ErrorCode::DimensionMismatch, "rate profile and task list differ in length");
  }
  std::vector<double> tau(profile.size());
  for (std::size_t m = 0; m < tau.size(); ++m) {
    const ErrorModel& e = cfg.tasks[m].error;
    tau[m] = std::pow(mu / e.coefficient, -1.0 / e.exponent) / profile.minimum[m];
  }
  return tau;
}

TimeAllocation solve_time_allocation(const RateProfile& profile, const SystemConfig& cfg) {
  profile.validate();
  if (!(cfg.total_time > 0.0)) throw Error(ErrorCode::InvalidArgument, "total_time must be > 0");
  if (profile.size() != cfg.num_tasks()) {
    throw Error(ErrorCode::DimensionMismatch, "rate profile and task list differ in length");
  }
  const double T = cfg.total_time;

  TimeAllocation out;
  out.binding = binding_flags(profile);

  // Level at which task m alone would consume the whole budget.
  auto solo_level = [&](std::size_t m) {
    const ErrorModel& e = cfg.tasks[m].error;
    return e.coefficient * std::pow(profile.minimum[m] * T, -e.exponent);
  };

  if (profile.size() == 1) {
    out.mu_star = solo_level(0);
    out.durations = {T};
    return out;
  }

  double lo = solo_level(0), hi = lo;
  for (std::size_t m = 1; m < profile.size(); ++m) {
    lo = std::min(lo, solo_level(m));
    hi = std::max(hi, solo_level(m));
  }
  // sum tau(lo) >= T since every term is at least T; grow hi until it fits.
  while (total(tau_of_mu(hi, profile, cfg)) > T) hi *= 2.0;

  double mid = hi;
  for (int it = 0; it < 400; ++it) {
    out.iterations = it + 1;
    mid = std::sqrt(lo * hi);
    const double s = total(tau_of_mu(mid, profile, cfg));
    if (std::abs(s - T) <= 1e-10 * T) break;
    (s > T ? lo : hi) = mid;
    if (hi - lo <= 1e-14 * hi) break;
  }
  out.mu_star = mid;
  out.durations = tau_of_mu(mid, profile, cfg);
  return out;
}

SystemConfig remark_config() {
  SystemConfig cfg;
  cfg.total_time = 200.0;
  cfg.tasks = {TaskSpec{0.0, ErrorModel{1.0, 0.5}}, TaskSpec{0.0, ErrorModel{2.0, 1.0}}};
  return cfg;
}

std::vector<RemarkPoint> sweep_remark(const std::vector<double>& sinr_db,
                                      const std::vector<double>& t_s, const SystemConfig& cfg) {
  if (cfg.num_tasks() != 2) {
    throw Error(ErrorCode::InvalidArgument, "the two-task surface needs exactly two tasks");
  }
  std::vector<RemarkPoint> rows;
  rows.reserve(sinr_db.size() * t_s.size());
  for (double s_db : sinr_db) {
    const double sinr = db_to_linear(s_db);
    for (double ts : t_s) {
      SystemConfig c = cfg;
      c.sensing_time_per_sample = ts;
      c.validate();
      const TimeAllocation a = solve_time_allocation(make_rate_profile({sinr, sinr}, c), c);
      rows.push_back({s_db, ts, a.durations[0], a.durations[1], a.mu_star});
    }
  }
  return rows;
}

void write_remark_csv(std::ostream& out, const std::vector<RemarkPoint>& points) {
  using detail::shortest;
  out << "sinr_db,t_s,tau_1,tau_2,mu_star\n";
  for (const RemarkPoint& p : points) {
    out << shortest(p.sinr_db) << ',' << shortest(p.t_s) << ',' << shortest(p.tau_1) << ','
        << shortest(p.tau_2) << ',' << shortest(p.mu_star) << '\n';
  }
}

}  // namespace isac_edge
