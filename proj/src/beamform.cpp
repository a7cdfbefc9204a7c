#include "isac_edge/beamform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "isac_edge/error.hpp"

namespace isac_edge {

const char* to_string(BeamformStatus status) noexcept {
  switch (status) {
    case BeamformStatus::Optimal: return "optimal";
    case BeamformStatus::Infeasible: return "infeasible";
    case BeamformStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

void check_channels(const ComplexVector& uplink, const ComplexVector& echo) {
  if (uplink.size() != echo.size()) {
    std::ostringstream os;
    os << "uplink has " << uplink.size() << " entries, echo has " << echo.size();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  if (uplink.size() < 1) throw Error(ErrorCode::InvalidArgument, "empty channel vector");
  if (!(uplink.norm() > 0.0)) throw Error(ErrorCode::InvalidArgument, "uplink channel is zero");
  if (!uplink.allFinite() || !echo.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "channel entries must be finite");
  }
}

// Multiply by a unit phase so the first significant entry is real positive.
void fix_phase(ComplexVector& v) {
  const double cutoff = 1e-12 * v.norm();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v[k]) > cutoff) {
      v *= std::conj(v[k]) / std::abs(v[k]);
      v[k] = Complex(v[k].real(), 0.0);
      return;
    }
  }
}

struct Principal {
  ComplexVector vector;  // scaled by sqrt(lambda1)
  double defect = 0.0;
};

Principal principal_component(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m);
  const Eigen::Index n = m.rows();
  const double l1 = eig.eigenvalues()[n - 1];
  Principal p;
  if (!(l1 > 0.0)) {
    p.vector = ComplexVector::Zero(n);
    return p;
  }
  const double l2 = n > 1 ? std::max(eig.eigenvalues()[n - 2], 0.0) : 0.0;
  p.defect = l2 / l1;
  p.vector = std::sqrt(l1) * eig.eigenvectors().col(n - 1);
  return p;
}

double required_threshold_power(double threshold, const SystemConfig& cfg) {
  return threshold * (cfg.noise_power + cfg.clutter_power);
}

}  // namespace

sdp::SdpProblem build_ccp_sdp(const ComplexVector& uplink, const ComplexVector& echo,
                              double threshold, const SystemConfig& cfg) {
  check_channels(uplink, echo);
  const Eigen::Index n = uplink.size();
  const Eigen::MatrixXcd h = uplink * uplink.adjoint();
  const Eigen::MatrixXcd g = echo * echo.adjoint();
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(n, n);

  sdp::SdpProblem p;
  const auto radar = p.add_block("W'", n);
  const auto data = p.add_block("F'", n);
  const auto xi = p.add_scalar("xi");

  p.set_objective(sdp::Sense::Maximize, sdp::LinearFunctional{}.add_block(data, h));
  p.add_constraint({sdp::LinearFunctional{}.add_block(radar, h).add_scalar(xi, cfg.noise_power),
                    sdp::Relation::Equal, 1.0, "normalisation"});
  p.add_constraint({sdp::LinearFunctional{}
                        .add_block(radar, g)
                        .add_scalar(xi, -required_threshold_power(threshold, cfg)),
                    sdp::Relation::GreaterEqual, 0.0, "sensing"});
  p.add_constraint({sdp::LinearFunctional{}
                        .add_block(radar, eye)
                        .add_block(data, eye)
                        .add_scalar(xi, -cfg.max_power),
                    sdp::Relation::LessEqual, 0.0, "power"});
  return p;
}

BeamformOutcome solve_beamforming(const ComplexVector& uplink, const ComplexVector& echo,
                                  double threshold, const SystemConfig& cfg,
                                  const BeamformOptions& options) {
  check_channels(uplink, echo);
  if (uplink.size() != cfg.num_antennas) {
    throw Error(ErrorCode::DimensionMismatch, "channel length differs from num_antennas");
  }
  if (!(threshold >= 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be >= 0");

  BeamformOutcome out;
  const Eigen::Index n = uplink.size();

  if (threshold == 0.0) {
    out.pair.radar = ComplexVector::Zero(n);
    out.pair.data = std::sqrt(cfg.max_power) * uplink / uplink.norm();
    fix_phase(out.pair.data);
    out.pair.power_used = out.pair.data.squaredNorm();
    out.sinr_com = comm_sinr(out.pair.data, out.pair.radar, uplink, cfg.noise_power);
    out.sinr_sen = 0.0;
    out.status = BeamformStatus::Optimal;
    out.message = "no sensing constraint: matched-filter data beam";
    return out;
  }

  // Unit noise power and unit power budget: every SINR is unchanged when
  // channels are scaled by sqrt(P)/sigma and clutter is expressed in noise units.
  SystemConfig unit = cfg;
  unit.noise_power = 1.0;
  unit.clutter_power = cfg.clutter_power / cfg.noise_power;
  unit.max_power = 1.0;
  const double scale = std::sqrt(cfg.max_power / cfg.noise_power);
  const sdp::SdpProblem problem = build_ccp_sdp(scale * uplink, scale * echo, threshold, unit);
  out.relaxation = sdp::solve(problem, options.tolerances, options.observer);

  switch (out.relaxation.status) {
    case sdp::Status::Optimal: break;
    case sdp::Status::Infeasible:
      out.status = BeamformStatus::Infeasible;
      out.message = "sensing threshold unreachable within the power budget";
      return out;
    default:
      out.status = BeamformStatus::NumericalFailure;
      out.message = std::string("SDP solve failed: ") + out.relaxation.message;
      return out;
  }

  const double xi = out.relaxation.scalar_values.at(0);
  if (!(xi > 0.0)) {
    out.status = BeamformStatus::NumericalFailure;
    out.message = "Charnes-Cooper scale xi is not positive";
    return out;
  }
  const Principal radar = principal_component(out.relaxation.block_values.at(0));
  const Principal data = principal_component(out.relaxation.block_values.at(1));
  out.rank1_defect = std::max(radar.defect, data.defect);

  const double back = std::sqrt(cfg.max_power / xi);
  out.pair.radar = back * radar.vector;
  out.pair.data = back * data.vector;
  fix_phase(out.pair.radar);
  fix_phase(out.pair.data);
  double power = out.pair.radar.squaredNorm() + out.pair.data.squaredNorm();
  if (power > cfg.max_power) {
    // Solver feasibility slack only; pull back onto the budget.
    const double shrink = std::sqrt(cfg.max_power / power);
    out.pair.radar *= shrink;
    out.pair.data *= shrink;
    power = out.pair.radar.squaredNorm() + out.pair.data.squaredNorm();
  }
  double sen = sensing_sinr(out.pair.radar, echo, cfg.noise_power, cfg.clutter_power);
  if (sen < threshold && sen >= (1.0 - 1e-6) * threshold) {
    // Lift the radar beam onto the sensing floor and take the extra power
    // from the data beam.
    out.pair.radar *= std::sqrt(threshold / sen) * (1.0 + 1e-12);
    const double left = std::max(0.0, cfg.max_power - out.pair.radar.squaredNorm());
    const double dn2 = out.pair.data.squaredNorm();
    if (dn2 > left) out.pair.data *= std::sqrt(left / dn2);
    power = out.pair.radar.squaredNorm() + out.pair.data.squaredNorm();
    sen = sensing_sinr(out.pair.radar, echo, cfg.noise_power, cfg.clutter_power);
  }
  out.pair.power_used = power;
  out.sinr_com = comm_sinr(out.pair.data, out.pair.radar, uplink, cfg.noise_power);
  out.sinr_sen = sen;

  if (out.rank1_defect > options.rank1_failure_threshold) {
    out.status = BeamformStatus::NumericalFailure;
    std::ostringstream os;
    os << "relaxation is not rank one (lambda2/lambda1 = " << out.rank1_defect << ")";
    out.message = os.str();
    return out;
  }
  out.status = BeamformStatus::Optimal;
  out.message = "converged";
  return out;
}

bool zf_applicable(const ComplexVector& uplink, const ComplexVector& echo) {
  if (uplink.size() != echo.size() || uplink.size() < 2) return false;
  const double hn2 = uplink.squaredNorm();
  const double gn2 = echo.squaredNorm();
  if (!(hn2 > 0.0) || !(gn2 > 0.0)) return false;
  const double overlap = std::norm(uplink.dot(echo)) / (hn2 * gn2);
  return 1.0 - overlap > 1e-9;
}

ZfOracleResult zf_oracle(const ComplexVector& uplink, const ComplexVector& echo,
                         double threshold, const SystemConfig& cfg) {
  check_channels(uplink, echo);
  if (!zf_applicable(uplink, echo)) {
    throw Error(ErrorCode::NotApplicable,
                "zero-forcing oracle needs N >= 2 and non-parallel channels");
  }
  const double hn2 = uplink.squaredNorm();
  const ComplexVector orth = echo - uplink * (uplink.dot(echo) / hn2);
  ZfOracleResult r;
  r.radar_power = required_threshold_power(threshold, cfg) / orth.squaredNorm();
  if (r.radar_power <= cfg.max_power) {
    r.feasible = true;
    r.sinr_com = (cfg.max_power - r.radar_power) * hn2 / cfg.noise_power;
    return r;
  }
  r.grid_fallback = true;
  r.sinr_com = grid_oracle(uplink, echo, threshold, cfg);
  r.feasible = std::isfinite(r.sinr_com);
  return r;
}

namespace {

struct GridPoint {
  double power, theta, phi;
};

// Closed-form SINRs for w = sqrt(p)(cos t u1 + sin t e^{i phi} u2) and
// f = sqrt(P - p) u1 with u1 = h/|h| and u2 orthogonal to h within span{g, h}.
struct SpanModel {
  double hn2;
  Complex g1, g2;  // g^H u1, g^H u2
  double noise, floor_power, budget, threshold;

  double sensing(const GridPoint& x) const {
    const Complex proj = std::cos(x.theta) * g1 + std::sin(x.theta) * std::polar(1.0, x.phi) * g2;
    return x.power * std::norm(proj) / floor_power;
  }
  double comm(const GridPoint& x) const {
    const double c = std::cos(x.theta);
    return (budget - x.power) * hn2 / (noise + x.power * c * c * hn2);
  }
};

}  // namespace

double grid_oracle(const ComplexVector& uplink, const ComplexVector& echo, double threshold,
                   const SystemConfig& cfg, int resolution, int refinement_passes) {
  check_channels(uplink, echo);
  if (resolution < 1) throw Error(ErrorCode::InvalidArgument, "grid resolution must be >= 1");

  const double hn2 = uplink.squaredNorm();
  const ComplexVector u1 = uplink / std::sqrt(hn2);
  ComplexVector u2 = ComplexVector::Zero(uplink.size());
  bool two_dim = false;
  if (zf_applicable(uplink, echo)) {
    const ComplexVector orth = echo - u1 * u1.dot(echo);
    u2 = orth / orth.norm();
    two_dim = true;
  }
  const SpanModel model{hn2,
                        echo.dot(u1),
                        echo.dot(u2),
                        cfg.noise_power,
                        cfg.noise_power + cfg.clutter_power,
                        cfg.max_power,
                        threshold};

  constexpr double kHalfPi = std::numbers::pi / 2.0;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double best = -std::numeric_limits<double>::infinity();
  GridPoint incumbent{0.0, 0.0, 0.0};

  auto scan = [&](double p_lo, double p_hi, double t_lo, double t_hi, double f_lo, double f_span,
                  bool wrap_phi) {
    const int np = resolution, nt = two_dim ? resolution : 0;
    const int nf = two_dim ? resolution : 1;
    for (int i = 0; i <= np; ++i) {
      const double p = p_lo + (p_hi - p_lo) * i / np;
      for (int j = 0; j <= nt; ++j) {
        const double t = nt == 0 ? 0.0 : t_lo + (t_hi - t_lo) * j / nt;
        for (int k = 0; k < nf + (wrap_phi ? 0 : 1); ++k) {
          const double f = f_lo + f_span * k / nf;
          const GridPoint x{p, t, f};
          if (model.sensing(x) < threshold) continue;
          const double value = model.comm(x);
          if (value > best) {
            best = value;
            incumbent = x;
          }
        }
      }
    }
  };

  scan(0.0, cfg.max_power, 0.0, kHalfPi, 0.0, kTwoPi, true);

  double dp = cfg.max_power / resolution;
  double dt = kHalfPi / resolution;
  double df = kTwoPi / resolution;
  for (int pass = 0; pass < refinement_passes && std::isfinite(best); ++pass) {
    // Re-centre at the same scale while the incumbent keeps moving, so the
    // window can follow a narrow ridge of the sensing constraint.
    for (int walk = 0; walk < 4 * resolution; ++walk) {
      const GridPoint c = incumbent;
      const double before = best;
      scan(std::max(0.0, c.power - dp), std::min(cfg.max_power, c.power + dp),
           std::max(0.0, c.theta - dt), std::min(kHalfPi, c.theta + dt), c.phi - df, 2.0 * df,
           false);
      if (!(best > before * (1.0 + 1e-12))) break;
    }
    dp *= 2.0 / resolution;
    dt *= 2.0 / resolution;
    df *= 2.0 / resolution;
  }
  return best;
}

}  // namespace isac_edge
