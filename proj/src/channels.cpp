#include "isac_edge/channels.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "isac_edge/error.hpp"

namespace isac_edge {

void SceneGeometry::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be positive");
    }
  };
  positive(antenna_spacing, "antenna_spacing");
  positive(wavelength, "wavelength");
  positive(path_loss_exponent, "path_loss_exponent");
  positive(server_distance, "server_distance");
  positive(reference_gain, "reference_gain");
  for (const TargetGeometry& t : targets) {
    positive(t.distance, "target distance");
    positive(t.echo_gain, "target echo_gain");
  }
  if (!(fading_std >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "fading_std must be >= 0");
  }
}

ComplexVector steering_vector(double angle, int num_antennas, double spacing,
                              double wavelength) {
  if (num_antennas < 1) {
    throw Error(ErrorCode::InvalidArgument, "steering vector needs at least one antenna");
  }
  ComplexVector a(num_antennas);
  const double phase_step = 2.0 * std::numbers::pi * spacing * std::sin(angle) / wavelength;
  for (int k = 0; k < num_antennas; ++k) {
    a[k] = std::polar(1.0, phase_step * k);
  }
  return a;
}

double calibrated_reference_gain(const SystemConfig& cfg, const SceneGeometry& geom,
                                 double snr_db) {
  // P * N * beta0 * d^-alpha / sigma^2 = snr
  return db_to_linear(snr_db) * cfg.noise_power *
         std::pow(geom.server_distance, geom.path_loss_exponent) /
         (cfg.max_power * cfg.num_antennas);
}

ChannelSet build_channels(const SceneGeometry& geom, const SystemConfig& cfg,
                          std::uint64_t seed) {
  geom.validate();
  if (geom.targets.size() != cfg.num_tasks()) {
    std::ostringstream os;
    os << "geometry lists " << geom.targets.size() << " targets but the config has "
       << cfg.num_tasks() << " tasks";
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  const int n = cfg.num_antennas;
  const double alpha = geom.path_loss_exponent;

  ChannelSet set;
  set.uplink = std::sqrt(geom.reference_gain * std::pow(geom.server_distance, -alpha)) *
               steering_vector(geom.server_angle, n, geom.antenna_spacing, geom.wavelength);
  set.echoes.reserve(geom.targets.size());
  for (const TargetGeometry& t : geom.targets) {
    const double amplitude =
        t.echo_gain * std::sqrt(geom.reference_gain * std::pow(t.distance, -2.0 * alpha));
    set.echoes.push_back(amplitude *
                         steering_vector(t.angle, n, geom.antenna_spacing, geom.wavelength));
  }

  if (geom.fading_std > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    auto perturb = [&](ComplexVector& v) {
      for (Eigen::Index k = 0; k < v.size(); ++k) {
        v[k] *= Complex(1.0, 0.0) + geom.fading_std * Complex(normal(rng), normal(rng));
      }
    };
    perturb(set.uplink);
    for (ComplexVector& g : set.echoes) perturb(g);
  }
  return set;
}

}  // namespace isac_edge
