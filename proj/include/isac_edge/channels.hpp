#pragma once

// Line-of-sight channel construction for a uniform linear array: steering
// vectors plus power-law path loss (one-way for the uplink, round trip for
// radar echoes).

#include <cstdint>
#include <vector>

#include "isac_edge/model.hpp"

namespace isac_edge {

struct TargetGeometry {
  double distance = 20.0;   // m
  double angle = 0.0;       // rad
  double echo_gain = 1.0;   // amplitude reflectivity factor
};

struct SceneGeometry {
  double antenna_spacing = 0.15;  // m
  double wavelength = 0.3;        // m
  double path_loss_exponent = 2.5;
  double server_distance = 250.0;  // m
  double server_angle = 0.0;       // rad
  double reference_gain = 1.0;     // linear power gain at 1 m
  std::vector<TargetGeometry> targets;
  // Std-dev of an optional multiplicative complex Gaussian perturbation of
  // every channel entry; zero keeps channels purely line-of-sight.
  double fading_std = 0.0;

  void validate() const;
};

struct ChannelSet {
  ComplexVector uplink;               // sensor -> edge server
  std::vector<ComplexVector> echoes;  // per-target round-trip echo channel
};

ComplexVector steering_vector(double angle, int num_antennas, double spacing,
                              double wavelength);

/// Reference gain that puts the full-power server-link SNR at `snr_db`.
double calibrated_reference_gain(const SystemConfig& cfg, const SceneGeometry& geom,
                                 double snr_db);

ChannelSet build_channels(const SceneGeometry& geom, const SystemConfig& cfg,
                          std::uint64_t seed);

}  // namespace isac_edge
