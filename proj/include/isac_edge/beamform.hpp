#pragma once

// Per-phase ISAC beamforming: maximise the uplink SINR subject to a radar
// echo SINR floor and the transmit power budget. The fractional objective is
// linearised with a Charnes-Cooper change of variables and relaxed to an SDP
// whose optimum is rank one, so beamformers are read off the principal
// eigenvectors. Two independent oracles cross-check the SDP route.

#include <string>

#include "isac_edge/model.hpp"
#include "isac_edge/sdp.hpp"

namespace isac_edge {

struct BeamformerPair {
  ComplexVector radar;  // w
  ComplexVector data;   // f
  double power_used = 0.0;
};

enum class BeamformStatus { Optimal, Infeasible, NumericalFailure };

const char* to_string(BeamformStatus status) noexcept;

struct BeamformOutcome {
  BeamformStatus status = BeamformStatus::NumericalFailure;
  BeamformerPair pair;
  double sinr_com = 0.0;
  double sinr_sen = 0.0;
  // Largest of lambda2/lambda1 over the two lifted SDP blocks.
  double rank1_defect = 0.0;
  // Raw SDP solution in the normalised units used for the solve. Empty when
  // the solve was short-circuited (zero sensing threshold).
  sdp::SdpSolution relaxation;
  std::string message;
};

struct BeamformOptions {
  sdp::Tolerances tolerances{1e-9, 1e-9, 200, 1e8};
  double rank1_failure_threshold = 1e-4;
  sdp::IterateObserver observer;
};

/// Lifted Charnes-Cooper SDP in the units of `cfg`: PSD blocks W', F',
/// scalar xi >= 0, and
///   sigma^2 xi + Tr{W'H} = 1,
///   eta (sigma^2 + c) xi <= Tr{W'G},
///   Tr{W'} + Tr{F'} <= xi P,
/// maximising Tr{F'H} with H = hh^H and G = gg^H.
sdp::SdpProblem build_ccp_sdp(const ComplexVector& uplink, const ComplexVector& echo,
                              double threshold, const SystemConfig& cfg);

/// Solves one phase. The SDP is posed in normalised units (unit noise power
/// and unit power budget) and the extracted vectors are mapped back.
BeamformOutcome solve_beamforming(const ComplexVector& uplink, const ComplexVector& echo,
                                  double threshold, const SystemConfig& cfg,
                                  const BeamformOptions& options = {});

struct ZfOracleResult {
  double sinr_com = 0.0;
  bool feasible = false;
  double radar_power = 0.0;  // power needed by the zero-forcing radar beam
  bool grid_fallback = false;
};

/// Zero-forcing reference: the radar beam lives in the orthogonal complement
/// of the uplink channel. Needs N >= 2 and non-parallel channels; when the
/// zero-forcing radar power exceeds the budget it defers to grid_oracle.
ZfOracleResult zf_oracle(const ComplexVector& uplink, const ComplexVector& echo,
                         double threshold, const SystemConfig& cfg);

/// True when the channels satisfy zf_oracle's preconditions.
bool zf_applicable(const ComplexVector& uplink, const ComplexVector& echo);

/// Brute-force search over radar power and radar direction within
/// span{g, h}, with the data beam matched to h and given the remaining
/// power. Returns -infinity when no grid point meets the sensing floor.
double grid_oracle(const ComplexVector& uplink, const ComplexVector& echo, double threshold,
                   const SystemConfig& cfg, int resolution = 64, int refinement_passes = 1);

}  // namespace isac_edge
