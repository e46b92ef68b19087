#pragma once

#include "cfpc/linalg.hpp"
#include "cfpc/rng.hpp"
#include "cfpc/scenario.hpp"
#include "cfpc/types.hpp"

namespace cfpc {

// Orthogonal pilot sequences (rows of a scaled DFT matrix) and the
// round-robin UE-to-pilot assignment.
struct PilotBook {
  int tau_p = 0;
  std::vector<CVec> seq;       // tau_p sequences, each of length tau_p, unit norm
  std::vector<int> assignment; // K entries: UE k uses seq[assignment[k]]
};

PilotBook assign_pilots(const SystemConfig& cfg);

// Linear MMSE channel estimates plus the analytic per-link error.
struct ChannelEstimateSet {
  std::vector<std::vector<CVec>> hhat;   // K x M x L
  std::vector<std::vector<double>> mse;  // K x M: E ||h - hhat||^2
};

// Covariance of one Ricean link: alpha/(1+beta) * (beta v v^H + I).
CMat spatial_covariance(double alpha, double beta, double theta, int num_antennas);

ChannelEstimateSet estimate_channels(const ChannelRealization& ch, const LargeScaleState& ls,
                                     const PilotBook& pilots, const SystemConfig& cfg, Rng& rng);

} // namespace cfpc
