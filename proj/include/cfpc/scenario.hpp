#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "cfpc/rng.hpp"
#include "cfpc/types.hpp"

namespace cfpc {

// AP/UE geometry plus the user-centric association, fixed for one trial.
struct Deployment {
  std::vector<std::array<double, 3>> ap_pos; // M x (x, y, z)
  std::vector<double> ap_orient;             // M broadside orientations [rad]
  std::vector<std::array<double, 3>> ue_pos; // K x (x, y, z)
  std::vector<std::vector<int>> assoc;       // K x M, 0/1, row sums = N
  std::vector<std::vector<int>> cluster;     // K x N serving APs, ascending index
};

// Slow-fading state per UE-AP link; constant over a coherence block.
struct LargeScaleState {
  std::vector<std::vector<double>> alpha; // K x M channel gain (linear)
  std::vector<std::vector<double>> beta;  // K x M Ricean factor
  std::vector<std::vector<double>> theta; // K x M angle seen from the AP array
  std::vector<std::vector<double>> psi;   // K x M LoS phase
  std::vector<std::vector<double>> dist;  // K x M 3-D wrap-around distance [m]
};

// One small-scale realization: h[k][m] is an L-vector.
struct ChannelRealization {
  std::vector<std::vector<CVec>> h;
};

// Signed coordinate difference on a ring of circumference `side` (shortest
// wrap-around displacement, in [-side/2, side/2]).
double wrap_delta(double from, double to, double side);

// NLoS path loss in dB at distance `dist_m` for a carrier at `fc_ghz` GHz.
double path_loss_db(double dist_m, double fc_ghz);

// Line-of-sight probability before the configured cap is applied.
double prob_los(double dist_m);

// Uniform linear array response for angle theta, unit first element.
CVec steering_vector(double theta, int num_antennas);

// Draw AP/UE positions, large-scale gains, Ricean factors, angles and LoS
// phases, then associate each UE with its cluster_size strongest APs.
std::pair<Deployment, LargeScaleState> generate_deployment(const SystemConfig& cfg, uint64_t seed);

// Fresh LoS phases for a new coherence block (the rest of the large-scale
// state stays put).
void redraw_phases(LargeScaleState& ls, Rng& rng);

// One correlated Ricean small-scale realization on top of the large-scale
// state.
ChannelRealization draw_channels(const Deployment& dep, const LargeScaleState& ls,
                                 const SystemConfig& cfg, Rng& rng);
ChannelRealization draw_channels(const Deployment& dep, const LargeScaleState& ls,
                                 const SystemConfig& cfg, uint64_t seed);

} // namespace cfpc
