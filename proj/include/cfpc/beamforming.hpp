#pragma once

#include "cfpc/csi.hpp"
#include "cfpc/scenario.hpp"
#include "cfpc/types.hpp"

namespace cfpc {

// Per-link transmit precoders b (unit norm) and receive combiners f.
// Entries are only populated for associated (UE, AP) pairs.
struct BeamformerSet {
  BeamformerKind kind = BeamformerKind::ConjugateBeamforming;
  std::vector<std::vector<CVec>> b; // K x M x L
  std::vector<std::vector<CVec>> f; // K x M x L
};

// Matched precoding (b = hhat / ||hhat||) and matched combining (f = hhat).
BeamformerSet conjugate_beamformers(const ChannelEstimateSet& est, const Deployment& dep,
                                    const SystemConfig& cfg);

// Regularized zero-forcing combiners per AP, with matched precoders kept for
// the downlink. The regularized Gram matrix sums over all K UEs.
BeamformerSet rzf_combiners(const ChannelEstimateSet& est, const Deployment& dep,
                            const SystemConfig& cfg);

} // namespace cfpc
