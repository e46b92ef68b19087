#pragma once

#include "cfpc/metrics.hpp"
#include "cfpc/scenario.hpp"
#include "cfpc/types.hpp"

namespace cfpc {

// Fractional DL power control: p_{k,m} = P_m * alpha^kappa / sum over the
// UEs served by AP m. kappa = 0 is uniform power control; each AP spends its
// whole budget (unit-norm precoders assumed).
PowerAllocationDL fpc_dl(const LargeScaleState& ls, const Deployment& dep,
                         const SystemConfig& cfg, double kappa);

// Fractional UL power control on aggregate serving gains, followed by the
// EMF-compliant cap.
PowerAllocationUL fpc_ul(const LargeScaleState& ls, const Deployment& dep,
                         const SystemConfig& cfg, double kappa);

// Clamp every UE to the tightest absorption-derived power cap.
PowerAllocationUL emf_scale_ul(PowerAllocationUL q, const SystemConfig& cfg);

} // namespace cfpc
