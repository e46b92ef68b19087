#pragma once

#include <vector>

#include "cfpc/types.hpp"

namespace cfpc {

// Robust per-feature input scaling: x' = (x - median) / IQR, quartiles by
// linear interpolation between order statistics. Features with zero IQR are
// centered only and flagged.
struct InputNormalizer {
  RVec median;
  RVec iqr;
  std::vector<bool> passthrough; // true where IQR was zero

  RVec apply(const RVec& x) const;
};

InputNormalizer fit_input_normalizer(const std::vector<RVec>& rows);

// Output scaling for power labels: convert W to dBm with a floor, then
// min-max to [0, 1] per feature.
struct OutputNormalizer {
  double floor_dbm = -80.0;
  RVec min_db;
  RVec max_db;

  RVec apply(const RVec& y_w) const;
  RVec invert(const RVec& y_scaled) const;
};

OutputNormalizer fit_output_normalizer(const std::vector<RVec>& rows_w, double floor_dbm = -80.0);

// Quantile of a sample by linear interpolation (p in [0,1]); sorts a copy.
double interpolated_quantile(RVec values, double p);

} // namespace cfpc
