#include "cfpc/normalizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cfpc {

double interpolated_quantile(RVec values, double p) {
  if (values.empty()) throw std::invalid_argument("interpolated_quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const size_t lo = static_cast<size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

RVec InputNormalizer::apply(const RVec& x) const {
  if (x.size() != median.size())
    throw std::invalid_argument("InputNormalizer: feature dimension mismatch");
  RVec out(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double centered = x[i] - median[i];
    out[i] = passthrough[i] ? centered : centered / iqr[i];
  }
  return out;
}

InputNormalizer fit_input_normalizer(const std::vector<RVec>& rows) {
  if (rows.empty()) throw std::invalid_argument("fit_input_normalizer: no rows");
  const size_t dim = rows.front().size();
  InputNormalizer nrm;
  nrm.median.resize(dim);
  nrm.iqr.resize(dim);
  nrm.passthrough.assign(dim, false);
  RVec column(rows.size());
  for (size_t f = 0; f < dim; ++f) {
    for (size_t r = 0; r < rows.size(); ++r) column[r] = rows[r][f];
    nrm.median[f] = interpolated_quantile(column, 0.5);
    const double q1 = interpolated_quantile(column, 0.25);
    const double q3 = interpolated_quantile(column, 0.75);
    nrm.iqr[f] = q3 - q1;
    // An IQR that is zero -- or lost in rounding next to the quartiles themselves --
    // would turn the scaling into a divide-by-noise; such features are only centered.
    if (!(nrm.iqr[f] > 1e-12 * std::max(std::abs(q1), std::abs(q3)))) {
      nrm.iqr[f] = 1.0;
      nrm.passthrough[f] = true;
    }
  }
  return nrm;
}

RVec OutputNormalizer::apply(const RVec& y_w) const {
  if (y_w.size() != min_db.size())
    throw std::invalid_argument("OutputNormalizer: feature dimension mismatch");
  RVec out(y_w.size());
  for (size_t i = 0; i < y_w.size(); ++i) {
    const double dbm = std::max(w_to_dbm(y_w[i]), floor_dbm);
    out[i] = (dbm - min_db[i]) / (max_db[i] - min_db[i]);
  }
  return out;
}

RVec OutputNormalizer::invert(const RVec& y_scaled) const {
  if (y_scaled.size() != min_db.size())
    throw std::invalid_argument("OutputNormalizer: feature dimension mismatch");
  RVec out(y_scaled.size());
  for (size_t i = 0; i < y_scaled.size(); ++i) {
    // The minmax map was fitted on the label range; outside [0,1] the dB-domain
    // inverse extrapolates exponentially, so predictions are pinned to that range.
    const double y = std::min(std::max(y_scaled[i], 0.0), 1.0);
    const double dbm = min_db[i] + y * (max_db[i] - min_db[i]);
    out[i] = dbm_to_w(dbm);
  }
  return out;
}

OutputNormalizer fit_output_normalizer(const std::vector<RVec>& rows_w, double floor_dbm) {
  if (rows_w.empty()) throw std::invalid_argument("fit_output_normalizer: no rows");
  const size_t dim = rows_w.front().size();
  OutputNormalizer nrm;
  nrm.floor_dbm = floor_dbm;
  nrm.min_db.assign(dim, 0.0);
  nrm.max_db.assign(dim, 0.0);
  for (size_t f = 0; f < dim; ++f) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& row : rows_w) {
      const double dbm = std::max(w_to_dbm(row[f]), floor_dbm);
      lo = std::min(lo, dbm);
      hi = std::max(hi, dbm);
    }
    if (!(hi > lo)) hi = lo + 1e-9; // constant feature: keep the map invertible
    nrm.min_db[f] = lo;
    nrm.max_db[f] = hi;
  }
  return nrm;
}

} // namespace cfpc
