#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfpc {

using cdouble = std::complex<double>;
using CVec = std::vector<cdouble>;
using RVec = std::vector<double>;

inline double dbm_to_w(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
inline double w_to_dbm(double w) { return 10.0 * std::log10(w * 1e3); }
inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }

inline constexpr double kSpeedOfLight = 299792458.0; // m/s

enum class Direction { Downlink, Uplink };
enum class EvalMode { Estimated, TrueChannel };
enum class BeamformerKind { ConjugateBeamforming, RegularizedZeroForcing };

// One absorption constraint on an exposed body part: epsilon = coeff * q <= limit.
struct SarConstraint {
  double coeff_per_kg = 8.0;    // specific absorption per transmit watt [1/kg]
  double limit_w_per_kg = 0.08; // regulatory cap [W/kg]
};

// Physical-layer and deployment parameters shared by every module.
//
// Power-related fields are stored in linear units (W); helpers derive the
// noise variances from the configured spectral density when left at zero.
struct SystemConfig {
  int num_ues = 8;         // K
  int num_aps = 16;        // M
  int antennas_per_ap = 4; // L
  int cluster_size = 5;    // N: APs serving each UE

  double area_side_m = 707.1067811865476; // torus side (0.5 km^2)
  double ap_height_m = 10.0;
  double ue_height_m = 1.65;
  double min_ue_ap_dist_m = 10.0; // smallest admissible 2-D UE-AP distance

  double carrier_freq_ghz = 3.5;
  double bandwidth_hz = 20e6;
  double noise_psd_dbm_per_hz = -174.0;
  double noise_var_w = 0.0;       // sigma^2 (data); 0 => noise_psd * bandwidth
  double pilot_noise_var_w = 0.0; // eta^2 (pilot); 0 => noise_psd * bandwidth

  double ap_power_w = dbm_to_w(23.0);        // P_m, per-AP budget
  double ue_power_w = dbm_to_w(20.0);        // Q_k, per-UE transmit cap
  std::vector<double> pilot_power_w;         // mu_k; empty => uniform 20 dBm

  int frame_len = 200; // coherence block length tau_c (samples)
  int pilot_len = 0;   // tau_p; 0 => K/2
  int dl_len = 0;      // tau_d; 0 => (tau_c - tau_p)/2
  int ul_len = 0;      // tau_u; 0 => (tau_c - tau_p)/2

  double ipd_limit_w_m2 = 10.0; // incident power density cap per UE
  std::vector<SarConstraint> sar = {SarConstraint{}};

  double shadowing_std_db = 4.0;
  double plos_cap = 0.99; // upper clamp on the LoS probability

  double wavelength_m() const { return kSpeedOfLight / (carrier_freq_ghz * 1e9); }
  double sigma2() const {
    return noise_var_w > 0.0 ? noise_var_w : dbm_to_w(noise_psd_dbm_per_hz) * bandwidth_hz;
  }
  double eta2() const {
    return pilot_noise_var_w > 0.0 ? pilot_noise_var_w
                                   : dbm_to_w(noise_psd_dbm_per_hz) * bandwidth_hz;
  }
  int tau_p() const { return pilot_len > 0 ? pilot_len : num_ues / 2; }
  int tau_d() const { return dl_len > 0 ? dl_len : (frame_len - tau_p()) / 2; }
  int tau_u() const { return ul_len > 0 ? ul_len : (frame_len - tau_p()) / 2; }
  double prelog(Direction dir) const {
    return (dir == Direction::Downlink ? double(tau_d()) : double(tau_u())) / double(frame_len);
  }
  double pilot_power(int k) const {
    if (pilot_power_w.empty()) return dbm_to_w(20.0);
    return pilot_power_w.at(static_cast<size_t>(k));
  }
  // Tightest UL power cap: transmit limit and every absorption constraint.
  double ue_cap_w() const {
    double cap = ue_power_w;
    for (const auto& s : sar) cap = std::min(cap, s.limit_w_per_kg / s.coeff_per_kg);
    return cap;
  }

  void validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("SystemConfig: " + msg); };
    if (num_ues < 1) fail("num_ues must be >= 1");
    if (num_aps < 1) fail("num_aps must be >= 1");
    if (antennas_per_ap < 1) fail("antennas_per_ap must be >= 1");
    if (cluster_size < 1 || cluster_size > num_aps) fail("cluster_size must lie in [1, num_aps]");
    if (area_side_m <= 0.0) fail("area_side_m must be positive");
    if (min_ue_ap_dist_m < 0.0 || min_ue_ap_dist_m >= area_side_m / 2.0)
      fail("min_ue_ap_dist_m must lie in [0, area_side_m/2)");
    if (carrier_freq_ghz <= 0.0) fail("carrier_freq_ghz must be positive");
    if (bandwidth_hz <= 0.0) fail("bandwidth_hz must be positive");
    if (sigma2() <= 0.0 || eta2() <= 0.0) fail("noise variances must be positive");
    if (ap_power_w <= 0.0 || ue_power_w <= 0.0) fail("power budgets must be positive");
    if (!pilot_power_w.empty() && static_cast<int>(pilot_power_w.size()) != num_ues)
      fail("pilot_power_w must have one entry per UE");
    for (int k = 0; k < num_ues; ++k)
      if (pilot_power(k) <= 0.0) fail("pilot powers must be positive");
    if (frame_len < 2) fail("frame_len must be >= 2");
    if (tau_p() < 1 || tau_p() > frame_len) fail("pilot_len must lie in [1, frame_len]");
    if (tau_d() < 1 || tau_u() < 1) fail("payload lengths must be positive");
    if (tau_p() + tau_d() + tau_u() > frame_len) fail("tau_p + tau_d + tau_u exceeds frame_len");
    if (ipd_limit_w_m2 <= 0.0) fail("ipd_limit_w_m2 must be positive");
    if (sar.empty()) fail("at least one absorption constraint is required");
    for (const auto& s : sar)
      if (s.coeff_per_kg <= 0.0 || s.limit_w_per_kg <= 0.0)
        fail("absorption coefficients and limits must be positive");
    if (shadowing_std_db < 0.0) fail("shadowing_std_db must be non-negative");
    if (plos_cap <= 0.0 || plos_cap >= 1.0) fail("plos_cap must lie in (0, 1)");
  }
};

} // namespace cfpc
