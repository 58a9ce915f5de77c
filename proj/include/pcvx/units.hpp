// Power unit conversions shared by the channel and environment code.
// All link budgets are computed in linear milliwatts and dimensionless
// linear power gains; dB/dBm appear only at the configuration boundary.
#pragma once

#include <cmath>

namespace pcvx {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

// Thermal noise floor over a bandwidth, -174 dBm/Hz plus receiver noise figure.
inline double thermal_noise_dbm(double bandwidth_hz, double noise_figure_db) {
  return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

inline double kmh_to_mps(double kmh) { return kmh / 3.6; }

}  // namespace pcvx
