#pragma once

#include <cmath>

namespace hcran::units {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

// Path loss in dB to a linear power gain.
inline double loss_db_to_gain(double loss_db) { return std::pow(10.0, -loss_db / 10.0); }

}  // namespace hcran::units
