#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

// Unit conversions and physical constants. Everything downstream of config
// ingestion works in SI base units (Hz, W, m, s, Np); engineering units
// (dB, dBm, km, ps/nm/km, ...) appear only here and in report emission.

namespace raman {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

inline double db_to_linear(double x_db) {
  return std::pow(10.0, x_db / 10.0);
}

inline double linear_to_db(double ratio) {
  if (!(ratio > 0.0))
    throw std::domain_error("linear_to_db: ratio must be > 0");
  return 10.0 * std::log10(ratio);
}

inline double dbm_to_watt(double x_dbm) {
  return std::pow(10.0, (x_dbm - 30.0) / 10.0);
}

inline double watt_to_dbm(double p_w) {
  if (!(p_w > 0.0))
    throw std::domain_error("watt_to_dbm: power must be > 0");
  return 10.0 * std::log10(p_w) + 30.0;
}

// dB/km -> Np/m
inline double attenuation_np_per_m(double a_db_per_km) {
  if (a_db_per_km < 0.0)
    throw std::domain_error("attenuation_np_per_m: negative attenuation");
  return a_db_per_km * std::log(10.0) / 10.0 / 1000.0;
}

// Dispersion coefficient D [s/m^2] and slope S [s/m^3] at wavelength
// lambda [m] -> (beta2 [s^2/m], beta3 [s^3/m]).
inline std::pair<double, double> dispersion_params(double d, double s, double lambda) {
  if (!(lambda > 0.0))
    throw std::domain_error("dispersion_params: lambda must be > 0");
  const double two_pi_c = 2.0 * kPi * kSpeedOfLight;
  const double beta2 = -d * lambda * lambda / two_pi_c;
  const double beta3 = (2.0 * d + lambda * s) * lambda * lambda * lambda / (two_pi_c * two_pi_c);
  return {beta2, beta3};
}

// Engineering-unit helpers used by config ingestion.
inline double ps_nm_km_to_si(double d) { return d * 1e-6; }          // s/m^2
inline double ps_nm2_km_to_si(double s) { return s * 1e3; }          // s/m^3
inline double per_w_km_to_si(double g) { return g * 1e-3; }          // 1/(W m)
inline double per_w_km_thz_to_si(double cr) { return cr * 1e-15; }   // 1/(W m Hz)

}  // namespace raman
