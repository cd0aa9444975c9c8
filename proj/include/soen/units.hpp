#pragma once

// Physical constants and unit conversions.
//
// Public structs carry quantities in the units named by their field suffix
// (_ua = microampere, _um = micrometre, _nm = nanometre, _ns = nanosecond,
// _kohm = kiloohm, _aj = attojoule). Arithmetic is done in SI after
// converting with the factors below.

namespace soen::units {

inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double boltzmann = 1.380649e-23;             // J/K
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double planck = 6.62607015e-34;                 // J s
inline constexpr double speed_of_light = 2.99792458e8;           // m/s

// Intrinsic carrier density of silicon at 300 K, cm^-3.
inline constexpr double si_intrinsic_density_cm3 = 1.0e10;
// Silicon band gap, eV.
inline constexpr double si_band_gap_ev = 1.12;

inline constexpr double micro = 1e-6;
inline constexpr double nano = 1e-9;
inline constexpr double pico = 1e-12;
inline constexpr double atto = 1e-18;
inline constexpr double kilo = 1e3;

inline constexpr double ua_to_a(double ua) { return ua * micro; }
inline constexpr double a_to_ua(double a) { return a / micro; }
inline constexpr double ns_to_s(double ns) { return ns * nano; }
inline constexpr double um_to_m(double um) { return um * micro; }
inline constexpr double nm_to_m(double nm) { return nm * nano; }
inline constexpr double um2_to_m2(double um2) { return um2 * micro * micro; }
inline constexpr double um2_to_cm2(double um2) { return um2 * 1e-8; }
inline constexpr double kohm_to_ohm(double kohm) { return kohm * kilo; }
inline constexpr double j_to_aj(double j) { return j / atto; }
inline constexpr double aj_to_j(double aj) { return aj * atto; }
inline constexpr double ev_to_j(double ev) { return ev * elementary_charge; }

// Photon energy h*c/lambda for a wavelength in micrometres, in attojoules.
inline constexpr double photon_energy_aj(double wavelength_um) {
  return j_to_aj(planck * speed_of_light / um_to_m(wavelength_um));
}

}  // namespace soen::units
