#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

#include "soen/detector.hpp"
#include "soen/errors.hpp"
#include "soen/random.hpp"
#include "soen/units.hpp"

// Light-emitting p-n junction driven in parallel with a nanowire receiver.

namespace soen {

struct LedJunction {
  double mobility_n_cm2_vs = 100.0;
  double mobility_p_cm2_vs = 100.0;
  double lifetime_n_ns = 40.0;
  double lifetime_p_ns = 40.0;
  double doping_n_cm3 = 1e19;  // donor density N_D on the n side
  double doping_p_cm3 = 1e19;  // acceptor density N_A on the p side
  double area_um2 = 1.0;       // 10 um x 100 nm
  double temperature_k = 300.0;
  double efficiency = 0.01;
  double cap_epsilon_rel = 12.0;
  double cap_area_um2 = 1.0;
  double cap_gap_nm = 300.0;
  double voltage_clamp_v = 1.5;

  void validate() const {
    const bool positive = mobility_n_cm2_vs > 0 && mobility_p_cm2_vs > 0 && lifetime_n_ns > 0 && lifetime_p_ns > 0 &&
                          doping_n_cm3 > 0 && doping_p_cm3 > 0 && area_um2 > 0 && temperature_k > 0 &&
                          efficiency > 0 && cap_epsilon_rel > 0 && cap_area_um2 > 0 && cap_gap_nm > 0 &&
                          voltage_clamp_v > 0;
    if (!positive) throw DomainError("LED parameters must be strictly positive");
    if (efficiency > 1.0) throw DomainError("LED efficiency cannot exceed 1");
  }

  double thermal_voltage_v() const { return units::boltzmann * temperature_k / units::elementary_charge; }

  // Einstein relation D = mu kT/e, cm^2/s.
  double diffusion_n_cm2_s() const { return mobility_n_cm2_vs * thermal_voltage_v(); }
  double diffusion_p_cm2_s() const { return mobility_p_cm2_vs * thermal_voltage_v(); }

  // Minority densities from the mass-action law, cm^-3.
  double electrons_on_p_side_cm3() const {
    return units::si_intrinsic_density_cm3 * units::si_intrinsic_density_cm3 / doping_p_cm3;
  }
  double holes_on_n_side_cm3() const {
    return units::si_intrinsic_density_cm3 * units::si_intrinsic_density_cm3 / doping_n_cm3;
  }

  // Reverse saturation current e A (sqrt(D_p/tau_p) p_n + sqrt(D_n/tau_n) n_p), amperes.
  double saturation_current_a() const {
    const double tau_p = units::ns_to_s(lifetime_p_ns);
    const double tau_n = units::ns_to_s(lifetime_n_ns);
    const double flux_cm2_s = std::sqrt(diffusion_p_cm2_s() / tau_p) * holes_on_n_side_cm3() +
                              std::sqrt(diffusion_n_cm2_s() / tau_n) * electrons_on_p_side_cm3();
    return units::elementary_charge * units::um2_to_cm2(area_um2) * flux_cm2_s;
  }
};

inline void check_voltage(const LedJunction& j, double v) {
  if (!std::isfinite(v)) throw DomainError("LED voltage must be finite");
  if (v > j.voltage_clamp_v) throw DomainError("LED voltage above the configured clamp");
}

// Junction current in uA at forward voltage v.
inline double diode_current_ua(const LedJunction& j, double v) {
  check_voltage(j, v);
  return units::a_to_ua(j.saturation_current_a() * std::expm1(v / j.thermal_voltage_v()));
}

// Inverse of diode_current_ua for currents above -I_sat.
inline double diode_voltage(const LedJunction& j, double current_ua) {
  const double ratio = units::ua_to_a(current_ua) / j.saturation_current_a();
  if (!(ratio > -1.0)) throw DomainError("diode current below the reverse saturation limit");
  const double v = j.thermal_voltage_v() * std::log1p(ratio);
  check_voltage(j, v);
  return v;
}

// Emitted photons per second at forward voltage v.
inline double photon_current_per_s(const LedJunction& j, double v) {
  return j.efficiency * units::ua_to_a(diode_current_ua(j, v)) / units::elementary_charge;
}

// Parallel-plate junction capacitance, farads.
inline double junction_capacitance_f(const LedJunction& j) {
  return j.cap_epsilon_rel * units::vacuum_permittivity * units::um2_to_m2(j.cap_area_um2) / units::nm_to_m(j.cap_gap_nm);
}

inline double capacitor_energy_j(const LedJunction& j, double v) { return 0.5 * junction_capacitance_f(j) * v * v; }

struct OperatingPoint {
  double v = 0.0;         // volts across both branches
  double i_led_ua = 0.0;  // current through the LED
};

// Splits the bias between the SND (resistance R) and the LED in parallel:
// I_b = V / R + I_pn(V). The residual is strictly decreasing in V, so the
// root is bracketed by [0, min(I_b R, V where I_pn = I_b)].
inline OperatingPoint operating_point(double resistance_kohm, const LedJunction& j, double i_bias_ua) {
  j.validate();
  if (resistance_kohm < 0.0) throw DomainError("negative receiver resistance");
  if (!(i_bias_ua > 0.0)) throw DomainError("bias must be positive");
  if (resistance_kohm == 0.0) return {};

  const double r_ohm = units::kohm_to_ohm(resistance_kohm);
  const double i_b = units::ua_to_a(i_bias_ua);
  const double i_sat = j.saturation_current_a();
  const double vt = j.thermal_voltage_v();
  const double v_diode_only = vt * std::log1p(i_b / i_sat);
  const double v_hi = std::min(i_b * r_ohm, v_diode_only);
  if (v_hi > j.voltage_clamp_v) throw DomainError("operating point above the LED voltage clamp");

  auto residual = [&](double v) { return i_b - v / r_ohm - i_sat * std::expm1(v / vt); };
  double v = v_hi;
  if (residual(v_hi) < 0.0) {
    std::uintmax_t max_iter = 200;
    const auto [lo, hi] = boost::math::tools::toms748_solve(residual, 0.0, v_hi, i_b, residual(v_hi),
                                                            boost::math::tools::eps_tolerance<double>(52), max_iter);
    if (max_iter >= 200) throw InternalError("operating-point solver did not converge");
    v = 0.5 * (lo + hi);
  }
  const OperatingPoint op{v, units::a_to_ua(i_sat * std::expm1(v / vt))};
  if (std::abs(residual(op.v)) >= 1e-6 * i_b) throw InternalError("operating-point residual above tolerance");
  return op;
}

inline OperatingPoint snd_led_operating_point(const SndWire& wire, const LedJunction& j, const BiasPoint& bias) {
  return operating_point(snd_resistance_kohm(wire), j, bias.i_bias_ua);
}

enum class EmissionMode { deterministic, poisson };

struct EmittedPhotons {
  double expected = 0.0;   // mean photon number
  std::uint64_t count = 0; // floor of the mean, or a Poisson draw
};

// Photons for an LED carrying current i_led_ua for pulse_ns nanoseconds.
inline double expected_photons(const LedJunction& j, double i_led_ua, double pulse_ns) {
  return j.efficiency * units::ua_to_a(i_led_ua) / units::elementary_charge * units::ns_to_s(pulse_ns);
}

inline std::uint64_t emission_count(double expected, EmissionMode mode, std::uint64_t seed) {
  if (mode == EmissionMode::deterministic || expected <= 0.0) return static_cast<std::uint64_t>(std::floor(expected));
  auto engine = random::stream(seed);
  std::poisson_distribution<std::uint64_t> poisson(expected);
  return poisson(engine);
}

inline EmittedPhotons photons_emitted(const SndWire& wire, const LedJunction& j, const BiasPoint& bias,
                                      double pulse_ns, EmissionMode mode = EmissionMode::deterministic,
                                      std::uint64_t seed = 0) {
  if (!(pulse_ns > 0.0)) throw DomainError("pulse duration must be positive");
  const auto op = snd_led_operating_point(wire, j, bias);
  const double expected = expected_photons(j, op.i_led_ua, pulse_ns);
  return {expected, emission_count(expected, mode, seed)};
}

// Mean photons-out for photons-in along an increasing grid of input pulse
// sizes. Each realization absorbs photons cumulatively, so every realization
// is monotone in the input.
struct TransferPoint {
  std::uint64_t photons_in;
  double resistance_kohm;  // averaged over realizations
  double photons_out;      // mean expected photons
};

inline std::vector<TransferPoint> snd_transfer_curve(const SndWire& wire, const LedJunction& j, const BiasPoint& bias,
                                                     double pulse_ns, const std::vector<std::uint64_t>& photons_in,
                                                     std::uint64_t realizations, std::uint64_t seed,
                                                     unsigned workers = 1) {
  wire.validate();
  if (realizations < 1) throw DomainError("need at least one realization");
  if (!std::is_sorted(photons_in.begin(), photons_in.end())) throw DomainError("transfer grid must be nondecreasing");
  snd_led_operating_point(wire, j, bias);  // surfaces parameter errors before the workers start
  const auto runs = random::parallel_map(realizations, workers, [&](std::uint64_t r) {
    std::vector<std::pair<double, double>> row;
    row.reserve(photons_in.size());
    SndWire w = wire;
    std::uint64_t delivered = 0;
    for (std::size_t i = 0; i < photons_in.size(); ++i) {
      auto engine = random::stream(seed, r, i);
      snd_absorb_into(w, photons_in[i] - delivered, engine);
      delivered = photons_in[i];
      const auto op = snd_led_operating_point(w, j, bias);
      row.emplace_back(snd_resistance_kohm(w), expected_photons(j, op.i_led_ua, pulse_ns));
    }
    return row;
  });
  std::vector<TransferPoint> curve(photons_in.size());
  for (std::size_t i = 0; i < photons_in.size(); ++i) {
    double r_sum = 0.0;
    double out_sum = 0.0;
    for (const auto& run : runs) {
      r_sum += run[i].first;
      out_sum += run[i].second;
    }
    const auto n = static_cast<double>(realizations);
    curve[i] = {photons_in[i], r_sum / n, out_sum / n};
  }
  return curve;
}

}  // namespace soen
