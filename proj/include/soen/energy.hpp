#pragma once

#include <optional>

#include "soen/emitter.hpp"
#include "soen/errors.hpp"
#include "soen/units.hpp"

// Energy of one firing event: current into the superconducting inductors,
// charge on the LED junction capacitor, and the photons themselves.

namespace soen {

struct EnergyModel {
  double sheet_inductance_ph_per_sq = 400.0;
  double squares_per_element = 500.0;  // one PND element per emitted photon
  double series_squares = 5000.0;      // series inductor of the whole receiver
  double eg_aj = units::j_to_aj(units::ev_to_j(units::si_band_gap_ev));
  double efficiency = 0.01;
  // Current carried by every inductive square. Defaults to the detector wire
  // critical current; this is the calibration constant of the model.
  double i_wire_ua = 4.0;
  LedJunction junction{};      // capacitance, and the I-V law for the LED voltage
  double window_ns = 50.0;     // emission window used to find the LED voltage
  std::optional<double> v_led; // overrides the operating-point voltage

  void validate() const {
    if (!(sheet_inductance_ph_per_sq > 0 && squares_per_element > 0 && series_squares > 0 && eg_aj > 0 &&
          efficiency > 0 && i_wire_ua > 0 && window_ns > 0))
      throw DomainError("energy model parameters must be positive");
    if (efficiency > 1.0) throw DomainError("LED efficiency cannot exceed 1");
  }
};

struct EnergyBreakdown {
  double inductive_aj = 0.0;
  double capacitive_aj = 0.0;
  double photonic_aj = 0.0;
};

struct EventEnergy {
  double total_aj = 0.0;
  EnergyBreakdown breakdown;
  double per_photon_aj = 0.0;
  double v_led = 0.0;
};

// LED voltage needed to emit n_photons within the window at the model's
// efficiency.
inline double led_voltage_for(const EnergyModel& m, double n_photons) {
  if (m.v_led) return *m.v_led;
  LedJunction j = m.junction;
  j.efficiency = m.efficiency;
  const double current_a = n_photons * units::elementary_charge / (m.efficiency * units::ns_to_s(m.window_ns));
  return diode_voltage(j, units::a_to_ua(current_a));
}

inline EventEnergy energy_per_event(const EnergyModel& m, std::uint64_t n_photons) {
  m.validate();
  if (n_photons < 1) throw DomainError("a firing event emits at least one photon");
  const auto n = static_cast<double>(n_photons);

  EventEnergy e;
  const double squares = m.series_squares + n * m.squares_per_element;
  const double l_h = squares * m.sheet_inductance_ph_per_sq * units::pico;
  const double i_a = units::ua_to_a(m.i_wire_ua);
  e.breakdown.inductive_aj = units::j_to_aj(0.5 * l_h * i_a * i_a);

  e.v_led = led_voltage_for(m, n);
  e.breakdown.capacitive_aj = units::j_to_aj(capacitor_energy_j(m.junction, e.v_led));

  e.breakdown.photonic_aj = m.eg_aj * n / m.efficiency;

  e.total_aj = e.breakdown.inductive_aj + e.breakdown.capacitive_aj + e.breakdown.photonic_aj;
  e.per_photon_aj = e.total_aj / n;
  return e;
}

// Energy drawn at the wall for one synapse event, in aJ, given the cryogenic
// overhead in watts of cooling per watt dissipated.
inline double wall_energy_aj(double synapse_energy_aj, double cooling_w_per_w = 1000.0) {
  if (cooling_w_per_w < 1.0) throw DomainError("cooling factor must be at least 1");
  return synapse_energy_aj * cooling_w_per_w;
}

inline double wall_power(const EnergyModel& m, std::uint64_t n_photons, double cooling_w_per_w = 1000.0) {
  return wall_energy_aj(energy_per_event(m, n_photons).per_photon_aj, cooling_w_per_w);
}

}  // namespace soen
