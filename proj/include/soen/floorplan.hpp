#pragma once

#include <cstdint>
#include <functional>

#include "soen/errors.hpp"
#include "soen/units.hpp"

// Geometry and power arithmetic for fully connected layers of neurons.

namespace soen {

struct FloorplanParams {
  double l_tap_um = 10.0;         // one tap (synapse)
  double l_gap_um = 5.0;          // gap between vertically running waveguides
  double l_cross_um = 3.0;        // intralayer waveguide crossing
  double l_interlayer_um = 10.0;  // coupler between waveguide planes
  double wg_pitch_nm = 600.0;     // minimum inter-waveguide gap
  std::uint64_t n_neurons = 700;
  std::uint64_t n_wg_planes = 10;
  double die_edge_cm = 10.0;

  void validate() const {
    if (!(l_tap_um > 0 && l_gap_um > 0 && l_cross_um > 0 && l_interlayer_um > 0 && wg_pitch_nm > 0 &&
          die_edge_cm > 0 && n_neurons >= 1 && n_wg_planes >= 1))
      throw DomainError("floorplan parameters must be positive");
  }

  double neuron_length_um() const { return wg_pitch_nm * 1e-3 * static_cast<double>(n_neurons); }
};

// L = (L_t + L_g + L_x) N_n / N_wg + 2 L_wg N_wg + L_n, with L_n = pitch * N_n.
inline double layer_length_um(const FloorplanParams& p) {
  p.validate();
  const auto n = static_cast<double>(p.n_neurons);
  const auto planes = static_cast<double>(p.n_wg_planes);
  return (p.l_tap_um + p.l_gap_um + p.l_cross_um) * n / planes + 2.0 * p.l_interlayer_um * planes +
         p.neuron_length_um();
}

// Layer width as a function of the layout parameters.
using WidthModel = std::function<double(const FloorplanParams&)>;

// Every neuron receives one waveguide from each of the N_n neurons upstream,
// laid at the minimum pitch and shared across the planes: W = pitch N_n^2 / N_wg.
inline double fully_connected_width_um(const FloorplanParams& p) {
  const auto n = static_cast<double>(p.n_neurons);
  return p.wg_pitch_nm * 1e-3 * n * n / static_cast<double>(p.n_wg_planes);
}

// Neurons per cm^2 for a fully connected layer (connections per neuron = N_n).
inline double neuron_density_per_cm2(const FloorplanParams& p, const WidthModel& width = fully_connected_width_um) {
  const double area_um2 = layer_length_um(p) * width(p);
  return static_cast<double>(p.n_neurons) / units::um2_to_cm2(area_um2);
}

struct PowerParams {
  double e_synapse_aj = 20.0;
  double n_conn = 700.0;
  double rate_hz = 2e4;
  double n_units = 7e9;
  double cooling_w_per_w = 1000.0;

  void validate() const {
    if (!(e_synapse_aj > 0 && n_conn > 0 && rate_hz > 0 && n_units > 0 && cooling_w_per_w > 0))
      throw DomainError("power parameters must be positive");
  }
};

struct PowerReport {
  double events_per_s = 0.0;
  double device_w = 0.0;
  double wall_w = 0.0;
  double events_per_s_per_w_device = 0.0;
  double events_per_s_per_w_wall = 0.0;
};

inline PowerReport system_power(const PowerParams& p) {
  p.validate();
  PowerReport r;
  r.events_per_s = p.n_units * p.n_conn * p.rate_hz;
  r.device_w = r.events_per_s * units::aj_to_j(p.e_synapse_aj);
  r.wall_w = r.device_w * p.cooling_w_per_w;
  r.events_per_s_per_w_device = r.events_per_s / r.device_w;
  r.events_per_s_per_w_wall = r.events_per_s / r.wall_w;
  return r;
}

// Biological reference: synapse events per second per watt of total power.
struct BrainParams {
  double neurons = 1e11;
  double synapses_per_neuron = 7e3;
  double rate_hz = 1.0;
  double total_power_w = 100.0;
};

inline double brain_events_per_s_per_w(const BrainParams& b) {
  if (!(b.neurons > 0 && b.synapses_per_neuron > 0 && b.rate_hz > 0 && b.total_power_w > 0))
    throw DomainError("brain parameters must be positive");
  return b.neurons * b.synapses_per_neuron * b.rate_hz / b.total_power_w;
}

// The 1 m^3 system: 7e9 units of 700 connections at 20 kHz and 20 aJ.
inline PowerParams meter_cube_system() { return PowerParams{}; }

}  // namespace soen
