#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "soen/detector.hpp"
#include "soen/emitter.hpp"
#include "soen/energy.hpp"
#include "soen/errors.hpp"
#include "soen/floorplan.hpp"
#include "soen/network.hpp"
#include "soen/neuron.hpp"
#include "soen/trace_io.hpp"

// Experiment configuration documents. Every document is resolved against the
// defaults of its command, checked key by key (unknown keys are rejected) and
// written back with every default made explicit, so normalize() is
// idempotent.

namespace soen::config {

using json = nlohmann::json;

// Strict view of one JSON object: every key must be consumed before finish().
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const json* child(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return nullptr;
    return &j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    const json* v = child(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(where(key) + " must be a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) throw ConfigError(where(key) + " must be finite");
    return d;
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    const json* v = child(key);
    if (!v) return fallback;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer()) {
      if (v->get<std::int64_t>() < 0) throw ConfigError(where(key) + " must be nonnegative");
      return static_cast<std::uint64_t>(v->get<std::int64_t>());
    }
    if (v->is_number_float()) {
      const double d = v->get<double>();
      if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw ConfigError(where(key) + " must be a nonnegative integer");
  }

  int integer(const std::string& key, int fallback) {
    const auto v = count(key, static_cast<std::uint64_t>(fallback));
    if (v > 0x7fffffffULL) throw ConfigError(where(key) + " is too large");
    return static_cast<int>(v);
  }

  bool flag(const std::string& key, bool fallback) {
    const json* v = child(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(where(key) + " must be a boolean");
    return v->get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const json* v = child(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(where(key) + " must be a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) {
    const json* v = child(key);
    if (!v) return fallback;
    if (!v->is_array()) throw ConfigError(where(key) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) throw ConfigError(where(key) + " must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::uint64_t> counts(const std::string& key, const std::vector<std::uint64_t>& fallback) {
    const json* v = child(key);
    if (!v) return fallback;
    if (!v->is_array()) throw ConfigError(where(key) + " must be an array of integers");
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      json wrapper = json::object({{"v", v->at(i)}});
      Reader r(wrapper, where(key) + "[" + std::to_string(i) + "]");
      out.push_back(r.count("v", 0));
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError("unknown key '" + where(it.key()) + "'");
  }

  std::string where(const std::string& key = "") const {
    if (key.empty()) return path_.empty() ? "document" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

// ---- device blocks ----

inline json to_json(const PndArray& a) {
  return {{"n_wires", a.n_wires}, {"i_c_wire_ua", a.i_c_wire_ua}, {"alpha", a.alpha}, {"n_passes", a.n_passes}};
}

inline PndArray pnd_from_json(const json& j, const std::string& path, const PndArray& d = PndArray{}) {
  Reader r(j, path);
  PndArray a;
  a.n_wires = r.integer("n_wires", d.n_wires);
  a.i_c_wire_ua = r.number("i_c_wire_ua", d.i_c_wire_ua);
  a.alpha = r.number("alpha", d.alpha);
  a.n_passes = r.integer("n_passes", d.n_passes);
  r.finish();
  a.validate();
  a.reset();
  return a;
}

inline json to_json(const SndWire& w) {
  return {{"wire_length_um", w.wire_length_um},
          {"hotspot_length_nm", w.hotspot_length_nm},
          {"hotspot_resistance_kohm", w.hotspot_resistance_kohm},
          {"attenuation_length_um", w.attenuation_length_um},
          {"i_c_ua", w.i_c_ua}};
}

inline SndWire snd_from_json(const json& j, const std::string& path) {
  Reader r(j, path);
  const SndWire d;
  SndWire w;
  w.wire_length_um = r.number("wire_length_um", d.wire_length_um);
  w.hotspot_length_nm = r.number("hotspot_length_nm", d.hotspot_length_nm);
  w.hotspot_resistance_kohm = r.number("hotspot_resistance_kohm", d.hotspot_resistance_kohm);
  w.attenuation_length_um = r.number("attenuation_length_um", d.attenuation_length_um);
  w.i_c_ua = r.number("i_c_ua", d.i_c_ua);
  r.finish();
  w.validate();
  return w;
}

inline json to_json(const LedJunction& l) {
  return {{"mobility_n_cm2_vs", l.mobility_n_cm2_vs},
          {"mobility_p_cm2_vs", l.mobility_p_cm2_vs},
          {"lifetime_n_ns", l.lifetime_n_ns},
          {"lifetime_p_ns", l.lifetime_p_ns},
          {"doping_n_cm3", l.doping_n_cm3},
          {"doping_p_cm3", l.doping_p_cm3},
          {"area_um2", l.area_um2},
          {"temperature_k", l.temperature_k},
          {"efficiency", l.efficiency},
          {"cap_epsilon_rel", l.cap_epsilon_rel},
          {"cap_area_um2", l.cap_area_um2},
          {"cap_gap_nm", l.cap_gap_nm},
          {"voltage_clamp_v", l.voltage_clamp_v}};
}

inline LedJunction led_from_json(const json& j, const std::string& path) {
  Reader r(j, path);
  const LedJunction d;
  LedJunction l;
  l.mobility_n_cm2_vs = r.number("mobility_n_cm2_vs", d.mobility_n_cm2_vs);
  l.mobility_p_cm2_vs = r.number("mobility_p_cm2_vs", d.mobility_p_cm2_vs);
  l.lifetime_n_ns = r.number("lifetime_n_ns", d.lifetime_n_ns);
  l.lifetime_p_ns = r.number("lifetime_p_ns", d.lifetime_p_ns);
  l.doping_n_cm3 = r.number("doping_n_cm3", d.doping_n_cm3);
  l.doping_p_cm3 = r.number("doping_p_cm3", d.doping_p_cm3);
  l.area_um2 = r.number("area_um2", d.area_um2);
  l.temperature_k = r.number("temperature_k", d.temperature_k);
  l.efficiency = r.number("efficiency", d.efficiency);
  l.cap_epsilon_rel = r.number("cap_epsilon_rel", d.cap_epsilon_rel);
  l.cap_area_um2 = r.number("cap_area_um2", d.cap_area_um2);
  l.cap_gap_nm = r.number("cap_gap_nm", d.cap_gap_nm);
  l.voltage_clamp_v = r.number("voltage_clamp_v", d.voltage_clamp_v);
  r.finish();
  l.validate();
  return l;
}

inline json to_json(const EnergyModel& m) {
  return {{"sheet_inductance_ph_per_sq", m.sheet_inductance_ph_per_sq},
          {"squares_per_element", m.squares_per_element},
          {"series_squares", m.series_squares},
          {"eg_aj", m.eg_aj},
          {"efficiency", m.efficiency},
          {"i_wire_ua", m.i_wire_ua},
          {"junction", to_json(m.junction)},
          {"window_ns", m.window_ns},
          {"v_led", m.v_led ? json(*m.v_led) : json(nullptr)}};
}

inline EnergyModel energy_from_json(const json& j, const std::string& path) {
  Reader r(j, path);
  const EnergyModel d;
  EnergyModel m;
  m.sheet_inductance_ph_per_sq = r.number("sheet_inductance_ph_per_sq", d.sheet_inductance_ph_per_sq);
  m.squares_per_element = r.number("squares_per_element", d.squares_per_element);
  m.series_squares = r.number("series_squares", d.series_squares);
  m.eg_aj = r.number("eg_aj", d.eg_aj);
  m.efficiency = r.number("efficiency", d.efficiency);
  m.i_wire_ua = r.number("i_wire_ua", d.i_wire_ua);
  if (const json* jn = r.child("junction")) m.junction = led_from_json(*jn, r.where("junction"));
  m.window_ns = r.number("window_ns", d.window_ns);
  if (r.has("v_led")) m.v_led = r.number("v_led", 0.0);
  else r.child("v_led");
  r.finish();
  m.validate();
  return m;
}

inline json to_json(const FloorplanParams& p) {
  return {{"l_tap_um", p.l_tap_um},
          {"l_gap_um", p.l_gap_um},
          {"l_cross_um", p.l_cross_um},
          {"l_interlayer_um", p.l_interlayer_um},
          {"wg_pitch_nm", p.wg_pitch_nm},
          {"n_neurons", p.n_neurons},
          {"n_wg_planes", p.n_wg_planes},
          {"die_edge_cm", p.die_edge_cm}};
}

inline FloorplanParams floorplan_from_json(const json& j, const std::string& path) {
  Reader r(j, path);
  const FloorplanParams d;
  FloorplanParams p;
  p.l_tap_um = r.number("l_tap_um", d.l_tap_um);
  p.l_gap_um = r.number("l_gap_um", d.l_gap_um);
  p.l_cross_um = r.number("l_cross_um", d.l_cross_um);
  p.l_interlayer_um = r.number("l_interlayer_um", d.l_interlayer_um);
  p.wg_pitch_nm = r.number("wg_pitch_nm", d.wg_pitch_nm);
  p.n_neurons = r.count("n_neurons", d.n_neurons);
  p.n_wg_planes = r.count("n_wg_planes", d.n_wg_planes);
  p.die_edge_cm = r.number("die_edge_cm", d.die_edge_cm);
  r.finish();
  p.validate();
  return p;
}

inline json to_json(const PowerParams& p) {
  return {{"e_synapse_aj", p.e_synapse_aj},
          {"n_conn", p.n_conn},
          {"rate_hz", p.rate_hz},
          {"n_units", p.n_units},
          {"cooling_w_per_w", p.cooling_w_per_w}};
}

inline PowerParams power_from_json(const json& j, const std::string& path) {
  Reader r(j, path);
  const PowerParams d;
  PowerParams p;
  p.e_synapse_aj = r.number("e_synapse_aj", d.e_synapse_aj);
  p.n_conn = r.number("n_conn", d.n_conn);
  p.rate_hz = r.number("rate_hz", d.rate_hz);
  p.n_units = r.number("n_units", d.n_units);
  p.cooling_w_per_w = r.number("cooling_w_per_w", d.cooling_w_per_w);
  r.finish();
  p.validate();
  return p;
}

inline json to_json(const BrainParams& b) {
  return {{"neurons", b.neurons},
          {"synapses_per_neuron", b.synapses_per_neuron},
          {"rate_hz", b.rate_hz},
          {"total_power_w", b.total_power_w}};
}

inline BrainParams brain_from_json(const json& j, const std::string& path) {
  Reader r(j, path);
  const BrainParams d;
  BrainParams b;
  b.neurons = r.number("neurons", d.neurons);
  b.synapses_per_neuron = r.number("synapses_per_neuron", d.synapses_per_neuron);
  b.rate_hz = r.number("rate_hz", d.rate_hz);
  b.total_power_w = r.number("total_power_w", d.total_power_w);
  r.finish();
  return b;
}

// ---- neurons and networks ----

inline std::string to_string(EmissionMode m) { return m == EmissionMode::poisson ? "poisson" : "deterministic"; }

inline EmissionMode emission_from_string(const std::string& s) {
  if (s == "deterministic") return EmissionMode::deterministic;
  if (s == "poisson") return EmissionMode::poisson;
  throw ConfigError("unknown emission mode '" + s + "'");
}

inline std::string to_string(Port p) { return p == Port::inhibit ? "inhibit" : "excite"; }

inline Port port_from_string(const std::string& s) {
  if (s == "excite") return Port::excite;
  if (s == "inhibit") return Port::inhibit;
  throw ConfigError("unknown port '" + s + "'");
}

inline double receiver_critical_current_ua(const NeuronSpec& s) {
  return s.has_pnd() ? s.pnd().critical_current_ua() : s.snd().i_c_ua;
}

inline double bias_fraction_of(const NeuronSpec& s) {
  if (s.bias_receiver.fraction_of_ic > 0.0) return s.bias_receiver.fraction_of_ic;
  return s.bias_receiver.i_bias_ua / receiver_critical_current_ua(s);
}

// The receiver bias is stored as a fraction of the receiver critical current.
inline json to_json(const NeuronSpec& s) {
  json receiver;
  if (s.has_pnd()) {
    receiver = to_json(s.pnd());
    receiver["type"] = "pnd";
  } else {
    receiver = to_json(s.snd());
    receiver["type"] = "snd";
  }
  json ntron = nullptr;
  if (s.ntron) ntron = {{"gate_threshold_ua", s.ntron->gate_threshold_ua}, {"drive_ua", s.ntron->drive.i_bias_ua}};
  return {{"variant", std::string(to_string(s.variant))},
          {"receiver", receiver},
          {"bias_fraction", bias_fraction_of(s)},
          {"ntron", ntron},
          {"emitter", to_json(s.emitter)},
          {"inhibitory_receiver", s.inhibitory_receiver ? to_json(*s.inhibitory_receiver) : json(nullptr)},
          {"feedback_tap_fraction", s.feedback_tap_fraction},
          {"upstream_tap_fraction", s.upstream_tap_fraction},
          {"feedback_quench_photons", s.feedback_quench_photons},
          {"feedback_integration_time_ns", s.feedback_integration_time_ns},
          {"integration_time_ns", s.integration_time_ns},
          {"refractory_period_ns", s.refractory_period_ns},
          {"emission_window_ns", s.emission_window_ns},
          {"emission", to_string(s.emission)}};
}

inline NeuronSpec neuron_from_json(const json& j, const std::string& path, const NeuronSpec& d = NeuronSpec{}) {
  Reader r(j, path);
  NeuronSpec s = d;
  s.variant = variant_from_string(r.text("variant", std::string(to_string(d.variant))));
  if (const json* rec = r.child("receiver")) {
    Reader rr(*rec, r.where("receiver"));
    const std::string type = rr.text("type", "pnd");
    json body = *rec;
    body.erase("type");
    if (type == "pnd")
      s.receiver = pnd_from_json(body, r.where("receiver"));
    else if (type == "snd")
      s.receiver = snd_from_json(body, r.where("receiver"));
    else
      throw ConfigError(r.where("receiver.type") + " must be 'pnd' or 'snd'");
  }
  const double fraction = r.number("bias_fraction", bias_fraction_of(d));
  s.bias_receiver = BiasPoint::fraction(fraction, receiver_critical_current_ua(s));
  s.ntron.reset();
  if (const json* nt = r.child("ntron")) {
    Reader nr(*nt, r.where("ntron"));
    NTron n;
    n.gate_threshold_ua = nr.number("gate_threshold_ua", 0.0);
    n.drive = BiasPoint{nr.number("drive_ua", 20.0), 0.0};
    nr.finish();
    s.ntron = n;
  } else if (!j.contains("ntron")) {
    s.ntron = d.ntron;
  }
  if (const json* e = r.child("emitter")) s.emitter = led_from_json(*e, r.where("emitter"));
  s.inhibitory_receiver.reset();
  if (const json* ir = r.child("inhibitory_receiver"))
    s.inhibitory_receiver = pnd_from_json(*ir, r.where("inhibitory_receiver"));
  else if (!j.contains("inhibitory_receiver"))
    s.inhibitory_receiver = d.inhibitory_receiver;
  s.feedback_tap_fraction = r.number("feedback_tap_fraction", d.feedback_tap_fraction);
  s.upstream_tap_fraction = r.number("upstream_tap_fraction", d.upstream_tap_fraction);
  s.feedback_quench_photons = r.number("feedback_quench_photons", d.feedback_quench_photons);
  s.feedback_integration_time_ns = r.number("feedback_integration_time_ns", d.feedback_integration_time_ns);
  s.integration_time_ns = r.number("integration_time_ns", d.integration_time_ns);
  s.refractory_period_ns = r.number("refractory_period_ns", d.refractory_period_ns);
  s.emission_window_ns = r.number("emission_window_ns", d.emission_window_ns);
  s.emission = emission_from_string(r.text("emission", to_string(d.emission)));
  r.finish();
  s.validate();
  return s;
}

inline json to_json(const SynapseParams& p) {
  return {{"c_min", p.c_min},
          {"q_scale", p.q_scale},
          {"stdp_window_ns", p.stdp_window_ns},
          {"delta_q_pot", p.delta_q_pot},
          {"update_interval_min_ns", p.update_interval_min_ns},
          {"path_um", p.path_um},
          {"group_index", p.group_index}};
}

inline SynapseParams synapse_params_from_json(const json& j, const std::string& path) {
  Reader r(j, path);
  const SynapseParams d;
  SynapseParams p;
  p.c_min = r.number("c_min", d.c_min);
  p.q_scale = r.number("q_scale", d.q_scale);
  p.stdp_window_ns = r.number("stdp_window_ns", d.stdp_window_ns);
  p.delta_q_pot = r.number("delta_q_pot", d.delta_q_pot);
  p.update_interval_min_ns = r.number("update_interval_min_ns", d.update_interval_min_ns);
  p.path_um = r.number("path_um", d.path_um);
  p.group_index = r.number("group_index", d.group_index);
  r.finish();
  p.validate();
  return p;
}

// Network document. "topology" selects how neurons and synapses are made:
// "explicit" lists them, "mlp" and "visual_cortex" call the builders with the
// "neuron" template. Stimuli, series links and weight writes apply to all.
struct NetworkConfig {
  std::string topology = "explicit";
  NeuronSpec neuron{};
  SynapseParams synapse{};
  std::vector<NeuronSpec> neurons;
  struct Edge {
    NeuronId src = 0, dst = 0;
    double coupling = 1.0;
    Port port = Port::excite;
    SynapseRole role = SynapseRole::forward;
    std::optional<double> delay_ns;
  };
  std::vector<Edge> synapses;
  struct Mlp {
    std::uint64_t n_inputs = 2, n_per_layer = 2, n_layers = 1;
    double weight_init = 1.0;
  } mlp;
  struct Cortex {
    std::uint64_t pixels = 4, n_granular = 4, n_supragranular = 4;
    VisualCortexOptions options{};
  } cortex;
  std::vector<Stimulus> stimuli;
  std::vector<SeriesLink> series;
  std::optional<std::vector<double>> weights;
  std::optional<int> weight_bits;
  bool learning = true;
};

inline json to_json(const NetworkConfig& c) {
  json neurons = json::array();
  for (const auto& n : c.neurons) neurons.push_back(to_json(n));
  json synapses = json::array();
  for (const auto& e : c.synapses)
    synapses.push_back({{"src", e.src},
                        {"dst", e.dst},
                        {"coupling", e.coupling},
                        {"port", to_string(e.port)},
                        {"role", e.role == SynapseRole::upstream ? "upstream" : "forward"},
                        {"delay_ns", e.delay_ns ? json(*e.delay_ns) : json(nullptr)}});
  json stimuli = json::array();
  for (const auto& s : c.stimuli)
    stimuli.push_back({{"t_ns", s.t_ns}, {"neuron", s.neuron}, {"port", to_string(s.port)}, {"photons", s.photons}});
  json series = json::array();
  for (const auto& l : c.series)
    series.push_back({{"upper", l.upper}, {"lower", l.lower}, {"deficit_fraction", l.deficit_fraction}});
  const auto& o = c.cortex.options;
  return {{"topology", c.topology},
          {"neuron", to_json(c.neuron)},
          {"synapse", to_json(c.synapse)},
          {"neurons", neurons},
          {"synapses", synapses},
          {"mlp",
           {{"n_inputs", c.mlp.n_inputs},
            {"n_per_layer", c.mlp.n_per_layer},
            {"n_layers", c.mlp.n_layers},
            {"weight_init", c.mlp.weight_init}}},
          {"visual_cortex",
           {{"pixels", c.cortex.pixels},
            {"n_granular", c.cortex.n_granular},
            {"n_supragranular", c.cortex.n_supragranular},
            {"n_thalamus", o.n_thalamus},
            {"pixel_to_thalamus", o.pixel_to_thalamus},
            {"pixel_inhibit_fraction", o.pixel_inhibit_fraction},
            {"thalamus_to_granular", o.thalamus_to_granular},
            {"granular_to_thalamus", o.granular_to_thalamus},
            {"granular_to_supragranular", o.granular_to_supragranular},
            {"supragranular_recurrent", o.supragranular_recurrent},
            {"supragranular_to_granular", o.supragranular_to_granular},
            {"coupling", o.coupling},
            {"wiring_seed", o.wiring_seed}}},
          {"stimuli", stimuli},
          {"series", series},
          {"weights", c.weights ? json(*c.weights) : json(nullptr)},
          {"weight_bits", c.weight_bits ? json(*c.weight_bits) : json(nullptr)},
          {"learning", c.learning}};
}

inline NetworkConfig network_from_json(const json& j, const std::string& path) {
  Reader r(j, path);
  NetworkConfig c;
  c.topology = r.text("topology", c.topology);
  if (c.topology != "explicit" && c.topology != "mlp" && c.topology != "visual_cortex")
    throw ConfigError(r.where("topology") + " must be explicit, mlp or visual_cortex");
  if (const json* n = r.child("neuron")) c.neuron = neuron_from_json(*n, r.where("neuron"));
  if (const json* s = r.child("synapse")) c.synapse = synapse_params_from_json(*s, r.where("synapse"));
  auto array_of = [&](const std::string& key) -> const json* {
    const json* a = r.child(key);
    if (a && !a->is_array()) throw ConfigError(r.where(key) + " must be an array");
    return a;
  };
  if (const json* ns = array_of("neurons"))
    for (std::size_t i = 0; i < ns->size(); ++i)
      c.neurons.push_back(neuron_from_json(ns->at(i), r.where("neurons") + "[" + std::to_string(i) + "]", c.neuron));
  if (const json* ss = array_of("synapses"))
    for (std::size_t i = 0; i < ss->size(); ++i) {
      Reader sr(ss->at(i), r.where("synapses") + "[" + std::to_string(i) + "]");
      NetworkConfig::Edge e;
      e.src = static_cast<NeuronId>(sr.count("src", 0));
      e.dst = static_cast<NeuronId>(sr.count("dst", 0));
      e.coupling = sr.number("coupling", 1.0);
      e.port = port_from_string(sr.text("port", "excite"));
      const auto role = sr.text("role", "forward");
      if (role != "forward" && role != "upstream") throw ConfigError(sr.where("role") + " must be forward or upstream");
      e.role = role == "upstream" ? SynapseRole::upstream : SynapseRole::forward;
      if (sr.has("delay_ns")) e.delay_ns = sr.number("delay_ns", 0.0);
      else sr.child("delay_ns");
      sr.finish();
      c.synapses.push_back(e);
    }
  if (const json* m = r.child("mlp")) {
    Reader mr(*m, r.where("mlp"));
    c.mlp.n_inputs = mr.count("n_inputs", c.mlp.n_inputs);
    c.mlp.n_per_layer = mr.count("n_per_layer", c.mlp.n_per_layer);
    c.mlp.n_layers = mr.count("n_layers", c.mlp.n_layers);
    c.mlp.weight_init = mr.number("weight_init", c.mlp.weight_init);
    mr.finish();
  }
  if (const json* v = r.child("visual_cortex")) {
    Reader vr(*v, r.where("visual_cortex"));
    auto& o = c.cortex.options;
    auto u32 = [&](const char* key, std::uint32_t fallback) {
      const auto x = vr.count(key, fallback);
      if (x > 0xffffffffULL) throw ConfigError(vr.where(key) + " is too large");
      return static_cast<std::uint32_t>(x);
    };
    c.cortex.pixels = vr.count("pixels", c.cortex.pixels);
    c.cortex.n_granular = vr.count("n_granular", c.cortex.n_granular);
    c.cortex.n_supragranular = vr.count("n_supragranular", c.cortex.n_supragranular);
    o.n_thalamus = vr.count("n_thalamus", o.n_thalamus);
    o.pixel_to_thalamus = u32("pixel_to_thalamus", o.pixel_to_thalamus);
    o.pixel_inhibit_fraction = vr.number("pixel_inhibit_fraction", o.pixel_inhibit_fraction);
    o.thalamus_to_granular = u32("thalamus_to_granular", o.thalamus_to_granular);
    o.granular_to_thalamus = u32("granular_to_thalamus", o.granular_to_thalamus);
    o.granular_to_supragranular = u32("granular_to_supragranular", o.granular_to_supragranular);
    o.supragranular_recurrent = u32("supragranular_recurrent", o.supragranular_recurrent);
    o.supragranular_to_granular = u32("supragranular_to_granular", o.supragranular_to_granular);
    o.coupling = vr.number("coupling", o.coupling);
    o.wiring_seed = vr.count("wiring_seed", o.wiring_seed);
    vr.finish();
  }
  if (const json* st = array_of("stimuli"))
    for (std::size_t i = 0; i < st->size(); ++i) {
      Reader sr(st->at(i), r.where("stimuli") + "[" + std::to_string(i) + "]");
      Stimulus s;
      s.t_ns = sr.number("t_ns", 0.0);
      s.neuron = static_cast<NeuronId>(sr.count("neuron", 0));
      s.port = port_from_string(sr.text("port", "excite"));
      s.photons = sr.count("photons", 0);
      sr.finish();
      c.stimuli.push_back(s);
    }
  if (const json* se = array_of("series"))
    for (std::size_t i = 0; i < se->size(); ++i) {
      Reader sr(se->at(i), r.where("series") + "[" + std::to_string(i) + "]");
      SeriesLink l;
      l.upper = static_cast<NeuronId>(sr.count("upper", 0));
      l.lower = static_cast<NeuronId>(sr.count("lower", 0));
      l.deficit_fraction = sr.number("deficit_fraction", 1.0);
      sr.finish();
      c.series.push_back(l);
    }
  if (r.has("weights")) c.weights = r.numbers("weights", {});
  else r.child("weights");
  if (r.has("weight_bits")) c.weight_bits = r.integer("weight_bits", 0);
  else r.child("weight_bits");
  c.learning = r.flag("learning", c.learning);
  r.finish();
  return c;
}

inline Network build_network(const NetworkConfig& c) {
  Network net;
  if (c.topology == "mlp") {
    MlpOptions o;
    o.neuron = c.neuron;
    o.weight_init = c.mlp.weight_init;
    o.synapse = c.synapse;
    net = build_mlp(c.mlp.n_inputs, c.mlp.n_per_layer, c.mlp.n_layers, o);
  } else if (c.topology == "visual_cortex") {
    VisualCortexOptions o = c.cortex.options;
    o.cortical = c.neuron;
    if (!o.cortical.inhibitory_receiver) o.cortical.inhibitory_receiver = PndArray::make(10, 4.0, 0.01, 100);
    if (o.cortical.variant == Variant::pnd_step) o.cortical.variant = Variant::dual_port;
    net = build_visual_cortex(c.cortex.pixels, c.cortex.n_granular, c.cortex.n_supragranular, o);
    net.synapse_classes = {c.synapse};
  } else {
    net.synapse_classes = {c.synapse};
    net.neurons = c.neurons;
    for (const auto& e : c.synapses) {
      if (e.src >= net.neurons.size() || e.dst >= net.neurons.size())
        throw ConfigError("synapse references an unknown neuron");
      auto& s = net.connect(e.src, e.dst, e.coupling, e.port, e.role);
      if (e.delay_ns) {
        if (*e.delay_ns < 0.0) throw DomainError("synapse delay must be nonnegative");
        s.delay_ns = static_cast<float>(*e.delay_ns);
      }
    }
  }
  net.stimuli = c.stimuli;
  net.series = c.series;
  if (c.weights) set_weights(net, *c.weights, c.weight_bits);
  net.validate();
  return net;
}

// Rounds every floating-point number to 9 significant digits.
inline json round_numbers(json j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) return j;
    return json(std::stod(format_number(v)));
  }
  if (j.is_object() || j.is_array())
    for (auto& e : j) e = round_numbers(e);
  return j;
}

}  // namespace soen::config
