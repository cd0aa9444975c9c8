#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "soen/errors.hpp"
#include "soen/neuron.hpp"
#include "soen/random.hpp"
#include "soen/units.hpp"

// Event-driven simulation of networks of optoelectronic neurons connected by
// waveguide synapses whose coupling is set by charge on a MEMS capacitor.

namespace soen {

using NeuronId = std::uint32_t;
inline constexpr NeuronId kExternal = std::numeric_limits<NeuronId>::max();

// Photon travel time along a waveguide of the given length.
inline double propagation_delay_ns(double path_um, double group_index) {
  if (path_um < 0.0 || !(group_index > 0.0)) throw DomainError("path length and group index must be valid");
  return units::um_to_m(path_um) * group_index / units::speed_of_light / units::nano;
}

// Parameters shared by a class of synapses.
struct SynapseParams {
  double c_min = 0.01;               // coupling with no charge on the coupler
  double q_scale = 1.0;              // charge giving 63% of the coupling swing
  double stdp_window_ns = 100.0;
  double delta_q_pot = 0.1;          // charge per causal pairing
  double update_interval_min_ns = 1000.0;
  double path_um = 1000.0;
  double group_index = 4.0;

  void validate() const {
    if (!(c_min >= 0.0 && c_min <= 1.0)) throw DomainError("c_min must lie in [0, 1]");
    if (!(q_scale > 0.0)) throw DomainError("q_scale must be positive");
    if (!(stdp_window_ns >= 0.0 && delta_q_pot >= 0.0 && update_interval_min_ns >= 0.0))
      throw DomainError("STDP parameters must be nonnegative");
    propagation_delay_ns(path_um, group_index);
  }

  double default_delay_ns() const { return propagation_delay_ns(path_um, group_index); }
};

enum class SynapseRole : std::uint8_t { forward, upstream };

struct Synapse {
  NeuronId src = 0;
  NeuronId dst = 0;
  double coupling = 1.0;
  double charge = 0.0;
  double last_update_ns = -std::numeric_limits<double>::infinity();
  float delay_ns = 0.0f;
  std::uint16_t cls = 0;  // index into Network::synapse_classes
  Port port = Port::excite;
  SynapseRole role = SynapseRole::forward;
};

// c_min + (1 - c_min)(1 - exp(-charge / q_scale)).
inline double coupling_from_charge(const SynapseParams& p, double charge) {
  if (charge <= 0.0) return p.c_min;
  if (std::isinf(charge)) return 1.0;
  return std::clamp(p.c_min - (1.0 - p.c_min) * std::expm1(-charge / p.q_scale), p.c_min, 1.0);
}

// Inverse of coupling_from_charge on [c_min, 1].
inline double charge_for_coupling(const SynapseParams& p, double coupling) {
  if (p.c_min >= 1.0 || coupling <= p.c_min) return 0.0;
  if (coupling >= 1.0) return std::numeric_limits<double>::infinity();
  return -p.q_scale * std::log1p(-(coupling - p.c_min) / (1.0 - p.c_min));
}

// Causal pairing (0 < t_post - t_pre <= window) adds delta_q_pot of charge.
// Inhibitory synapses do not learn, and updates closer together than
// update_interval_min are dropped.
inline Synapse stdp_update(Synapse s, const SynapseParams& p, double t_pre_ns, double t_post_ns) {
  if (s.port == Port::inhibit) return s;
  const double dt = t_post_ns - t_pre_ns;
  if (!(dt > 0.0 && dt <= p.stdp_window_ns)) return s;
  if (t_post_ns - s.last_update_ns < p.update_interval_min_ns) return s;
  s.charge += p.delta_q_pot;
  s.coupling = std::max(s.coupling, coupling_from_charge(p, s.charge));
  s.last_update_ns = t_post_ns;
  return s;
}

struct Stimulus {
  double t_ns = 0.0;
  NeuronId neuron = 0;
  Port port = Port::excite;
  std::uint64_t photons = 0;
};

// Two neurons sharing a bias line; the upper one starves the lower one.
struct SeriesLink {
  NeuronId upper = 0;
  NeuronId lower = 0;
  double deficit_fraction = 1.0;
};

struct Network {
  std::vector<NeuronSpec> neurons;  // id = index
  std::vector<Synapse> synapses;
  std::vector<SynapseParams> synapse_classes{SynapseParams{}};
  std::vector<Stimulus> stimuli;
  std::vector<SeriesLink> series;

  NeuronId add_neuron(NeuronSpec spec) {
    neurons.push_back(std::move(spec));
    return static_cast<NeuronId>(neurons.size() - 1);
  }

  Synapse& connect(NeuronId src, NeuronId dst, double coupling = 1.0, Port port = Port::excite,
                   SynapseRole role = SynapseRole::forward, std::uint16_t cls = 0) {
    const auto& p = synapse_classes.at(cls);
    Synapse s;
    s.src = src;
    s.dst = dst;
    s.coupling = std::clamp(coupling, p.c_min, 1.0);
    s.charge = charge_for_coupling(p, s.coupling);
    s.delay_ns = static_cast<float>(p.default_delay_ns());
    s.cls = cls;
    s.port = port;
    s.role = role;
    synapses.push_back(s);
    return synapses.back();
  }

  void validate() const {
    for (const auto& p : synapse_classes) p.validate();
    for (const auto& n : neurons) n.validate();
    const auto count = neurons.size();
    for (const auto& s : synapses) {
      if (s.src >= count || s.dst >= count) throw ConfigError("synapse references an unknown neuron");
      if (s.cls >= synapse_classes.size()) throw ConfigError("synapse references an unknown class");
      const auto& p = synapse_classes[s.cls];
      if (!(s.coupling >= p.c_min && s.coupling <= 1.0)) throw DomainError("synapse coupling outside [c_min, 1]");
      if (!(s.delay_ns >= 0.0f)) throw DomainError("synapse delay must be nonnegative");
      if (s.port == Port::inhibit && !neurons[s.dst].inhibitory_receiver)
        throw ConfigError("inhibitory synapse into a neuron without an inhibitory receiver");
      if (s.role == SynapseRole::upstream && !(neurons[s.src].upstream_tap_fraction > 0.0))
        throw ConfigError("upstream synapse from a neuron without an upstream tap");
    }
    for (const auto& st : stimuli) {
      if (st.neuron >= count) throw ConfigError("stimulus references an unknown neuron");
      if (!(st.t_ns >= 0.0)) throw DomainError("stimulus time must be nonnegative");
      if (st.port == Port::inhibit && !neurons[st.neuron].inhibitory_receiver)
        throw ConfigError("inhibitory stimulus into a neuron without an inhibitory receiver");
    }
    for (const auto& l : series) {
      if (l.upper >= count || l.lower >= count || l.upper == l.lower) throw ConfigError("invalid series link");
      if (!(l.deficit_fraction >= 0.0)) throw DomainError("series deficit fraction must be nonnegative");
    }
  }
};

// Overwrites all couplings in synapse order, clamped to [c_min, 1] and
// optionally quantized to 2^bits evenly spaced levels over that interval.
// Entries equal to the current coupling leave the synapse untouched; changed
// synapses have their charge and rate-limit bookkeeping reset.
inline void set_weights(Network& net, const std::vector<double>& table, std::optional<int> bits = std::nullopt) {
  if (table.size() != net.synapses.size())
    throw ConfigError("weight table has " + std::to_string(table.size()) + " entries for " +
                      std::to_string(net.synapses.size()) + " synapses");
  if (bits && (*bits < 1 || *bits > 30)) throw ConfigError("quantizer bit depth must lie in [1, 30]");
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto& s = net.synapses[i];
    const auto& p = net.synapse_classes.at(s.cls);
    if (std::isnan(table[i])) throw ConfigError("weight table contains NaN");
    double c = std::clamp(table[i], p.c_min, 1.0);
    if (bits && p.c_min < 1.0) {
      const double levels = std::ldexp(1.0, *bits) - 1.0;
      c = p.c_min + std::round((c - p.c_min) / (1.0 - p.c_min) * levels) / levels * (1.0 - p.c_min);
      c = std::clamp(c, p.c_min, 1.0);
    }
    if (c == s.coupling) continue;
    s.coupling = c;
    s.charge = charge_for_coupling(p, c);
    s.last_update_ns = -std::numeric_limits<double>::infinity();
  }
}

enum class EventKind : std::uint8_t {
  refractory_end = 0,
  decay_checkpoint = 1,
  photon_arrival = 2,
  weight_update = 3,
};

struct Event {
  double t_ns = 0.0;
  EventKind kind = EventKind::photon_arrival;
  NeuronId source = kExternal;
  NeuronId target = 0;
  Port port = Port::excite;
  std::uint64_t photons = 0;
  std::uint64_t synapse = 0;  // weight_update only
  double t_pre_ns = 0.0;      // weight_update only
  std::uint64_t seq = 0;      // insertion order, last tie breaker
};

// Min-queue ordered by (time, kind rank, source id, target id, insertion).
class EventQueue {
 public:
  void push(Event e) {
    if (!(e.t_ns >= now_)) throw InternalError("event scheduled before the current simulation time");
    e.seq = next_seq_++;
    heap_.push(e);
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  const Event& top() const { return heap_.top(); }
  double now() const { return now_; }

  Event pop() {
    Event e = heap_.top();
    heap_.pop();
    if (e.t_ns < now_) throw InternalError("event queue went back in time");
    now_ = e.t_ns;
    return e;
  }

  void advance_to(double t_ns) {
    if (t_ns < now_) throw InternalError("cannot move the clock backwards");
    now_ = t_ns;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.t_ns != b.t_ns) return a.t_ns > b.t_ns;
      if (a.kind != b.kind) return a.kind > b.kind;
      if (a.source != b.source) return a.source > b.source;
      if (a.target != b.target) return a.target > b.target;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  double now_ = 0.0;
  std::uint64_t next_seq_ = 0;
};

struct TraceRecord {
  double t_ns = 0.0;
  NeuronId neuron = 0;
  std::uint64_t photons_out = 0;

  bool operator==(const TraceRecord&) const = default;
};

// Photon accounting of one firing event's downstream share.
struct FanoutRecord {
  NeuronId neuron = 0;
  double t_ns = 0.0;
  std::uint64_t available = 0;  // photons_out minus both taps
  std::uint64_t delivered = 0;  // sum over forward synapses
  std::uint64_t lost = 0;       // uncoupled light
  std::uint64_t upstream_available = 0;
  std::uint64_t upstream_delivered = 0;
  std::uint64_t upstream_lost = 0;
};

class Simulation {
 public:
  Simulation(Network net, std::uint64_t seed) : net_(std::move(net)), seed_(seed) {
    net_.validate();
    const std::size_t n = net_.neurons.size();
    states_.reserve(n);
    for (const auto& spec : net_.neurons) states_.push_back(initial_state(spec));
    receive_counter_.assign(n, 0);
    last_fire_.assign(n, -std::numeric_limits<double>::infinity());

    out_offsets_.assign(n + 1, 0);
    in_offsets_.assign(n + 1, 0);
    for (const auto& s : net_.synapses) {
      ++out_offsets_[s.src + 1];
      ++in_offsets_[s.dst + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
      out_offsets_[i + 1] += out_offsets_[i];
      in_offsets_[i + 1] += in_offsets_[i];
    }
    out_index_.resize(net_.synapses.size());
    in_index_.resize(net_.synapses.size());
    std::vector<std::size_t> out_fill(out_offsets_.begin(), out_offsets_.end() - 1);
    std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
    for (std::size_t k = 0; k < net_.synapses.size(); ++k) {
      out_index_[out_fill[net_.synapses[k].src]++] = k;
      in_index_[in_fill[net_.synapses[k].dst]++] = k;
    }
    series_of_.assign(n, {});
    for (std::size_t k = 0; k < net_.series.size(); ++k) series_of_[net_.series[k].upper].push_back(k);

    for (const auto& st : net_.stimuli)
      queue_.push(Event{st.t_ns, EventKind::photon_arrival, kExternal, st.neuron, st.port, st.photons});
    for (NeuronId i = 0; i < n; ++i)
      if (net_.neurons[i].variant == Variant::integrate_and_stop)
        queue_.push(Event{0.0, EventKind::refractory_end, i, i});
  }

  const Network& network() const { return net_; }
  const std::vector<NeuronState>& states() const { return states_; }
  const std::vector<FanoutRecord>& fanout_log() const { return fanout_; }
  double now() const { return queue_.now(); }
  bool learning = true;  // apply STDP on causal pairings

  void inject(const Stimulus& st) {
    if (st.neuron >= net_.neurons.size()) throw ConfigError("stimulus references an unknown neuron");
    queue_.push(Event{st.t_ns, EventKind::photon_arrival, kExternal, st.neuron, st.port, st.photons});
  }

  void schedule_checkpoint(NeuronId neuron, double t_ns) {
    if (neuron >= net_.neurons.size()) throw ConfigError("checkpoint for an unknown neuron");
    queue_.push(Event{t_ns, EventKind::decay_checkpoint, neuron, neuron});
  }

  // Processes every event with time <= until and returns the firing events.
  std::vector<TraceRecord> step(double until_ns) {
    if (until_ns < queue_.now()) throw InternalError("step target precedes the current time");
    std::vector<TraceRecord> trace;
    while (!queue_.empty() && queue_.top().t_ns <= until_ns) {
      const Event e = queue_.pop();
      switch (e.kind) {
        case EventKind::photon_arrival:
          on_arrival(e, trace);
          break;
        case EventKind::refractory_end:
          evaluate(e.target, e.t_ns, trace);
          break;
        case EventKind::decay_checkpoint:
          states_[e.target] = advance(net_.neurons[e.target], std::move(states_[e.target]), e.t_ns, next_seed(e.target));
          break;
        case EventKind::weight_update: {
          auto& s = net_.synapses[e.synapse];
          s = stdp_update(s, net_.synapse_classes[s.cls], e.t_pre_ns, e.t_ns);
          break;
        }
      }
    }
    queue_.advance_to(until_ns);
    return trace;
  }

 private:
  std::uint64_t next_seed(NeuronId n) { return random::derive_seed(seed_, n, receive_counter_[n]++); }

  void on_arrival(const Event& e, std::vector<TraceRecord>& trace) {
    const auto& spec = net_.neurons[e.target];
    states_[e.target] = receive(spec, std::move(states_[e.target]), e.photons, e.port, e.t_ns, next_seed(e.target));
    if (e.photons > 0) evaluate(e.target, e.t_ns, trace);
  }

  void evaluate(NeuronId n, double t, std::vector<TraceRecord>& trace) {
    const auto& spec = net_.neurons[n];
    auto& state = states_[n];
    state = advance(spec, std::move(state), t, next_seed(n));
    auto result = maybe_fire(spec, std::move(state), t, next_seed(n));
    state = std::move(result.state);
    if (!result.event) return;
    const FiringEvent& ev = *result.event;
    trace.push_back({t, n, ev.photons_out});
    last_fire_[n] = t;
    queue_.push(Event{state.refractory_until_ns, EventKind::refractory_end, n, n});
    for (auto k : series_of_[n]) {
      const auto& link = net_.series[k];
      apply_series_deficit(spec, ev, states_[link.lower], link.deficit_fraction);
      queue_.push(Event{state.refractory_until_ns, EventKind::refractory_end, n, link.lower});
    }
    fan_out(n, ev);
    if (learning) schedule_learning(n, t);
  }

  void fan_out(NeuronId n, const FiringEvent& ev) {
    FanoutRecord rec{n, ev.t_ns};
    rec.available = ev.downstream();
    rec.upstream_available = ev.tap_upstream;
    distribute(n, ev, SynapseRole::forward, rec.available, rec.delivered, rec.lost);
    distribute(n, ev, SynapseRole::upstream, rec.upstream_available, rec.upstream_delivered, rec.upstream_lost);
    fanout_.push_back(rec);
  }

  // Equal share per synapse of the given role, scaled by its coupling; the
  // uncoupled remainder is a loss bucket so the parts sum to `available`.
  void distribute(NeuronId n, const FiringEvent& ev, SynapseRole role, std::uint64_t available,
                  std::uint64_t& delivered, std::uint64_t& lost) {
    std::vector<std::size_t> targets;
    for (std::size_t k = out_offsets_[n]; k < out_offsets_[n + 1]; ++k)
      if (net_.synapses[out_index_[k]].role == role) targets.push_back(out_index_[k]);
    if (targets.empty()) {
      lost = available;
      return;
    }
    const double share = 1.0 / static_cast<double>(targets.size());
    std::vector<double> weights;
    weights.reserve(targets.size() + 1);
    double coupled = 0.0;
    for (auto k : targets) {
      weights.push_back(net_.synapses[k].coupling * share);
      coupled += weights.back();
    }
    weights.push_back(std::max(0.0, 1.0 - coupled));
    if (!(weights.back() > 0.0) && !(coupled > 0.0)) weights.back() = 1.0;
    const auto parts = largest_remainder(available, weights);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      delivered += parts[i];
      if (parts[i] == 0) continue;
      const auto& s = net_.synapses[targets[i]];
      queue_.push(Event{ev.t_ns + static_cast<double>(s.delay_ns), EventKind::photon_arrival, n, s.dst, s.port,
                        parts[i]});
    }
    lost = parts.back();
  }

  void schedule_learning(NeuronId post, double t_post) {
    for (std::size_t k = in_offsets_[post]; k < in_offsets_[post + 1]; ++k) {
      const auto idx = in_index_[k];
      const auto& s = net_.synapses[idx];
      if (s.port == Port::inhibit || s.role != SynapseRole::forward) continue;
      const double t_pre = last_fire_[s.src];
      if (std::isinf(t_pre)) continue;
      Event e{t_post, EventKind::weight_update, s.src, post};
      e.synapse = idx;
      e.t_pre_ns = t_pre;
      queue_.push(e);
    }
  }

  Network net_;
  std::uint64_t seed_;
  std::vector<NeuronState> states_;
  std::vector<std::uint64_t> receive_counter_;
  std::vector<double> last_fire_;
  std::vector<std::size_t> out_offsets_, in_offsets_, out_index_, in_index_;
  std::vector<std::vector<std::size_t>> series_of_;
  std::vector<FanoutRecord> fanout_;
  EventQueue queue_;
};

inline std::vector<TraceRecord> simulate(const Network& net, double until_ns, std::uint64_t seed) {
  Simulation sim(net, seed);
  return sim.step(until_ns);
}

// Runs the same network under several seeds concurrently.
inline std::vector<std::vector<TraceRecord>> simulate_sweep(const Network& net, double until_ns,
                                                            const std::vector<std::uint64_t>& seeds,
                                                            unsigned workers = random::default_workers()) {
  net.validate();
  return random::parallel_map(seeds.size(), workers,
                              [&](std::uint64_t i) { return simulate(net, until_ns, seeds[i]); });
}

// Single-wire detector used for input relays and pixels: fires on one
// absorbed photon.
inline NeuronSpec relay_neuron() {
  NeuronSpec s;
  s.receiver = PndArray::make(1, 4.0, 1.0, 1);
  s.bias_receiver = BiasPoint::fraction(0.9, 4.0);
  s.ntron = NTron{0.0, BiasPoint{20.0, 0.0}};
  s.variant = Variant::gain;
  return s;
}

struct MlpOptions {
  NeuronSpec neuron{};
  NeuronSpec input = relay_neuron();
  double weight_init = 1.0;
  SynapseParams synapse{};
};

// Fully connected feedforward stack: n_inputs relay neurons, then n_layers
// layers of n_per_layer neurons, every neuron connected to every neuron of
// the next layer. Neuron ids run input first, then layer by layer.
inline Network build_mlp(std::uint64_t n_inputs, std::uint64_t n_per_layer, std::uint64_t n_layers,
                         const MlpOptions& options = {}) {
  if (n_inputs < 1 || n_per_layer < 1 || n_layers < 1) throw DomainError("MLP dimensions must be at least 1");
  const std::uint64_t n_neurons = n_inputs + n_per_layer * n_layers;
  const std::uint64_t n_synapses = n_inputs * n_per_layer + n_per_layer * n_per_layer * (n_layers - 1);
  if (n_neurons >= kExternal) throw DomainError("too many neurons for 32-bit ids");
  options.synapse.validate();

  Network net;
  net.synapse_classes = {options.synapse};
  net.neurons.reserve(n_neurons);
  net.synapses.reserve(n_synapses);
  for (std::uint64_t i = 0; i < n_inputs; ++i) net.add_neuron(options.input);
  for (std::uint64_t i = 0; i < n_per_layer * n_layers; ++i) net.add_neuron(options.neuron);

  NeuronId prev_begin = 0;
  std::uint64_t prev_size = n_inputs;
  for (std::uint64_t layer = 0; layer < n_layers; ++layer) {
    const auto begin = static_cast<NeuronId>(n_inputs + layer * n_per_layer);
    for (std::uint64_t a = 0; a < prev_size; ++a)
      for (std::uint64_t b = 0; b < n_per_layer; ++b)
        net.connect(prev_begin + static_cast<NeuronId>(a), begin + static_cast<NeuronId>(b), options.weight_init);
    prev_begin = begin;
    prev_size = n_per_layer;
  }
  return net;
}

struct VisualCortexOptions {
  std::uint64_t n_thalamus = 0;  // 0 means one per pixel
  std::uint32_t pixel_to_thalamus = 2;
  double pixel_inhibit_fraction = 0.25;
  std::uint32_t thalamus_to_granular = 8;
  std::uint32_t granular_to_thalamus = 2;
  std::uint32_t granular_to_supragranular = 8;
  std::uint32_t supragranular_recurrent = 16;
  std::uint32_t supragranular_to_granular = 2;
  double coupling = 1.0;
  std::uint64_t wiring_seed = 1;
  NeuronSpec pixel = relay_neuron();
  NeuronSpec cortical = [] {
    NeuronSpec s;
    s.variant = Variant::dual_port;
    s.inhibitory_receiver = PndArray::make(10, 4.0, 0.01, 100);
    return s;
  }();
};

struct VisualCortexLayout {
  NeuronId pixels_begin, thalamus_begin, granular_begin, supragranular_begin, end;
};

inline VisualCortexLayout visual_cortex_layout(std::uint64_t pixels, std::uint64_t n_granular,
                                               std::uint64_t n_supragranular, const VisualCortexOptions& o = {}) {
  const std::uint64_t n_thal = o.n_thalamus == 0 ? pixels : o.n_thalamus;
  const auto p = static_cast<NeuronId>(pixels);
  const auto t = static_cast<NeuronId>(pixels + n_thal);
  const auto g = static_cast<NeuronId>(pixels + n_thal + n_granular);
  return {0, p, t, g, static_cast<NeuronId>(g + n_supragranular)};
}

// Pixel array -> thalamus (mixed excitatory/inhibitory, no recurrence) ->
// granular layer (feedback to thalamus) -> supragranular layer (recurrent,
// feedback to granular). Targets are drawn without replacement from a
// wiring stream, with no self connections.
inline Network build_visual_cortex(std::uint64_t pixels, std::uint64_t n_granular, std::uint64_t n_supragranular,
                                   const VisualCortexOptions& o = {}) {
  if (pixels < 1 || n_granular < 1 || n_supragranular < 1) throw DomainError("layer sizes must be at least 1");
  if (!(o.pixel_inhibit_fraction >= 0.0 && o.pixel_inhibit_fraction <= 1.0))
    throw DomainError("inhibitory fraction must lie in [0, 1]");
  const auto lay = visual_cortex_layout(pixels, n_granular, n_supragranular, o);
  Network net;
  for (NeuronId i = lay.pixels_begin; i < lay.thalamus_begin; ++i) net.add_neuron(o.pixel);
  for (NeuronId i = lay.thalamus_begin; i < lay.end; ++i) net.add_neuron(o.cortical);

  auto engine = random::stream(o.wiring_seed, 0xc0de);
  auto wire = [&](NeuronId from_begin, NeuronId from_end, NeuronId to_begin, NeuronId to_end, std::uint32_t fan,
                  double inhibit_fraction) {
    std::vector<NeuronId> pool;
    for (NeuronId src = from_begin; src < from_end; ++src) {
      pool.clear();
      for (NeuronId d = to_begin; d < to_end; ++d)
        if (d != src) pool.push_back(d);
      const std::size_t k = std::min<std::size_t>(fan, pool.size());
      for (std::size_t j = 0; j < k; ++j) {
        std::uniform_int_distribution<std::size_t> pick(j, pool.size() - 1);
        std::swap(pool[j], pool[pick(engine)]);
        const bool inhibit = random::uniform01(engine) < inhibit_fraction;
        net.connect(src, pool[j], o.coupling, inhibit ? Port::inhibit : Port::excite);
      }
    }
  };
  wire(lay.pixels_begin, lay.thalamus_begin, lay.thalamus_begin, lay.granular_begin, o.pixel_to_thalamus,
       o.pixel_inhibit_fraction);
  wire(lay.thalamus_begin, lay.granular_begin, lay.granular_begin, lay.supragranular_begin, o.thalamus_to_granular, 0.0);
  wire(lay.granular_begin, lay.supragranular_begin, lay.thalamus_begin, lay.granular_begin, o.granular_to_thalamus, 0.0);
  wire(lay.granular_begin, lay.supragranular_begin, lay.supragranular_begin, lay.end, o.granular_to_supragranular, 0.0);
  wire(lay.supragranular_begin, lay.end, lay.supragranular_begin, lay.end, o.supragranular_recurrent, 0.0);
  wire(lay.supragranular_begin, lay.end, lay.granular_begin, lay.supragranular_begin, o.supragranular_to_granular, 0.0);
  return net;
}

}  // namespace soen
