#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "soen/detector.hpp"
#include "soen/emitter.hpp"
#include "soen/errors.hpp"
#include "soen/random.hpp"

// Single-photon optoelectronic neurons: a nanowire receiver in parallel with
// an LED, optionally switched through an nTron, plus the circuit variants for
// inhibition, integrate-and-stop, series inhibition and feedback taps.
//
// State transitions are pure: every operation takes a state by value and
// returns the successor.

namespace soen {

enum class Variant {
  pnd_step,
  snd_continuous,
  gain,
  integrate_and_stop,
  dual_port,
  series_inhibited,
  self_feedback,
};

inline constexpr std::array<std::pair<Variant, std::string_view>, 7> variant_names{{
    {Variant::pnd_step, "pnd_step"},
    {Variant::snd_continuous, "snd_continuous"},
    {Variant::gain, "gain"},
    {Variant::integrate_and_stop, "integrate_and_stop"},
    {Variant::dual_port, "dual_port"},
    {Variant::series_inhibited, "series_inhibited"},
    {Variant::self_feedback, "self_feedback"},
}};

inline std::string_view to_string(Variant v) {
  for (const auto& [value, name] : variant_names)
    if (value == v) return name;
  return "?";
}

inline Variant variant_from_string(std::string_view s) {
  for (const auto& [value, name] : variant_names)
    if (name == s) return value;
  throw ConfigError("unknown neuron variant '" + std::string(s) + "'");
}

enum class Port : std::uint8_t { excite, inhibit };

// Ideal three-terminal switch: once the gate current reaches the threshold,
// the drive current is diverted into the LED.
struct NTron {
  double gate_threshold_ua = 0.0;
  BiasPoint drive{};
};

// Shortest hotspot relaxation allowed for the integration time, ns.
inline constexpr double kHotspotRelaxationFloorNs = 0.2;

struct NeuronSpec {
  std::variant<PndArray, SndWire> receiver = PndArray::make(10, 4.0, 0.01, 100);
  BiasPoint bias_receiver = BiasPoint::fraction(0.5, 40.0);  // I_1
  std::optional<NTron> ntron;                                // I_2 when present
  LedJunction emitter{};
  Variant variant = Variant::pnd_step;
  std::optional<PndArray> inhibitory_receiver;  // preliminary array in series with I_1
  double feedback_tap_fraction = 0.0;
  double upstream_tap_fraction = 0.0;
  double feedback_quench_photons = 100.0;  // self-feedback photons that drive the supply wire normal
  double feedback_integration_time_ns = 1000.0;
  double integration_time_ns = 1.0;
  double refractory_period_ns = 50.0;
  double emission_window_ns = 50.0;
  EmissionMode emission = EmissionMode::deterministic;

  bool has_pnd() const { return std::holds_alternative<PndArray>(receiver); }
  const PndArray& pnd() const { return std::get<PndArray>(receiver); }
  const SndWire& snd() const { return std::get<SndWire>(receiver); }

  void validate() const {
    std::visit([](const auto& r) { r.validate(); }, receiver);
    emitter.validate();
    if (!(bias_receiver.i_bias_ua > 0.0)) throw DomainError("receiver bias must be positive");
    if (has_pnd() && bias_receiver.i_bias_ua >= pnd().critical_current_ua())
      throw AlwaysFiresError(bias_receiver.i_bias_ua, pnd().critical_current_ua());
    if (!(feedback_tap_fraction >= 0.0 && upstream_tap_fraction >= 0.0 &&
          feedback_tap_fraction + upstream_tap_fraction < 1.0))
      throw DomainError("tap fractions must be nonnegative and sum to less than 1");
    if (integration_time_ns < kHotspotRelaxationFloorNs)
      throw DomainError("integration time below the hotspot relaxation floor");
    if (!(refractory_period_ns > 0.0 && emission_window_ns > 0.0 && feedback_integration_time_ns > 0.0 &&
          feedback_quench_photons > 0.0))
      throw DomainError("timing constants must be positive");
    if (ntron && !(ntron->drive.i_bias_ua > 0.0)) throw DomainError("nTron drive current must be positive");
    if (inhibitory_receiver) inhibitory_receiver->validate();

    const bool snd_variant = variant == Variant::snd_continuous;
    if (snd_variant == has_pnd()) throw ConfigError("snd_continuous needs an SND receiver, other variants a PND");
    if (variant == Variant::gain && !ntron) throw ConfigError("gain variant requires an nTron");
    if (variant == Variant::dual_port && !inhibitory_receiver)
      throw ConfigError("dual_port variant requires an inhibitory receiver");
    if (variant == Variant::self_feedback && !(feedback_tap_fraction > 0.0))
      throw ConfigError("self_feedback variant requires a feedback tap");
  }
};

struct NeuronState {
  std::variant<PndArray, SndWire> receiver;  // carries the hotspot state
  std::optional<PndArray> inhibitory_receiver;
  double absorbed_count = 0.0;  // leaky tally of absorbed photons
  double last_update_ns = 0.0;
  double refractory_until_ns = -std::numeric_limits<double>::infinity();
  double inhibition_level_ua = 0.0;  // bias removed by the inhibitory array
  double feedback_level = 0.0;       // leaky tally of self-feedback photons
  double bias_deficit_ua = 0.0;      // drive taken by a series partner
  double deficit_until_ns = -std::numeric_limits<double>::infinity();
  bool emitting = false;  // integrate_and_stop runs until it reaches threshold

  int normal_wires() const {
    if (const auto* pnd = std::get_if<PndArray>(&receiver)) return pnd->normal_count();
    return static_cast<int>(std::get<SndWire>(receiver).occupied_slots.size());
  }
};

inline NeuronState initial_state(const NeuronSpec& spec) {
  spec.validate();
  NeuronState s;
  s.receiver = spec.receiver;
  std::visit(
      [](auto& r) {
        if constexpr (std::is_same_v<std::decay_t<decltype(r)>, PndArray>)
          r.reset();
        else
          r.occupied_slots.clear();
      },
      s.receiver);
  if (spec.inhibitory_receiver) {
    s.inhibitory_receiver = spec.inhibitory_receiver;
    s.inhibitory_receiver->reset();
  }
  s.emitting = spec.variant == Variant::integrate_and_stop;
  return s;
}

namespace detail {

inline double survival(double dt_ns, double tau_ns) {
  if (dt_ns <= 0.0) return 1.0;
  if (std::isinf(tau_ns)) return 1.0;
  return std::exp(-dt_ns / tau_ns);
}

// Each hotspot relaxes independently with lifetime tau.
inline void relax(std::vector<bool>& normal, double keep, random::Engine& engine) {
  if (keep >= 1.0) return;
  for (std::size_t i = 0; i < normal.size(); ++i)
    if (normal[i] && !(random::uniform01(engine) < keep)) normal[i] = false;
}

inline void relax(std::set<std::uint32_t>& slots, double keep, random::Engine& engine) {
  if (keep >= 1.0) return;
  for (auto it = slots.begin(); it != slots.end();) {
    if (random::uniform01(engine) < keep)
      ++it;
    else
      it = slots.erase(it);
  }
}

inline double inhibition_from(const NeuronSpec& spec, const NeuronState& s) {
  if (!s.inhibitory_receiver || !spec.has_pnd()) return 0.0;
  return s.inhibitory_receiver->normal_count() * spec.pnd().i_c_wire_ua;
}

}  // namespace detail

// Brings the state forward to time t: the photon tally decays by
// exp(-dt / tau_int), every hotspot relaxes with the same lifetime, and the
// self-feedback tally decays with its own time constant.
inline NeuronState advance(const NeuronSpec& spec, NeuronState s, double t_ns, std::uint64_t seed) {
  const double dt = t_ns - s.last_update_ns;
  if (dt <= 0.0) return s;
  const double keep = detail::survival(dt, spec.integration_time_ns);
  s.absorbed_count *= keep;
  auto engine = random::stream(seed, 0x5e1a);
  std::visit(
      [&](auto& r) {
        if constexpr (std::is_same_v<std::decay_t<decltype(r)>, PndArray>)
          detail::relax(r.wire_normal, keep, engine);
        else
          detail::relax(r.occupied_slots, keep, engine);
      },
      s.receiver);
  if (s.inhibitory_receiver) detail::relax(s.inhibitory_receiver->wire_normal, keep, engine);
  s.inhibition_level_ua = detail::inhibition_from(spec, s);
  s.feedback_level *= detail::survival(dt, spec.feedback_integration_time_ns);
  s.last_update_ns = t_ns;
  return s;
}

// Delivers a pulse of n_photons to one port at time t. Photons arriving
// during the refractory window are absorbed but cannot trigger firing until
// it ends.
inline NeuronState receive(const NeuronSpec& spec, NeuronState s, std::uint64_t n_photons, Port port, double t_ns,
                           std::uint64_t seed) {
  if (t_ns < 0.0) throw DomainError("event time must be nonnegative");
  s = advance(spec, std::move(s), t_ns, seed);
  if (n_photons == 0) return s;
  auto engine = random::stream(seed, 0xab50);
  if (port == Port::inhibit) {
    if (!s.inhibitory_receiver) throw DomainError("neuron has no inhibitory port");
    pnd_absorb_pulse(*s.inhibitory_receiver, n_photons, engine);
    s.inhibition_level_ua = detail::inhibition_from(spec, s);
    return s;
  }
  double absorbed = 0.0;
  std::visit(
      [&](auto& r) {
        if constexpr (std::is_same_v<std::decay_t<decltype(r)>, PndArray>)
          absorbed = pnd_absorb_pulse(r, n_photons, engine);
        else
          absorbed = static_cast<double>(snd_absorb_into(r, n_photons, engine));
      },
      s.receiver);
  s.absorbed_count += absorbed;
  return s;
}

// Receiver bias after inhibition and series deficits; zero when quenched by
// self-feedback.
inline double effective_bias_ua(const NeuronSpec& spec, const NeuronState& s, double t_ns) {
  if (spec.feedback_tap_fraction > 0.0 && s.feedback_level >= spec.feedback_quench_photons) return 0.0;
  double bias = spec.bias_receiver.i_bias_ua - s.inhibition_level_ua;
  if (t_ns < s.deficit_until_ns) bias -= s.bias_deficit_ua;
  return std::max(0.0, bias);
}

// Excitation threshold (normal wires) at the current state, or nullopt when
// the receiver bias has been removed entirely.
inline std::optional<int> current_threshold(const NeuronSpec& spec, const NeuronState& s, double t_ns) {
  const double bias = effective_bias_ua(spec, s, t_ns);
  if (!(bias > 0.0)) return std::nullopt;
  if (!spec.has_pnd()) return 1;
  return threshold_count(spec.pnd().n_wires, spec.pnd().i_c_wire_ua, bias);
}

struct FiringEvent {
  std::uint64_t photons_out = 0;
  std::uint64_t tap_self = 0;
  std::uint64_t tap_upstream = 0;
  double t_ns = 0.0;
  double t_end_ns = 0.0;

  std::uint64_t downstream() const { return photons_out - tap_self - tap_upstream; }
};

// Splits `total` into integer parts proportional to `weights` (which need
// not sum to one) by largest remainder; parts always sum to `total`. Ties go
// to the lower index.
inline std::vector<std::uint64_t> largest_remainder(std::uint64_t total, const std::vector<double>& weights) {
  std::vector<std::uint64_t> parts(weights.size(), 0);
  if (weights.empty() || total == 0) return parts;
  double sum = 0.0;
  for (double w : weights) sum += w;
  if (!(sum > 0.0)) throw DomainError("largest-remainder weights must have positive sum");
  std::vector<std::pair<double, std::size_t>> remainders;
  remainders.reserve(weights.size());
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / sum;
    parts[i] = static_cast<std::uint64_t>(std::floor(exact));
    assigned += parts[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  // Floating rounding can overshoot by a unit; take it back from the
  // smallest remainders.
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % remainders.size()) {
    ++parts[remainders[k].second];
    ++assigned;
  }
  for (std::size_t k = remainders.size(); assigned > total;) {
    k = (k == 0 ? remainders.size() : k) - 1;
    auto& p = parts[remainders[k].second];
    if (p > 0) {
      --p;
      --assigned;
    }
  }
  return parts;
}

struct FireResult {
  NeuronState state;
  std::optional<FiringEvent> event;
};

namespace detail {

inline FiringEvent make_event(const NeuronSpec& spec, NeuronState& s, std::uint64_t photons_out, double t_ns) {
  const auto parts = largest_remainder(
      photons_out, {spec.feedback_tap_fraction, spec.upstream_tap_fraction,
                    1.0 - spec.feedback_tap_fraction - spec.upstream_tap_fraction});
  FiringEvent ev{photons_out, parts[0], parts[1], t_ns, t_ns + spec.emission_window_ns};
  s.feedback_level += static_cast<double>(ev.tap_self);
  s.refractory_until_ns = t_ns + spec.refractory_period_ns;
  return ev;
}

inline void reset_receiver(NeuronState& s) {
  std::visit(
      [](auto& r) {
        if constexpr (std::is_same_v<std::decay_t<decltype(r)>, PndArray>)
          r.reset();
        else
          r.occupied_slots.clear();
      },
      s.receiver);
  s.absorbed_count = 0.0;
}

// Current pushed through the LED when the receiver switches.
inline std::optional<double> drive_current_ua(const NeuronSpec& spec, double receiver_bias_ua) {
  if (!spec.ntron) return receiver_bias_ua;
  if (receiver_bias_ua < spec.ntron->gate_threshold_ua) return std::nullopt;
  return spec.ntron->drive.i_bias_ua;
}

}  // namespace detail

// Decides whether the neuron fires at time t given its current state (call
// advance or receive first). seed is used only for Poisson emission.
inline FireResult maybe_fire(const NeuronSpec& spec, NeuronState s, double t_ns, std::uint64_t seed = 0) {
  if (t_ns < s.refractory_until_ns) return {std::move(s), std::nullopt};
  const double bias = effective_bias_ua(spec, s, t_ns);

  if (spec.variant == Variant::snd_continuous) {
    if (!(bias > 0.0) || std::get<SndWire>(s.receiver).occupied_slots.empty()) return {std::move(s), std::nullopt};
    const auto op = operating_point(snd_resistance_kohm(std::get<SndWire>(s.receiver)), spec.emitter, bias);
    const double expected = expected_photons(spec.emitter, op.i_led_ua, spec.emission_window_ns);
    const auto count = emission_count(expected, spec.emission, seed);
    if (count == 0) return {std::move(s), std::nullopt};
    detail::reset_receiver(s);
    auto ev = detail::make_event(spec, s, count, t_ns);
    return {std::move(s), ev};
  }

  const auto threshold = current_threshold(spec, s, t_ns);
  const bool at_threshold = threshold && s.normal_wires() >= *threshold;

  if (spec.variant == Variant::integrate_and_stop) {
    if (!s.emitting) return {std::move(s), std::nullopt};
    if (at_threshold) {
      // Reaching threshold cuts off the LED supply for good.
      s.emitting = false;
      return {std::move(s), std::nullopt};
    }
    const double drive = spec.ntron ? spec.ntron->drive.i_bias_ua : spec.bias_receiver.i_bias_ua;
    const auto count = emission_count(expected_photons(spec.emitter, drive, spec.emission_window_ns), spec.emission, seed);
    auto ev = detail::make_event(spec, s, count, t_ns);
    return {std::move(s), ev};
  }

  if (!at_threshold) return {std::move(s), std::nullopt};
  const auto drive = detail::drive_current_ua(spec, bias);
  if (!drive) return {std::move(s), std::nullopt};
  const auto count = emission_count(expected_photons(spec.emitter, *drive, spec.emission_window_ns), spec.emission, seed);
  detail::reset_receiver(s);
  auto ev = detail::make_event(spec, s, count, t_ns);
  return {std::move(s), ev};
}

// Two neurons on one bias line: while the upper neuron is firing, the drive
// it diverts (deficit_fraction of its receiver bias) is missing from the
// lower neuron for the upper's refractory window.
inline void apply_series_deficit(const NeuronSpec& upper, const FiringEvent& ev, NeuronState& lower,
                                 double deficit_fraction = 1.0) {
  lower.bias_deficit_ua = deficit_fraction * upper.bias_receiver.i_bias_ua;
  lower.deficit_until_ns = ev.t_ns + upper.refractory_period_ns;
}

struct SeriesPairInput {
  std::uint64_t photons_upper = 0;
  std::uint64_t photons_lower = 0;
};

struct SeriesPairResult {
  NeuronState upper;
  NeuronState lower;
  std::optional<FiringEvent> upper_event;
  std::optional<FiringEvent> lower_event;
};

// One time step of a series pair: both neurons receive their pulses, the
// upper one is evaluated first and its firing suppresses the lower one.
inline SeriesPairResult series_pair_step(const NeuronSpec& upper_spec, NeuronState upper, const NeuronSpec& lower_spec,
                                         NeuronState lower, const SeriesPairInput& input, double t_ns,
                                         std::uint64_t seed, double deficit_fraction = 1.0) {
  upper = receive(upper_spec, std::move(upper), input.photons_upper, Port::excite, t_ns, random::derive_seed(seed, 0));
  lower = receive(lower_spec, std::move(lower), input.photons_lower, Port::excite, t_ns, random::derive_seed(seed, 1));
  auto up = maybe_fire(upper_spec, std::move(upper), t_ns, random::derive_seed(seed, 2));
  if (up.event) apply_series_deficit(upper_spec, *up.event, lower, deficit_fraction);
  auto low = maybe_fire(lower_spec, std::move(lower), t_ns, random::derive_seed(seed, 3));
  return {std::move(up.state), std::move(low.state), up.event, low.event};
}

}  // namespace soen
