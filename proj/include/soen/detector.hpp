#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "soen/errors.hpp"
#include "soen/random.hpp"

// Photon receivers: the parallel nanowire detector (PND), whose wires switch
// the whole array normal once enough of them have absorbed a photon, and the
// series nanowire detector (SND), a single long wire whose resistance grows
// with every distinct hotspot.

namespace soen {

// Parallel array of superconducting nanowires sharing one bias current.
struct PndArray {
  int n_wires = 10;
  double i_c_wire_ua = 4.0;  // critical current of one wire
  double alpha = 0.01;       // absorption probability per wire per pass
  int n_passes = 100;        // times the pulse passes every wire
  std::vector<bool> wire_normal;  // hotspot state; empty means all superconducting

  static PndArray make(int n_wires, double i_c_wire_ua, double alpha, int n_passes) {
    PndArray a{n_wires, i_c_wire_ua, alpha, n_passes, {}};
    a.validate();
    a.reset();
    return a;
  }

  double critical_current_ua() const { return n_wires * i_c_wire_ua; }

  int normal_count() const { return static_cast<int>(std::count(wire_normal.begin(), wire_normal.end(), true)); }

  void reset() { wire_normal.assign(static_cast<std::size_t>(n_wires), false); }

  void validate() const {
    if (n_wires < 1) throw DomainError("PND needs at least one wire");
    if (!(i_c_wire_ua > 0.0)) throw DomainError("wire critical current must be positive");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("absorption probability must lie in [0, 1]");
    if (n_passes < 1) throw DomainError("pulse must pass each wire at least once");
    if (!wire_normal.empty() && wire_normal.size() != static_cast<std::size_t>(n_wires))
      throw DomainError("wire state vector does not match wire count");
  }
};

// Receiver bias. i_bias_ua = fraction_of_ic * (array or wire critical current).
struct BiasPoint {
  double i_bias_ua = 0.0;
  double fraction_of_ic = 0.0;

  static BiasPoint fraction(double fraction_of_ic, double i_c_ua) {
    return BiasPoint{fraction_of_ic * i_c_ua, fraction_of_ic};
  }
  static BiasPoint of(const PndArray& array, double fraction_of_ic) {
    return fraction(fraction_of_ic, array.critical_current_ua());
  }
};

// Smallest number of photon-driven normal wires that pushes the current in
// each remaining wire, I_b / (N - n), to the single-wire critical current:
// n_c = ceil(N - I_b / i_c). Ratios within 1e-9 of an integer are snapped so
// that an exact boundary counts as firing.
inline int threshold_count(int n_wires, double i_c_wire_ua, double i_bias_ua) {
  const double i_c_array = n_wires * i_c_wire_ua;
  if (!(i_bias_ua > 0.0)) throw DomainError("receiver bias must be positive");
  if (i_bias_ua >= i_c_array) throw AlwaysFiresError(i_bias_ua, i_c_array);
  double ratio = i_bias_ua / i_c_wire_ua;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) ratio = nearest;
  const auto n_c = static_cast<int>(std::ceil(static_cast<double>(n_wires) - ratio));
  return std::clamp(n_c, 1, n_wires);
}

inline int threshold_count(const PndArray& array, const BiasPoint& bias) {
  return threshold_count(array.n_wires, array.i_c_wire_ua, bias.i_bias_ua);
}

namespace detail {

// Probability that a pulse of `remaining` photons loses one to a
// superconducting wire it passes: 1 - (1 - alpha)^remaining. Tabulated once
// per pulse for the counts the pulse can reach (at most max_absorbed photons
// are removed from max_photons).
class PassAbsorption {
 public:
  PassAbsorption(double alpha, std::uint64_t max_photons, std::uint64_t max_absorbed)
      : base_(max_photons > max_absorbed ? max_photons - max_absorbed : 0), table_(max_photons - base_ + 1) {
    const double log_miss = std::log1p(-alpha);
    for (std::uint64_t i = 0; i < table_.size(); ++i) {
      const std::uint64_t p = base_ + i;
      table_[i] = alpha >= 1.0 ? (p > 0 ? 1.0 : 0.0) : -std::expm1(static_cast<double>(p) * log_miss);
    }
  }
  double operator()(std::uint64_t remaining) const { return table_[remaining - base_]; }

 private:
  std::uint64_t base_;
  std::vector<double> table_;
};

}  // namespace detail

// One pulse of n_photons passing the array: the pulse visits the wires in
// order for n_passes rounds; a still-superconducting wire absorbs one photon
// (and turns normal) with probability 1 - (1 - alpha)^remaining, where
// `remaining` is the photon count still in the pulse. Normal wires absorb
// nothing. Updates `normal` in place and returns the number of photons
// absorbed.
inline int pnd_absorb_pulse(std::vector<bool>& normal, int n_passes, const detail::PassAbsorption& absorb,
                            std::uint64_t n_photons, random::Engine& engine) {
  const auto n_wires = normal.size();
  auto superconducting = static_cast<std::size_t>(std::count(normal.begin(), normal.end(), false));
  std::uint64_t remaining = n_photons;
  int absorbed = 0;
  for (int pass = 0; pass < n_passes && remaining > 0 && superconducting > 0; ++pass) {
    for (std::size_t w = 0; w < n_wires && remaining > 0; ++w) {
      if (normal[w]) continue;
      if (random::uniform01(engine) < absorb(remaining)) {
        normal[w] = true;
        --remaining;
        --superconducting;
        ++absorbed;
      }
    }
  }
  return absorbed;
}

inline int pnd_absorb_pulse(PndArray& array, std::uint64_t n_photons, random::Engine& engine) {
  if (array.wire_normal.empty()) array.reset();
  const detail::PassAbsorption absorb(array.alpha, n_photons, static_cast<std::uint64_t>(array.n_wires));
  return pnd_absorb_pulse(array.wire_normal, array.n_passes, absorb, n_photons, engine);
}

struct MonteCarloOptions {
  unsigned workers = 1;
};

// Result of n_trials pulses of the same size against the same bias.
struct SpikeEstimate {
  std::uint64_t trials = 0;
  std::uint64_t fired = 0;
  std::vector<std::uint64_t> normal_histogram;  // trials ending with k normal wires, k = 0..N

  double probability() const { return trials == 0 ? 0.0 : static_cast<double>(fired) / static_cast<double>(trials); }

  // Median final normal-wire count over all trials.
  int median_normal() const {
    std::uint64_t seen = 0;
    for (std::size_t k = 0; k < normal_histogram.size(); ++k) {
      seen += normal_histogram[k];
      if (2 * seen >= trials) return static_cast<int>(k);
    }
    return static_cast<int>(normal_histogram.size()) - 1;
  }
};

// Monte Carlo of the PND firing decision. Trial t uses the stream
// derive_seed(seed, t) and starts from the array's current wire states; it
// fires when the final normal-wire count reaches threshold_count.
inline SpikeEstimate spike_trials(const PndArray& array, std::uint64_t n_photons, const BiasPoint& bias,
                                  std::uint64_t n_trials, std::uint64_t seed, const MonteCarloOptions& options = {}) {
  array.validate();
  if (n_trials < 1) throw DomainError("need at least one trial");
  const int n_c = threshold_count(array, bias);
  std::vector<bool> initial = array.wire_normal;
  if (initial.empty()) initial.assign(static_cast<std::size_t>(array.n_wires), false);
  const detail::PassAbsorption absorb(array.alpha, n_photons, static_cast<std::uint64_t>(array.n_wires));

  const auto finals = random::parallel_map(n_trials, options.workers, [&](std::uint64_t t) -> std::uint16_t {
    auto engine = random::stream(seed, t);
    std::vector<bool> normal = initial;
    pnd_absorb_pulse(normal, array.n_passes, absorb, n_photons, engine);
    return static_cast<std::uint16_t>(std::count(normal.begin(), normal.end(), true));
  });

  SpikeEstimate est;
  est.trials = n_trials;
  est.normal_histogram.assign(static_cast<std::size_t>(array.n_wires) + 1, 0);
  for (auto k : finals) {
    ++est.normal_histogram[k];
    if (k >= n_c) ++est.fired;
  }
  return est;
}

inline double spike_probability(const PndArray& array, std::uint64_t n_photons, const BiasPoint& bias,
                                std::uint64_t n_trials, std::uint64_t seed, const MonteCarloOptions& options = {}) {
  return spike_trials(array, n_photons, bias, n_trials, seed, options).probability();
}

// Which photon count the 50% threshold is reported in.
enum class PhotonCounting {
  incident,  // smallest incident pulse size with P(spike) >= 0.5
  absorbed,  // median absorbed count at that pulse size
};

struct ThresholdOptions {
  std::optional<std::uint64_t> photon_cap;  // default 100 * N / (alpha * passes)
  PhotonCounting counting = PhotonCounting::absorbed;
  unsigned workers = 1;
};

inline std::uint64_t default_photon_cap(const PndArray& array) {
  if (array.alpha <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::ceil(100.0 * array.n_wires / (array.alpha * array.n_passes)));
}

namespace detail {

// Spike estimates by pulse size. The final normal-wire histogram does not
// depend on the bias, so one cache serves every bias of the same array.
class SpikeCache {
 public:
  SpikeCache(const PndArray& array, std::uint64_t n_trials, std::uint64_t seed, unsigned workers)
      : array_(array), n_trials_(n_trials), seed_(seed), workers_(workers) {}

  const SpikeEstimate& at(std::uint64_t n) {
    auto it = cache_.find(n);
    if (it == cache_.end())
      it = cache_.emplace(n, spike_trials(array_, n, BiasPoint::of(array_, 0.5), n_trials_, seed_,
                                          MonteCarloOptions{workers_}))
               .first;
    return it->second;
  }

  bool reached(std::uint64_t n, int n_c) {
    const auto& hist = at(n).normal_histogram;
    std::uint64_t fired = 0;
    for (std::size_t k = static_cast<std::size_t>(n_c); k < hist.size(); ++k) fired += hist[k];
    return 2 * fired >= n_trials_;
  }

 private:
  const PndArray& array_;
  std::uint64_t n_trials_;
  std::uint64_t seed_;
  unsigned workers_;
  std::map<std::uint64_t, SpikeEstimate> cache_;
};

inline std::uint64_t threshold_search(SpikeCache& cache, int n_c, std::uint64_t cap, PhotonCounting counting) {
  std::uint64_t found = 0;
  if (!cache.reached(0, n_c)) {
    if (cap == 0 || !cache.reached(cap, n_c)) throw CapExceededError(cap);
    std::uint64_t lo = 0;  // not reached
    std::uint64_t hi = 1;
    while (hi < cap && !cache.reached(hi, n_c)) {
      lo = hi;
      hi = std::min(cap, hi * 2);
    }
    while (hi - lo > 1) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      (cache.reached(mid, n_c) ? hi : lo) = mid;
    }
    found = hi;
  }
  if (counting == PhotonCounting::incident) return found;
  return static_cast<std::uint64_t>(cache.at(found).median_normal());
}

}  // namespace detail

// Photon number at which the spike probability first reaches 50%.
// Exponential search followed by bisection, all evaluations sharing `seed`
// (common random numbers), assuming P(spike) is nondecreasing in photons.
inline std::uint64_t threshold_at_half(const PndArray& array, const BiasPoint& bias, std::uint64_t n_trials,
                                       std::uint64_t seed, const ThresholdOptions& options = {}) {
  array.validate();
  const int n_c = threshold_count(array, bias);
  detail::SpikeCache cache(array, n_trials, seed, options.workers);
  return detail::threshold_search(cache, n_c, options.photon_cap.value_or(default_photon_cap(array)),
                                  options.counting);
}

// threshold_at_half over a list of bias fractions (of the array critical
// current); identical to calling it per bias, with the Monte Carlo shared.
inline std::vector<std::uint64_t> threshold_staircase(const PndArray& array, const std::vector<double>& bias_fractions,
                                                      std::uint64_t n_trials, std::uint64_t seed,
                                                      const ThresholdOptions& options = {}) {
  array.validate();
  detail::SpikeCache cache(array, n_trials, seed, options.workers);
  const std::uint64_t cap = options.photon_cap.value_or(default_photon_cap(array));
  std::vector<std::uint64_t> out;
  out.reserve(bias_fractions.size());
  for (double f : bias_fractions)
    out.push_back(detail::threshold_search(cache, threshold_count(array, BiasPoint::of(array, f)), cap,
                                           options.counting));
  return out;
}

// Row of the spike-probability surface.
struct SpikeCurvePoint {
  double bias_fraction;
  std::uint64_t n_photons;
  double probability;
};

// Probability surface over bias fractions (of the array critical current) and
// pulse sizes. Every point uses the same seed.
inline std::vector<SpikeCurvePoint> spike_probability_surface(const PndArray& array,
                                                              const std::vector<double>& bias_fractions,
                                                              const std::vector<std::uint64_t>& photon_counts,
                                                              std::uint64_t n_trials, std::uint64_t seed,
                                                              const MonteCarloOptions& options = {}) {
  std::vector<SpikeCurvePoint> out;
  out.reserve(bias_fractions.size() * photon_counts.size());
  // Firing depends on the bias only through n_c and the final normal count
  // does not depend on the bias at all, so one histogram per pulse size serves
  // every bias.
  std::vector<SpikeEstimate> by_photons;
  by_photons.reserve(photon_counts.size());
  const auto any_bias = BiasPoint::of(array, 0.5);
  for (auto n : photon_counts) by_photons.push_back(spike_trials(array, n, any_bias, n_trials, seed, options));
  for (double f : bias_fractions) {
    const int n_c = threshold_count(array, BiasPoint::of(array, f));
    for (std::size_t i = 0; i < photon_counts.size(); ++i) {
      const auto& hist = by_photons[i].normal_histogram;
      std::uint64_t fired = 0;
      for (std::size_t k = static_cast<std::size_t>(n_c); k < hist.size(); ++k) fired += hist[k];
      out.push_back({f, photon_counts[i], static_cast<double>(fired) / static_cast<double>(n_trials)});
    }
  }
  return out;
}

// Absorption statistics in which a wire may absorb any number of photons:
// every incident photon independently walks the wire sequence for n_passes
// rounds and stops at the first wire that absorbs it (probability alpha per
// visit).
struct AbsorptionStats {
  double mean_of_means = 0.0;  // grand mean of absorbed photons per wire
  double mean_of_stds = 0.0;   // mean over trials of the per-wire standard deviation
  double std_of_stds = 0.0;    // sample standard deviation of those standard deviations
};

inline AbsorptionStats absorption_statistics(const PndArray& array, std::uint64_t n_incident, std::uint64_t n_trials,
                                             std::uint64_t seed, const MonteCarloOptions& options = {}) {
  array.validate();
  if (n_trials < 2) throw DomainError("absorption statistics need at least two trials");
  const auto n_wires = static_cast<std::uint64_t>(array.n_wires);
  const std::uint64_t visits = n_wires * static_cast<std::uint64_t>(array.n_passes);
  const double log_miss = std::log1p(-array.alpha);

  struct TrialMoments {
    double mean;
    double std;
  };
  const auto per_trial = random::parallel_map(n_trials, options.workers, [&](std::uint64_t t) -> TrialMoments {
    auto engine = random::stream(seed, t);
    std::vector<std::uint64_t> x(n_wires, 0);
    if (array.alpha > 0.0) {
      for (std::uint64_t p = 0; p < n_incident; ++p) {
        // Index of the first absorbing visit, geometric with success alpha.
        std::uint64_t visit = 0;
        if (array.alpha < 1.0) {
          const double u = random::uniform01(engine);
          const double k = std::floor(std::log1p(-u) / log_miss);
          if (!(k < static_cast<double>(visits))) continue;  // transmitted
          visit = static_cast<std::uint64_t>(k);
        }
        ++x[visit % n_wires];
      }
    }
    double mean = 0.0;
    for (auto v : x) mean += static_cast<double>(v);
    mean /= static_cast<double>(n_wires);
    double var = 0.0;
    for (auto v : x) var += (static_cast<double>(v) - mean) * (static_cast<double>(v) - mean);
    return {mean, std::sqrt(var / static_cast<double>(n_wires))};
  });

  AbsorptionStats stats;
  for (const auto& m : per_trial) {
    stats.mean_of_means += m.mean;
    stats.mean_of_stds += m.std;
  }
  const auto n = static_cast<double>(n_trials);
  stats.mean_of_means /= n;
  stats.mean_of_stds /= n;
  double ss = 0.0;
  for (const auto& m : per_trial) ss += (m.std - stats.mean_of_stds) * (m.std - stats.mean_of_stds);
  stats.std_of_stds = std::sqrt(ss / (n - 1.0));
  return stats;
}

// Single long nanowire; each absorbed photon creates a fixed-resistance
// hotspot in one slot of length hotspot_length_nm. A second photon in an
// occupied slot adds nothing.
struct SndWire {
  double wire_length_um = 100.0;
  double hotspot_length_nm = 100.0;
  double hotspot_resistance_kohm = 1.0;
  double attenuation_length_um = 100.0;
  double i_c_ua = 4.0;
  std::set<std::uint32_t> occupied_slots;

  std::uint32_t slot_count() const {
    return static_cast<std::uint32_t>(std::floor(wire_length_um * 1000.0 / hotspot_length_nm + 1e-9));
  }

  bool saturated() const { return occupied_slots.size() == slot_count(); }

  void validate() const {
    if (!(wire_length_um > 0.0 && hotspot_length_nm > 0.0 && hotspot_resistance_kohm > 0.0 &&
          attenuation_length_um > 0.0 && i_c_ua > 0.0))
      throw DomainError("SND parameters must be positive");
    if (slot_count() < 1) throw DomainError("SND shorter than one hotspot");
    if (!occupied_slots.empty() && *occupied_slots.rbegin() >= slot_count())
      throw DomainError("occupied slot outside the wire");
  }
};

// Slot hit by a photon whose propagation depth along the out-and-back wire
// is `depth_um`, or nullopt when the photon runs past the end of the wire.
inline std::optional<std::uint32_t> snd_slot_at_depth(const SndWire& wire, double depth_um) {
  if (!(depth_um < wire.wire_length_um)) return std::nullopt;
  const auto slot = static_cast<std::uint32_t>(std::floor(depth_um * 1000.0 / wire.hotspot_length_nm));
  return std::min(slot, wire.slot_count() - 1);
}

// Draws the propagation depth of one photon: exponential with mean equal to
// the attenuation length.
inline double snd_sample_depth(const SndWire& wire, random::Engine& engine) {
  return -wire.attenuation_length_um * std::log1p(-random::uniform01(engine));
}

// Absorbs n_photons into `wire` using `engine`; returns the number of photons
// that landed on the wire (including ones hitting occupied slots).
inline std::uint64_t snd_absorb_into(SndWire& wire, std::uint64_t n_photons, random::Engine& engine) {
  std::uint64_t absorbed = 0;
  for (std::uint64_t p = 0; p < n_photons; ++p) {
    if (auto slot = snd_slot_at_depth(wire, snd_sample_depth(wire, engine))) {
      wire.occupied_slots.insert(*slot);
      ++absorbed;
    }
  }
  return absorbed;
}

inline SndWire snd_absorb(SndWire wire, std::uint64_t n_photons, std::uint64_t seed) {
  wire.validate();
  auto engine = random::stream(seed);
  snd_absorb_into(wire, n_photons, engine);
  return wire;
}

inline double snd_resistance_kohm(const SndWire& wire) {
  return static_cast<double>(wire.occupied_slots.size()) * wire.hotspot_resistance_kohm;
}

}  // namespace soen
