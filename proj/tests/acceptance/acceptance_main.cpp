// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <boost/math/distributions/binomial.hpp>

#include "../support/random_network.hpp"
#include "soen/soen.hpp"

using namespace soen;

namespace {

// Tolerances.
constexpr double kCriterion1MaxSeconds = 1.0;
constexpr double kCriterion2MaxSeconds = 120.0;
constexpr std::uint64_t kBandTrials = 10000;
constexpr std::uint64_t kStaircaseTrials = 10000;
constexpr double kSigmas = 3.0;
constexpr std::uint64_t kClosedFormTrials = 10000;
constexpr double kTurnOnLow = 250, kTurnOnHigh = 1000;
constexpr double kSaturationLow = 1500, kSaturationHigh = 6000;
constexpr double kDynamicRangeBits = 11.0, kDynamicRangeTolerance = 1.5;
constexpr double kEnergyAnchorTolerance = 0.5;  // relative
constexpr double kLengthTolerance = 1e-9;       // um, floating-point rounding of the hand expansion
constexpr double kSigFigs = 3;
constexpr double kMiTolerance = 1e-12;

// Criteria that cannot pass as written; each has an entry in the decisions ledger.
const std::set<int> kKnownUnattainable = {7};

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok: " : "FAILED: ") + what);
  }
};

std::string fmt(const char* f, double v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same_to_sig_figs(double a, double b, double figs) {
  if (a == b) return true;
  const double scale = std::pow(10.0, std::floor(std::log10(std::abs(b))) - figs + 1);
  return std::llround(a / scale) == std::llround(b / scale);
}

// Brute-force current redistribution for bias k/20 of N i_c.
int redistribution_oracle(int n_wires, int k) {
  for (int n = 0; n < n_wires; ++n)
    if (k * n_wires >= 20 * (n_wires - n)) return std::max(n, 1);
  return n_wires;
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  int mismatches = 0;
  for (int n = 1; n <= 12; ++n)
    for (int k = 1; k <= 19; ++k)
      if (threshold_count(n, 4.0, k / 20.0 * n * 4.0) != redistribution_oracle(n, k)) ++mismatches;
  const double dt = seconds_since(t0);
  o.check(mismatches == 0, std::to_string(mismatches) + " mismatches over 228 cases");
  o.check(dt < kCriterion1MaxSeconds, fmt("runtime %.3g s", dt));
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto ten = PndArray::make(10, 4.0, 0.01, 100);
  std::vector<double> fractions;
  for (int i = 1; i <= 99; ++i) fractions.push_back(i / 100.0);
  const auto bands = threshold_staircase(ten, fractions, kBandTrials, 1);
  const std::set<std::uint64_t> distinct(bands.begin(), bands.end());
  o.check(distinct.size() == 10, std::to_string(distinct.size()) + " distinct 50% thresholds for N=10");

  const int n = 40;
  const auto forty = PndArray::make(n, 4.0, 0.01, 100);
  std::vector<double> inside;
  for (int k = 1; k <= n; ++k) {
    inside.push_back((n - k + 0.1) / n);
    inside.push_back((n - k + 0.9) / n);
  }
  const auto stairs = threshold_staircase(forty, inside, kStaircaseTrials, 2);
  bool flat = true, rising = true;
  for (int k = 0; k < n; ++k) {
    flat = flat && stairs[2 * k] == stairs[2 * k + 1];
    if (k > 0) rising = rising && stairs[2 * k] > stairs[2 * k - 2];
  }
  o.check(flat, "50% threshold constant inside each N=40 band");
  o.check(rising && std::set<std::uint64_t>(stairs.begin(), stairs.end()).size() == static_cast<std::size_t>(n),
          "40 distinct steps, rising as the bias falls");
  // Step edges sit at integer multiples of i_c.
  bool edges = true;
  const double ic = forty.i_c_wire_ua;
  for (int m = 1; m < n; ++m) {
    const int at = threshold_count(n, ic, m * ic);
    const int below = threshold_count(n, ic, m * ic * (1 - 1e-6));
    const int above_next = threshold_count(n, ic, (m + 1) * ic * (1 - 1e-6));
    edges = edges && below == at + 1 && above_next == at;
  }
  o.check(edges, "step width equals i_c");
  const double dt = seconds_since(t0);
  o.check(dt < kCriterion2MaxSeconds, fmt("runtime %.3g s", dt));
  return o;
}

// Two-sided exact binomial tail of observing `fired` out of `trials`.
double binomial_two_sided(std::uint64_t fired, std::uint64_t trials, double p) {
  if (p <= 0.0) return fired == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return fired == trials ? 1.0 : 0.0;
  const boost::math::binomial_distribution<double> dist(static_cast<double>(trials), p);
  const double k = static_cast<double>(fired);
  const double lower = boost::math::cdf(dist, k);
  const double upper = fired == 0 ? 1.0 : boost::math::cdf(boost::math::complement(dist, k - 1.0));
  return std::min(1.0, 2.0 * std::min(lower, upper));
}

Outcome criterion3() {
  Outcome o;
  // Three standard deviations of a normal variable, applied to the exact binomial tail.
  const double level = std::erfc(kSigmas / std::sqrt(2.0));
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int inside = 0;
  double worst = 1.0;
  for (int i = 0; i < 20; ++i) {
    const double alpha = 0.001 + 0.05 * u(rng);
    const int passes = 1 + static_cast<int>(rng() % 20);
    const int n = 1 + static_cast<int>(rng() % 20);
    const auto a = PndArray::make(n, 4.0, alpha, passes);
    const auto bias = BiasPoint::of(a, 1.0 - 0.5 / n);
    const double p = 1.0 - std::pow(1.0 - alpha, passes * n);
    const auto est = spike_trials(a, 1, bias, kClosedFormTrials, 100 + i);
    const double tail = binomial_two_sided(est.fired, kClosedFormTrials, p);
    worst = std::min(worst, tail);
    if (tail >= level) ++inside;
  }
  o.check(inside == 20, std::to_string(inside) + "/20 triples within 3 sigma" + fmt(" (smallest tail %.3g)", worst));
  return o;
}

Outcome criterion4() {
  Outcome o;
  SndWire wire;
  LedJunction led;
  led.efficiency = 0.01;
  std::vector<std::uint64_t> grid;
  for (std::uint64_t n = 0; n <= 10000; n += 50) grid.push_back(n);
  const auto curve = snd_transfer_curve(wire, led, BiasPoint::fraction(0.7, wire.i_c_ua), 50.0, grid, 20, 3);
  std::vector<std::pair<double, double>> xy;
  for (const auto& p : curve) xy.emplace_back(static_cast<double>(p.photons_in), p.photons_out);
  const auto dr = dynamic_range(xy);
  o.check(dr.turn_on_input >= kTurnOnLow && dr.turn_on_input <= kTurnOnHigh, fmt("turn-on %g photons", dr.turn_on_input));
  o.check(dr.saturation_input >= kSaturationLow && dr.saturation_input <= kSaturationHigh,
          fmt("saturation %g photons", dr.saturation_input));
  o.check(std::abs(dr.bits - kDynamicRangeBits) <= kDynamicRangeTolerance, fmt("dynamic range %.4g bits", dr.bits));
  return o;
}

Outcome criterion5() {
  Outcome o;
  EnergyModel m;
  m.efficiency = 1.0;
  const double e1 = energy_per_event(m, 10000).per_photon_aj;
  o.check(std::abs(e1 - 2.0) <= kEnergyAnchorTolerance * 2.0, fmt("%.4g aJ/photon at eta=1", e1));
  m.efficiency = 0.01;
  const double e2 = energy_per_event(m, 10000).per_photon_aj;
  o.check(std::abs(e2 - 20.0) <= kEnergyAnchorTolerance * 20.0, fmt("%.4g aJ/photon at eta=0.01", e2));
  const double h_nu = units::photon_energy_aj(1.22);
  bool bound = true;
  for (double eta : {1.0, 0.3, 0.1, 0.01})
    for (std::uint64_t n = 1; n <= 100000000; n *= 10) {
      m.efficiency = eta;
      bound = bound && energy_per_event(m, n).per_photon_aj >= h_nu;
    }
  o.check(bound && h_nu >= 0.16, fmt("never below h nu = %.5g aJ", h_nu));
  o.check(wall_energy_aj(20.0, 1000.0) == 20000.0, "wall energy 20 aJ x 1000 = 20 fJ");
  return o;
}

Outcome criterion6() {
  Outcome o;
  struct Hand {
    std::uint64_t n, planes;
    double length_um;  // 18 N / N_wg + 20 N_wg + 0.6 N
  };
  bool exact = true;
  for (const Hand h : {Hand{700, 10, 1880}, Hand{10, 1, 206}, Hand{100, 10, 440}, Hand{1000, 10, 2600},
                       Hand{300, 3, 2040}}) {
    FloorplanParams p;
    p.n_neurons = h.n;
    p.n_wg_planes = h.planes;
    exact = exact && std::abs(layer_length_um(p) - h.length_um) <= kLengthTolerance;
  }
  o.check(exact, "layer length equals the hand expansion");
  FloorplanParams p;
  const double l = layer_length_um(p);
  o.check(l >= 500.0 && l <= 2000.0, fmt("N=700, N_wg=10 length %.4g um vs 1000 um", l));
  struct Target {
    std::uint64_t n, planes;
    double density;
  };
  for (const Target t : {Target{10, 1, 4e5}, Target{100, 10, 1e4}, Target{1000, 10, 300}}) {
    p.n_neurons = t.n;
    p.n_wg_planes = t.planes;
    const double d = neuron_density_per_cm2(p);
    o.check(std::abs(std::log10(d / t.density)) <= 1.0,
            fmt("density %.4g", d) + fmt(" per cm^2 vs %g", t.density));
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto r = system_power(meter_cube_system());
  o.check(same_to_sig_figs(r.device_w, 1.96, kSigFigs), fmt("device power %.6g W", r.device_w));
  o.check(same_to_sig_figs(r.events_per_s_per_w_device, 4.9e16, kSigFigs),
          fmt("%.6g events/s/W device vs 4.9e16", r.events_per_s_per_w_device));
  o.check(same_to_sig_figs(r.events_per_s_per_w_wall, 4.9e13, kSigFigs),
          fmt("%.6g events/s/W wall vs 4.9e13", r.events_per_s_per_w_wall));
  const double brain = brain_events_per_s_per_w(BrainParams{});
  o.check(same_to_sig_figs(brain, 7e12, kSigFigs), fmt("brain %.6g events/s/W", brain));
  return o;
}

Outcome criterion8() {
  Outcome o;
  int identical = 0, conserving = 0, spaced = 0;
  std::uint64_t events = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto net = fixtures::random_network(1000 + i);
    Simulation a(net, i), b(net, i);
    const auto ta = a.step(2000.0);
    const auto tb = b.step(2000.0);
    events += ta.size();
    if (ta == tb) ++identical;
    bool ok = true;
    for (const auto& f : a.fanout_log())
      ok = ok && f.delivered + f.lost == f.available && f.upstream_delivered + f.upstream_lost == f.upstream_available;
    if (ok) ++conserving;
    std::map<NeuronId, double> last;
    bool gap = true;
    for (const auto& rec : ta) {
      const auto it = last.find(rec.neuron);
      if (it != last.end()) gap = gap && rec.t_ns >= it->second + net.neurons[rec.neuron].refractory_period_ns;
      last[rec.neuron] = rec.t_ns;
    }
    if (gap) ++spaced;
  }
  o.check(identical == 100, std::to_string(identical) + "/100 identical reruns");
  o.check(conserving == 100, std::to_string(conserving) + "/100 conserve photons at every fan-out");
  o.check(spaced == 100, std::to_string(spaced) + "/100 respect the refractory period");
  o.check(events > 0, std::to_string(events) + " firing events in total");
  return o;
}

Outcome criterion9() {
  Outcome o;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool bounded = true, monotone = true;
  for (int seq = 0; seq < 100000; ++seq) {
    SynapseParams p;
    p.c_min = 0.5 * u(rng);
    p.q_scale = 0.05 + 2.0 * u(rng);
    p.delta_q_pot = 2.0 * u(rng);
    p.stdp_window_ns = 10.0 + 200.0 * u(rng);
    p.update_interval_min_ns = 500.0 * u(rng);
    const bool causal_only = seq % 2 == 0;
    Synapse s;
    s.coupling = p.c_min + (1.0 - p.c_min) * u(rng);
    s.charge = charge_for_coupling(p, s.coupling);
    double t = 0.0;
    for (int k = 0; k < 20; ++k) {
      t += 300.0 * u(rng);
      const double dt = causal_only ? 250.0 * u(rng) : 500.0 * u(rng) - 250.0;
      const double prev = s.coupling;
      s = stdp_update(s, p, t - dt, t);
      bounded = bounded && s.coupling >= p.c_min && s.coupling <= 1.0;
      if (causal_only) monotone = monotone && s.coupling >= prev;
    }
  }
  o.check(bounded, "coupling stays in [c_min, 1] over 1e5 sequences");
  o.check(monotone, "causal-only sequences never lower the coupling");
  return o;
}

Outcome criterion10() {
  Outcome o;
  std::mt19937_64 rng(10);
  double worst_independent = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t ns = 1 + rng() % 6, nr = 1 + rng() % 6;
    std::vector<std::uint64_t> a(ns), b(nr);
    for (auto& x : a) x = 1 + rng() % 50;
    for (auto& x : b) x = 1 + rng() % 50;
    std::vector<std::vector<std::uint64_t>> rows(ns, std::vector<std::uint64_t>(nr));
    for (std::size_t i = 0; i < ns; ++i)
      for (std::size_t j = 0; j < nr; ++j) rows[i][j] = a[i] * b[j];
    worst_independent = std::max(worst_independent, mutual_information_bits(JointHistogram::from_table(rows)));
  }
  o.check(worst_independent <= kMiTolerance, fmt("independent tables: max MI %.3g bits", worst_independent));

  double worst_bijection = 0.0;
  for (std::size_t n = 1; n <= 64; ++n) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::vector<std::uint64_t>> rows(n, std::vector<std::uint64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) rows[i][perm[i]] = 7;
    worst_bijection = std::max(worst_bijection,
                               std::abs(mutual_information_bits(JointHistogram::from_table(rows)) -
                                        std::log2(static_cast<double>(n))));
  }
  o.check(worst_bijection <= kMiTolerance, fmt("bijective tables: max |MI - log2 N| %.3g", worst_bijection));

  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t ns = 1 + rng() % 8, nr = 1 + rng() % 8;
    std::vector<std::vector<std::uint64_t>> rows(ns, std::vector<std::uint64_t>(nr));
    for (auto& row : rows)
      for (auto& c : row) c = rng() % 3 == 0 ? 0 : rng() % 1000;
    rows[0][0] += 1;
    const auto h = JointHistogram::from_table(rows);
    const double mi = mutual_information_bits(h);
    const double bound = std::min(stimulus_entropy_bits(h), response_entropy_bits(h));
    if (mi < 0.0 || mi > bound + kMiTolerance) ++violations;
  }
  o.check(violations == 0, std::to_string(violations) + " entropy-bound violations over 1000 random tables");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};
  int unexpected = 0;
  for (const auto& [id, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::string detail;
    for (const auto& n : o.notes) detail += (detail.empty() ? "" : "; ") + n;
    const bool known = kKnownUnattainable.count(id) > 0;
    std::printf("%s criterion %d (%.2f s)%s: %s\n", o.pass ? "PASS" : "FAIL", id, seconds_since(t0),
                !o.pass && known ? " [known, see decisions ledger]" : "", detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !known) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
