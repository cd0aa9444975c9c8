#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "../support/random_network.hpp"
#include "soen/network.hpp"
#include "soen/trace_io.hpp"

using namespace soen;

namespace {

void expect_refractory_spacing(const Network& net, const std::vector<TraceRecord>& trace) {
  std::map<NeuronId, double> last;
  for (const auto& r : trace) {
    const auto it = last.find(r.neuron);
    if (it != last.end()) {
      EXPECT_GE(r.t_ns, it->second + net.neurons[r.neuron].refractory_period_ns) << r.neuron;
    }
    last[r.neuron] = r.t_ns;
  }
}

std::uint64_t relay_output() {
  return static_cast<std::uint64_t>(std::floor(expected_photons(LedJunction{}, 20.0, 50.0)));
}

}  // namespace

TEST(Delay, WaveguideGroupIndex) {
  // 1 mm at n_g = 4 is 4 mm of vacuum, 13.34 ps.
  EXPECT_NEAR(propagation_delay_ns(1000.0, 4.0), 4e-3 / 299792458.0 * 1e9, 1e-15);
  EXPECT_THROW(propagation_delay_ns(-1.0, 4.0), DomainError);
  EXPECT_THROW(propagation_delay_ns(1.0, 0.0), DomainError);
}

TEST(Coupling, ChargeRoundTrip) {
  SynapseParams p;
  EXPECT_EQ(coupling_from_charge(p, 0.0), p.c_min);
  EXPECT_EQ(coupling_from_charge(p, std::numeric_limits<double>::infinity()), 1.0);
  for (double c : {0.02, 0.1, 0.5, 0.9, 0.999})
    EXPECT_NEAR(coupling_from_charge(p, charge_for_coupling(p, c)), c, 1e-12);
  EXPECT_NEAR(coupling_from_charge(p, 1.0), p.c_min + (1 - p.c_min) * (1 - std::exp(-1.0)), 1e-15);
}

TEST(Stdp, CausalPairingPotentiates) {
  SynapseParams p;
  Synapse s;
  s.coupling = p.c_min;
  s = stdp_update(s, p, 0.0, 10.0);
  EXPECT_DOUBLE_EQ(s.charge, 0.1);
  EXPECT_DOUBLE_EQ(s.coupling, coupling_from_charge(p, 0.1));
  EXPECT_EQ(s.last_update_ns, 10.0);
}

TEST(Stdp, IgnoredPairings) {
  SynapseParams p;
  Synapse s;
  s.coupling = 0.5;
  EXPECT_EQ(stdp_update(s, p, 10.0, 10.0).charge, 0.0);   // simultaneous
  EXPECT_EQ(stdp_update(s, p, 20.0, 10.0).charge, 0.0);   // anti-causal
  EXPECT_EQ(stdp_update(s, p, 0.0, 100.5).charge, 0.0);   // outside the window
  EXPECT_EQ(stdp_update(s, p, 0.0, 100.0).charge, 0.1);   // window edge
  auto inhibit = s;
  inhibit.port = Port::inhibit;
  EXPECT_EQ(stdp_update(inhibit, p, 0.0, 10.0).charge, 0.0);
}

TEST(Stdp, RateLimited) {
  SynapseParams p;
  Synapse s;
  s = stdp_update(s, p, 0.0, 10.0);
  const auto once = s;
  s = stdp_update(s, p, 500.0, 510.0);
  EXPECT_EQ(s.charge, once.charge);
  s = stdp_update(s, p, 1000.0, 1010.0);
  EXPECT_EQ(s.charge, once.charge + p.delta_q_pot);
}

TEST(Stdp, BoundedAndMonotone) {
  SynapseParams p;
  p.update_interval_min_ns = 0.0;
  p.delta_q_pot = 0.37;
  std::mt19937_64 rng(4);
  for (int seq = 0; seq < 200; ++seq) {
    Synapse s;
    s.coupling = p.c_min;
    double t = 0.0;
    for (int k = 0; k < 100; ++k) {
      t += 1.0 + static_cast<double>(rng() % 500);
      const double prev = s.coupling;
      s = stdp_update(s, p, t - 1.0 - static_cast<double>(rng() % 99), t);
      EXPECT_GE(s.coupling, prev);
      EXPECT_LE(s.coupling, 1.0);
      EXPECT_GE(s.coupling, p.c_min);
    }
  }
}

TEST(EventQueue, TieOrder) {
  EventQueue q;
  q.push({5.0, EventKind::photon_arrival, 2, 0});
  q.push({5.0, EventKind::weight_update, 0, 0});
  q.push({5.0, EventKind::photon_arrival, 1, 3});
  q.push({5.0, EventKind::photon_arrival, 1, 2});
  q.push({5.0, EventKind::refractory_end, 9, 9});
  q.push({5.0, EventKind::decay_checkpoint, 0, 0});
  q.push({1.0, EventKind::weight_update, 0, 0});
  q.push({5.0, EventKind::photon_arrival, 1, 2, Port::excite, 7});
  std::vector<std::tuple<double, EventKind, NeuronId, NeuronId, std::uint64_t>> order;
  while (!q.empty()) {
    const auto e = q.pop();
    order.emplace_back(e.t_ns, e.kind, e.source, e.target, e.photons);
  }
  using E = EventKind;
  const decltype(order) expected{
      {1.0, E::weight_update, 0, 0, 0},  {5.0, E::refractory_end, 9, 9, 0}, {5.0, E::decay_checkpoint, 0, 0, 0},
      {5.0, E::photon_arrival, 1, 2, 0}, {5.0, E::photon_arrival, 1, 2, 7}, {5.0, E::photon_arrival, 1, 3, 0},
      {5.0, E::photon_arrival, 2, 0, 0}, {5.0, E::weight_update, 0, 0, 0}};
  EXPECT_EQ(order, expected);
}

TEST(EventQueue, RejectsPastEvents) {
  EventQueue q;
  q.push({3.0});
  q.pop();
  EXPECT_THROW(q.push({2.0}), InternalError);
  EXPECT_NO_THROW(q.push({3.0}));
  EXPECT_THROW(q.advance_to(1.0), InternalError);
}

TEST(Network, ValidationErrors) {
  Network net;
  net.add_neuron(NeuronSpec{});
  net.connect(0, 1);
  EXPECT_THROW(net.validate(), ConfigError);
  Network inhibit;
  inhibit.add_neuron(NeuronSpec{});
  inhibit.add_neuron(NeuronSpec{});
  inhibit.connect(0, 1, 1.0, Port::inhibit);
  EXPECT_THROW(inhibit.validate(), ConfigError);
  Network stim;
  stim.add_neuron(NeuronSpec{});
  stim.stimuli.push_back({-1.0, 0, Port::excite, 1});
  EXPECT_THROW(stim.validate(), DomainError);
}

TEST(Network, ConnectClampsCoupling) {
  Network net;
  net.add_neuron(NeuronSpec{});
  net.add_neuron(NeuronSpec{});
  EXPECT_EQ(net.connect(0, 1, 5.0).coupling, 1.0);
  EXPECT_EQ(net.connect(0, 1, 0.0).coupling, 0.01);
  EXPECT_FLOAT_EQ(net.synapses[0].delay_ns, static_cast<float>(propagation_delay_ns(1000.0, 4.0)));
}

TEST(Simulation, EmptyNetworkHasEmptyTrace) {
  EXPECT_TRUE(simulate(Network{}, 1000.0, 1).empty());
  Network idle;
  idle.add_neuron(NeuronSpec{});
  EXPECT_TRUE(simulate(idle, 1000.0, 1).empty());
}

TEST(Simulation, TwoNeuronChainFiresOnceDownstream) {
  Network net;
  net.add_neuron(relay_neuron());
  net.add_neuron(NeuronSpec{});
  net.connect(0, 1);
  net.stimuli.push_back({0.0, 0, Port::excite, 1});
  const auto trace = simulate(net, 1000.0, 3);
  ASSERT_EQ(trace.size(), 2u);
  EXPECT_EQ(trace[0], (TraceRecord{0.0, 0, relay_output()}));
  EXPECT_EQ(trace[1].neuron, 1u);
  EXPECT_DOUBLE_EQ(trace[1].t_ns, static_cast<double>(static_cast<float>(propagation_delay_ns(1000.0, 4.0))));
  EXPECT_EQ(trace[1].photons_out, relay_output());
}

TEST(Simulation, ChainMatchesSpikeProbability) {
  // Neuron 0 fires a fixed pulse; the synapse passes exactly k photons on.
  const std::uint64_t k = 8;
  const double c = static_cast<double>(k) / static_cast<double>(relay_output());
  ASSERT_EQ(largest_remainder(relay_output(), {c, 1.0 - c})[0], k);
  Network net;
  SynapseParams p;
  p.c_min = 1e-6;
  net.synapse_classes = {p};
  net.add_neuron(relay_neuron());
  const auto id = net.add_neuron(NeuronSpec{});
  net.connect(0, id, c);
  net.stimuli.push_back({0.0, 0, Port::excite, 1});

  const int runs = 4000;
  int fired = 0;
  for (int s = 0; s < runs; ++s) fired += simulate(net, 100.0, s).size() == 2 ? 1 : 0;
  const auto& spec = net.neurons[id];
  const double ref = spike_probability(spec.pnd(), k, spec.bias_receiver, 100000, 17);
  const double sigma = std::sqrt(ref * (1 - ref) / runs);
  EXPECT_NEAR(static_cast<double>(fired) / runs, ref, 3 * sigma);
}

TEST(Simulation, RandomNetworksDeterministicAndConserving) {
  for (std::uint64_t n = 0; n < 30; ++n) {
    const auto net = fixtures::random_network(n);
    Simulation a(net, n + 100);
    Simulation b(net, n + 100);
    const auto ta = a.step(2000.0);
    const auto tb = b.step(2000.0);
    EXPECT_EQ(ta, tb);
    for (const auto& f : a.fanout_log()) {
      EXPECT_EQ(f.delivered + f.lost, f.available);
      EXPECT_EQ(f.upstream_delivered + f.upstream_lost, f.upstream_available);
    }
    expect_refractory_spacing(net, ta);
  }
}

TEST(Simulation, StepIsResumable) {
  const auto net = fixtures::random_network(7);
  const auto whole = simulate(net, 1500.0, 9);
  Simulation sim(net, 9);
  auto parts = sim.step(400.0);
  const auto rest = sim.step(1500.0);
  parts.insert(parts.end(), rest.begin(), rest.end());
  EXPECT_EQ(parts, whole);
  EXPECT_THROW(sim.step(100.0), InternalError);
}

TEST(Simulation, RefractorySpacingUnderContinuousDrive) {
  Network net;
  net.add_neuron(relay_neuron());
  for (int k = 0; k < 100; ++k) net.stimuli.push_back({7.0 * k, 0, Port::excite, 3});
  const auto trace = simulate(net, 1000.0, 1);
  ASSERT_FALSE(trace.empty());
  EXPECT_GE(trace.size(), 10u);
  expect_refractory_spacing(net, trace);
}

TEST(Simulation, InhibitoryStimulusBlocksFiring) {
  NeuronSpec spec;
  spec.receiver = PndArray::make(10, 4.0, 1.0, 1);
  spec.bias_receiver = BiasPoint::fraction(0.75, 40.0);
  spec.variant = Variant::dual_port;
  spec.inhibitory_receiver = PndArray::make(10, 4.0, 1.0, 1);
  spec.integration_time_ns = 1000.0;
  Network net;
  net.add_neuron(spec);
  net.stimuli.push_back({0.0, 0, Port::excite, 3});
  EXPECT_EQ(simulate(net, 10.0, 1).size(), 1u);
  net.stimuli.insert(net.stimuli.begin(), Stimulus{0.0, 0, Port::inhibit, 5});
  EXPECT_TRUE(simulate(net, 10.0, 1).empty());
}

TEST(Simulation, SeriesLinkSuppressesLower) {
  auto spec = relay_neuron();
  Network net;
  net.add_neuron(spec);
  net.add_neuron(spec);
  net.series.push_back({0, 1, 1.0});
  net.stimuli.push_back({0.0, 0, Port::excite, 1});
  net.stimuli.push_back({10.0, 1, Port::excite, 1});
  net.stimuli.push_back({60.0, 1, Port::excite, 1});
  const auto trace = simulate(net, 200.0, 1);
  ASSERT_EQ(trace.size(), 2u);
  EXPECT_EQ(trace[1].neuron, 1u);
  EXPECT_EQ(trace[1].t_ns, 60.0);
}

TEST(Simulation, LearningStrengthensCausalSynapse) {
  Network net;
  net.add_neuron(relay_neuron());
  net.add_neuron(NeuronSpec{});
  net.connect(0, 1, 0.01);
  net.stimuli.push_back({0.0, 0, Port::excite, 1});
  Simulation sim(net, 5);
  const auto trace = sim.step(100.0);
  ASSERT_EQ(trace.size(), 2u);
  EXPECT_GT(sim.network().synapses[0].coupling, 0.01);
  Simulation frozen(net, 5);
  frozen.learning = false;
  frozen.step(100.0);
  EXPECT_EQ(frozen.network().synapses[0].coupling, 0.01);
}

TEST(Sweep, IndependentOfWorkerCount) {
  const auto net = fixtures::random_network(11);
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  EXPECT_EQ(simulate_sweep(net, 1000.0, seeds, 1), simulate_sweep(net, 1000.0, seeds, 3));
}

TEST(Weights, IdentityTableIsNoOp) {
  auto net = build_mlp(3, 4, 2);
  net.synapses[2].last_update_ns = 42.0;
  std::vector<double> table;
  for (const auto& s : net.synapses) table.push_back(s.coupling);
  const auto before = net.synapses;
  set_weights(net, table);
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_EQ(net.synapses[i].coupling, before[i].coupling);
    EXPECT_EQ(net.synapses[i].charge, before[i].charge);
    EXPECT_EQ(net.synapses[i].last_update_ns, before[i].last_update_ns);
  }
}

TEST(Weights, ZerosClampToMinimum) {
  auto net = build_mlp(2, 2, 1);
  set_weights(net, std::vector<double>(net.synapses.size(), 0.0));
  for (const auto& s : net.synapses) {
    EXPECT_EQ(s.coupling, 0.01);
    EXPECT_EQ(s.charge, 0.0);
  }
}

TEST(Weights, QuantizerLevels) {
  auto net = build_mlp(20, 20, 1);
  std::mt19937_64 rng(2);
  std::vector<double> table;
  for (std::size_t i = 0; i < net.synapses.size(); ++i) table.push_back(static_cast<double>(rng() % 10000) / 9999.0);
  set_weights(net, table, 3);
  std::set<double> levels;
  for (const auto& s : net.synapses) levels.insert(s.coupling);
  EXPECT_LE(levels.size(), 8u);
  EXPECT_GE(levels.size(), 6u);
  EXPECT_EQ(*levels.rbegin(), 1.0);
}

TEST(Weights, Errors) {
  auto net = build_mlp(2, 2, 1);
  EXPECT_THROW(set_weights(net, {0.5}), ConfigError);
  EXPECT_THROW(set_weights(net, std::vector<double>(4, std::nan(""))), ConfigError);
  EXPECT_THROW(set_weights(net, std::vector<double>(4, 0.5), 0), ConfigError);
}

TEST(Mlp, SmallestNetwork) {
  const auto net = build_mlp(1, 1, 1);
  EXPECT_EQ(net.neurons.size(), 2u);
  ASSERT_EQ(net.synapses.size(), 1u);
  EXPECT_EQ(net.synapses[0].src, 0u);
  EXPECT_EQ(net.synapses[0].dst, 1u);
  EXPECT_THROW(build_mlp(0, 1, 1), DomainError);
}

TEST(Mlp, LayerStructure) {
  const auto net = build_mlp(3, 4, 3);
  EXPECT_EQ(net.neurons.size(), 15u);
  EXPECT_EQ(net.synapses.size(), 3u * 4 + 4 * 4 * 2);
  for (const auto& s : net.synapses) {
    const int src_layer = s.src < 3 ? 0 : 1 + (s.src - 3) / 4;
    const int dst_layer = 1 + (static_cast<int>(s.dst) - 3) / 4;
    EXPECT_GE(s.dst, 3u);
    EXPECT_EQ(dst_layer, src_layer + 1);
  }
}

TEST(Mlp, FullScaleSynapseCount) {
  const auto net = build_mlp(700, 700, 100);
  EXPECT_EQ(net.neurons.size(), 700u * 101);
  EXPECT_EQ(net.synapses.size(), 700ull * 700 * 100);
}

TEST(Mlp, SignalPropagatesThroughLayers) {
  MlpOptions o;
  o.neuron = relay_neuron();
  const auto net_base = build_mlp(1, 2, 3, o);
  auto net = net_base;
  net.stimuli.push_back({0.0, 0, Port::excite, 1});
  const auto trace = simulate(net, 1000.0, 1);
  EXPECT_EQ(trace.size(), 7u);
  std::set<NeuronId> fired;
  for (const auto& r : trace) fired.insert(r.neuron);
  EXPECT_EQ(fired.size(), 7u);
}

TEST(VisualCortex, Wiring) {
  const std::uint64_t pixels = 16, gran = 20, supra = 30;
  const auto lay = visual_cortex_layout(pixels, gran, supra);
  const auto net = build_visual_cortex(pixels, gran, supra);
  EXPECT_EQ(net.neurons.size(), pixels * 2 + gran + supra);
  EXPECT_NO_THROW(net.validate());
  auto in = [](NeuronId x, NeuronId b, NeuronId e) { return x >= b && x < e; };
  bool g_to_t = false, s_to_s = false, s_to_g = false, inhibit = false;
  std::set<std::pair<NeuronId, NeuronId>> seen;
  for (const auto& s : net.synapses) {
    EXPECT_NE(s.src, s.dst);
    EXPECT_TRUE(seen.insert({s.src, s.dst}).second);
    const bool src_thal = in(s.src, lay.thalamus_begin, lay.granular_begin);
    const bool dst_thal = in(s.dst, lay.thalamus_begin, lay.granular_begin);
    EXPECT_FALSE(src_thal && dst_thal);
    EXPECT_FALSE(in(s.dst, lay.pixels_begin, lay.thalamus_begin));
    if (in(s.src, lay.granular_begin, lay.supragranular_begin) && dst_thal) g_to_t = true;
    if (in(s.src, lay.supragranular_begin, lay.end) && in(s.dst, lay.supragranular_begin, lay.end)) s_to_s = true;
    if (in(s.src, lay.supragranular_begin, lay.end) && in(s.dst, lay.granular_begin, lay.supragranular_begin))
      s_to_g = true;
    if (s.port == Port::inhibit) {
      inhibit = true;
      EXPECT_TRUE(in(s.src, lay.pixels_begin, lay.thalamus_begin));
    }
  }
  EXPECT_TRUE(g_to_t);
  EXPECT_TRUE(s_to_s);
  EXPECT_TRUE(s_to_g);
  EXPECT_TRUE(inhibit);
}

TEST(VisualCortex, SilentWithoutStimulus) {
  const auto net = build_visual_cortex(16, 20, 30);
  EXPECT_TRUE(simulate(net, 5000.0, 3).empty());
}

TEST(VisualCortex, StimulusReachesCortex) {
  auto net = build_visual_cortex(16, 20, 30);
  const auto lay = visual_cortex_layout(16, 20, 30);
  for (NeuronId p = 0; p < 16; ++p) net.stimuli.push_back({0.0, p, Port::excite, 1});
  const auto trace = simulate(net, 2000.0, 3);
  bool cortex = false;
  for (const auto& r : trace) cortex = cortex || r.neuron >= lay.granular_begin;
  EXPECT_TRUE(cortex);
  expect_refractory_spacing(net, trace);
}

TEST(TraceIo, CsvFormat) {
  std::ostringstream out;
  write_trace_csv(out, {{0.5, 3, 100}, {1.0 / 3.0, 0, 7}});
  EXPECT_EQ(out.str(), "t_ns,neuron_id,photons_out\n0.5,3,100\n0.333333333,0,7\n");
}

TEST(TraceIo, BinaryRoundTrip) {
  const std::vector<TraceRecord> trace{{0.0, 0, 1}, {1.25, 7, 62415}, {123456.789, 4000000000u, 0xffffffffu}};
  std::stringstream buf;
  write_trace_binary(buf, trace);
  const std::string bytes = buf.str();
  EXPECT_EQ(bytes.size(), 16u + 16u * trace.size());
  EXPECT_EQ(bytes.substr(0, 8), "SOENTRC1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[16 + 16]), 0xe2);  // 1250 ps little-endian
  EXPECT_EQ(static_cast<unsigned char>(bytes[16 + 17]), 0x04);
  const auto back = read_trace_binary(buf);
  ASSERT_EQ(back.size(), trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    EXPECT_NEAR(back[i].t_ns, trace[i].t_ns, 5e-4);
    EXPECT_EQ(back[i].neuron, trace[i].neuron);
    EXPECT_EQ(back[i].photons_out, trace[i].photons_out);
  }
}

TEST(TraceIo, BinaryErrors) {
  std::stringstream bad("NOTATRACE");
  EXPECT_THROW(read_trace_binary(bad), IoError);
  std::stringstream truncated;
  write_trace_binary(truncated, {{1.0, 1, 1}});
  std::stringstream cut(truncated.str().substr(0, 20));
  EXPECT_THROW(read_trace_binary(cut), IoError);
  std::ostringstream out;
  EXPECT_THROW(write_trace_binary(out, {{1.0, 1, 1ull << 33}}), DomainError);
}
