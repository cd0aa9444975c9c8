#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "soen/config.hpp"
#include "soen/detector.hpp"
#include "soen/emitter.hpp"
#include "soen/energy.hpp"
#include "soen/errors.hpp"
#include "soen/floorplan.hpp"
#include "soen/metrics.hpp"
#include "soen/network.hpp"
#include "soen/trace_io.hpp"

// Command-line driver. Every subcommand resolves one experiment document
// (defaults, then --config, then flags), runs it, and writes a table (CSV or
// JSON) plus, when writing to a file, a "<output>.run.json" run record that
// replays the run when passed back through --config.

namespace soen::cli {

using json = nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kOutputDirEnv = "SOEN_OUTPUT_DIR";

enum ExitCode : int { ok = 0, internal_failure = 1, config_failure = 2, domain_failure = 3, io_failure = 4 };

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

inline json table_json(const Table& t) {
  json rows = json::array();
  for (const auto& row : t.rows) rows.push_back(row);
  return {{"columns", t.columns}, {"rows", rows}};
}

namespace detail {

inline std::vector<double> fraction_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 99; ++k) g.push_back(k / 100.0);
  return g;
}

inline std::vector<std::uint64_t> range(std::uint64_t first, std::uint64_t last, std::uint64_t step) {
  std::vector<std::uint64_t> g;
  for (std::uint64_t v = first; v <= last; v += step) g.push_back(v);
  return g;
}

inline json common_defaults(const std::string& command) {
  return {{"command", command}, {"seed", 1}, {"workers", 1}, {"output", {{"path", ""}, {"format", "csv"}}}};
}

inline json pnd_block(int n_wires, double alpha, int passes) { return config::to_json(PndArray::make(n_wires, 4.0, alpha, passes)); }

inline NeuronSpec chain_neuron() { return NeuronSpec{}; }

}  // namespace detail

// Fully resolved default document of a subcommand.
inline json default_config(const std::string& command) {
  json d = detail::common_defaults(command);
  if (command == "spike-prob") {
    d["detector"] = detail::pnd_block(10, 0.01, 100);
    d["scan"] = {{"bias_fractions", detail::fraction_grid()}, {"photons", detail::range(1, 50, 1)}, {"trials", 1000}};
  } else if (command == "threshold-scan") {
    d["detector"] = detail::pnd_block(10, 0.01, 100);
    d["scan"] = {{"bias_fractions", detail::fraction_grid()},
                 {"trials", 1000},
                 {"counting", "absorbed"},
                 {"photon_cap", nullptr}};
  } else if (command == "snd-transfer") {
    d["snd"] = config::to_json(SndWire{});
    d["emitter"] = config::to_json(LedJunction{});
    d["scan"] = {{"bias_fraction", 0.7},
                 {"pulse_ns", 50.0},
                 {"photons_in", detail::range(0, 10000, 50)},
                 {"realizations", 20}};
  } else if (command == "energy") {
    d["energy"] = config::to_json(EnergyModel{});
    d["scan"] = {{"photons", {1, 10, 100, 1000, 10000}}, {"cooling_w_per_w", 1000.0}};
  } else if (command == "absorb-stats") {
    d["detector"] = detail::pnd_block(40, 0.01, 1);
    d["scan"] = {{"incident", {10, 20, 40, 80, 160, 320}}, {"trials", 1000}};
  } else if (command == "floorplan") {
    d["floorplan"] = config::to_json(FloorplanParams{});
    d["scan"] = {{"n_conn", {10, 30, 100, 300, 1000}}, {"n_wg", {1, 10}}};
  } else if (command == "power") {
    d["output"]["format"] = "json";
    d["preset"] = "paper-1m3";
    d["power"] = config::to_json(meter_cube_system());
    d["brain"] = config::to_json(BrainParams{});
  } else if (command == "simulate") {
    config::NetworkConfig net;
    net.neurons = {detail::chain_neuron(), detail::chain_neuron()};
    net.synapses.push_back({0, 1, 1.0, Port::excite, SynapseRole::forward, std::nullopt});
    net.stimuli.push_back({0.0, 0, Port::excite, 40});
    d["network"] = config::to_json(net);
    d["until_ns"] = 1000.0;
    d["sweep"] = 0;
  } else if (command == "info") {
    d["output"]["format"] = "json";
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  return d;
}

// Merges `user` into `defaults`: objects recursively, anything else replaced.
// Keys absent from an object default are rejected.
inline void merge_strict(json& target, const json& user, const std::string& path) {
  if (!user.is_object()) throw ConfigError((path.empty() ? "document" : path) + " must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string where = path.empty() ? it.key() : path + "." + it.key();
    if (!target.contains(it.key())) throw ConfigError("unknown key '" + where + "'");
    json& slot = target[it.key()];
    // Network documents have variant-shaped entries; they are checked when parsed.
    if (slot.is_object() && it.value().is_object() && path != "network")
      merge_strict(slot, it.value(), where);
    else
      slot = it.value();
  }
}

// Parses every block of a resolved document into typed values and writes
// them back, so the result carries all defaults explicitly.
inline json normalize(const json& doc) {
  config::Reader r(doc, "");
  const std::string command = r.text("command", "");
  json out = detail::common_defaults(command);
  const json defaults = default_config(command);
  out["seed"] = r.count("seed", 1);
  const auto workers = r.count("workers", 1);
  if (workers < 1 || workers > 1024) throw ConfigError("workers must lie in [1, 1024]");
  out["workers"] = workers;
  const json empty = json::object();
  {
    const json* o = r.child("output");
    config::Reader orr(o ? *o : empty, "output");
    out["output"]["path"] = orr.text("path", "");
    const auto format = orr.text("format", defaults["output"]["format"]);
    const bool binary_ok = command == "simulate";
    if (format != "csv" && format != "json" && !(format == "binary" && binary_ok))
      throw ConfigError("output.format must be csv or json" + std::string(binary_ok ? " or binary" : ""));
    if (format == "binary" && out["output"]["path"].get<std::string>().empty())
      throw ConfigError("binary traces need an output path");
    out["output"]["format"] = format;
    orr.finish();
  }
  auto scan_reader = [&](const std::function<void(config::Reader&, json&)>& body) {
    json scan = json::object();
    const json* s = r.child("scan");
    config::Reader sr(s ? *s : empty, "scan");
    body(sr, scan);
    sr.finish();
    out["scan"] = scan;
  };
  const json& ds = defaults.contains("scan") ? defaults["scan"] : json::object();
  auto counts_of = [](const json& j) { return j.get<std::vector<std::uint64_t>>(); };
  auto numbers_of = [](const json& j) { return j.get<std::vector<double>>(); };

  if (command == "spike-prob" || command == "threshold-scan" || command == "absorb-stats") {
    const json* det = r.child("detector");
    out["detector"] = config::to_json(config::pnd_from_json(det ? *det : defaults["detector"], "detector"));
  }
  if (command == "spike-prob") {
    scan_reader([&](config::Reader& s, json& o) {
      o["bias_fractions"] = s.numbers("bias_fractions", numbers_of(ds["bias_fractions"]));
      o["photons"] = s.counts("photons", counts_of(ds["photons"]));
      o["trials"] = s.count("trials", ds["trials"]);
    });
  } else if (command == "threshold-scan") {
    scan_reader([&](config::Reader& s, json& o) {
      o["bias_fractions"] = s.numbers("bias_fractions", numbers_of(ds["bias_fractions"]));
      o["trials"] = s.count("trials", ds["trials"]);
      const auto counting = s.text("counting", "absorbed");
      if (counting != "absorbed" && counting != "incident")
        throw ConfigError("scan.counting must be absorbed or incident");
      o["counting"] = counting;
      o["photon_cap"] = s.has("photon_cap") ? json(s.count("photon_cap", 0)) : json(nullptr);
      s.child("photon_cap");
    });
  } else if (command == "snd-transfer") {
    const json* w = r.child("snd");
    out["snd"] = config::to_json(config::snd_from_json(w ? *w : defaults["snd"], "snd"));
    const json* e = r.child("emitter");
    out["emitter"] = config::to_json(config::led_from_json(e ? *e : defaults["emitter"], "emitter"));
    scan_reader([&](config::Reader& s, json& o) {
      o["bias_fraction"] = s.number("bias_fraction", ds["bias_fraction"]);
      o["pulse_ns"] = s.number("pulse_ns", ds["pulse_ns"]);
      o["photons_in"] = s.counts("photons_in", counts_of(ds["photons_in"]));
      o["realizations"] = s.count("realizations", ds["realizations"]);
    });
  } else if (command == "energy") {
    const json* e = r.child("energy");
    out["energy"] = config::to_json(config::energy_from_json(e ? *e : defaults["energy"], "energy"));
    scan_reader([&](config::Reader& s, json& o) {
      o["photons"] = s.counts("photons", counts_of(ds["photons"]));
      o["cooling_w_per_w"] = s.number("cooling_w_per_w", ds["cooling_w_per_w"]);
    });
  } else if (command == "absorb-stats") {
    scan_reader([&](config::Reader& s, json& o) {
      o["incident"] = s.counts("incident", counts_of(ds["incident"]));
      o["trials"] = s.count("trials", ds["trials"]);
    });
  } else if (command == "floorplan") {
    const json* f = r.child("floorplan");
    out["floorplan"] = config::to_json(config::floorplan_from_json(f ? *f : defaults["floorplan"], "floorplan"));
    scan_reader([&](config::Reader& s, json& o) {
      o["n_conn"] = s.counts("n_conn", counts_of(ds["n_conn"]));
      o["n_wg"] = s.counts("n_wg", counts_of(ds["n_wg"]));
    });
  } else if (command == "power") {
    const auto preset = r.text("preset", "paper-1m3");
    if (preset != "paper-1m3" && preset != "brain" && preset != "custom")
      throw ConfigError("preset must be paper-1m3, brain or custom");
    out["preset"] = preset;
    const json* p = r.child("power");
    out["power"] = config::to_json(config::power_from_json(p ? *p : defaults["power"], "power"));
    const json* b = r.child("brain");
    out["brain"] = config::to_json(config::brain_from_json(b ? *b : defaults["brain"], "brain"));
  } else if (command == "simulate") {
    const json* n = r.child("network");
    out["network"] = config::to_json(config::network_from_json(n ? *n : defaults["network"], "network"));
    out["until_ns"] = r.number("until_ns", defaults["until_ns"]);
    if (!(out["until_ns"].get<double>() >= 0.0)) throw ConfigError("until_ns must be nonnegative");
    out["sweep"] = r.count("sweep", 0);
  } else if (command != "info") {
    throw ConfigError("unknown command '" + command + "'");
  }
  r.finish();
  return out;
}

// Reads a document from disk; missing or unreadable files are I/O errors,
// malformed JSON is a configuration error.
inline json load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

// Applies a command-line value at a slash-separated pointer, interpreting it
// according to the type of the value already there.
inline void apply_override(json& doc, const std::string& pointer, const std::string& raw) {
  const json::json_pointer ptr(pointer);
  json current = doc.contains(ptr) ? doc.at(ptr) : json(nullptr);
  json value;
  if (current.is_string()) {
    value = raw;
  } else if (current.is_array()) {
    value = json::array();
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        value.push_back(json::parse(item));
      } catch (const json::parse_error&) {
        throw ConfigError("'" + raw + "' is not a comma-separated list of numbers");
      }
    }
  } else {
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      if (current.is_null()) value = raw;
      else throw ConfigError("'" + raw + "' is not a valid value for " + pointer);
    }
  }
  doc[ptr] = value;
}

inline std::filesystem::path resolve_output_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) p = std::filesystem::path(dir) / p;
  }
  return p;
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot open output file '" + p.string() + "'");
  f << content;
  if (!f) throw IoError("failed to write output file '" + p.string() + "'");
}

// ---- command bodies ----

struct Output {
  Table table;
  json result;         // used instead of the table when not null
  std::string binary;  // raw bytes for binary traces
};

namespace detail {

inline Output spike_prob(const json& d) {
  const auto array = config::pnd_from_json(d["detector"], "detector");
  const auto surface =
      spike_probability_surface(array, d["scan"]["bias_fractions"].get<std::vector<double>>(),
                                d["scan"]["photons"].get<std::vector<std::uint64_t>>(), d["scan"]["trials"],
                                d["seed"], MonteCarloOptions{d["workers"].get<unsigned>()});
  Output o;
  o.table.columns = {"bias_fraction", "n_photons", "probability"};
  for (const auto& p : surface) o.table.rows.push_back({p.bias_fraction, static_cast<double>(p.n_photons), p.probability});
  return o;
}

inline Output threshold_scan(const json& d) {
  const auto array = config::pnd_from_json(d["detector"], "detector");
  ThresholdOptions opts;
  opts.counting = d["scan"]["counting"] == "incident" ? PhotonCounting::incident : PhotonCounting::absorbed;
  if (!d["scan"]["photon_cap"].is_null()) opts.photon_cap = d["scan"]["photon_cap"].get<std::uint64_t>();
  opts.workers = d["workers"];
  Output o;
  o.table.columns = {"bias_fraction", "threshold_count", "photons_at_half"};
  const auto fractions = d["scan"]["bias_fractions"].get<std::vector<double>>();
  const auto stairs = threshold_staircase(array, fractions, d["scan"]["trials"], d["seed"], opts);
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const int n_c = threshold_count(array, BiasPoint::of(array, fractions[i]));
    o.table.rows.push_back({fractions[i], static_cast<double>(n_c), static_cast<double>(stairs[i])});
  }
  return o;
}

inline Output snd_transfer(const json& d) {
  const auto wire = config::snd_from_json(d["snd"], "snd");
  const auto led = config::led_from_json(d["emitter"], "emitter");
  const auto bias = BiasPoint::fraction(d["scan"]["bias_fraction"], wire.i_c_ua);
  const auto curve = snd_transfer_curve(wire, led, bias, d["scan"]["pulse_ns"],
                                        d["scan"]["photons_in"].get<std::vector<std::uint64_t>>(),
                                        d["scan"]["realizations"], d["seed"], d["workers"].get<unsigned>());
  Output o;
  o.table.columns = {"photons_in", "resistance_kohm", "photons_out"};
  std::vector<std::pair<double, double>> xy;
  for (const auto& p : curve) {
    o.table.rows.push_back({static_cast<double>(p.photons_in), p.resistance_kohm, p.photons_out});
    xy.emplace_back(static_cast<double>(p.photons_in), p.photons_out);
  }
  if (d["output"]["format"] == "json") {
    o.result = table_json(o.table);
    try {
      const auto dr = dynamic_range(xy);
      o.result["dynamic_range"] = {
          {"turn_on_input", dr.turn_on_input}, {"saturation_input", dr.saturation_input}, {"bits", dr.bits}};
    } catch (const DomainError&) {
      o.result["dynamic_range"] = nullptr;
    }
  }
  return o;
}

inline Output energy(const json& d) {
  const auto model = config::energy_from_json(d["energy"], "energy");
  const double cooling = d["scan"]["cooling_w_per_w"];
  Output o;
  o.table.columns = {"n_photons", "inductive_aj", "capacitive_aj", "photonic_aj", "total_aj", "per_photon_aj",
                     "v_led", "wall_per_photon_aj"};
  for (auto n : d["scan"]["photons"].get<std::vector<std::uint64_t>>()) {
    const auto e = energy_per_event(model, n);
    o.table.rows.push_back({static_cast<double>(n), e.breakdown.inductive_aj, e.breakdown.capacitive_aj,
                            e.breakdown.photonic_aj, e.total_aj, e.per_photon_aj, e.v_led,
                            wall_energy_aj(e.per_photon_aj, cooling)});
  }
  return o;
}

inline Output absorb_stats(const json& d) {
  const auto array = config::pnd_from_json(d["detector"], "detector");
  Output o;
  o.table.columns = {"n_incident", "mean_per_wire", "mean_std", "std_of_std"};
  for (auto n : d["scan"]["incident"].get<std::vector<std::uint64_t>>()) {
    const auto s = absorption_statistics(array, n, d["scan"]["trials"], d["seed"],
                                         MonteCarloOptions{d["workers"].get<unsigned>()});
    o.table.rows.push_back({static_cast<double>(n), s.mean_of_means, s.mean_of_stds, s.std_of_stds});
  }
  return o;
}

inline Output floorplan(const json& d) {
  auto p = config::floorplan_from_json(d["floorplan"], "floorplan");
  Output o;
  o.table.columns = {"n_conn", "n_wg", "L_l_um", "W_l_um", "density_per_cm2"};
  for (auto n_wg : d["scan"]["n_wg"].get<std::vector<std::uint64_t>>())
    for (auto n : d["scan"]["n_conn"].get<std::vector<std::uint64_t>>()) {
      p.n_neurons = n;
      p.n_wg_planes = n_wg;
      o.table.rows.push_back({static_cast<double>(n), static_cast<double>(n_wg), layer_length_um(p),
                              fully_connected_width_um(p), neuron_density_per_cm2(p)});
    }
  return o;
}

inline Output power(const json& d) {
  Output o;
  const auto preset = d["preset"].get<std::string>();
  if (preset == "brain") {
    const auto b = config::brain_from_json(d["brain"], "brain");
    o.result = {{"preset", preset}, {"events_per_s_per_w", brain_events_per_s_per_w(b)}};
  } else {
    const auto r = system_power(config::power_from_json(d["power"], "power"));
    o.result = {{"preset", preset},
                {"events_per_s", r.events_per_s},
                {"device_w", r.device_w},
                {"wall_w", r.wall_w},
                {"events_per_s_per_w_device", r.events_per_s_per_w_device},
                {"events_per_s_per_w_wall", r.events_per_s_per_w_wall}};
  }
  return o;
}

inline Output simulate(const json& d) {
  auto net_cfg = config::network_from_json(d["network"], "network");
  const Network net = config::build_network(net_cfg);
  const double until = d["until_ns"];
  const std::uint64_t seed = d["seed"];
  const std::uint64_t sweep = d["sweep"];
  const auto format = d["output"]["format"].get<std::string>();

  auto run_one = [&](std::uint64_t s) {
    Simulation sim(net, s);
    sim.learning = net_cfg.learning;
    return sim.step(until);
  };

  Output o;
  if (sweep == 0) {
    const auto trace = run_one(seed);
    if (format == "binary") {
      std::ostringstream bytes;
      write_trace_binary(bytes, trace);
      o.binary = bytes.str();
      return o;
    }
    o.table.columns = {"t_ns", "neuron_id", "photons_out"};
    for (const auto& r : trace)
      o.table.rows.push_back({r.t_ns, static_cast<double>(r.neuron), static_cast<double>(r.photons_out)});
    return o;
  }
  if (format == "binary") throw ConfigError("binary output holds a single trace; drop --sweep");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < sweep; ++i) seeds.push_back(random::derive_seed(seed, i));
  const auto traces = random::parallel_map(sweep, d["workers"].get<unsigned>(), [&](std::uint64_t i) {
    return run_one(seeds[i]);
  });
  o.table.columns = {"run", "t_ns", "neuron_id", "photons_out"};
  for (std::uint64_t i = 0; i < sweep; ++i)
    for (const auto& r : traces[i])
      o.table.rows.push_back(
          {static_cast<double>(i), r.t_ns, static_cast<double>(r.neuron), static_cast<double>(r.photons_out)});
  return o;
}

inline Output info(const json&) {
  Output o;
  o.result = {{"name", "soen"},
              {"version", kVersion},
              {"commands",
               {"spike-prob", "threshold-scan", "snd-transfer", "energy", "absorb-stats", "floorplan", "power",
                "simulate", "info"}},
              {"output_dir_env", kOutputDirEnv},
              {"trace_binary_magic", std::string(kTraceMagic, sizeof kTraceMagic)}};
  return o;
}

}  // namespace detail

inline Output execute(const json& resolved) {
  const auto command = resolved["command"].get<std::string>();
  if (command == "spike-prob") return detail::spike_prob(resolved);
  if (command == "threshold-scan") return detail::threshold_scan(resolved);
  if (command == "snd-transfer") return detail::snd_transfer(resolved);
  if (command == "energy") return detail::energy(resolved);
  if (command == "absorb-stats") return detail::absorb_stats(resolved);
  if (command == "floorplan") return detail::floorplan(resolved);
  if (command == "power") return detail::power(resolved);
  if (command == "simulate") return detail::simulate(resolved);
  if (command == "info") return detail::info(resolved);
  throw ConfigError("unknown command '" + command + "'");
}

// Renders the output in the document's format. JSON output embeds the
// resolved document under "run".
inline std::string render(const json& resolved, const Output& o) {
  if (!o.binary.empty() || resolved["output"]["format"] == "binary") return o.binary;
  if (resolved["output"]["format"] == "json") {
    json doc = {{"run", resolved}, {"result", o.result.is_null() ? table_json(o.table) : o.result}};
    return config::round_numbers(doc).dump(2) + "\n";
  }
  std::ostringstream s;
  if (o.result.is_null())
    write_csv(s, o.table);
  else
    s << config::round_numbers(o.result).dump(2) << "\n";
  return s.str();
}

inline json error_record(const std::string& kind, int code, const std::string& message) {
  return {{"error", {{"kind", kind}, {"exit_code", code}, {"message", message}}}};
}

struct FlagBinding {
  std::string name;
  std::string pointer;
  std::string help;
};

inline std::vector<FlagBinding> flags_for(const std::string& command) {
  std::vector<FlagBinding> detector = {{"--n-wires", "/detector/n_wires", "wires in the PND array"},
                                       {"--alpha", "/detector/alpha", "absorption probability per wire per pass"},
                                       {"--passes", "/detector/n_passes", "passes of the pulse over the array"},
                                       {"--ic", "/detector/i_c_wire_ua", "single-wire critical current (uA)"}};
  std::vector<FlagBinding> f;
  if (command == "spike-prob") {
    f = detector;
    f.push_back({"--trials", "/scan/trials", "Monte Carlo trials per point"});
    f.push_back({"--bias-fractions", "/scan/bias_fractions", "comma-separated bias fractions of I_c"});
    f.push_back({"--photons", "/scan/photons", "comma-separated pulse sizes"});
  } else if (command == "threshold-scan") {
    f = detector;
    f.push_back({"--trials", "/scan/trials", "Monte Carlo trials per evaluation"});
    f.push_back({"--bias-fractions", "/scan/bias_fractions", "comma-separated bias fractions of I_c"});
    f.push_back({"--counting", "/scan/counting", "absorbed or incident"});
    f.push_back({"--photon-cap", "/scan/photon_cap", "largest pulse tried"});
  } else if (command == "snd-transfer") {
    f = {{"--bias-fraction", "/scan/bias_fraction", "bias as a fraction of the wire I_c"},
         {"--efficiency", "/emitter/efficiency", "LED quantum efficiency"},
         {"--pulse-ns", "/scan/pulse_ns", "emission window (ns)"},
         {"--photons-in", "/scan/photons_in", "comma-separated input pulse sizes"},
         {"--realizations", "/scan/realizations", "Monte Carlo realizations"}};
  } else if (command == "energy") {
    f = {{"--efficiency", "/energy/efficiency", "LED quantum efficiency"},
         {"--i-wire", "/energy/i_wire_ua", "current in each inductive square (uA)"},
         {"--photons", "/scan/photons", "comma-separated photons per event"},
         {"--cooling", "/scan/cooling_w_per_w", "cooling watts per dissipated watt"}};
  } else if (command == "absorb-stats") {
    f = detector;
    f.push_back({"--incident", "/scan/incident", "comma-separated incident photon numbers"});
    f.push_back({"--trials", "/scan/trials", "Monte Carlo trials per point"});
  } else if (command == "floorplan") {
    f = {{"--n-conn", "/scan/n_conn", "comma-separated neurons per layer"},
         {"--n-wg", "/scan/n_wg", "comma-separated waveguide plane counts"}};
  } else if (command == "power") {
    f = {{"--preset", "/preset", "paper-1m3, brain or custom"},
         {"--e-synapse", "/power/e_synapse_aj", "energy per synapse event (aJ)"},
         {"--n-conn", "/power/n_conn", "connections per unit"},
         {"--rate", "/power/rate_hz", "firing rate (Hz)"},
         {"--n-units", "/power/n_units", "number of units"},
         {"--cooling", "/power/cooling_w_per_w", "cooling watts per dissipated watt"}};
  } else if (command == "simulate") {
    f = {{"--until", "/until_ns", "simulated time (ns)"}, {"--sweep", "/sweep", "number of seeds to run"}};
  }
  return f;
}

// Entry point: returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> commands = {"spike-prob", "threshold-scan", "snd-transfer", "energy", "absorb-stats",
                                             "floorplan",  "power",          "simulate",     "info"};
  CLI::App app{"Superconducting optoelectronic network simulator", "soen"};
  app.require_subcommand(1);
  std::map<std::string, std::string> raw;  // flag name -> value
  std::map<std::string, std::string> pointers;
  std::string config_path, output, format, seed, workers;
  std::vector<std::string> sets;
  bool binary = false;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c);
    sub->add_option("--config", config_path, "experiment document (JSON) or run record to replay");
    sub->add_option("--seed", seed, "64-bit seed");
    sub->add_option("--output", output, "output file (relative paths honour " + std::string(kOutputDirEnv) + ")");
    sub->add_option("--format", format, "csv or json");
    sub->add_option("--workers", workers, "worker threads");
    sub->add_option("--set", sets, "override: json/pointer=value");
    if (c == "simulate") sub->add_flag("--binary", binary, "write the trace in the binary framing");
    for (const auto& fb : flags_for(c)) {
      sub->add_option(fb.name, raw[c + fb.name], fb.help);
      pointers[c + fb.name] = fb.pointer;
    }
  }

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << error_record("config", config_failure, e.what()).dump() << "\n";
    return config_failure;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  auto* sub = app.get_subcommands().front();
  try {
    json doc = default_config(command);
    if (!config_path.empty()) {
      const json user = load_document(config_path);
      if (user.contains("command") && user["command"] != command)
        throw ConfigError("config document is for command '" + user["command"].dump() + "'");
      merge_strict(doc, user, "");
    }
    if (sub->count("--seed")) apply_override(doc, "/seed", seed);
    if (sub->count("--workers")) apply_override(doc, "/workers", workers);
    if (sub->count("--output")) doc["output"]["path"] = output;
    if (sub->count("--format")) doc["output"]["format"] = format;
    if (binary) doc["output"]["format"] = "binary";
    for (const auto& fb : flags_for(command))
      if (sub->count(fb.name)) apply_override(doc, fb.pointer, raw[command + fb.name]);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects pointer=value");
      std::string pointer = s.substr(0, eq);
      if (pointer.front() != '/') pointer = "/" + pointer;
      for (auto& ch : pointer)
        if (ch == '.') ch = '/';
      json probe = doc;
      apply_override(probe, pointer, s.substr(eq + 1));
      merge_strict(doc, probe, "");
    }
    const json resolved = normalize(doc);
    const Output result = execute(resolved);
    const std::string rendered = render(resolved, result);
    const auto path = resolved["output"]["path"].get<std::string>();
    if (path.empty()) {
      out << rendered;
    } else {
      const auto target = resolve_output_path(path);
      write_file(target, rendered);
      write_file(target.string() + ".run.json", resolved.dump(2) + "\n");
    }
    return ok;
  } catch (const ConfigError& e) {
    err << error_record("config", config_failure, e.what()).dump() << "\n";
    return config_failure;
  } catch (const CapExceededError& e) {
    auto rec = error_record("domain", domain_failure, e.what());
    rec["error"]["cap"] = e.cap();
    err << rec.dump() << "\n";
    return domain_failure;
  } catch (const DomainError& e) {
    err << error_record("domain", domain_failure, e.what()).dump() << "\n";
    return domain_failure;
  } catch (const IoError& e) {
    err << error_record("io", io_failure, e.what()).dump() << "\n";
    return io_failure;
  } catch (const json::exception& e) {
    err << error_record("config", config_failure, e.what()).dump() << "\n";
    return config_failure;
  } catch (const std::exception& e) {
    err << error_record("internal", internal_failure, e.what()).dump() << "\n";
    return internal_failure;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace soen::cli
