#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "soen/cli.hpp"

using namespace soen;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "soen_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

json error_of(const Result& r) { return json::parse(r.err).at("error"); }

}  // namespace

TEST(Cli, InfoReportsVersion) {
  const auto r = run_cli({"info"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc["run"]["command"], "info");
  EXPECT_FALSE(doc["result"].is_null());
}

TEST(Cli, MissingSubcommandIsConfigError) {
  const auto r = run_cli({});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(error_of(r)["kind"], "config");
}

TEST(Cli, MissingConfigFileIsIoError) {
  const auto r = run_cli({"energy", "--config", "/nonexistent/cfg.json"});
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(error_of(r)["kind"], "io");
  EXPECT_EQ(error_of(r)["exit_code"], 4);
}

TEST(Cli, MalformedJsonIsConfigError) {
  const auto p = scratch("bad.json");
  write_text(p, "{not json");
  EXPECT_EQ(run_cli({"energy", "--config", p.string()}).code, 2);
}

TEST(Cli, UnknownKeyIsConfigError) {
  const auto p = scratch("unknown.json");
  write_text(p, R"({"scan": {"photons": [1], "bogus": 3}})");
  const auto r = run_cli({"energy", "--config", p.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(error_of(r)["message"].get<std::string>().find("bogus"), std::string::npos);
}

TEST(Cli, CommandMismatchIsConfigError) {
  const auto p = scratch("mismatch.json");
  write_text(p, R"({"command": "power"})");
  EXPECT_EQ(run_cli({"energy", "--config", p.string()}).code, 2);
}

TEST(Cli, DomainErrors) {
  EXPECT_EQ(run_cli({"spike-prob", "--alpha", "1.5"}).code, 3);
  EXPECT_EQ(run_cli({"spike-prob", "--bias-fractions", "1.0", "--photons", "1", "--trials", "10"}).code, 3);
  EXPECT_EQ(run_cli({"energy", "--efficiency", "0"}).code, 3);
}

TEST(Cli, CapExceededCarriesCap) {
  const auto r = run_cli({"threshold-scan", "--alpha", "0", "--bias-fractions", "0.5", "--trials", "10",
                          "--photon-cap", "64"});
  ASSERT_EQ(r.code, 3);
  EXPECT_EQ(error_of(r)["cap"], 64);
}

TEST(Cli, BadOverrideValue) {
  EXPECT_EQ(run_cli({"energy", "--set", "scan/cooling_w_per_w=abc"}).code, 2);
  EXPECT_EQ(run_cli({"energy", "--set", "noequals"}).code, 2);
  EXPECT_EQ(run_cli({"energy", "--set", "scan/nope=1"}).code, 2);
}

TEST(Cli, SpikeProbCsv) {
  const auto r = run_cli({"spike-prob", "--bias-fractions", "0.5,0.9", "--photons", "0,5", "--trials", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "bias_fraction,n_photons,probability");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
  EXPECT_NE(r.out.find("0.5,0,0\n"), std::string::npos);
}

TEST(Cli, SeedChangesMonteCarloOutput) {
  const std::vector<std::string> base{"spike-prob", "--bias-fractions", "0.5", "--photons", "40", "--passes", "1", "--trials", "500"};
  auto a = base, b = base, c = base;
  a.insert(a.end(), {"--seed", "1"});
  b.insert(b.end(), {"--seed", "1"});
  c.insert(c.end(), {"--seed", "2"});
  EXPECT_EQ(run_cli(a).out, run_cli(b).out);
  EXPECT_NE(run_cli(a).out, run_cli(c).out);
}

TEST(Cli, WorkersDoNotChangeOutput) {
  const std::vector<std::string> base{"spike-prob", "--bias-fractions", "0.3,0.7", "--photons", "4,9", "--trials", "300"};
  auto a = base, b = base;
  a.insert(a.end(), {"--workers", "1"});
  b.insert(b.end(), {"--workers", "3"});
  EXPECT_EQ(run_cli(a).out, run_cli(b).out);
}

TEST(Cli, PowerPreset) {
  const auto r = run_cli({"power"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto result = json::parse(r.out)["result"];
  EXPECT_NEAR(result["device_w"].get<double>(), 1.96, 1e-9);
  const auto brain = run_cli({"power", "--preset", "brain"});
  ASSERT_EQ(brain.code, 0) << brain.err;
}

TEST(Cli, ReplayIsByteIdentical) {
  const auto first = scratch("replay_a.csv");
  const auto second = scratch("replay_b.csv");
  fs::remove(first);
  fs::remove(second);
  ASSERT_EQ(run_cli({"spike-prob", "--bias-fractions", "0.4,0.8", "--photons", "3,7", "--trials", "300", "--seed",
                     "99", "--output", first.string()})
                .code,
            0);
  const auto record = fs::path(first.string() + ".run.json");
  ASSERT_TRUE(fs::exists(record));
  const auto r = run_cli({"spike-prob", "--config", record.string(), "--output", second.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(first), slurp(second));
  EXPECT_FALSE(slurp(first).empty());
}

TEST(Cli, ReplayEveryCommand) {
  for (const std::string cmd : {"energy", "floorplan", "power", "absorb-stats", "simulate", "threshold-scan"}) {
    const auto target = scratch("every_" + cmd + ".out");
    const auto record = scratch("every_" + cmd + ".record.json");
    std::vector<std::string> args{cmd, "--output", target.string()};
    if (cmd == "absorb-stats") args.insert(args.end(), {"--trials", "50"});
    if (cmd == "threshold-scan") args.insert(args.end(), {"--trials", "50", "--bias-fractions", "0.2,0.8"});
    ASSERT_EQ(run_cli(args).code, 0) << cmd;
    const auto first = slurp(target);
    fs::copy_file(target.string() + ".run.json", record, fs::copy_options::overwrite_existing);
    const auto r = run_cli({cmd, "--config", record.string()});
    ASSERT_EQ(r.code, 0) << cmd << r.err;
    EXPECT_EQ(slurp(target), first) << cmd;
    EXPECT_TRUE(r.out.empty());
  }
}

TEST(Cli, NormalizeIsIdempotent) {
  for (const std::string cmd : {"spike-prob", "threshold-scan", "snd-transfer", "energy", "absorb-stats", "floorplan",
                                "power", "simulate", "info"}) {
    const auto once = cli::normalize(cli::default_config(cmd));
    EXPECT_EQ(cli::normalize(once), once) << cmd;
  }
}

TEST(Cli, OutputDirectoryEnvironment) {
  const auto dir = scratch("envdir");
  fs::remove_all(dir);
  ::setenv(cli::kOutputDirEnv, dir.c_str(), 1);
  const auto r = run_cli({"floorplan", "--output", "nested/plan.csv"});
  ::unsetenv(cli::kOutputDirEnv);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "nested" / "plan.csv"));
  EXPECT_TRUE(fs::exists(dir / "nested" / "plan.csv.run.json"));
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, SimulateCsvAndBinary) {
  const auto csv = run_cli({"simulate"});
  ASSERT_EQ(csv.code, 0) << csv.err;
  EXPECT_EQ(csv.out.rfind("t_ns,neuron_id,photons_out\n", 0), 0u);
  EXPECT_EQ(run_cli({"simulate", "--binary"}).code, 2);  // binary needs a file
  const auto path = scratch("trace.bin");
  const auto bin = run_cli({"simulate", "--binary", "--output", path.string()});
  ASSERT_EQ(bin.code, 0) << bin.err;
  std::ifstream in(path, std::ios::binary);
  const auto trace = read_trace_binary(in);
  std::istringstream rows(csv.out);
  std::string line;
  std::getline(rows, line);
  std::size_t n = 0;
  while (std::getline(rows, line)) ++n;
  EXPECT_EQ(trace.size(), n);
  EXPECT_GE(n, 2u);
}

TEST(Cli, SimulateSweepIndependentOfWorkers) {
  const auto a = run_cli({"simulate", "--sweep", "3", "--workers", "1"});
  const auto b = run_cli({"simulate", "--sweep", "3", "--workers", "2"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, JsonNumbersAreRounded) {
  const auto r = run_cli({"energy", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  std::function<void(const json&)> check = [&](const json& j) {
    if (j.is_number_float()) {
      const double v = j.get<double>();
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.9g", v);
      EXPECT_EQ(std::strtod(buf, nullptr), v);
    }
    if (j.is_structured())
      for (const auto& c : j) check(c);
  };
  check(doc);
}

TEST(Cli, ExecutableExitCodes) {
#ifndef SOEN_CLI_PATH
  GTEST_SKIP() << "executable path not configured";
#else
  const std::string exe = SOEN_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  EXPECT_EQ(status("info"), 0);
  EXPECT_EQ(status("energy --config /nonexistent.json"), 4);
  EXPECT_EQ(status("energy --efficiency 0"), 3);
  EXPECT_EQ(status("energy --no-such-flag"), 2);
#endif
}
