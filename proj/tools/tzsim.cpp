// tzsim: validate scenarios, run simulations and re-score traces.
//
// Exit codes: 0 ok, 1 runtime or usage failure, 2 invalid scenario,
// 3 invariant violation (only with --check-invariants).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tz/sim/metrics.hpp"
#include "tz/sim/scenario.hpp"
#include "tz/sim/simulation.hpp"
#include "tz/sim/trace_io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kInvalid = 2;
constexpr int kViolation = 3;

void print_diagnostics(const std::string& path, const tz::sim::ScenarioError& e) {
  for (const auto& d : e.diagnostics()) {
    std::cerr << path << ':' << d.line << ": " << d.message << '\n';
  }
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) {
    std::cerr << "tzsim: cannot write " << path << '\n';
    return false;
  }
  return true;
}

// Scenario loading shared by validate and run. Returns an exit code on failure.
std::optional<int> load(const std::string& path, tz::sim::Scenario& out) {
  try {
    out = tz::sim::load_scenario_file(path);
  } catch (const tz::sim::ScenarioError& e) {
    print_diagnostics(path, e);
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "tzsim: " << e.what() << '\n';
    return kRuntime;
  }
  return std::nullopt;
}

int cmd_validate(const std::string& path) {
  tz::sim::Scenario sc;
  if (auto rc = load(path, sc)) return *rc;
  std::cout << "OK " << path << ": " << sc.subscribers.size() << " subscribers, " << sc.lss.size()
            << " in LSS, " << sc.events.size() << " events\n";
  return kOk;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, tz::SimTime until,
            const std::string& trace_path, const std::string& metrics_path, bool check) {
  tz::sim::Scenario sc;
  if (auto rc = load(path, sc)) return *rc;
  if (until < 0) {
    std::cerr << "tzsim: --until must be non-negative\n";
    return kRuntime;
  }

  tz::sim::Simulation sim(sc, {seed, until, check});
  tz::sim::RunResult result;
  try {
    result = sim.run();
  } catch (const tz::sim::InvariantViolation& v) {
    if (!trace_path.empty()) write_file(trace_path, tz::sim::trace_document(sim.trace().events()));
    std::cerr << "invariant violation: " << v.invariant() << " at trace seq " << v.seq() << '\n'
              << "  " << v.what() << '\n';
    return kViolation;
  } catch (const std::exception& e) {
    std::cerr << "tzsim: run failed: " << e.what() << '\n';
    return kRuntime;
  }

  if (!trace_path.empty() && !write_file(trace_path, tz::sim::trace_document(result.trace))) {
    return kRuntime;
  }
  if (!metrics_path.empty() &&
      !write_file(metrics_path, tz::sim::metrics_document(result.metrics))) {
    return kRuntime;
  }
  std::cout << tz::sim::metrics_summary(result.metrics) << '\n';
  return kOk;
}

int cmd_report(const std::string& trace_path, const std::string& metrics_path) {
  std::vector<tz::TraceEvent> trace;
  try {
    trace = tz::sim::read_trace_file(trace_path);
  } catch (const tz::sim::TraceFileError& e) {
    std::cerr << trace_path << ':' << e.line() << ": " << e.what() << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "tzsim: " << e.what() << '\n';
    return kRuntime;
  }
  const std::string doc = tz::sim::metrics_document(tz::sim::compute_metrics(trace));
  std::cout << doc;
  if (!metrics_path.empty()) {
    std::ifstream in(metrics_path, std::ios::binary);
    if (!in) {
      std::cerr << "tzsim: cannot open " << metrics_path << '\n';
      return kRuntime;
    }
    const std::string expected((std::istreambuf_iterator<char>(in)), {});
    if (expected != doc) {
      std::cerr << "tzsim: recomputed metrics differ from " << metrics_path << '\n';
      return kRuntime;
    }
    std::cerr << "metrics match " << metrics_path << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust Zone simulator"};
  app.require_subcommand(1);

  std::string scenario;
  std::string trace_path;
  std::string metrics_path;
  std::uint64_t seed = 0;
  tz::SimTime until = tz::sim::kDefaultUntil;
  bool check = false;

  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("--scenario,scenario", scenario, "Scenario file")->required();

  auto* run = app.add_subcommand("run", "Run a scenario");
  run->add_option("--scenario,scenario", scenario, "Scenario file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "RNG seed (default: config.seed, else 0)");
  run->add_option("--until", until, "Simulated end time in ms")->capture_default_str();
  run->add_option("--trace", trace_path, "Write the trace here");
  run->add_option("--metrics", metrics_path, "Write the metrics here");
  run->add_flag("--check-invariants", check, "Check every invariant after each step");

  auto* report = app.add_subcommand("report", "Recompute metrics from a trace");
  report->add_option("--trace,trace", trace_path, "Trace file")->required();
  report->add_option("--metrics", metrics_path, "Compare against this metrics file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kRuntime;
  }

  if (*validate) return cmd_validate(scenario);
  if (*run) {
    std::optional<std::uint64_t> s;
    if (*seed_opt) s = seed;
    return cmd_run(scenario, s, until, trace_path, metrics_path, check);
  }
  if (*report) return cmd_report(trace_path, metrics_path);
  return kRuntime;
}
