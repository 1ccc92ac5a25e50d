// Command-line front end over the C API.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "pzc/pzc.h"

namespace {

struct Failure {
  pzc_status status;
};

void check(pzc_status status) {
  if (status != PZC_OK) throw Failure{status};
}

// Scenario flags shared by simulate, sweep and ael-report. Values are kept as
// text and handed to the scenario parser so the CLI and config files accept
// exactly the same syntax.
struct ScenarioFlags {
  std::string config;
  std::vector<std::pair<std::string, std::string>> flags{
      {"topology", ""}, {"kinds", ""},  {"functions", ""}, {"n", ""},      {"k", ""},      {"epsilon", ""},
      {"eta", ""},      {"sigma", ""},  {"ct", ""},        {"ht", ""},     {"dt", ""},     {"strategy", ""},
      {"spread", ""},   {"seeds", ""},  {"out", ""},       {"workers", ""}, {"origin", ""}, {"recovery_mode", ""},
  };
  std::vector<std::string> extra;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "Scenario config file (key = value)");
    for (auto& [key, value] : flags) {
      std::string flag = "--" + key;
      for (auto& c : flag) {
        if (c == '_') c = '-';
      }
      cmd->add_option(flag, value, "Overrides '" + key + "' in the config");
    }
    cmd->add_option("--set", extra, "Any other scenario key as key=value")->take_all();
  }

  pzc_scenario* build() const {
    pzc_scenario* s = nullptr;
    check(config.empty() ? pzc_scenario_create(&s) : pzc_scenario_load(config.c_str(), &s));
    try {
      for (const auto& [key, value] : flags) {
        if (!value.empty()) check(pzc_scenario_set(s, key.c_str(), value.c_str()));
      }
      for (const auto& kv : extra) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
          std::fprintf(stderr, "--set expects key=value, got '%s'\n", kv.c_str());
          throw Failure{PZC_ERR_INVALID_ARGUMENT};
        }
        check(pzc_scenario_set(s, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
      }
    } catch (...) {
      pzc_scenario_free(s);
      throw;
    }
    return s;
  }
};

void print_summary(const pzc_summary& s) {
  std::printf("runs=%zu omega=%.4g (sd %.3g) delta=%.4g temp_unavail_peak=%.4g ael_increase=%.4g peak_increase=%.4g "
              "line_trip_rate=%.3g\n",
              s.runs, s.omega_mean, s.omega_std, s.delta_mean, s.temp_unavail_peak_mean, s.ael_increase_mean,
              s.peak_increase_mean, s.line_trip_rate);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Protection-zone attack containment simulator"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-topology", "Generate an AMI topology");
  std::size_t gen_n = 200;
  std::size_t gen_conc = 1;
  std::size_t gen_degree = 3;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "out";
  gen->add_option("--n", gen_n, "Smart meters");
  gen->add_option("--concentrators", gen_conc, "Data concentrators (one NAN each)");
  gen->add_option("--mesh-degree", gen_degree, "Target mean meter degree");
  gen->add_option("--seed,--seeds", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output directory");

  auto* part = app.add_subcommand("partition", "Form protection-zones on a topology");
  std::string part_topology;
  std::string part_kinds;
  std::string part_functions;
  std::string part_function;
  int part_k = 8;
  double part_eps = 0.1;
  int part_eta = 1;
  std::uint64_t part_seed = 1;
  std::string part_out = "out";
  part->add_option("--topology", part_topology, "Edge-list file")->required();
  part->add_option("--kinds", part_kinds, "Component kind file");
  part->add_option("--functions", part_functions, "Function map file");
  part->add_option("--function", part_function, "Function to zone (default: first with meters)");
  part->add_option("--k", part_k, "Number of zones");
  part->add_option("--epsilon", part_eps, "Size imbalance");
  part->add_option("--eta", part_eta, "Extra foreign zones allowed per vertex");
  part->add_option("--seed,--seeds", part_seed, "Partitioner seed");
  part->add_option("--out", part_out, "Output directory");

  ScenarioFlags sim_flags;
  auto* sim = app.add_subcommand("simulate", "Run one scenario over its seeds");
  sim_flags.attach(sim);

  ScenarioFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Run the n x k x sigma x strategy grid");
  sweep_flags.attach(sweep);

  ScenarioFlags ael_flags;
  auto* ael = app.add_subcommand("ael-report", "Community energy load under the pricing attack");
  ael_flags.attach(ael);

  CLI11_PARSE(app, argc, argv);

  const auto* cmd = app.get_subcommands().front();
  try {
    if (cmd == gen) {
      pzc_topology* t = nullptr;
      check(pzc_topology_generate(gen_n, gen_conc, gen_degree, gen_seed, &t));
      std::error_code ec;
      std::filesystem::create_directories(gen_out, ec);
      const auto dir = std::filesystem::path(gen_out);
      const auto edges = (dir / "topology.edges").string();
      const auto kinds = (dir / "topology.kinds").string();
      const auto functions = (dir / "topology.functions").string();
      const auto status = pzc_topology_save(t, edges.c_str(), kinds.c_str(), functions.c_str());
      std::printf("components=%zu edges=%zu -> %s\n", pzc_topology_size(t), pzc_topology_edge_count(t), edges.c_str());
      pzc_topology_free(t);
      check(status);
    } else if (cmd == part) {
      pzc_topology* full = nullptr;
      check(pzc_topology_load(part_topology.c_str(), part_kinds.empty() ? nullptr : part_kinds.c_str(),
                              part_functions.empty() ? nullptr : part_functions.c_str(), &full));
      pzc_topology* target = nullptr;
      pzc_partition* scheme = nullptr;
      auto status = pzc_topology_target(full, part_function.empty() ? nullptr : part_function.c_str(), &target);
      if (status == PZC_OK) status = pzc_partition_build(target, part_k, part_eps, part_eta, part_seed, &scheme);
      std::string path;
      if (status == PZC_OK) {
        std::error_code ec;
        std::filesystem::create_directories(part_out, ec);
        path = (std::filesystem::path(part_out) / "partition.txt").string();
        status = pzc_partition_save(scheme, path.c_str());
      }
      if (status == PZC_OK) {
        std::printf("vertices=%zu k=%d cut=%zu feasible=%s -> %s\n", pzc_topology_size(target), part_k,
                    pzc_partition_cut(scheme), pzc_partition_feasible(scheme) ? "yes" : "no", path.c_str());
      }
      pzc_partition_free(scheme);
      pzc_topology_free(target);
      pzc_topology_free(full);
      check(status);
    } else if (cmd == sim || cmd == ael) {
      auto* s = (cmd == sim ? sim_flags : ael_flags).build();
      pzc_summary summary{};
      const auto status = cmd == sim ? pzc_scenario_run(s, &summary) : pzc_scenario_ael_report(s, &summary);
      pzc_scenario_free(s);
      check(status);
      print_summary(summary);
    } else if (cmd == sweep) {
      auto* s = sweep_flags.build();
      std::size_t points = 0;
      std::size_t failures = 0;
      const auto status = pzc_scenario_sweep(s, &points, &failures);
      pzc_scenario_free(s);
      std::printf("points=%zu failed=%zu\n", points, failures);
      check(status);
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "pzc %s: %s: %s\n", cmd->get_name().c_str(), pzc_status_name(f.status), pzc_last_error());
    return 1;
  }
  return 0;
}
