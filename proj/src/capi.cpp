#include "pzc/pzc.h"

#include <fstream>
#include <string>

#include "pzc/error.hpp"
#include "pzc/partition.hpp"
#include "pzc/scenario.hpp"
#include "pzc/simulator.hpp"
#include "pzc/topology.hpp"

struct pzc_topology {
  pzc::Topology value;
};

struct pzc_partition {
  pzc::PartitionScheme value;
};

struct pzc_trace {
  pzc::SimTrace value;
};

struct pzc_scenario {
  pzc::Scenario value;
};

namespace {

thread_local std::string last_error;

pzc_status status_of(pzc::ErrorCode code) {
  switch (code) {
    case pzc::ErrorCode::InvalidArgument: return PZC_ERR_INVALID_ARGUMENT;
    case pzc::ErrorCode::Io: return PZC_ERR_IO;
    case pzc::ErrorCode::Parse: return PZC_ERR_PARSE;
    case pzc::ErrorCode::Invariant: return PZC_ERR_INVARIANT;
    case pzc::ErrorCode::Infeasible: return PZC_ERR_INFEASIBLE;
    case pzc::ErrorCode::NotFound: return PZC_ERR_NOT_FOUND;
    case pzc::ErrorCode::TooLarge: return PZC_ERR_TOO_LARGE;
  }
  return PZC_ERR_INTERNAL;
}

template <typename F>
pzc_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return PZC_OK;
  } catch (const pzc::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    return PZC_ERR_IO;
  } catch (const std::exception& e) {
    last_error = e.what();
    return PZC_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return PZC_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw pzc::Error(pzc::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

std::optional<std::filesystem::path> maybe_path(const char* p) {
  if (p == nullptr) return std::nullopt;
  return std::filesystem::path(p);
}

void fill(pzc_summary* out, const pzc::ScenarioResult& r) {
  if (out == nullptr) return;
  out->runs = r.stats.runs;
  out->omega_mean = r.stats.omega.mean;
  out->omega_std = r.stats.omega.std;
  out->delta_mean = r.stats.delta.mean;
  out->delta_std = r.stats.delta.std;
  out->temp_unavail_peak_mean = r.stats.temp_peak.mean;
  out->ael_increase_mean = r.ael_increase.mean;
  out->peak_increase_mean = r.peak_increase.mean;
  out->line_trip_rate = r.line_trip_rate;
}

}  // namespace

extern "C" {

const char* pzc_last_error(void) { return last_error.c_str(); }

const char* pzc_status_name(pzc_status status) {
  switch (status) {
    case PZC_OK: return "ok";
    case PZC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PZC_ERR_IO: return "i/o error";
    case PZC_ERR_PARSE: return "parse error";
    case PZC_ERR_INVARIANT: return "invariant violation";
    case PZC_ERR_INFEASIBLE: return "infeasible";
    case PZC_ERR_NOT_FOUND: return "not found";
    case PZC_ERR_TOO_LARGE: return "too large";
    case PZC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

pzc_status pzc_topology_generate(size_t meters, size_t concentrators, size_t mesh_degree, uint64_t seed,
                                 pzc_topology** out) {
  return guarded([&] {
    require(out, "out");
    *out = new pzc_topology{pzc::generate_ami_topology(meters, concentrators, mesh_degree, seed)};
  });
}

pzc_status pzc_topology_load(const char* edges, const char* kinds, const char* functions, pzc_topology** out) {
  return guarded([&] {
    require(edges, "edges path");
    require(out, "out");
    *out = new pzc_topology{pzc::load_topology(edges, maybe_path(kinds), maybe_path(functions))};
  });
}

pzc_status pzc_topology_save(const pzc_topology* topology, const char* edges, const char* kinds,
                             const char* functions) {
  return guarded([&] {
    require(topology, "topology");
    require(edges, "edges path");
    pzc::save_topology(topology->value, edges, maybe_path(kinds), maybe_path(functions));
  });
}

pzc_status pzc_topology_target(const pzc_topology* topology, const char* function, pzc_topology** out) {
  return guarded([&] {
    require(topology, "topology");
    require(out, "out");
    const auto& t = topology->value;
    const auto ids = pzc::target_members(t, function == nullptr ? std::string() : std::string(function));
    *out = new pzc_topology{t.induced(ids)};
  });
}

size_t pzc_topology_size(const pzc_topology* topology) { return topology ? topology->value.size() : 0; }

size_t pzc_topology_edge_count(const pzc_topology* topology) { return topology ? topology->value.edge_count() : 0; }

void pzc_topology_free(pzc_topology* topology) { delete topology; }

pzc_status pzc_partition_build(const pzc_topology* topology, int k, double epsilon, int eta, uint64_t seed,
                               pzc_partition** out) {
  return guarded([&] {
    require(topology, "topology");
    require(out, "out");
    *out = new pzc_partition{pzc::build_zones(topology->value, k, epsilon, eta, seed)};
  });
}

pzc_status pzc_partition_load(const char* path, const pzc_topology* topology, pzc_partition** out) {
  return guarded([&] {
    require(path, "path");
    require(topology, "topology");
    require(out, "out");
    *out = new pzc_partition{pzc::load_partition(path, topology->value)};
  });
}

pzc_status pzc_partition_save(const pzc_partition* partition, const char* path) {
  return guarded([&] {
    require(partition, "partition");
    require(path, "path");
    pzc::save_partition(partition->value, path);
  });
}

size_t pzc_partition_cut(const pzc_partition* partition) { return partition ? partition->value.cut : 0; }

int pzc_partition_feasible(const pzc_partition* partition) {
  return partition && partition->value.report.feasible ? 1 : 0;
}

int pzc_partition_zone_of(const pzc_partition* partition, uint32_t component) {
  if (partition == nullptr) return -1;
  const auto& a = partition->value.assignment;
  auto it = a.find(component);
  return it == a.end() ? -1 : it->second;
}

void pzc_partition_free(pzc_partition* partition) { delete partition; }

void pzc_sim_params_default(pzc_sim_params* params) {
  if (params == nullptr) return;
  const pzc::SimParams d;
  params->ct = d.ct;
  params->ht = d.ht;
  params->dt = d.dt;
  params->response_latency = d.response_latency;
  params->benign_period = d.benign_period;
  params->horizon = 0.0;
  params->quiescence = 0.0;
  params->parallel = 0;
  params->recovery = 1;
  params->causal = 0;
  params->seed = d.seed;
}

pzc_status pzc_simulate(const pzc_topology* topology, const pzc_partition* partition, const pzc_sim_params* params,
                        const char* strategy, uint32_t origin, pzc_trace** out) {
  return guarded([&] {
    require(topology, "topology");
    require(params, "params");
    require(strategy, "strategy");
    require(out, "out");
    pzc::SimParams p;
    p.ct = params->ct;
    p.ht = params->ht;
    p.dt = params->dt;
    p.response_latency = params->response_latency;
    p.benign_period = params->benign_period;
    if (params->horizon > 0.0) p.horizon = params->horizon;
    if (params->quiescence > 0.0) p.quiescence = params->quiescence;
    p.spread = params->parallel ? pzc::SpreadMode::Parallel : pzc::SpreadMode::Sequential;
    p.recovery = params->recovery != 0;
    p.recovery_mode = params->causal ? pzc::RecoveryMode::Causal : pzc::RecoveryMode::PaperLiteral;
    p.seed = params->seed;
    const auto s = pzc::parse_strategy(strategy);
    *out = new pzc_trace{pzc::run_simulation(topology->value, partition ? &partition->value : nullptr, p, s, origin)};
  });
}

size_t pzc_trace_compromised_count(const pzc_trace* trace) { return trace ? trace->value.compromised().size() : 0; }

size_t pzc_trace_event_count(const pzc_trace* trace) { return trace ? trace->value.events.size() : 0; }

pzc_status pzc_trace_save_csv(const pzc_trace* trace, const char* events, const char* op_log) {
  return guarded([&] {
    require(trace, "trace");
    require(events, "events path");
    require(op_log, "op-log path");
    pzc::save_trace_csv(trace->value, events, op_log);
  });
}

void pzc_trace_free(pzc_trace* trace) { delete trace; }

pzc_status pzc_scenario_create(pzc_scenario** out) {
  return guarded([&] {
    require(out, "out");
    *out = new pzc_scenario{};
  });
}

pzc_status pzc_scenario_load(const char* path, pzc_scenario** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new pzc_scenario{pzc::load_scenario(path)};
  });
}

pzc_status pzc_scenario_set(pzc_scenario* scenario, const char* key, const char* value) {
  return guarded([&] {
    require(scenario, "scenario");
    require(key, "key");
    require(value, "value");
    scenario->value.set(key, value);
  });
}

pzc_status pzc_scenario_run(const pzc_scenario* scenario, pzc_summary* summary) {
  return guarded([&] {
    require(scenario, "scenario");
    fill(summary, pzc::run_scenario(scenario->value));
  });
}

pzc_status pzc_scenario_sweep(const pzc_scenario* scenario, size_t* points, size_t* failures) {
  std::size_t failed = 0;
  std::vector<pzc::SweepRow> rows;
  auto status = guarded([&] {
    require(scenario, "scenario");
    failed = pzc::run_sweep(scenario->value, &rows);
  });
  if (points) *points = rows.size();
  if (failures) *failures = failed;
  if (status == PZC_OK && failed > 0) {
    for (const auto& row : rows) {
      if (!row.result) {
        last_error = std::to_string(failed) + " sweep point(s) failed; first: " + row.error;
        break;
      }
    }
    return PZC_ERR_INTERNAL;
  }
  return status;
}

pzc_status pzc_scenario_ael_report(const pzc_scenario* scenario, pzc_summary* summary) {
  return guarded([&] {
    require(scenario, "scenario");
    const auto& s = scenario->value;
    const auto result = pzc::evaluate_scenario(s);
    std::filesystem::create_directories(s.out);
    std::ofstream ael(s.out / "ael.csv");
    if (!ael) throw pzc::Error(pzc::ErrorCode::Io, "cannot write '" + (s.out / "ael.csv").string() + "'");
    pzc::write_ael_csv(ael, result);
    std::ofstream prices(s.out / "prices.csv");
    if (!prices) throw pzc::Error(pzc::ErrorCode::Io, "cannot write '" + (s.out / "prices.csv").string() + "'");
    const auto normal = pzc::normal_prices(s);
    const auto attack = pzc::attack_prices(s);
    prices << "hour,normal_price,attack_price\n";
    for (std::size_t h = 0; h < pzc::kHours; ++h) {
      prices << h << ',' << pzc::format_number(normal[h]) << ',' << pzc::format_number(attack[h]) << '\n';
    }
    fill(summary, result);
  });
}

void pzc_scenario_free(pzc_scenario* scenario) { delete scenario; }

}  // extern "C"
