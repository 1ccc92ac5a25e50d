#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pzc/irec.hpp"
#include "pzc/partition.hpp"
#include "pzc/sim_types.hpp"
#include "pzc/topology.hpp"

namespace pzc {

struct SimParams {
  double ct = 3.0;  // compromise time
  double ht = 1.0;  // hop time
  double dt = 1.0;  // detection delay after compromise
  double response_latency = 0.0;
  SpreadMode spread = SpreadMode::Sequential;
  double benign_period = 10.0;  // per meter; 0 disables benign traffic
  double horizon = kForever;
  /// Alert-free window after which recovery starts. Defaults to
  /// ht + ct + dt + response_latency, the longest gap between the alert of a
  /// node and the alert of a node it infected before being halted.
  std::optional<double> quiescence;
  std::uint64_t seed = 1;
  std::string attack_type = "pricing_manipulation";
  bool recovery = true;
  RecoveryMode recovery_mode = RecoveryMode::PaperLiteral;
  std::vector<RecoveryRule> rules;  // empty -> default_rules(dt)

  double sigma() const { return ct / dt; }
  double effective_quiescence() const { return quiescence.value_or(ht + ct + dt + response_latency); }

  /// dt fixed, ct = sigma * dt.
  static SimParams from_sigma(double sigma, double dt = 1.0, double ht = 1.0);

  void validate() const;
};

/// Runs one attack from `origin` (compromised at t=0) until the horizon or
/// until nothing but benign traffic remains. Same inputs, same trace.
SimTrace run_simulation(const Topology& topology, const PartitionScheme* scheme, const SimParams& params,
                        ResponseStrategy strategy, ComponentId origin);

/// CSV "t,event_kind,component,detail".
void write_events_csv(std::ostream& out, const SimTrace& trace);
/// CSV "t,src,dst,kind".
void write_op_log_csv(std::ostream& out, const SimTrace& trace);
void save_trace_csv(const SimTrace& trace, const std::filesystem::path& events,
                    const std::filesystem::path& op_log);

/// Shortest round-trip decimal form; used for every time value in CSV output.
std::string format_number(double value);

}  // namespace pzc
