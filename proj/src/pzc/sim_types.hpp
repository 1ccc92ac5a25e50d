#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pzc/topology.hpp"

namespace pzc {

inline constexpr double kForever = std::numeric_limits<double>::infinity();

enum class SpreadMode { Sequential, Parallel };
enum class ResponseStrategy { None, PerNode, PartitionAware };
enum class NodeStatus { Healthy, Compromised, IsolatedHealthy, IsolatedCompromised, Recovered };
enum class TrafficKind { Benign, Attack };
enum class RecoveryMode { PaperLiteral, Causal };

std::string_view to_string(SpreadMode mode);
std::string_view to_string(ResponseStrategy strategy);
std::string_view to_string(NodeStatus status);
std::string_view to_string(TrafficKind kind);
std::string_view to_string(RecoveryMode mode);

/// Accepts both "per_node" and "per-node" spellings.
ResponseStrategy parse_strategy(std::string_view name);
SpreadMode parse_spread(std::string_view name);
RecoveryMode parse_recovery_mode(std::string_view name);

inline bool is_compromised(NodeStatus s) {
  return s == NodeStatus::Compromised || s == NodeStatus::IsolatedCompromised;
}
inline bool is_isolated(NodeStatus s) {
  return s == NodeStatus::IsolatedHealthy || s == NodeStatus::IsolatedCompromised;
}

/// Malware targets field devices; infrastructure kinds relay nothing.
inline bool is_susceptible(ComponentKind kind) {
  return kind == ComponentKind::SmartMeter || kind == ComponentKind::Generic;
}

struct NodeState {
  NodeStatus status = NodeStatus::Healthy;
  std::optional<double> compromised_at;
  std::optional<double> detected_at;
  std::optional<double> isolated_at;
  std::optional<double> released_at;  // end of a healthy isolation
  std::optional<double> recovered_at;
  bool detected = false;
  bool isolated_while_healthy = false;
};

struct OpLogRecord {
  double t = 0.0;
  ComponentId src = 0;
  ComponentId dst = 0;
  TrafficKind kind = TrafficKind::Benign;  // ground truth; recovery analysis ignores it
};

struct IdsAlert {
  ComponentId component = 0;
  std::string attack_type;
  double t_start = 0.0;   // global attack start
  double t_detect = 0.0;
};

enum class EventKind {
  Compromise,
  Detection,
  HopLaunch,
  HopBlocked,
  IsolateCompromised,
  IsolateBoundary,
  RecoveryActivated,
  Recovered,
  ManualFlagged,
  Unisolated,
};

std::string_view to_string(EventKind kind);

struct TraceEvent {
  double t = 0.0;
  EventKind kind = EventKind::Compromise;
  ComponentId component = 0;
  std::string detail;
};

/// Components the response manager disconnects for one alert batch.
struct ResponseSet {
  std::vector<ComponentId> components;
  std::vector<IdsAlert> triggering_alerts;
  double t_issued = 0.0;
};

struct RepairSet {
  std::vector<ComponentId> components;
  RecoveryMode mode = RecoveryMode::PaperLiteral;
  double t_computed = 0.0;
};

struct SimTrace {
  ComponentId origin = 0;
  double attack_start = 0.0;
  double end_time = 0.0;
  std::vector<TraceEvent> events;
  std::vector<OpLogRecord> op_log;
  std::map<ComponentId, NodeState> final_states;
  std::vector<IdsAlert> alerts;
  std::vector<ResponseSet> responses;
  std::vector<RepairSet> repairs;
  std::vector<ComponentId> manual_flagged;
  std::optional<double> recovery_activated_at;
  std::optional<double> recovery_completed_at;

  /// Ids ever compromised, ascending.
  std::vector<ComponentId> compromised() const;
  /// Time of the last compromise (the origin's 0 when nothing spread).
  double last_compromise_time() const;
};

}  // namespace pzc
