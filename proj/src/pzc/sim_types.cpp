#include "pzc/sim_types.hpp"

#include <algorithm>
#include <string>

#include "pzc/error.hpp"

namespace pzc {

namespace {

std::string normalise(std::string_view name) {
  std::string s(name);
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

}  // namespace

std::string_view to_string(SpreadMode mode) { return mode == SpreadMode::Sequential ? "sequential" : "parallel"; }

std::string_view to_string(ResponseStrategy strategy) {
  switch (strategy) {
    case ResponseStrategy::None: return "none";
    case ResponseStrategy::PerNode: return "per_node";
    case ResponseStrategy::PartitionAware: return "partition_aware";
  }
  return "none";
}

std::string_view to_string(NodeStatus status) {
  switch (status) {
    case NodeStatus::Healthy: return "healthy";
    case NodeStatus::Compromised: return "compromised";
    case NodeStatus::IsolatedHealthy: return "isolated_healthy";
    case NodeStatus::IsolatedCompromised: return "isolated_compromised";
    case NodeStatus::Recovered: return "recovered";
  }
  return "healthy";
}

std::string_view to_string(TrafficKind kind) { return kind == TrafficKind::Benign ? "benign" : "attack"; }

std::string_view to_string(RecoveryMode mode) {
  return mode == RecoveryMode::PaperLiteral ? "paper_literal" : "causal";
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Compromise: return "compromise";
    case EventKind::Detection: return "detection";
    case EventKind::HopLaunch: return "hop_launch";
    case EventKind::HopBlocked: return "hop_blocked";
    case EventKind::IsolateCompromised: return "isolate_compromised";
    case EventKind::IsolateBoundary: return "isolate_boundary";
    case EventKind::RecoveryActivated: return "recovery_activated";
    case EventKind::Recovered: return "recovered";
    case EventKind::ManualFlagged: return "manual_flagged";
    case EventKind::Unisolated: return "unisolated";
  }
  return "unknown";
}

ResponseStrategy parse_strategy(std::string_view name) {
  const auto s = normalise(name);
  if (s == "none") return ResponseStrategy::None;
  if (s == "per_node") return ResponseStrategy::PerNode;
  if (s == "partition_aware") return ResponseStrategy::PartitionAware;
  throw Error(ErrorCode::InvalidArgument, "unknown strategy '" + std::string(name) + "'");
}

SpreadMode parse_spread(std::string_view name) {
  if (name == "sequential") return SpreadMode::Sequential;
  if (name == "parallel") return SpreadMode::Parallel;
  throw Error(ErrorCode::InvalidArgument, "unknown spread mode '" + std::string(name) + "'");
}

RecoveryMode parse_recovery_mode(std::string_view name) {
  const auto s = normalise(name);
  if (s == "paper_literal") return RecoveryMode::PaperLiteral;
  if (s == "causal") return RecoveryMode::Causal;
  throw Error(ErrorCode::InvalidArgument, "unknown recovery mode '" + std::string(name) + "'");
}

std::vector<ComponentId> SimTrace::compromised() const {
  std::vector<ComponentId> out;
  for (const auto& [id, state] : final_states) {
    if (state.compromised_at) out.push_back(id);
  }
  return out;
}

double SimTrace::last_compromise_time() const {
  double last = attack_start;
  for (const auto& [id, state] : final_states) {
    if (state.compromised_at) last = std::max(last, *state.compromised_at);
  }
  return last;
}

}  // namespace pzc
