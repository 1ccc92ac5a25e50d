#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pzc/sim_types.hpp"
#include "pzc/topology.hpp"

namespace pzc {

enum class RecoveryAction { RestoreBackup, ActivateRedundant, SimulateData, Manual };

std::string_view to_string(RecoveryAction action);
RecoveryAction parse_recovery_action(std::string_view name);

/// Knowledgebase entry. An empty kind or attack type is a wildcard.
struct RecoveryRule {
  std::optional<ComponentKind> kind;
  std::optional<std::string> attack_type;
  RecoveryAction action = RecoveryAction::Manual;
  double duration = kForever;
};

/// restore_backup 5*dt for meters and generic devices, activate_redundant
/// 1*dt for concentrators, manual otherwise.
std::vector<RecoveryRule> default_rules(double dt);

/// Most specific match: exact kind+type, then kind with any type, then type
/// with any kind, then the catch-all. Falls back to manual when nothing
/// matches.
RecoveryRule select_protocol(ComponentKind kind, std::string_view attack_type, std::span<const RecoveryRule> rules);

/// Lines "kind attack_type action duration"; '*' is a wildcard and a
/// duration of "inf" marks an open-ended action.
std::vector<RecoveryRule> parse_rules(std::istream& in, std::string_view source = "<stream>");
std::vector<RecoveryRule> load_rules(const std::filesystem::path& path);

/// Log-driven damage closure. Starting from the alerted components:
///  - paper_literal adds anything that exchanged a record (either direction)
///    with a member at or after the attack start;
///  - causal adds c only when c received a record from member s no earlier
///    than s's contamination time, and dates c's contamination to that record.
/// `topology`, when given, validates that every alerted component exists.
RepairSet analyze_recovery(std::span<const IdsAlert> alerts, std::span<const OpLogRecord> op_log, RecoveryMode mode,
                           double t_computed = 0.0, const Topology* topology = nullptr);

struct RecoveryStep {
  ComponentId component = 0;
  RecoveryAction action = RecoveryAction::Manual;
  double t_done = kForever;  // never for manual steps
};

struct RecoveryPlan {
  std::vector<RecoveryStep> steps;
  std::vector<ComponentId> manual;
  /// When every automated step has finished; healthy components held in
  /// isolation are handed back at this time.
  double t_complete = 0.0;
};

RecoveryPlan execute_recovery(const RepairSet& repair_set, std::span<const RecoveryRule> rules,
                              const Topology& topology, std::string_view attack_type, double t_start);

}  // namespace pzc
