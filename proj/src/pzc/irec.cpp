#include "pzc/irec.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pzc/error.hpp"

namespace pzc {

namespace {

constexpr std::pair<RecoveryAction, std::string_view> kActionNames[] = {
    {RecoveryAction::RestoreBackup, "restore_backup"},
    {RecoveryAction::ActivateRedundant, "activate_redundant"},
    {RecoveryAction::SimulateData, "simulate_data"},
    {RecoveryAction::Manual, "manual"},
};

int specificity(const RecoveryRule& rule) { return (rule.kind ? 2 : 0) + (rule.attack_type ? 1 : 0); }

}  // namespace

std::string_view to_string(RecoveryAction action) {
  for (const auto& [a, name] : kActionNames) {
    if (a == action) return name;
  }
  return "manual";
}

RecoveryAction parse_recovery_action(std::string_view name) {
  for (const auto& [a, n] : kActionNames) {
    if (n == name) return a;
  }
  throw Error(ErrorCode::Parse, "unknown recovery action '" + std::string(name) + "'");
}

std::vector<RecoveryRule> default_rules(double dt) {
  return {
      {ComponentKind::SmartMeter, std::nullopt, RecoveryAction::RestoreBackup, 5.0 * dt},
      {ComponentKind::Generic, std::nullopt, RecoveryAction::RestoreBackup, 5.0 * dt},
      {ComponentKind::DataConcentrator, std::nullopt, RecoveryAction::ActivateRedundant, 1.0 * dt},
      {ComponentKind::Headend, std::nullopt, RecoveryAction::SimulateData, 0.0},
      {std::nullopt, std::nullopt, RecoveryAction::Manual, kForever},
  };
}

RecoveryRule select_protocol(ComponentKind kind, std::string_view attack_type, std::span<const RecoveryRule> rules) {
  const RecoveryRule* best = nullptr;
  for (const auto& rule : rules) {
    if (rule.kind && *rule.kind != kind) continue;
    if (rule.attack_type && *rule.attack_type != attack_type) continue;
    if (best == nullptr || specificity(rule) > specificity(*best)) best = &rule;
  }
  if (best == nullptr) return RecoveryRule{};
  RecoveryRule chosen = *best;
  if (chosen.action == RecoveryAction::Manual) chosen.duration = kForever;
  return chosen;
}

std::vector<RecoveryRule> parse_rules(std::istream& in, std::string_view source) {
  std::vector<RecoveryRule> rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind) || kind.front() == '#') continue;
    std::string type;
    std::string action;
    std::string duration;
    std::string extra;
    auto fail = [&](const std::string& msg) {
      return Error(ErrorCode::Parse, std::string(source) + ":" + std::to_string(line_no) + ": " + msg);
    };
    if (!(ls >> type >> action >> duration) || (ls >> extra)) throw fail("expected 'kind attack_type action duration'");
    RecoveryRule rule;
    try {
      if (kind != "*") rule.kind = parse_kind(kind);
      rule.action = parse_recovery_action(action);
    } catch (const Error& e) {
      throw fail(e.what());
    }
    if (type != "*") rule.attack_type = type;
    if (duration == "inf") {
      rule.duration = kForever;
    } else {
      try {
        std::size_t used = 0;
        rule.duration = std::stod(duration, &used);
        if (used != duration.size() || rule.duration < 0) throw std::invalid_argument(duration);
      } catch (const std::exception&) {
        throw fail("bad duration '" + duration + "'");
      }
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<RecoveryRule> load_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  return parse_rules(in, path.string());
}

RepairSet analyze_recovery(std::span<const IdsAlert> alerts, std::span<const OpLogRecord> op_log, RecoveryMode mode,
                           double t_computed, const Topology* topology) {
  RepairSet repair;
  repair.mode = mode;
  repair.t_computed = t_computed;
  if (alerts.empty()) return repair;

  double attack_start = alerts.front().t_start;
  for (const auto& alert : alerts) {
    if (topology != nullptr && !topology->contains(alert.component)) {
      throw Error(ErrorCode::NotFound, "alert references unknown component " + std::to_string(alert.component));
    }
    attack_start = std::min(attack_start, alert.t_start);
  }

  if (mode == RecoveryMode::PaperLiteral) {
    std::map<ComponentId, std::vector<ComponentId>> talked;
    for (const auto& r : op_log) {
      if (r.t < attack_start) continue;
      talked[r.src].push_back(r.dst);
      talked[r.dst].push_back(r.src);
    }
    std::set<ComponentId> members;
    std::vector<ComponentId> frontier;
    for (const auto& alert : alerts) {
      if (members.insert(alert.component).second) frontier.push_back(alert.component);
    }
    while (!frontier.empty()) {
      const auto s = frontier.back();
      frontier.pop_back();
      auto it = talked.find(s);
      if (it == talked.end()) continue;
      for (auto r : it->second) {
        if (members.insert(r).second) frontier.push_back(r);
      }
    }
    repair.components.assign(members.begin(), members.end());
    return repair;
  }

  std::map<ComponentId, double> contaminated;
  for (const auto& alert : alerts) {
    auto [it, fresh] = contaminated.emplace(alert.component, attack_start);
    if (!fresh) it->second = std::min(it->second, attack_start);
  }
  // Records sharing a timestamp may chain in either order, so iterate to the
  // fixed point rather than relying on one pass.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : op_log) {
      auto src = contaminated.find(r.src);
      if (src == contaminated.end() || r.t < src->second) continue;
      auto [dst, fresh] = contaminated.emplace(r.dst, r.t);
      if (fresh) {
        changed = true;
      } else if (r.t < dst->second) {
        dst->second = r.t;
        changed = true;
      }
    }
  }
  for (const auto& [id, t] : contaminated) repair.components.push_back(id);
  return repair;
}

RecoveryPlan execute_recovery(const RepairSet& repair_set, std::span<const RecoveryRule> rules,
                              const Topology& topology, std::string_view attack_type, double t_start) {
  RecoveryPlan plan;
  plan.t_complete = t_start;
  for (auto id : repair_set.components) {
    const auto rule = select_protocol(topology.kind(id), attack_type, rules);
    RecoveryStep step{id, rule.action, kForever};
    if (rule.action == RecoveryAction::Manual) {
      plan.manual.push_back(id);
    } else {
      step.t_done = t_start + rule.duration;
      plan.t_complete = std::max(plan.t_complete, step.t_done);
    }
    plan.steps.push_back(step);
  }
  return plan;
}

}  // namespace pzc
