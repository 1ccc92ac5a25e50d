#include "pzc/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <tuple>

#include "pzc/error.hpp"
#include "pzc/ires.hpp"
#include "pzc/rng.hpp"

namespace pzc {

namespace {

// Order of internal events sharing a timestamp. Transmissions land before
// the IDS reports, hop launches precede the isolation they race against, and
// recovery bookkeeping runs last.
enum class Ev : std::uint8_t { HopComplete, Alert, LaunchTick, Actuate, QuiescenceCheck, RecoveryDone, Release, Benign };

struct QueuedEvent {
  double t = 0.0;
  Ev kind = Ev::HopComplete;
  std::uint32_t node = 0;
  std::uint32_t aux = 0;
  std::uint64_t seq = 0;
};

struct Later {
  bool operator()(const QueuedEvent& a, const QueuedEvent& b) const {
    return std::tie(a.t, a.kind, a.node, a.seq) > std::tie(b.t, b.kind, b.node, b.seq);
  }
};

struct Node {
  bool compromised = false;
  bool isolated = false;
  bool recovered = false;
  bool disabled = false;  // manual recovery pending
  std::size_t cursor = 0;
  NodeState state;
};

class Engine {
 public:
  Engine(const Topology& topology, const PartitionScheme* scheme, const SimParams& params, ResponseStrategy strategy,
         std::size_t origin)
      : topology_(topology),
        params_(params),
        strategy_(strategy),
        origin_(origin),
        nodes_(topology.size()),
        responder_(strategy, scheme),
        rules_(params.rules.empty() ? default_rules(params.dt) : params.rules),
        quiescence_(params.effective_quiescence()) {}

  SimTrace run() {
    trace_.origin = topology_.id_at(origin_);
    trace_.attack_start = 0.0;
    compromise(0.0, origin_, std::nullopt);
    schedule_benign();

    while (!queue_.empty()) {
      const QueuedEvent ev = queue_.top();
      if (ev.t > params_.horizon) break;
      if (ev.kind == Ev::Benign && active_ == 0) break;
      queue_.pop();
      if (ev.kind != Ev::Benign) --active_;
      now_ = ev.t;
      dispatch(ev);
    }

    trace_.end_time = now_;
    trace_.responses = responder_.issued();
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
      auto state = nodes_[v].state;
      const auto& n = nodes_[v];
      if (n.recovered) {
        state.status = NodeStatus::Recovered;
      } else if (n.compromised) {
        state.status = n.isolated ? NodeStatus::IsolatedCompromised : NodeStatus::Compromised;
      } else {
        state.status = n.isolated ? NodeStatus::IsolatedHealthy : NodeStatus::Healthy;
      }
      trace_.final_states.emplace(topology_.id_at(v), state);
    }
    std::stable_sort(trace_.events.begin(), trace_.events.end(), [](const TraceEvent& a, const TraceEvent& b) {
      return std::tie(a.t, a.kind, a.component) < std::tie(b.t, b.kind, b.component);
    });
    return std::move(trace_);
  }

 private:
  void push(double t, Ev kind, std::size_t node, std::uint32_t aux = 0) {
    queue_.push(QueuedEvent{t, kind, static_cast<std::uint32_t>(node), aux, seq_++});
    if (kind != Ev::Benign) ++active_;
  }

  void emit(EventKind kind, std::size_t node, std::string detail = {}) {
    trace_.events.push_back(TraceEvent{now_, kind, topology_.id_at(node), std::move(detail)});
  }

  std::string id_of(std::size_t node) const { return std::to_string(topology_.id_at(node)); }

  void dispatch(const QueuedEvent& ev) {
    switch (ev.kind) {
      case Ev::HopComplete: on_hop_complete(ev.aux, ev.node); break;
      case Ev::Alert: on_alert(ev.node); break;
      case Ev::LaunchTick: on_tick(ev.node); break;
      case Ev::Actuate: on_actuate(); break;
      case Ev::QuiescenceCheck: on_quiescence(); break;
      case Ev::RecoveryDone: on_recovery_done(ev.node, static_cast<RecoveryAction>(ev.aux)); break;
      case Ev::Release: on_release(); break;
      case Ev::Benign: on_benign(ev.node); break;
    }
  }

  bool attackable(std::size_t v) const {
    const auto& n = nodes_[v];
    return is_susceptible(topology_.kind_at(v)) && !n.compromised && !n.recovered;
  }

  void compromise(double t, std::size_t v, std::optional<std::size_t> src) {
    auto& n = nodes_[v];
    n.compromised = true;
    n.state.compromised_at = t;
    emit(EventKind::Compromise, v, src ? "src=" + id_of(*src) : "origin");
    push(t + params_.dt, Ev::Alert, v);
    push(t, Ev::LaunchTick, v);
  }

  void launch(std::size_t src, std::size_t dst) {
    if (nodes_[dst].isolated) {
      emit(EventKind::HopBlocked, src, "dst=" + id_of(dst) + ",at_launch");
      return;
    }
    emit(EventKind::HopLaunch, src, "dst=" + id_of(dst));
    trace_.op_log.push_back(OpLogRecord{now_, topology_.id_at(src), topology_.id_at(dst), TrafficKind::Attack});
    push(now_ + params_.ht + params_.ct, Ev::HopComplete, dst, static_cast<std::uint32_t>(src));
  }

  void on_tick(std::size_t v) {
    auto& n = nodes_[v];
    if (!n.compromised || n.isolated || n.recovered) return;
    const auto neighbours = topology_.neighbors_at(v);
    if (params_.spread == SpreadMode::Parallel) {
      for (; n.cursor < neighbours.size(); ++n.cursor) {
        if (attackable(neighbours[n.cursor])) launch(v, neighbours[n.cursor]);
      }
      return;
    }
    while (n.cursor < neighbours.size()) {
      const auto u = neighbours[n.cursor++];
      if (!attackable(u)) continue;
      launch(v, u);
      push(now_ + params_.ht, Ev::LaunchTick, v);
      return;
    }
  }

  void on_hop_complete(std::size_t src, std::size_t dst) {
    if (nodes_[dst].isolated) {
      emit(EventKind::HopBlocked, src, "dst=" + id_of(dst) + ",in_transit");
      return;
    }
    if (!attackable(dst)) return;
    compromise(now_, dst, src);
  }

  void on_alert(std::size_t v) {
    auto& n = nodes_[v];
    n.state.detected = true;
    n.state.detected_at = now_;
    IdsAlert alert{topology_.id_at(v), params_.attack_type, trace_.attack_start, now_};
    trace_.alerts.push_back(alert);
    emit(EventKind::Detection, v, params_.attack_type);
    last_alert_ = now_;
    if (strategy_ != ResponseStrategy::None) {
      const double at = now_ + params_.response_latency;
      auto& batch = pending_[at];
      if (batch.empty()) push(at, Ev::Actuate, 0);
      batch.push_back(alert);
    }
    if (params_.recovery) push(now_ + quiescence_, Ev::QuiescenceCheck, 0);
  }

  void on_actuate() {
    auto it = pending_.find(now_);
    if (it == pending_.end()) return;
    const auto batch = std::move(it->second);
    pending_.erase(it);
    const auto decision = responder_.respond(batch, now_);
    const auto response_index = responder_.issued().size();
    for (const auto& order : decision.orders) {
      const auto v = topology_.index_of(order.component);
      auto& n = nodes_[v];
      if (n.isolated) continue;
      n.isolated = true;
      n.state.isolated_at = now_;
      if (order.reason == IsolationReason::Compromised) {
        emit(EventKind::IsolateCompromised, v);
        continue;
      }
      const bool healthy = !n.compromised && !n.recovered;
      if (healthy) n.state.isolated_while_healthy = true;
      std::string detail = healthy ? "healthy" : "compromised";
      if (decision.response_set) detail += ",response=" + std::to_string(response_index - 1);
      emit(EventKind::IsolateBoundary, v, std::move(detail));
    }
  }

  void on_quiescence() {
    if (!(last_alert_ + quiescence_ <= now_) || recovered_for_ == last_alert_) return;
    recovered_for_ = last_alert_;
    if (!trace_.recovery_activated_at) trace_.recovery_activated_at = now_;

    auto repair = analyze_recovery(trace_.alerts, trace_.op_log, params_.recovery_mode, now_, &topology_);
    emit(EventKind::RecoveryActivated, origin_, "repair_set=" + std::to_string(repair.components.size()));
    const auto plan = execute_recovery(repair, rules_, topology_, params_.attack_type, now_);
    trace_.repairs.push_back(std::move(repair));

    for (const auto& step : plan.steps) {
      if (!scheduled_.insert(step.component).second) continue;
      const auto v = topology_.index_of(step.component);
      if (step.action == RecoveryAction::Manual) {
        auto& n = nodes_[v];
        n.disabled = true;
        std::string detail = "manual";
        if (!n.isolated) {
          n.isolated = true;
          n.state.isolated_at = now_;
          if (!n.compromised) {
            n.state.isolated_while_healthy = true;
            detail += ",healthy";
          }
        }
        trace_.manual_flagged.push_back(step.component);
        emit(EventKind::ManualFlagged, v, std::move(detail));
      } else {
        push(step.t_done, Ev::RecoveryDone, v, static_cast<std::uint32_t>(step.action));
      }
    }
    if (std::isfinite(plan.t_complete)) push(plan.t_complete, Ev::Release, 0);
  }

  void on_recovery_done(std::size_t v, RecoveryAction action) {
    auto& n = nodes_[v];
    std::string detail(to_string(action));
    if (n.compromised && !n.recovered) {
      n.recovered = true;
      n.isolated = false;
      n.state.recovered_at = now_;
      responder_.release(topology_.id_at(v));
    } else {
      detail += ",clean";
    }
    emit(EventKind::Recovered, v, std::move(detail));
  }

  void on_release() {
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
      auto& n = nodes_[v];
      if (!n.isolated || n.compromised || n.disabled) continue;
      n.isolated = false;
      n.state.released_at = now_;
      responder_.release(topology_.id_at(v));
      emit(EventKind::Unisolated, v);
    }
    trace_.recovery_completed_at = now_;
  }

  void schedule_benign() {
    if (!(params_.benign_period > 0.0)) return;
    const std::size_t n = topology_.size();
    constexpr std::size_t kFar = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> dist(n, kFar);
    std::vector<std::size_t> queue;
    for (std::size_t v = 0; v < n; ++v) {
      if (topology_.kind_at(v) == ComponentKind::DataConcentrator) {
        dist[v] = 0;
        queue.push_back(v);
      }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto v = queue[head];
      for (auto u : topology_.neighbors_at(v)) {
        if (dist[u] == kFar) {
          dist[u] = dist[v] + 1;
          queue.push_back(u);
        }
      }
    }
    next_hop_.assign(n, kFar);
    Rng rng(mix_seed(params_.seed, 0xbe9));
    for (std::size_t v = 0; v < n; ++v) {
      if (topology_.kind_at(v) != ComponentKind::SmartMeter || dist[v] == kFar || dist[v] == 0) continue;
      for (auto u : topology_.neighbors_at(v)) {
        if (dist[u] + 1 == dist[v]) {
          next_hop_[v] = u;
          break;
        }
      }
      push(rng.uniform01() * params_.benign_period, Ev::Benign, v);
    }
  }

  void on_benign(std::size_t v) {
    const auto to = next_hop_[v];
    if (!nodes_[v].isolated && !nodes_[to].isolated) {
      trace_.op_log.push_back(OpLogRecord{now_, topology_.id_at(v), topology_.id_at(to), TrafficKind::Benign});
    }
    push(now_ + params_.benign_period, Ev::Benign, v);
  }

  const Topology& topology_;
  const SimParams& params_;
  ResponseStrategy strategy_;
  std::size_t origin_;
  std::vector<Node> nodes_;
  ResponseManager responder_;
  std::vector<RecoveryRule> rules_;
  double quiescence_;

  std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, Later> queue_;
  std::uint64_t seq_ = 0;
  std::size_t active_ = 0;
  double now_ = 0.0;
  double last_alert_ = -kForever;
  double recovered_for_ = -kForever;
  std::map<double, std::vector<IdsAlert>> pending_;
  std::set<ComponentId> scheduled_;
  std::vector<std::size_t> next_hop_;
  SimTrace trace_;
};

}  // namespace

SimParams SimParams::from_sigma(double sigma, double dt, double ht) {
  SimParams p;
  p.dt = dt;
  p.ht = ht;
  p.ct = sigma * dt;
  return p;
}

void SimParams::validate() const {
  if (!(ct > 0.0) || !(ht > 0.0) || !(dt > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "ct, ht and dt must be positive");
  }
  if (!(horizon > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  if (response_latency < 0.0 || benign_period < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "response latency and benign period must be >= 0");
  }
  if (quiescence && !(*quiescence > 0.0)) throw Error(ErrorCode::InvalidArgument, "quiescence must be positive");
}

SimTrace run_simulation(const Topology& topology, const PartitionScheme* scheme, const SimParams& params,
                        ResponseStrategy strategy, ComponentId origin) {
  params.validate();
  const auto origin_index = topology.find(origin);
  if (!origin_index) throw Error(ErrorCode::NotFound, "origin component " + std::to_string(origin) + " is unknown");
  if (strategy == ResponseStrategy::PartitionAware) {
    if (scheme == nullptr) throw Error(ErrorCode::InvalidArgument, "partition-aware response needs a partition scheme");
    for (const auto& [id, zone] : scheme->assignment) {
      if (!topology.contains(id)) {
        throw Error(ErrorCode::InvalidArgument,
                    "partition scheme names component " + std::to_string(id) + " absent from the topology");
      }
    }
  }
  Engine engine(topology, strategy == ResponseStrategy::PartitionAware ? scheme : nullptr, params, strategy,
                *origin_index);
  return engine.run();
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_events_csv(std::ostream& out, const SimTrace& trace) {
  out << "t,event_kind,component,detail\n";
  for (const auto& e : trace.events) {
    out << format_number(e.t) << ',' << to_string(e.kind) << ',' << e.component << ',';
    if (e.detail.find(',') != std::string::npos) {
      out << '"' << e.detail << '"';
    } else {
      out << e.detail;
    }
    out << '\n';
  }
}

void write_op_log_csv(std::ostream& out, const SimTrace& trace) {
  out << "t,src,dst,kind\n";
  for (const auto& r : trace.op_log) {
    out << format_number(r.t) << ',' << r.src << ',' << r.dst << ',' << to_string(r.kind) << '\n';
  }
}

void save_trace_csv(const SimTrace& trace, const std::filesystem::path& events, const std::filesystem::path& op_log) {
  std::ofstream ev(events);
  if (!ev) throw Error(ErrorCode::Io, "cannot write '" + events.string() + "'");
  write_events_csv(ev, trace);
  std::ofstream log(op_log);
  if (!log) throw Error(ErrorCode::Io, "cannot write '" + op_log.string() + "'");
  write_op_log_csv(log, trace);
}

}  // namespace pzc
