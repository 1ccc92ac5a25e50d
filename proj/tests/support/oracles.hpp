#pragma once

// Brute-force reference implementations shared by unit and acceptance tests.

#include <set>
#include <vector>

#include "pzc/partition.hpp"
#include "pzc/sim_types.hpp"

namespace oracles {

using pzc::ComponentId;
using pzc::OpLogRecord;

// Alerted nodes plus everything reachable over records at or after `start`,
// found by repeated sweeps over the whole log.
inline std::set<ComponentId> literal_closure(const std::vector<ComponentId>& alerted,
                                             const std::vector<OpLogRecord>& log, double start) {
  std::set<ComponentId> in(alerted.begin(), alerted.end());
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& r : log) {
      if (r.t < start) continue;
      if (in.count(r.src) && in.insert(r.dst).second) grew = true;
      if (in.count(r.dst) && in.insert(r.src).second) grew = true;
    }
  }
  return in;
}

// A record is live when its source is alerted (and it is not before the start)
// or a live record delivered to its source no later than it. Targets of live
// records are contaminated.
inline std::set<ComponentId> causal_closure(const std::vector<ComponentId>& alerted,
                                            const std::vector<OpLogRecord>& log, double start) {
  const std::set<ComponentId> roots(alerted.begin(), alerted.end());
  std::vector<bool> live(log.size(), false);
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t i = 0; i < log.size(); ++i) {
      if (live[i]) continue;
      bool ok = roots.count(log[i].src) && log[i].t >= start;
      for (std::size_t j = 0; !ok && j < log.size(); ++j) {
        ok = live[j] && log[j].dst == log[i].src && log[j].t <= log[i].t;
      }
      if (ok) live[i] = grew = true;
    }
  }
  std::set<ComponentId> out = roots;
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (live[i]) out.insert(log[i].dst);
  }
  return out;
}

// Members of the alerted components' zones that touch another zone, read
// straight off the edge list.
inline std::set<ComponentId> damage_response(const pzc::Topology& topology, const pzc::ZoneAssignment& zones,
                                             const std::vector<ComponentId>& alerted) {
  std::set<pzc::ZoneId> hit;
  for (auto id : alerted) hit.insert(zones.at(id));
  std::set<ComponentId> out;
  for (const auto& e : topology.edges()) {
    const auto zu = zones.at(e.u);
    const auto zv = zones.at(e.v);
    if (zu == zv) continue;
    if (hit.count(zu)) out.insert(e.u);
    if (hit.count(zv)) out.insert(e.v);
  }
  return out;
}

}  // namespace oracles
