#include "pzc/ires.hpp"

#include <algorithm>

#include "pzc/error.hpp"

namespace pzc {

ResponseSet assess_damage(std::span<const IdsAlert> alerts, const PartitionScheme& scheme) {
  ResponseSet out;
  std::set<ZoneId> zones;
  std::set<ComponentId> components;
  for (const auto& alert : alerts) {
    const auto zone = scheme.zone_of(alert.component);
    if (!zone) {
      throw Error(ErrorCode::NotFound,
                  "alerted component " + std::to_string(alert.component) + " is not in the partition scheme");
    }
    out.triggering_alerts.push_back(alert);
    out.t_issued = std::max(out.t_issued, alert.t_detect);
    if (!zones.insert(*zone).second) continue;
    auto it = scheme.boundaries.find(*zone);
    if (it != scheme.boundaries.end()) components.insert(it->second.begin(), it->second.end());
  }
  out.components.assign(components.begin(), components.end());
  return out;
}

ResponseManager::ResponseManager(ResponseStrategy strategy, const PartitionScheme* scheme)
    : strategy_(strategy), scheme_(scheme) {
  if (strategy_ == ResponseStrategy::PartitionAware && scheme_ == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "partition-aware response needs a partition scheme");
  }
}

ResponseDecision ResponseManager::respond(std::span<const IdsAlert> batch, double t) {
  ResponseDecision decision;
  if (strategy_ == ResponseStrategy::None) return decision;

  std::vector<IdsAlert> sorted(batch.begin(), batch.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const IdsAlert& a, const IdsAlert& b) { return a.component < b.component; });

  for (const auto& alert : sorted) {
    if (isolated_.insert(alert.component).second) {
      decision.orders.push_back({alert.component, IsolationReason::Compromised});
    }
  }
  if (strategy_ != ResponseStrategy::PartitionAware) return decision;

  std::vector<IdsAlert> zoned;
  for (const auto& alert : sorted) {
    if (scheme_->zone_of(alert.component)) zoned.push_back(alert);
  }
  if (zoned.empty()) return decision;

  auto response = assess_damage(zoned, *scheme_);
  response.t_issued = t;
  for (auto id : response.components) {
    if (isolated_.insert(id).second) {
      decision.orders.push_back({id, IsolationReason::Boundary});
    } else {
      ++decision.reissued;
    }
  }
  issued_.push_back(response);
  decision.response_set = std::move(response);
  return decision;
}

}  // namespace pzc
