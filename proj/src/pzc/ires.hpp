#pragma once

#include <optional>
#include <set>
#include <span>
#include <vector>

#include "pzc/partition.hpp"
#include "pzc/sim_types.hpp"

namespace pzc {

/// Damage assessment: the union of the boundary sets of every zone holding an
/// alerted component, ascending by id. Throws NotFound when an alerted
/// component has no zone (scheme and topology disagree).
ResponseSet assess_damage(std::span<const IdsAlert> alerts, const PartitionScheme& scheme);

enum class IsolationReason { Compromised, Boundary };

struct IsolationOrder {
  ComponentId component = 0;
  IsolationReason reason = IsolationReason::Compromised;
};

struct ResponseDecision {
  std::vector<IsolationOrder> orders;       // only components not isolated before
  std::optional<ResponseSet> response_set;  // partition-aware batches only
  std::size_t reissued = 0;                 // already-isolated members asked again
};

/// Drives the halt-then-disconnect cycle for each alert batch. The only state
/// kept between batches is the set of components it currently holds isolated.
class ResponseManager {
 public:
  ResponseManager(ResponseStrategy strategy, const PartitionScheme* scheme);

  /// Alerted components are halted first, then the response set of their
  /// zones is disconnected. Alerted components the scheme does not cover are
  /// halted but contribute no zone.
  ResponseDecision respond(std::span<const IdsAlert> batch, double t);

  /// Recovery hands a component back to normal operation.
  void release(ComponentId id) { isolated_.erase(id); }
  bool holds(ComponentId id) const { return isolated_.count(id) > 0; }

  const std::vector<ResponseSet>& issued() const { return issued_; }

 private:
  ResponseStrategy strategy_;
  const PartitionScheme* scheme_;
  std::set<ComponentId> isolated_;
  std::vector<ResponseSet> issued_;
};

}  // namespace pzc
