#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pzc {

using ComponentId = std::uint32_t;

enum class ComponentKind { SmartMeter, DataConcentrator, Headend, EnterpriseSystem, Generic };

std::string_view to_string(ComponentKind kind);
ComponentKind parse_kind(std::string_view name);

struct Component {
  ComponentId id = 0;
  ComponentKind kind = ComponentKind::Generic;

  friend bool operator==(const Component&, const Component&) = default;
};

/// Undirected edge, always stored with u < v.
struct Edge {
  ComponentId u = 0;
  ComponentId v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Function name -> sorted, unique component ids serving that function.
using FunctionMap = std::map<std::string, std::vector<ComponentId>>;

inline constexpr std::string_view kDefaultFunction = "default";

struct DegreeStats {
  std::size_t min = 0;
  std::size_t max = 0;
  double mean = 0.0;
};

/// Immutable undirected component graph. Components are kept sorted by id and
/// addressed internally by their dense position ("index") in that order, so
/// "lowest id" and "lowest index" tie-breaks coincide.
class Topology {
 public:
  Topology() = default;

  /// Validates: unique ids, no self-loops, no duplicate edges, endpoints exist.
  /// When `functions` is empty every component is placed in kDefaultFunction.
  Topology(std::vector<Component> components, std::vector<Edge> edges, FunctionMap functions = {});

  std::size_t size() const { return components_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<Component>& components() const { return components_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const FunctionMap& functions() const { return functions_; }

  std::optional<std::size_t> find(ComponentId id) const;
  std::size_t index_of(ComponentId id) const;  // throws NotFound
  bool contains(ComponentId id) const { return find(id).has_value(); }
  ComponentId id_at(std::size_t index) const { return components_[index].id; }
  ComponentKind kind(ComponentId id) const { return components_[index_of(id)].kind; }
  ComponentKind kind_at(std::size_t index) const { return components_[index].kind; }

  /// Neighbour indices of the component at `index`, ascending.
  std::span<const std::uint32_t> neighbors_at(std::size_t index) const {
    return {adjacency_.data() + offsets_[index], adjacency_.data() + offsets_[index + 1]};
  }
  std::vector<ComponentId> neighbors(ComponentId id) const;
  bool adjacent(ComponentId a, ComponentId b) const;

  bool connected() const;
  DegreeStats degree_stats() const;

  /// Subgraph induced by `ids`; the function map is restricted accordingly.
  Topology induced(std::span<const ComponentId> ids) const;

  /// Ids of the components that serve `function`; throws NotFound.
  const std::vector<ComponentId>& function_members(const std::string& function) const;

  friend bool operator==(const Topology& a, const Topology& b) {
    return a.components_ == b.components_ && a.edges_ == b.edges_ && a.functions_ == b.functions_;
  }

 private:
  std::vector<Component> components_;
  std::vector<Edge> edges_;
  FunctionMap functions_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<std::uint32_t> adjacency_;
};

// --- file formats --------------------------------------------------------

/// Edge list: one "u v" per line; "# nodes=N" declares ids 0..N-1; "# node ID"
/// declares an isolated component; other '#' lines are comments.
Topology parse_edge_list(std::istream& in, std::string_view source = "<stream>",
                         const std::map<ComponentId, ComponentKind>& kinds = {},
                         const FunctionMap& functions = {});
std::map<ComponentId, ComponentKind> parse_kinds(std::istream& in, std::string_view source = "<stream>");
/// Lines "function_name: id,id,id".
FunctionMap parse_function_map(std::istream& in, std::string_view source = "<stream>");

Topology load_topology(const std::filesystem::path& edges,
                       const std::optional<std::filesystem::path>& kinds = std::nullopt,
                       const std::optional<std::filesystem::path>& functions = std::nullopt);

void write_edge_list(std::ostream& out, const Topology& topology);
void write_kinds(std::ostream& out, const Topology& topology);
void write_function_map(std::ostream& out, const FunctionMap& functions);

void save_topology(const Topology& topology, const std::filesystem::path& edges,
                   const std::optional<std::filesystem::path>& kinds = std::nullopt,
                   const std::optional<std::filesystem::path>& functions = std::nullopt);

// --- AMI generator -------------------------------------------------------

/// Meters get ids 0..n_meters-1 (NAN blocks of near-equal size, larger NANs
/// first); concentrator i gets id n_meters + i. Function "meter_ops_nan<i+1>"
/// holds NAN i's meters and its concentrator.
Topology generate_ami_topology(std::size_t n_meters, std::size_t n_concentrators,
                               std::size_t mesh_degree, std::uint64_t seed);

std::string nan_function_name(std::size_t nan_index);

// --- intrusion boundaries ------------------------------------------------

struct IBScheme {
  std::map<std::string, std::vector<ComponentId>> ibs;
  std::vector<Edge> intra_ib_links;
  std::vector<Edge> inter_ib_links;
  std::vector<Edge> shared_component_links;
  std::vector<ComponentId> shared_components;
};

/// Groups of function names that share one IB. Functions not named in any
/// group get an IB of their own.
using FunctionGrouping = std::vector<std::vector<std::string>>;

IBScheme demarcate_ibs(const Topology& topology, const FunctionMap& functions,
                       const FunctionGrouping& grouping = {});

}  // namespace pzc
