#include "pzc/topology.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "pzc/error.hpp"
#include "pzc/rng.hpp"

namespace pzc {

namespace {

constexpr std::pair<ComponentKind, std::string_view> kKindNames[] = {
    {ComponentKind::SmartMeter, "smart_meter"},
    {ComponentKind::DataConcentrator, "data_concentrator"},
    {ComponentKind::Headend, "headend"},
    {ComponentKind::EnterpriseSystem, "enterprise_system"},
    {ComponentKind::Generic, "generic"},
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

Error parse_error(std::string_view source, std::size_t line, const std::string& msg) {
  std::ostringstream os;
  os << source << ":" << line << ": " << msg;
  return Error(ErrorCode::Parse, os.str());
}

std::optional<ComponentId> to_id(std::string_view token) {
  ComponentId value = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::string_view to_string(ComponentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "generic";
}

ComponentKind parse_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw Error(ErrorCode::Parse, "unknown component kind '" + std::string(name) + "'");
}

// --- Topology ----------------------------------------------------------------

Topology::Topology(std::vector<Component> components, std::vector<Edge> edges, FunctionMap functions)
    : components_(std::move(components)) {
  std::sort(components_.begin(), components_.end(),
            [](const Component& a, const Component& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < components_.size(); ++i) {
    if (components_[i].id == components_[i - 1].id) {
      throw Error(ErrorCode::Invariant, "duplicate component id " + std::to_string(components_[i].id));
    }
  }

  for (auto& e : edges) {
    if (e.u == e.v) throw Error(ErrorCode::Invariant, "self-loop at component " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
    if (!contains(e.u) || !contains(e.v)) {
      throw Error(ErrorCode::Invariant, "edge " + std::to_string(e.u) + "-" + std::to_string(e.v) +
                                            " references an unknown component");
    }
  }
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i] == edges[i - 1]) {
      throw Error(ErrorCode::Invariant,
                  "duplicate edge " + std::to_string(edges[i].u) + "-" + std::to_string(edges[i].v));
    }
  }
  edges_ = std::move(edges);

  const std::size_t n = components_.size();
  std::vector<std::uint32_t> degree(n, 0);
  for (const auto& e : edges_) {
    ++degree[index_of(e.u)];
    ++degree[index_of(e.v)];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  adjacency_.assign(offsets_[n], 0);
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    const auto a = static_cast<std::uint32_t>(index_of(e.u));
    const auto b = static_cast<std::uint32_t>(index_of(e.v));
    adjacency_[fill[a]++] = b;
    adjacency_[fill[b]++] = a;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adjacency_.begin() + offsets_[i], adjacency_.begin() + offsets_[i + 1]);
  }

  if (functions.empty()) {
    std::vector<ComponentId> all;
    all.reserve(n);
    for (const auto& c : components_) all.push_back(c.id);
    if (!all.empty()) functions.emplace(std::string(kDefaultFunction), std::move(all));
  }
  std::vector<bool> covered(n, false);
  for (auto& [name, ids] : functions) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (auto id : ids) {
      const auto idx = find(id);
      if (!idx) {
        throw Error(ErrorCode::Invariant,
                    "function '" + name + "' references unknown component " + std::to_string(id));
      }
      covered[*idx] = true;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!covered[i]) {
      throw Error(ErrorCode::Invariant,
                  "component " + std::to_string(components_[i].id) + " serves no function");
    }
  }
  functions_ = std::move(functions);
}

std::optional<std::size_t> Topology::find(ComponentId id) const {
  auto it = std::lower_bound(components_.begin(), components_.end(), id,
                             [](const Component& c, ComponentId v) { return c.id < v; });
  if (it == components_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - components_.begin());
}

std::size_t Topology::index_of(ComponentId id) const {
  if (auto idx = find(id)) return *idx;
  throw Error(ErrorCode::NotFound, "unknown component " + std::to_string(id));
}

std::vector<ComponentId> Topology::neighbors(ComponentId id) const {
  std::vector<ComponentId> out;
  for (auto j : neighbors_at(index_of(id))) out.push_back(components_[j].id);
  return out;
}

bool Topology::adjacent(ComponentId a, ComponentId b) const {
  const auto ia = find(a);
  const auto ib = find(b);
  if (!ia || !ib) return false;
  auto nb = neighbors_at(*ia);
  return std::binary_search(nb.begin(), nb.end(), static_cast<std::uint32_t>(*ib));
}

bool Topology::connected() const {
  if (components_.empty()) return true;
  std::vector<bool> seen(size(), false);
  std::vector<std::uint32_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (auto w : neighbors_at(v)) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == size();
}

DegreeStats Topology::degree_stats() const {
  DegreeStats stats;
  if (components_.empty()) return stats;
  stats.min = SIZE_MAX;
  for (std::size_t i = 0; i < size(); ++i) {
    const std::size_t d = offsets_[i + 1] - offsets_[i];
    stats.min = std::min(stats.min, d);
    stats.max = std::max(stats.max, d);
  }
  stats.mean = 2.0 * static_cast<double>(edges_.size()) / static_cast<double>(size());
  return stats;
}

Topology Topology::induced(std::span<const ComponentId> ids) const {
  std::set<ComponentId> keep(ids.begin(), ids.end());
  std::vector<Component> comps;
  for (auto id : keep) comps.push_back(components_[index_of(id)]);
  std::vector<Edge> edges;
  for (const auto& e : edges_) {
    if (keep.count(e.u) && keep.count(e.v)) edges.push_back(e);
  }
  FunctionMap functions;
  for (const auto& [name, members] : functions_) {
    std::vector<ComponentId> kept;
    for (auto id : members) {
      if (keep.count(id)) kept.push_back(id);
    }
    if (!kept.empty()) functions.emplace(name, std::move(kept));
  }
  return Topology(std::move(comps), std::move(edges), std::move(functions));
}

const std::vector<ComponentId>& Topology::function_members(const std::string& function) const {
  auto it = functions_.find(function);
  if (it == functions_.end()) throw Error(ErrorCode::NotFound, "unknown function '" + function + "'");
  return it->second;
}

// --- parsing -------------------------------------------------------------------

Topology parse_edge_list(std::istream& in, std::string_view source,
                         const std::map<ComponentId, ComponentKind>& kinds, const FunctionMap& functions) {
  std::set<ComponentId> ids;
  std::vector<Edge> edges;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = trim(line.substr(1));
      if (body.rfind("nodes=", 0) == 0) {
        const auto n = to_id(trim(body.substr(6)));
        if (!n) throw parse_error(source, line_no, "malformed node count header");
        for (ComponentId i = 0; i < *n; ++i) ids.insert(i);
      } else if (body.rfind("node ", 0) == 0) {
        const auto id = to_id(trim(body.substr(5)));
        if (!id) throw parse_error(source, line_no, "malformed node declaration");
        ids.insert(*id);
      }
      continue;
    }
    const auto tokens = split_ws(line);
    if (tokens.size() != 2) throw parse_error(source, line_no, "expected 'u v', got '" + std::string(line) + "'");
    const auto u = to_id(tokens[0]);
    const auto v = to_id(tokens[1]);
    if (!u || !v) throw parse_error(source, line_no, "non-integer component id in '" + std::string(line) + "'");
    if (*u == *v) {
      throw Error(ErrorCode::Invariant,
                  std::string(source) + ":" + std::to_string(line_no) + ": self-loop at component " + std::to_string(*u));
    }
    ids.insert(*u);
    ids.insert(*v);
    edges.push_back(Edge{std::min(*u, *v), std::max(*u, *v)});
  }

  std::vector<Edge> sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1]) {
      throw Error(ErrorCode::Invariant, std::string(source) + ": duplicate edge " + std::to_string(sorted[i].u) +
                                            "-" + std::to_string(sorted[i].v));
    }
  }

  std::vector<Component> comps;
  comps.reserve(ids.size());
  for (auto id : ids) {
    auto it = kinds.find(id);
    comps.push_back(Component{id, it == kinds.end() ? ComponentKind::Generic : it->second});
  }
  for (const auto& [id, kind] : kinds) {
    if (!ids.count(id)) {
      throw Error(ErrorCode::Invariant, std::string(source) + ": kind given for unknown component " + std::to_string(id));
    }
  }
  return Topology(std::move(comps), std::move(edges), functions);
}

std::map<ComponentId, ComponentKind> parse_kinds(std::istream& in, std::string_view source) {
  std::map<ComponentId, ComponentKind> kinds;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tokens = split_ws(line);
    if (tokens.size() != 2) throw parse_error(source, line_no, "expected 'id kind'");
    const auto id = to_id(tokens[0]);
    if (!id) throw parse_error(source, line_no, "non-integer component id");
    try {
      kinds[*id] = parse_kind(tokens[1]);
    } catch (const Error& e) {
      throw parse_error(source, line_no, e.what());
    }
  }
  return kinds;
}

FunctionMap parse_function_map(std::istream& in, std::string_view source) {
  FunctionMap functions;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw parse_error(source, line_no, "expected 'function: id,id,...'");
    const auto name = trim(line.substr(0, colon));
    if (name.empty()) throw parse_error(source, line_no, "empty function name");
    auto& members = functions[std::string(name)];
    auto rest = line.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto token = trim(rest.substr(0, comma));
      if (!token.empty()) {
        const auto id = to_id(token);
        if (!id) throw parse_error(source, line_no, "non-integer component id '" + std::string(token) + "'");
        members.push_back(*id);
      }
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  return functions;
}

Topology load_topology(const std::filesystem::path& edges, const std::optional<std::filesystem::path>& kinds,
                       const std::optional<std::filesystem::path>& functions) {
  std::map<ComponentId, ComponentKind> kind_map;
  if (kinds) {
    auto in = open_input(*kinds);
    kind_map = parse_kinds(in, kinds->string());
  }
  FunctionMap fmap;
  if (functions) {
    auto in = open_input(*functions);
    fmap = parse_function_map(in, functions->string());
  }
  auto in = open_input(edges);
  return parse_edge_list(in, edges.string(), kind_map, fmap);
}

void write_edge_list(std::ostream& out, const Topology& topology) {
  const auto& comps = topology.components();
  const bool dense = !comps.empty() && comps.back().id + 1 == comps.size();
  if (dense) {
    out << "# nodes=" << comps.size() << '\n';
  } else {
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (topology.neighbors_at(i).empty()) out << "# node " << comps[i].id << '\n';
    }
  }
  for (const auto& e : topology.edges()) out << e.u << ' ' << e.v << '\n';
}

void write_kinds(std::ostream& out, const Topology& topology) {
  for (const auto& c : topology.components()) out << c.id << ' ' << to_string(c.kind) << '\n';
}

void write_function_map(std::ostream& out, const FunctionMap& functions) {
  for (const auto& [name, ids] : functions) {
    out << name << ':';
    for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? "," : " ") << ids[i];
    out << '\n';
  }
}

void save_topology(const Topology& topology, const std::filesystem::path& edges,
                   const std::optional<std::filesystem::path>& kinds,
                   const std::optional<std::filesystem::path>& functions) {
  {
    auto out = open_output(edges);
    write_edge_list(out, topology);
  }
  if (kinds) {
    auto out = open_output(*kinds);
    write_kinds(out, topology);
  }
  if (functions) {
    auto out = open_output(*functions);
    write_function_map(out, topology.functions());
  }
}

// --- generator -----------------------------------------------------------------

std::string nan_function_name(std::size_t nan_index) { return "meter_ops_nan" + std::to_string(nan_index + 1); }

Topology generate_ami_topology(std::size_t n_meters, std::size_t n_concentrators, std::size_t mesh_degree,
                               std::uint64_t seed) {
  if (n_meters < 1 || n_concentrators < 1 || mesh_degree < 1) {
    throw Error(ErrorCode::InvalidArgument, "generator needs n_meters, n_concentrators and mesh_degree >= 1");
  }
  if (n_concentrators > n_meters) {
    throw Error(ErrorCode::Infeasible, "more concentrators than meters leaves a NAN empty");
  }
  const std::size_t smallest_nan = n_meters / n_concentrators;
  if (mesh_degree >= smallest_nan) {
    throw Error(ErrorCode::Infeasible, "mesh degree " + std::to_string(mesh_degree) +
                                           " is not below the NAN size " + std::to_string(smallest_nan));
  }

  Rng rng(seed);
  std::vector<Component> comps;
  std::set<Edge> edges;
  FunctionMap functions;
  auto add_edge = [&](ComponentId a, ComponentId b) { edges.insert(Edge{std::min(a, b), std::max(a, b)}); };

  ComponentId next_meter = 0;
  const std::size_t remainder = n_meters % n_concentrators;
  for (std::size_t nan = 0; nan < n_concentrators; ++nan) {
    const std::size_t size = smallest_nan + (nan < remainder ? 1 : 0);
    std::vector<ComponentId> meters(size);
    std::iota(meters.begin(), meters.end(), next_meter);
    next_meter += static_cast<ComponentId>(size);
    for (auto id : meters) comps.push_back(Component{id, ComponentKind::SmartMeter});

    // Random spanning tree keeps the NAN connected; chords then raise the
    // average degree to the target.
    std::vector<ComponentId> order = meters;
    rng.shuffle(order);
    std::set<Edge> nan_edges;
    for (std::size_t i = 1; i < order.size(); ++i) {
      const auto parent = order[rng.below(i)];
      nan_edges.insert(Edge{std::min(order[i], parent), std::max(order[i], parent)});
    }
    const std::size_t target = std::max<std::size_t>(size - 1, (size * mesh_degree + 1) / 2);
    while (nan_edges.size() < target) {
      const auto a = meters[rng.below(size)];
      const auto b = meters[rng.below(size)];
      if (a != b) nan_edges.insert(Edge{std::min(a, b), std::max(a, b)});
    }
    edges.insert(nan_edges.begin(), nan_edges.end());

    const auto concentrator = static_cast<ComponentId>(n_meters + nan);
    comps.push_back(Component{concentrator, ComponentKind::DataConcentrator});
    const std::size_t links = std::max<std::size_t>(1, (size + 9) / 10);
    std::vector<ComponentId> pick = meters;
    rng.shuffle(pick);
    for (std::size_t i = 0; i < links; ++i) add_edge(concentrator, pick[i]);

    auto& members = functions[nan_function_name(nan)];
    members = meters;
    members.push_back(concentrator);
  }
  // Backhaul: every other concentrator hangs off the first one.
  for (std::size_t nan = 1; nan < n_concentrators; ++nan) {
    add_edge(static_cast<ComponentId>(n_meters), static_cast<ComponentId>(n_meters + nan));
  }

  return Topology(std::move(comps), std::vector<Edge>(edges.begin(), edges.end()), std::move(functions));
}

// --- intrusion boundaries --------------------------------------------------------

IBScheme demarcate_ibs(const Topology& topology, const FunctionMap& functions, const FunctionGrouping& grouping) {
  std::map<std::string, std::string> ib_of_function;
  for (const auto& group : grouping) {
    if (group.empty()) throw Error(ErrorCode::InvalidArgument, "empty function group");
    std::string name;
    for (std::size_t i = 0; i < group.size(); ++i) name += (i ? "+" : "") + group[i];
    for (const auto& f : group) {
      if (!functions.count(f)) throw Error(ErrorCode::NotFound, "grouping names unknown function '" + f + "'");
      if (!ib_of_function.emplace(f, name).second) {
        throw Error(ErrorCode::InvalidArgument, "function '" + f + "' appears in two groups");
      }
    }
  }

  IBScheme scheme;
  std::map<ComponentId, std::set<std::string>> ibs_of;
  for (const auto& [function, ids] : functions) {
    auto it = ib_of_function.find(function);
    const std::string ib = it == ib_of_function.end() ? function : it->second;
    auto& members = scheme.ibs[ib];
    for (auto id : ids) {
      if (!topology.contains(id)) {
        throw Error(ErrorCode::NotFound, "function '" + function + "' references unknown component " + std::to_string(id));
      }
      members.push_back(id);
      ibs_of[id].insert(ib);
    }
  }
  for (auto& [ib, members] : scheme.ibs) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
  }
  for (const auto& c : topology.components()) {
    auto it = ibs_of.find(c.id);
    if (it == ibs_of.end()) {
      throw Error(ErrorCode::Invariant, "component " + std::to_string(c.id) + " is not covered by any function");
    }
    if (it->second.size() > 1) scheme.shared_components.push_back(c.id);
  }

  for (const auto& e : topology.edges()) {
    const auto& a = ibs_of[e.u];
    const auto& b = ibs_of[e.v];
    if (a.size() > 1 || b.size() > 1) {
      scheme.shared_component_links.push_back(e);
    } else if (*a.begin() == *b.begin()) {
      scheme.intra_ib_links.push_back(e);
    } else {
      scheme.inter_ib_links.push_back(e);
    }
  }
  return scheme;
}

}  // namespace pzc
