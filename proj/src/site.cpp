#include "sheafnet/site.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sheafnet/detail/union_find.hpp"
#include "sheafnet/error.hpp"

namespace sheafnet::site {

using detail::Components;

namespace {

using nlohmann::json;

Role parse_role(const std::string& s) {
  if (s == "input") return Role::input;
  if (s == "output") return Role::output;
  if (s == "ordinary") return Role::ordinary;
  throw InputError("unknown role '" + s + "'");
}

std::string unique_name(std::string base, const std::set<std::string>& taken) {
  while (taken.count(base) != 0) base += '\'';
  return base;
}

std::size_t find_index(const std::vector<std::string>& ids, std::string_view id) {
  auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw InputError("unknown vertex '" + std::string(id) + "'");
  return static_cast<std::size_t>(it - ids.begin());
}

ForkGraph surgery(ForkGraph fg, const SurgeryOptions& options, const std::map<std::string, std::string>& tank_names) {
  const std::size_t n0 = fg.size();
  std::vector<std::vector<std::size_t>> targets(n0);
  for (auto [x, y] : fg.arrows) {
    if (fg.kinds[y] != VertexKind::star) targets[x].push_back(y);
  }

  std::vector<std::vector<std::size_t>> tine_sets;
  std::vector<std::vector<std::size_t>> handle_groups;
  for (std::size_t v = 0; v < n0; ++v) {
    if (targets[v].size() < 2) continue;
    std::vector<std::size_t> tines = targets[v];
    std::sort(tines.begin(), tines.end());
    std::size_t g = tine_sets.size();
    if (options.share_tanks) {
      auto it = std::find(tine_sets.begin(), tine_sets.end(), tines);
      g = static_cast<std::size_t>(it - tine_sets.begin());
    }
    if (g == tine_sets.size()) {
      tine_sets.push_back(std::move(tines));
      handle_groups.emplace_back();
    }
    handle_groups[g].push_back(v);
  }
  if (tine_sets.empty()) return fg;

  std::set<std::string> taken(fg.ids.begin(), fg.ids.end());
  auto add_vertex = [&](std::string name, VertexKind kind) {
    name = unique_name(std::move(name), taken);
    taken.insert(name);
    fg.ids.push_back(std::move(name));
    fg.kinds.push_back(kind);
    return fg.ids.size() - 1;
  };
  auto promote = [&](std::size_t v, VertexKind to) {
    VertexKind& k = fg.kinds[v];
    if (k == VertexKind::output || k == VertexKind::input || k == VertexKind::tip) return;
    if (to == VertexKind::tip || k == VertexKind::ordinary) k = to;
  };

  std::set<IndexPair> removed;
  std::vector<IndexPair> added;
  std::map<std::size_t, std::size_t> copy_of;
  for (const auto& [copy, original] : fg.input_copies) copy_of[original] = copy;

  for (std::size_t g = 0; g < tine_sets.size(); ++g) {
    const auto& handles = handle_groups[g];
    std::string tang_name;
    for (std::size_t h : handles) {
      auto it = tank_names.find(fg.ids[h]);
      if (it != tank_names.end()) {
        tang_name = it->second;
        break;
      }
    }
    if (tang_name.empty()) {
      tang_name = "<";
      for (std::size_t i = 0; i < handles.size(); ++i) tang_name += (i ? "," : "") + fg.ids[handles[i]];
      tang_name += ">";
    }
    Fork fork;
    fork.tang = add_vertex(tang_name, VertexKind::tang);
    fork.star = add_vertex(fg.ids[fork.tang] + "*", VertexKind::star);
    fork.handles = handles;
    for (std::size_t t : tine_sets[g]) {
      for (std::size_t h : handles) removed.emplace(h, t);
      std::size_t tine = t;
      if (options.duplicate_inputs && fg.kinds[t] == VertexKind::input) {
        auto it = copy_of.find(t);
        if (it == copy_of.end()) {
          const std::size_t c = add_vertex(fg.ids[t] + "'", VertexKind::tip);
          it = copy_of.emplace(t, c).first;
          fg.input_copies.emplace_back(c, t);
          added.emplace_back(c, t);
        }
        tine = it->second;
      }
      promote(tine, VertexKind::tip);
      fork.tines.push_back(tine);
      added.emplace_back(tine, fork.star);
    }
    std::sort(fork.tines.begin(), fork.tines.end());
    added.emplace_back(fork.star, fork.tang);
    for (std::size_t h : handles) {
      promote(h, VertexKind::handle);
      added.emplace_back(h, fork.tang);
    }
    fg.forks.push_back(std::move(fork));
  }

  std::vector<IndexPair> arrows;
  for (const auto& a : fg.arrows) {
    if (removed.count(a) == 0) arrows.push_back(a);
  }
  arrows.insert(arrows.end(), added.begin(), added.end());
  std::sort(arrows.begin(), arrows.end());
  arrows.erase(std::unique(arrows.begin(), arrows.end()), arrows.end());
  fg.arrows = std::move(arrows);
  return fg;
}


}  // namespace

std::string_view to_string(Role role) {
  switch (role) {
    case Role::input: return "input";
    case Role::output: return "output";
    case Role::ordinary: return "ordinary";
  }
  return "ordinary";
}

std::size_t SiteGraph::index_of(std::string_view id) const { return find_index(vertices, id); }

std::vector<std::size_t> SiteGraph::in_degrees() const {
  std::vector<std::size_t> d(size(), 0);
  for (auto [s, t] : edges) ++d[t];
  return d;
}

std::vector<std::size_t> SiteGraph::out_degrees() const {
  std::vector<std::size_t> d(size(), 0);
  for (auto [s, t] : edges) ++d[s];
  return d;
}

SiteGraph parse_architecture(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed architecture document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array() || !doc.contains("edges") ||
      !doc["edges"].is_array()) {
    throw InputError("architecture document needs array fields 'nodes' and 'edges'");
  }

  SiteGraph g;
  std::vector<std::optional<Role>> declared;
  std::set<std::string> seen;
  for (const json& node : doc["nodes"]) {
    std::string id;
    std::optional<Role> role;
    if (node.is_string()) {
      id = node.get<std::string>();
    } else if (node.is_object() && node.contains("id") && node["id"].is_string()) {
      id = node["id"].get<std::string>();
      if (node.contains("role")) {
        if (!node["role"].is_string()) throw InputError("role of '" + id + "' must be a string");
        role = parse_role(node["role"].get<std::string>());
      }
    } else {
      throw InputError("node entries must be strings or objects with a string 'id'");
    }
    if (id.empty()) throw InputError("empty vertex id");
    if (!seen.insert(id).second) throw InputError("duplicate vertex id '" + id + "'");
    g.vertices.push_back(id);
    declared.push_back(role);
  }
  if (g.vertices.empty()) throw InputError("architecture has no vertices");

  std::set<IndexPair> edge_set;
  for (const json& e : doc["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
      throw InputError("edges must be pairs of vertex ids");
    }
    const std::string src = e[0].get<std::string>();
    const std::string dst = e[1].get<std::string>();
    if (seen.count(src) == 0) throw InputError("edge references unknown vertex '" + src + "'");
    if (seen.count(dst) == 0) throw InputError("edge references unknown vertex '" + dst + "'");
    if (src == dst) throw InputError("self-loop at '" + src + "'");
    IndexPair edge{g.index_of(src), g.index_of(dst)};
    if (!edge_set.insert(edge).second) throw InputError("parallel edge " + src + " -> " + dst);
    g.edges.push_back(edge);
  }

  if (doc.contains("tank_names")) {
    if (!doc["tank_names"].is_object()) throw InputError("'tank_names' must map handle ids to names");
    for (const auto& [handle, name] : doc["tank_names"].items()) {
      if (seen.count(handle) == 0) throw InputError("tank name given for unknown vertex '" + handle + "'");
      if (!name.is_string()) throw InputError("tank name for '" + handle + "' must be a string");
      g.tank_names[handle] = name.get<std::string>();
    }
  }

  const auto in = g.in_degrees();
  const auto out = g.out_degrees();
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (g.size() > 1 && in[v] == 0 && out[v] == 0) throw InputError("isolated vertex '" + g.vertices[v] + "'");
    Role inferred = in[v] == 0 ? Role::input : (out[v] == 0 ? Role::output : Role::ordinary);
    if (declared[v]) {
      if (*declared[v] == Role::input && in[v] != 0) {
        throw InputError("input vertex '" + g.vertices[v] + "' has incoming edges");
      }
      if (*declared[v] == Role::output && out[v] != 0) {
        throw InputError("output vertex '" + g.vertices[v] + "' has outgoing edges");
      }
      inferred = *declared[v];
    }
    g.roles.push_back(inferred);
  }
  return g;
}

SiteGraph load_architecture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read architecture file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_architecture(buf.str());
}

ValidationReport check_classical_directed(const SiteGraph& g) {
  ValidationReport report;
  std::set<IndexPair> seen;
  std::vector<std::vector<std::size_t>> succ(g.size());
  for (auto [s, t] : g.edges) {
    if (s == t) {
      report.violations.push_back({"self_loop", {g.vertices[s]}});
      continue;
    }
    if (!seen.insert({s, t}).second) {
      report.violations.push_back({"parallel_edge", {g.vertices[s], g.vertices[t]}});
      continue;
    }
    succ[s].push_back(t);
  }

  // Iterative DFS; every back edge closes one reported cycle.
  enum : char { white, grey, black };
  std::vector<char> colour(g.size(), white);
  std::vector<std::size_t> path;
  for (std::size_t root = 0; root < g.size(); ++root) {
    if (colour[root] != white) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    colour[root] = grey;
    path.push_back(root);
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < succ[v].size()) {
        const std::size_t w = succ[v][next++];
        if (colour[w] == white) {
          colour[w] = grey;
          path.push_back(w);
          stack.emplace_back(w, 0);
        } else if (colour[w] == grey) {
          Violation cycle{"cycle", {}};
          auto it = std::find(path.begin(), path.end(), w);
          for (; it != path.end(); ++it) cycle.vertices.push_back(g.vertices[*it]);
          cycle.vertices.push_back(g.vertices[w]);
          report.violations.push_back(std::move(cycle));
        }
      } else {
        colour[v] = black;
        path.pop_back();
        stack.pop_back();
      }
    }
  }
  return report;
}

std::size_t ForkGraph::index_of(std::string_view id) const { return find_index(ids, id); }

std::size_t ForkGraph::count(VertexKind kind) const {
  return static_cast<std::size_t>(std::count(kinds.begin(), kinds.end(), kind));
}

bool ForkGraph::has_arrow(std::size_t from, std::size_t to) const {
  return std::binary_search(arrows.begin(), arrows.end(), IndexPair{from, to});
}

ForkGraph fork_surgery(const SiteGraph& g, const SurgeryOptions& options) {
  const ValidationReport report = check_classical_directed(g);
  if (!report.ok()) {
    const Violation& v = report.violations.front();
    std::string msg = "graph is not classical directed: " + v.kind;
    for (const auto& id : v.vertices) msg += " " + id;
    throw StructureError(msg);
  }
  ForkGraph fg;
  fg.ids = g.vertices;
  for (Role r : g.roles) {
    fg.kinds.push_back(r == Role::input ? VertexKind::input
                                        : (r == Role::output ? VertexKind::output : VertexKind::ordinary));
  }
  for (auto [s, t] : g.edges) fg.arrows.emplace_back(t, s);
  std::sort(fg.arrows.begin(), fg.arrows.end());
  return surgery(std::move(fg), options, g.tank_names);
}

ForkGraph fork_surgery(const ForkGraph& fg, const SurgeryOptions& options) { return surgery(fg, options, {}); }

std::vector<std::string> validate_fork_graph(const ForkGraph& fg) {
  std::vector<std::string> problems;
  std::vector<std::vector<std::size_t>> out(fg.size());
  std::vector<std::vector<std::size_t>> in(fg.size());
  for (auto [x, y] : fg.arrows) {
    out[x].push_back(y);
    in[y].push_back(x);
  }
  for (std::size_t v = 0; v < fg.size(); ++v) {
    if (fg.kinds[v] == VertexKind::star) {
      if (out[v].size() != 1 || fg.kinds[out[v][0]] != VertexKind::tang) {
        problems.push_back("star '" + fg.ids[v] + "' must have exactly one arrow, to a tang");
      }
      if (in[v].size() < 2) problems.push_back("star '" + fg.ids[v] + "' has fewer than two tines");
    }
    if (fg.kinds[v] == VertexKind::tang) {
      std::size_t stars = 0;
      std::size_t handles = 0;
      for (std::size_t u : in[v]) (fg.kinds[u] == VertexKind::star ? stars : handles)++;
      if (stars != 1) problems.push_back("tang '" + fg.ids[v] + "' must receive exactly one star");
      if (handles == 0) problems.push_back("tang '" + fg.ids[v] + "' has no handle");
      if (!out[v].empty()) problems.push_back("tang '" + fg.ids[v] + "' has outgoing arrows");
    }
  }
  try {
    (void)build_poset(fg);
  } catch (const StructureError& e) {
    problems.emplace_back(e.what());
  }
  return problems;
}

std::vector<IndexPair> categorical_graph(const ForkGraph& fg) {
  std::vector<IndexPair> edges;
  std::vector<std::vector<std::size_t>> into_star(fg.size());
  for (auto [x, y] : fg.arrows) {
    if (fg.kinds[y] == VertexKind::star) into_star[y].push_back(x);
  }
  for (auto [x, y] : fg.arrows) {
    if (fg.kinds[y] == VertexKind::star) continue;
    if (fg.kinds[x] == VertexKind::star) {
      for (std::size_t t : into_star[x]) edges.emplace_back(t, y);
    } else {
      edges.emplace_back(x, y);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

FinitePoset build_poset(const ForkGraph& fg, bool include_stars) {
  if (include_stars) return FinitePoset::from_relation(fg.ids, fg.arrows, fg.kinds);
  std::vector<std::size_t> remap(fg.size(), fg.size());
  std::vector<std::string> ids;
  std::vector<VertexKind> kinds;
  for (std::size_t v = 0; v < fg.size(); ++v) {
    if (fg.kinds[v] == VertexKind::star) continue;
    remap[v] = ids.size();
    ids.push_back(fg.ids[v]);
    kinds.push_back(fg.kinds[v]);
  }
  std::vector<IndexPair> gens;
  for (auto [x, y] : categorical_graph(fg)) gens.emplace_back(remap[x], remap[y]);
  return FinitePoset::from_relation(std::move(ids), gens, std::move(kinds));
}

StructureReport classify_vertices(const FinitePoset& p) {
  StructureReport r;
  r.minimal = p.minimal();
  r.maximal = p.maximal();
  r.tags.resize(p.size());
  for (std::size_t x = 0; x < p.size(); ++x) {
    VertexKind k = p.kind(x);
    const bool lo = r.minimal.contains(x);
    const bool hi = r.maximal.contains(x);
    if (!p.has_kinds()) k = hi ? VertexKind::input : (lo ? VertexKind::output : VertexKind::ordinary);
    r.tags[x] = k;
    if (lo && hi) {
      if (k != VertexKind::input && k != VertexKind::output) {
        throw StructureError("isolated element '" + p.id(x) + "' is tagged " + std::string(to_string(k)));
      }
      continue;
    }
    if (lo && k != VertexKind::output && k != VertexKind::tip) {
      throw StructureError("minimal element '" + p.id(x) + "' is tagged " + std::string(to_string(k)));
    }
    if (hi && k != VertexKind::input && k != VertexKind::tang) {
      throw StructureError("maximal element '" + p.id(x) + "' is tagged " + std::string(to_string(k)));
    }
    if (!lo && !hi && (k == VertexKind::output || k == VertexKind::input || k == VertexKind::tang)) {
      throw StructureError("interior element '" + p.id(x) + "' is tagged " + std::string(to_string(k)));
    }
  }

  std::size_t nodes = 0;
  std::size_t edges = 0;
  Components comp(p.size());
  for (auto [x, y] : p.covers()) {
    if (r.tags[x] == VertexKind::tang || r.tags[y] == VertexKind::tang) continue;
    comp.unite(x, y);
    ++edges;
  }
  std::set<std::size_t> roots;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (r.tags[x] == VertexKind::tang) continue;
    ++nodes;
    roots.insert(comp.find(x));
  }
  r.tree_count = roots.size();
  r.forest = edges + r.tree_count == nodes;
  return r;
}

std::size_t loop_rank(std::size_t n, const std::vector<IndexPair>& edges) {
  Components comp(n);
  for (auto [a, b] : edges) comp.unite(a, b);
  std::set<std::size_t> roots;
  for (std::size_t v = 0; v < n; ++v) roots.insert(comp.find(v));
  return edges.size() + roots.size() - n;
}

std::size_t loop_rank(const SiteGraph& g) { return loop_rank(g.size(), g.edges); }

std::size_t loop_rank(const ForkGraph& fg) { return loop_rank(fg.size(), categorical_graph(fg)); }

}  // namespace sheafnet::site
