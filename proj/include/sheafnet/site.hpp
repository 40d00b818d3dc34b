#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sheafnet/poset.hpp"

namespace sheafnet::site {

enum class Role { input, output, ordinary };

std::string_view to_string(Role role);

/// A network architecture as a directed graph; edges follow the data flow.
struct SiteGraph {
  std::vector<std::string> vertices;
  std::vector<Role> roles;
  std::vector<IndexPair> edges;
  /// Optional display names for tanks, keyed by one of the tank's handles.
  std::map<std::string, std::string> tank_names;

  std::size_t size() const { return vertices.size(); }
  std::size_t index_of(std::string_view id) const;
  std::vector<std::size_t> in_degrees() const;
  std::vector<std::size_t> out_degrees() const;
};

/// Parses the architecture JSON document.  Throws InputError on malformed
/// documents, duplicate ids, unknown endpoints and role/degree mismatches.
SiteGraph parse_architecture(std::string_view text);
SiteGraph load_architecture(const std::filesystem::path& path);

struct Violation {
  std::string kind;  // "cycle", "self_loop", "parallel_edge"
  std::vector<std::string> vertices;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport check_classical_directed(const SiteGraph& g);

struct Fork {
  std::size_t tang = 0;
  std::size_t star = 0;
  std::vector<std::size_t> tines;
  std::vector<std::size_t> handles;

  friend bool operator==(const Fork&, const Fork&) = default;
};

/// Graph after fork surgery.  Arrows are stored in the category direction:
/// an arrow (x, y) means x <= y in the resulting poset, so data flows from y to x.
struct ForkGraph {
  std::vector<std::string> ids;
  std::vector<VertexKind> kinds;
  std::vector<IndexPair> arrows;
  std::vector<Fork> forks;
  /// Duplicated inputs as (copy, original).
  std::vector<IndexPair> input_copies;

  std::size_t size() const { return ids.size(); }
  std::size_t index_of(std::string_view id) const;
  std::size_t count(VertexKind kind) const;
  bool has_arrow(std::size_t from, std::size_t to) const;

  friend bool operator==(const ForkGraph&, const ForkGraph&) = default;
};

struct SurgeryOptions {
  /// Joins with identical tine sets share a single tank and star.
  bool share_tanks = true;
  /// Inputs feeding a join are replaced in the fork by a primed copy.
  bool duplicate_inputs = true;
};

/// Throws StructureError when g is not classical directed.
ForkGraph fork_surgery(const SiteGraph& g, const SurgeryOptions& options = {});
/// Re-applies the surgery to an already forked graph.
ForkGraph fork_surgery(const ForkGraph& fg, const SurgeryOptions& options = {});

/// Checks the star/tang shape of a fork graph.  Returns one message per defect.
std::vector<std::string> validate_fork_graph(const ForkGraph& fg);

/// Poset on the vertices of fg; stars are dropped unless include_stars is set.
/// Throws StructureError on antisymmetry failure.
FinitePoset build_poset(const ForkGraph& fg, bool include_stars = false);

struct StructureReport {
  std::vector<VertexKind> tags;
  ElementSet minimal;
  ElementSet maximal;
  /// Components of the covering graph once tangs are removed.
  std::size_t tree_count = 0;
  bool forest = true;
};

/// Checks that every minimal element is an output or tip and every maximal
/// element an input or tang.  Throws StructureError on a contradiction.
StructureReport classify_vertices(const FinitePoset& p);

/// Arrows of fg with every tine -> star -> tang composed into tine -> tang.
std::vector<IndexPair> categorical_graph(const ForkGraph& fg);

/// Cycle rank of the undirected graph on n vertices with the given edges.
std::size_t loop_rank(std::size_t n, const std::vector<IndexPair>& edges);
std::size_t loop_rank(const SiteGraph& g);
/// Cycle rank of the categorical graph of fg.
std::size_t loop_rank(const ForkGraph& fg);

}  // namespace sheafnet::site
