#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sheafnet/element_set.hpp"

namespace sheafnet {

/// Role of a vertex in a fork-surgered site.  A vertex that is both the handle
/// of one fork and a tine of another is tagged `tip`.
enum class VertexKind { ordinary, input, output, tip, tang, star, handle };

std::string_view to_string(VertexKind kind);

using IndexPair = std::pair<std::size_t, std::size_t>;

/// Finite partial order on at most 64 named elements.
///
/// The order is stored as its transitive closure (one down-set mask per
/// element) together with the covering relation, so `leq` is a single bit test.
/// Elements optionally carry a `VertexKind` when the poset comes from a site.
class FinitePoset {
 public:
  FinitePoset() = default;

  /// Builds the order generated by `generators`, each pair (x, y) read as x <= y.
  /// Throws StructureError when the generated preorder is not antisymmetric.
  static FinitePoset from_relation(std::vector<std::string> ids, const std::vector<IndexPair>& generators,
                                   std::vector<VertexKind> kinds = {});
  /// Same, with generators given by element names.
  static FinitePoset from_named_relation(std::vector<std::string> ids,
                                         const std::vector<std::pair<std::string, std::string>>& generators);

  /// Total order 0 <= 1 <= ... <= n-1 with elements named "0".."n-1".
  static FinitePoset chain(std::size_t n);
  static FinitePoset antichain(std::size_t n);

  std::size_t size() const { return ids_.size(); }
  const std::string& id(std::size_t i) const { return ids_.at(i); }
  const std::vector<std::string>& ids() const { return ids_; }
  /// Throws InputError for unknown names.
  std::size_t index_of(std::string_view name) const;
  bool contains(std::string_view name) const;

  bool has_kinds() const { return !kinds_.empty(); }
  VertexKind kind(std::size_t i) const { return kinds_.empty() ? VertexKind::ordinary : kinds_.at(i); }
  const std::vector<VertexKind>& kinds() const { return kinds_; }

  bool leq(std::size_t x, std::size_t y) const { return down_.at(y).contains(x); }
  /// The basic open U_x = {y : y <= x}.
  ElementSet down(std::size_t x) const { return down_.at(x); }
  ElementSet up(std::size_t x) const { return up_.at(x); }
  ElementSet lower_covers(std::size_t x) const { return lower_covers_.at(x); }
  ElementSet upper_covers(std::size_t x) const { return upper_covers_.at(x); }
  /// Covering pairs (lower, upper), sorted.
  const std::vector<IndexPair>& covers() const { return covers_; }

  ElementSet all() const { return ElementSet::full(size()); }
  ElementSet minimal() const;
  ElementSet maximal() const;
  bool is_down_closed(ElementSet s) const;
  /// Smallest down-closed set containing s.
  ElementSet down_closure(ElementSet s) const;

  /// Elements ordered so that every element appears after everything below it.
  std::vector<std::size_t> linear_extension() const;

  friend bool operator==(const FinitePoset&, const FinitePoset&) = default;

 private:
  std::vector<std::string> ids_;
  std::vector<VertexKind> kinds_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<ElementSet> down_;
  std::vector<ElementSet> up_;
  std::vector<ElementSet> lower_covers_;
  std::vector<ElementSet> upper_covers_;
  std::vector<IndexPair> covers_;
};

/// Default ceiling on the element count for full open-set enumeration.
inline constexpr std::size_t kDefaultOpenSetBound = 20;

/// Element bound taken from SHEAFNET_BOUND when set, else the default.
std::size_t configured_open_set_bound();

/// The basic open U_x.
inline ElementSet basis(const FinitePoset& p, std::size_t x) { return p.down(x); }

/// Every lower (down-closed) subset, in the order produced by a depth-first
/// walk over a linear extension.  Throws BoundExceeded when p.size() > bound.
std::vector<ElementSet> lower_open_sets(const FinitePoset& p, std::size_t bound = configured_open_set_bound());

/// Visits every lower subset without materialising the family.  The visitor
/// returns false to stop early.  No element bound is applied.
template <class Visitor>
void for_each_lower_open_set(const FinitePoset& p, Visitor&& visit);

}  // namespace sheafnet

#include "sheafnet/detail/poset_walk.hpp"
