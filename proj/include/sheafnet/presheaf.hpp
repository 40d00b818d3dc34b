#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "sheafnet/poset.hpp"
#include "sheafnet/site.hpp"

namespace sheafnet::presheaf {

using State = std::size_t;
/// A map between finite carriers, stored as the image of each source state.
using StateMap = std::vector<State>;

inline constexpr std::size_t kDefaultSectionBound = 1'000'000;

/// Set-valued presheaf on a finite poset.  For x <= y the restriction sends
/// F(y) to F(x).
class Presheaf {
 public:
  Presheaf() = default;

  /// `maps` must hold a restriction for every covering pair; extra comparable
  /// pairs are accepted and checked.  Throws InputError for ill-formed maps and
  /// StructureError when two composites with the same ends disagree.
  static Presheaf make(FinitePoset poset, std::vector<std::vector<std::string>> labels,
                       const std::map<IndexPair, StateMap>& maps);
  /// Carrier labels default to "0", "1", ...
  static Presheaf make(FinitePoset poset, const std::vector<std::size_t>& sizes,
                       const std::map<IndexPair, StateMap>& maps);
  /// Every carrier equal to `labels`, every restriction the identity.
  static Presheaf constant(FinitePoset poset, std::vector<std::string> labels);

  const FinitePoset& poset() const { return poset_; }
  std::size_t size() const { return poset_.size(); }
  std::size_t carrier_size(std::size_t x) const { return labels_.at(x).size(); }
  const std::vector<std::string>& labels(std::size_t x) const { return labels_.at(x); }
  State state_index(std::size_t x, std::string_view label) const;

  /// Restriction F(upper) -> F(lower); identity when lower == upper.
  const StateMap& restriction(std::size_t lower, std::size_t upper) const;
  State restrict(std::size_t lower, std::size_t upper, State s) const { return restriction(lower, upper)[s]; }

 private:
  FinitePoset poset_;
  std::vector<std::vector<std::string>> labels_;
  std::vector<StateMap> composite_;  // indexed lower * n + upper
};

/// Coherent families, one state per poset element.
struct SectionSet {
  std::vector<std::vector<State>> tuples;
  std::size_t size() const { return tuples.size(); }
};

/// Exact enumeration of the limit.  Only maximal elements are branched on; the
/// rest are forced by restriction, and each branch point picks the maximal
/// element with the fewest states compatible with what is already fixed.
/// Throws BoundExceeded when more than `bound` partial assignments are explored.
SectionSet sections(const Presheaf& p, std::size_t bound = kDefaultSectionBound);

/// Extends p from the star-free poset of fg to the full fork poset.  The value
/// at a star is the set of tine tuples compatible with the order among the
/// tines (the full product when the tines are pairwise incomparable); the map
/// from the tang is the tuple of restrictions, and the map to a tine is a
/// projection.
Presheaf sheafify_at_forks(const Presheaf& p, const site::ForkGraph& fg);

/// Local dynamics: the state of vertex v computed from the states of its source.
/// For a handle the source is the tine tuple of its fork, otherwise the single
/// upstream vertex.
using Dynamics = std::function<State(std::size_t fg_vertex, std::span<const State> source)>;

/// Presheaf on build_poset(fg) induced by a feed-forward dynamics.  `sizes` is
/// indexed by fg vertex; entries for tangs, stars and input copies are ignored.
/// Tang values are compatible tine tuples, input copies are identities.
Presheaf feed_forward_presheaf(const site::ForkGraph& fg, const std::vector<std::size_t>& sizes,
                               const Dynamics& dynamics);

/// A proposition on the joint state of some output elements.
struct OutputPredicate {
  std::vector<std::size_t> outputs;
  std::function<bool(std::span<const State>)> holds;

  static OutputPredicate always(std::vector<std::size_t> outputs);
  static OutputPredicate never(std::vector<std::size_t> outputs);
  /// Product predicate: each output must land in its allowed set.
  static OutputPredicate from_parts(std::vector<std::size_t> outputs, std::vector<boost::dynamic_bitset<>> allowed);
};

/// Output elements of p: those tagged output, or the minimal elements when the
/// poset carries no tags.
ElementSet output_elements(const Presheaf& p);

/// Sections whose output components satisfy the predicate.  Throws InputError
/// when the predicate mentions a non-output element.
SectionSet cats_manifold(const Presheaf& p, const OutputPredicate& pred, std::size_t bound = kDefaultSectionBound);

/// The presheaf on the poset enlarged by B*, B, omega_b and omega_1 that
/// encodes the predicate through the map B -> omega_b.
Presheaf extend_with_predicate(const Presheaf& p, const OutputPredicate& pred);

/// Cat's manifold computed as the sections of the enlarged presheaf, projected
/// back to the original elements.
SectionSet cats_manifold_extended(const Presheaf& p, const OutputPredicate& pred,
                                  std::size_t bound = kDefaultSectionBound);

/// Sub-presheaf given by a subset of each carrier.
struct Subobject {
  std::vector<boost::dynamic_bitset<>> parts;

  friend bool operator==(const Subobject&, const Subobject&) = default;
};

Subobject top(const Presheaf& p);
Subobject bottom(const Presheaf& p);
bool is_subobject(const Presheaf& p, const Subobject& y);
bool leq(const Subobject& a, const Subobject& b);
Subobject meet(const Subobject& a, const Subobject& b);
Subobject join(const Subobject& a, const Subobject& b);
/// s in (Q => T)(x) iff every restriction of s into Q lies in T.
Subobject implies(const Presheaf& p, const Subobject& q, const Subobject& t);
Subobject negate(const Presheaf& p, const Subobject& q);

/// The category of elements of p as a poset on points (x, s), together with
/// conversions between subobjects and the down-sets of that poset.  At most 64
/// points.
class SubobjectLattice {
 public:
  explicit SubobjectLattice(const Presheaf& p);

  const FinitePoset& points() const { return points_; }
  std::size_t point(std::size_t x, State s) const { return offset_.at(x) + s; }
  ElementSet to_mask(const Subobject& y) const;
  Subobject from_mask(ElementSet mask) const;

 private:
  std::vector<std::size_t> sizes_;
  FinitePoset points_;
  std::vector<std::size_t> offset_;
};

}  // namespace sheafnet::presheaf
