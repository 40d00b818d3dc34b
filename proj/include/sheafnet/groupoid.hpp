#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sheafnet/element_set.hpp"
#include "sheafnet/permutation.hpp"

namespace sheafnet::logic {

/// A morphism src -> dst labelled by a permutation of a fixed degree.
/// Composition multiplies labels: (b -> c, p) after (a -> b, q) is (a -> c, p*q).
struct Morphism {
  std::size_t src = 0;
  std::size_t dst = 0;
  Perm perm;

  friend auto operator<=>(const Morphism&, const Morphism&) = default;
};

inline constexpr std::size_t kDefaultMorphismBound = 200;

/// Finite groupoid given by the closure of a generator list.
class FiniteGroupoid {
 public:
  FiniteGroupoid() = default;

  /// Throws InputError for malformed generators and BoundExceeded when the
  /// closure has more than `bound` morphisms.
  static FiniteGroupoid generate(std::vector<std::string> objects, std::size_t degree,
                                 const std::vector<Morphism>& generators, std::size_t bound = kDefaultMorphismBound);
  /// Discrete groupoid: identities only.
  static FiniteGroupoid discrete(std::vector<std::string> objects);
  /// One-object groupoid of the permutation group generated by `gens`.
  static FiniteGroupoid group(const std::vector<Perm>& gens, std::size_t degree,
                              std::size_t bound = kDefaultMorphismBound);
  static FiniteGroupoid product(const FiniteGroupoid& a, const FiniteGroupoid& b,
                                std::size_t bound = kDefaultMorphismBound);

  std::size_t object_count() const { return objects_.size(); }
  const std::vector<std::string>& objects() const { return objects_; }
  std::size_t degree() const { return degree_; }
  std::size_t morphism_count() const { return morphisms_.size(); }
  const Morphism& morphism(std::size_t i) const { return morphisms_.at(i); }
  const std::vector<Morphism>& morphisms() const { return morphisms_; }
  const std::vector<Morphism>& generators() const { return generators_; }
  std::optional<std::size_t> find(const Morphism& m) const;
  std::size_t identity(std::size_t object) const { return identity_.at(object); }
  /// Index of g after f, or nullopt when dst(f) != src(g).
  std::optional<std::size_t> compose(std::size_t g, std::size_t f) const;
  std::size_t inverse(std::size_t f) const { return inverse_.at(f); }
  /// Generator word reaching morphism i from an identity: pairs (generator,
  /// inverted), applied left to right.
  const std::vector<std::pair<std::size_t, bool>>& word(std::size_t i) const { return word_.at(i); }

  /// Table check of identities, inverses and associativity.  Returns defects.
  std::vector<std::string> validate() const;

 private:
  std::vector<std::string> objects_;
  std::size_t degree_ = 0;
  std::vector<Morphism> generators_;
  std::vector<Morphism> morphisms_;
  std::map<Morphism, std::size_t> index_;
  std::vector<std::size_t> identity_;
  std::vector<std::size_t> inverse_;
  std::vector<std::vector<std::pair<std::size_t, bool>>> word_;
};

/// Component number of each object, numbered by first occurrence.
std::vector<std::size_t> connected_components(const FiniteGroupoid& g);
std::size_t component_count(const FiniteGroupoid& g);

/// Functor between finite groupoids, stored as object and morphism maps.
class GroupoidFunctor {
 public:
  GroupoidFunctor() = default;

  /// Extends generator images along the generator words.  Throws
  /// StructureError when the images do not define a functor.
  static GroupoidFunctor from_generators(std::shared_ptr<const FiniteGroupoid> source,
                                         std::shared_ptr<const FiniteGroupoid> target,
                                         std::vector<std::size_t> object_map,
                                         const std::vector<Morphism>& generator_images);
  /// Throws StructureError unless the maps preserve endpoints, identities and composition.
  static GroupoidFunctor from_maps(std::shared_ptr<const FiniteGroupoid> source,
                                   std::shared_ptr<const FiniteGroupoid> target, std::vector<std::size_t> object_map,
                                   std::vector<std::size_t> morphism_map);
  static GroupoidFunctor identity(std::shared_ptr<const FiniteGroupoid> g);
  /// Projection of a product groupoid built by FiniteGroupoid::product.
  static GroupoidFunctor projection(std::shared_ptr<const FiniteGroupoid> product,
                                    std::shared_ptr<const FiniteGroupoid> factor, bool second);

  const FiniteGroupoid& source() const { return *source_; }
  const FiniteGroupoid& target() const { return *target_; }
  std::shared_ptr<const FiniteGroupoid> source_ptr() const { return source_; }
  std::shared_ptr<const FiniteGroupoid> target_ptr() const { return target_; }
  std::size_t on_object(std::size_t o) const { return objects_.at(o); }
  std::size_t on_morphism(std::size_t m) const { return morphisms_.at(m); }
  const std::vector<std::size_t>& object_map() const { return objects_; }
  const std::vector<std::size_t>& morphism_map() const { return morphisms_; }

  /// Returns defects of the functor laws, checked exhaustively.
  std::vector<std::string> validate() const;

  friend bool operator==(const GroupoidFunctor& a, const GroupoidFunctor& b) {
    return a.objects_ == b.objects_ && a.morphisms_ == b.morphisms_;
  }

 private:
  std::shared_ptr<const FiniteGroupoid> source_;
  std::shared_ptr<const FiniteGroupoid> target_;
  std::vector<std::size_t> objects_;
  std::vector<std::size_t> morphisms_;
};

/// g after f.
GroupoidFunctor compose(const GroupoidFunctor& g, const GroupoidFunctor& f);

/// Feed-forward transport: the components of the target met by F(P').
ElementSet lambda_transport(const GroupoidFunctor& f, ElementSet source_components);
/// Feedback transport: the source components sent into Q.
ElementSet tau_transport(const GroupoidFunctor& f, ElementSet target_components);
bool is_component_surjective(const GroupoidFunctor& f);

struct AdjunctionReport {
  bool adjunction = true;     // lambda(P') <= Q  iff  P' <= tau(Q)
  bool unit = true;           // P' <= tau(lambda(P'))
  bool counit = true;         // lambda(tau(Q)) <= Q
  bool surjective = false;    // F hits every target component
  bool section = true;        // lambda(tau(Q)) == Q for all Q
  bool lambda_lattice = true; // lambda preserves joins and the empty set, and is monotone
  bool tau_boolean = true;    // tau preserves meets, joins and complements
  std::optional<ElementSet> section_witness;  // Q with lambda(tau(Q)) != Q
  std::vector<std::string> failures;

  /// All laws hold and lambda tau = Id exactly when F is component-surjective.
  bool ok() const;
};

/// Exhaustive check over all component sets.  At most 20 components on each side.
AdjunctionReport check_adjunction_and_section(const GroupoidFunctor& f);

/// Isofibration test: every target morphism ending at F(y') lifts to one ending at y'.
bool is_fibration(const GroupoidFunctor& f);
/// Joint version: every family of morphisms g_i ending at F_i(y') lifts to a
/// single morphism ending at y'.  All functors share a source.
bool is_multi_fibration(const std::vector<GroupoidFunctor>& fs);

}  // namespace sheafnet::logic
