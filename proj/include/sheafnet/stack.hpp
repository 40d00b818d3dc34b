#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sheafnet/groupoid.hpp"
#include "sheafnet/poset.hpp"
#include "sheafnet/presheaf.hpp"

namespace sheafnet::logic {

/// Poset-indexed family of groupoids.  For x <= y the gluing functor runs
/// from the fiber at y to the fiber at x.
class StackOverPoset {
 public:
  StackOverPoset() = default;

  /// Needs a functor for every covering pair, with matching fibers.  Throws
  /// StructureError when composites along two paths differ.
  static StackOverPoset make(FinitePoset poset, std::vector<std::shared_ptr<const FiniteGroupoid>> fibers,
                             std::map<IndexPair, GroupoidFunctor> glue);

  const FinitePoset& poset() const { return poset_; }
  const FiniteGroupoid& fiber(std::size_t x) const { return *fibers_.at(x); }
  std::shared_ptr<const FiniteGroupoid> fiber_ptr(std::size_t x) const { return fibers_.at(x); }
  /// Composite gluing functor F(upper) -> F(lower).
  const GroupoidFunctor& transport(std::size_t lower, std::size_t upper) const;

 private:
  FinitePoset poset_;
  std::vector<std::shared_ptr<const FiniteGroupoid>> fibers_;
  std::map<IndexPair, GroupoidFunctor> composite_;
};

struct ElementVerdict {
  std::string element;
  /// "nonempty" at minimal elements, "fibration" below a single cover,
  /// "multi-fibration" at confluences.
  std::string condition;
  bool ok = true;
  std::string reason;
};

struct FibrantReport {
  std::vector<ElementVerdict> elements;
  bool fibrant() const;
};

/// Injective-model fibrancy for a set-valued diagram: non-empty carriers, the
/// restriction to a single lower cover surjective, and the tuple of
/// restrictions onto the product of several lower covers surjective.
FibrantReport check_fibrant_injective(const presheaf::Presheaf& p);
/// Same locations for a stack of groupoids, with isofibrations in place of
/// surjections.
FibrantReport check_fibrant_injective(const StackOverPoset& s);

}  // namespace sheafnet::logic
