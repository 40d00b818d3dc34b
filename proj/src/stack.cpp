#include "sheafnet/stack.hpp"

#include <algorithm>
#include <set>

#include "sheafnet/error.hpp"

namespace sheafnet::logic {

StackOverPoset StackOverPoset::make(FinitePoset poset, std::vector<std::shared_ptr<const FiniteGroupoid>> fibers,
                                    std::map<IndexPair, GroupoidFunctor> glue) {
  if (fibers.size() != poset.size()) throw InputError("one fiber per poset element is required");
  StackOverPoset s;
  s.poset_ = std::move(poset);
  s.fibers_ = std::move(fibers);
  for (std::size_t x = 0; x < s.poset_.size(); ++x) {
    s.composite_.emplace(IndexPair{x, x}, GroupoidFunctor::identity(s.fibers_[x]));
  }
  for (const auto& [pair, f] : glue) {
    auto [lo, up] = pair;
    if (lo >= s.poset_.size() || up >= s.poset_.size() || !s.poset_.leq(lo, up) || lo == up) {
      throw InputError("gluing functor given for a pair that is not ordered");
    }
    if (f.source_ptr() != s.fibers_[up] || f.target_ptr() != s.fibers_[lo]) {
      throw InputError("gluing functor " + s.poset_.id(up) + " -> " + s.poset_.id(lo) + " has the wrong fibers");
    }
  }
  for (std::size_t y : s.poset_.linear_extension()) {
    for (std::size_t z : s.poset_.lower_covers(y).members()) {
      auto it = glue.find({z, y});
      if (it == glue.end()) throw InputError("missing gluing functor " + s.poset_.id(y) + " -> " + s.poset_.id(z));
      for (std::size_t x : s.poset_.down(z).members()) {
        GroupoidFunctor c = compose(s.composite_.at({x, z}), it->second);
        auto [slot, fresh] = s.composite_.emplace(IndexPair{x, y}, c);
        if (!fresh && !(slot->second == c)) {
          throw StructureError("gluing functors from '" + s.poset_.id(y) + "' to '" + s.poset_.id(x) +
                               "' disagree along two paths");
        }
      }
    }
  }
  for (const auto& [pair, f] : glue) {
    if (!(s.composite_.at(pair) == f)) throw StructureError("given gluing functor differs from the composite");
  }
  return s;
}

const GroupoidFunctor& StackOverPoset::transport(std::size_t lower, std::size_t upper) const {
  auto it = composite_.find({lower, upper});
  if (it == composite_.end()) throw InputError("no transport between unordered elements");
  return it->second;
}

bool FibrantReport::fibrant() const {
  return std::all_of(elements.begin(), elements.end(), [](const ElementVerdict& v) { return v.ok; });
}

FibrantReport check_fibrant_injective(const presheaf::Presheaf& p) {
  FibrantReport r;
  const FinitePoset& poset = p.poset();
  for (std::size_t y = 0; y < poset.size(); ++y) {
    ElementVerdict v;
    v.element = poset.id(y);
    const auto lower = poset.lower_covers(y).members();
    v.condition = lower.empty() ? "nonempty" : (lower.size() == 1 ? "fibration" : "multi-fibration");
    if (p.carrier_size(y) == 0) {
      v.ok = false;
      v.reason = "empty carrier";
    } else if (!lower.empty()) {
      std::set<std::vector<presheaf::State>> images;
      for (presheaf::State s = 0; s < p.carrier_size(y); ++s) {
        std::vector<presheaf::State> t;
        for (std::size_t x : lower) t.push_back(p.restrict(x, y, s));
        images.insert(std::move(t));
      }
      std::size_t product = 1;
      for (std::size_t x : lower) product *= p.carrier_size(x);
      if (images.size() != product) {
        v.ok = false;
        v.reason = "restriction hits " + std::to_string(images.size()) + " of " + std::to_string(product) +
                   (lower.size() == 1 ? " states" : " tuples");
      }
    }
    r.elements.push_back(std::move(v));
  }
  return r;
}

FibrantReport check_fibrant_injective(const StackOverPoset& s) {
  FibrantReport r;
  const FinitePoset& poset = s.poset();
  for (std::size_t y = 0; y < poset.size(); ++y) {
    ElementVerdict v;
    v.element = poset.id(y);
    const auto lower = poset.lower_covers(y).members();
    v.condition = lower.empty() ? "nonempty" : (lower.size() == 1 ? "fibration" : "multi-fibration");
    if (s.fiber(y).object_count() == 0) {
      v.ok = false;
      v.reason = "empty fiber";
    } else if (!lower.empty()) {
      std::vector<GroupoidFunctor> fs;
      for (std::size_t x : lower) fs.push_back(s.transport(x, y));
      if (!is_multi_fibration(fs)) {
        v.ok = false;
        v.reason = lower.size() == 1 ? "gluing functor is not an isofibration"
                                     : "joint gluing functor is not an isofibration onto the product";
      }
    }
    r.elements.push_back(std::move(v));
  }
  return r;
}

}  // namespace sheafnet::logic
