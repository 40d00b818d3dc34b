#include "sheafnet/poset.hpp"

#include <algorithm>

#include "sheafnet/error.hpp"

namespace sheafnet {

std::string_view to_string(VertexKind kind) {
  switch (kind) {
    case VertexKind::ordinary: return "ordinary";
    case VertexKind::input: return "input";
    case VertexKind::output: return "output";
    case VertexKind::tip: return "tip";
    case VertexKind::tang: return "tang";
    case VertexKind::star: return "star";
    case VertexKind::handle: return "handle";
  }
  return "ordinary";
}

FinitePoset FinitePoset::from_relation(std::vector<std::string> ids, const std::vector<IndexPair>& generators,
                                       std::vector<VertexKind> kinds) {
  const std::size_t n = ids.size();
  if (n > ElementSet::kCapacity) {
    throw BoundExceeded("poset has " + std::to_string(n) + " elements; at most 64 are supported");
  }
  if (!kinds.empty() && kinds.size() != n) throw InputError("kind list does not match element count");

  FinitePoset p;
  p.ids_ = std::move(ids);
  p.kinds_ = std::move(kinds);
  for (std::size_t i = 0; i < n; ++i) {
    if (!p.index_.emplace(p.ids_[i], i).second) throw InputError("duplicate poset element '" + p.ids_[i] + "'");
  }

  p.down_.assign(n, ElementSet{});
  for (std::size_t i = 0; i < n; ++i) p.down_[i].insert(i);
  for (auto [x, y] : generators) {
    if (x >= n || y >= n) throw InputError("order generator references an unknown element");
    p.down_[y].insert(x);
  }
  // Warshall on down-sets: if k <= j then everything below k is below j.
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      if (p.down_[j].contains(k)) p.down_[j] = p.down_[j] | p.down_[k];
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      if (p.down_[y].contains(x) && p.down_[x].contains(y)) {
        throw StructureError("antisymmetry violation between '" + p.ids_[x] + "' and '" + p.ids_[y] +
                             "' (the source graph has an oriented cycle)");
      }
    }
  }

  p.up_.assign(n, ElementSet{});
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x : p.down_[y].members()) p.up_[x].insert(y);
  }

  p.lower_covers_.assign(n, ElementSet{});
  p.upper_covers_.assign(n, ElementSet{});
  for (std::size_t y = 0; y < n; ++y) {
    ElementSet strict = p.down_[y] - ElementSet::singleton(y);
    ElementSet covered = strict;
    for (std::size_t z : strict.members()) covered = covered - (p.down_[z] - ElementSet::singleton(z));
    p.lower_covers_[y] = covered;
    for (std::size_t x : covered.members()) {
      p.upper_covers_[x].insert(y);
      p.covers_.emplace_back(x, y);
    }
  }
  std::sort(p.covers_.begin(), p.covers_.end());
  return p;
}

FinitePoset FinitePoset::from_named_relation(std::vector<std::string> ids,
                                             const std::vector<std::pair<std::string, std::string>>& generators) {
  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], i);
  std::vector<IndexPair> gens;
  gens.reserve(generators.size());
  for (const auto& [a, b] : generators) {
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia == index.end() || ib == index.end()) {
      throw InputError("order pair references unknown element '" + (ia == index.end() ? a : b) + "'");
    }
    gens.emplace_back(ia->second, ib->second);
  }
  return from_relation(std::move(ids), gens);
}

FinitePoset FinitePoset::chain(std::size_t n) {
  std::vector<std::string> ids;
  std::vector<IndexPair> gens;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back(std::to_string(i));
    if (i > 0) gens.emplace_back(i - 1, i);
  }
  return from_relation(std::move(ids), gens);
}

FinitePoset FinitePoset::antichain(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  return from_relation(std::move(ids), {});
}

std::size_t FinitePoset::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw InputError("unknown poset element '" + std::string(name) + "'");
  return it->second;
}

bool FinitePoset::contains(std::string_view name) const { return index_.find(name) != index_.end(); }

ElementSet FinitePoset::minimal() const {
  ElementSet out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (lower_covers_[i].empty()) out.insert(i);
  }
  return out;
}

ElementSet FinitePoset::maximal() const {
  ElementSet out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (upper_covers_[i].empty()) out.insert(i);
  }
  return out;
}

bool FinitePoset::is_down_closed(ElementSet s) const {
  for (std::size_t x : s.members()) {
    if (!down_[x].subset_of(s)) return false;
  }
  return true;
}

ElementSet FinitePoset::down_closure(ElementSet s) const {
  ElementSet out;
  for (std::size_t x : s.members()) out = out | down_[x];
  return out;
}

std::vector<std::size_t> FinitePoset::linear_extension() const {
  std::vector<std::size_t> order(size());
  for (std::size_t i = 0; i < size(); ++i) order[i] = i;
  // |down(x)| strictly grows along strict inequalities.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return down_[a].size() < down_[b].size(); });
  return order;
}

}  // namespace sheafnet

#include <cstdlib>

namespace sheafnet {

std::size_t configured_open_set_bound() {
  if (const char* env = std::getenv("SHEAFNET_BOUND")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultOpenSetBound;
}

std::vector<ElementSet> lower_open_sets(const FinitePoset& p, std::size_t bound) {
  if (p.size() > bound) {
    throw BoundExceeded("open-set enumeration over " + std::to_string(p.size()) + " elements exceeds bound " +
                        std::to_string(bound));
  }
  std::vector<ElementSet> out;
  for_each_lower_open_set(p, [&](ElementSet s) {
    out.push_back(s);
    return true;
  });
  return out;
}

}  // namespace sheafnet
