#pragma once

#include <cstddef>
#include <vector>

namespace sheafnet {

template <class Visitor>
void for_each_lower_open_set(const FinitePoset& p, Visitor&& visit) {
  const std::vector<std::size_t> order = p.linear_extension();
  std::vector<ElementSet> strict_below(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) strict_below[i] = p.down(i) - ElementSet::singleton(i);

  bool stop = false;
  auto walk = [&](auto&& self, std::size_t depth, ElementSet current) -> void {
    if (stop) return;
    if (depth == order.size()) {
      if (!visit(current)) stop = true;
      return;
    }
    const std::size_t x = order[depth];
    self(self, depth + 1, current);
    if (strict_below[x].subset_of(current)) self(self, depth + 1, ElementSet(current).insert(x));
  };
  walk(walk, 0, ElementSet{});
}

}  // namespace sheafnet
