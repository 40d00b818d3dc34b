#include "sheafnet/permutation.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

#include "sheafnet/detail/union_find.hpp"
#include "sheafnet/error.hpp"

namespace sheafnet {

Perm identity_perm(std::size_t n) {
  Perm p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

bool is_permutation(const Perm& p) {
  std::vector<bool> hit(p.size(), false);
  for (std::size_t x : p) {
    if (x >= p.size() || hit[x]) return false;
    hit[x] = true;
  }
  return true;
}

Perm compose(const Perm& a, const Perm& b) {
  Perm out(b.size());
  for (std::size_t x = 0; x < b.size(); ++x) out[x] = a[b[x]];
  return out;
}

Perm inverse(const Perm& p) {
  Perm out(p.size());
  for (std::size_t x = 0; x < p.size(); ++x) out[p[x]] = x;
  return out;
}

Perm direct_sum(const Perm& a, const Perm& b) {
  Perm out = a;
  for (std::size_t x : b) out.push_back(x + a.size());
  return out;
}

std::vector<Perm> group_closure(const std::vector<Perm>& gens, std::size_t n, std::size_t bound) {
  for (const Perm& g : gens) {
    if (g.size() != n || !is_permutation(g)) throw InputError("generator is not a bijection of the point set");
  }
  std::set<Perm> seen{identity_perm(n)};
  std::deque<Perm> queue{identity_perm(n)};
  while (!queue.empty()) {
    const Perm cur = queue.front();
    queue.pop_front();
    for (const Perm& g : gens) {
      Perm next = compose(g, cur);
      if (seen.insert(next).second) {
        if (seen.size() > bound) throw BoundExceeded("group has more than " + std::to_string(bound) + " elements");
        queue.push_back(std::move(next));
      }
    }
  }
  return {seen.begin(), seen.end()};
}

OrbitReport group_action_orbits(const std::vector<Perm>& gens, std::size_t n, std::size_t bound) {
  const std::vector<Perm> group = group_closure(gens, n, bound);
  detail::Components comp(n);
  for (const Perm& g : gens) {
    for (std::size_t x = 0; x < n; ++x) comp.unite(x, g[x]);
  }
  const auto label = comp.labels();
  OrbitReport r;
  r.group_order = group.size();
  for (std::size_t x = 0; x < n; ++x) {
    if (label[x] == r.orbits.size()) r.orbits.emplace_back();
    r.orbits[label[x]].points.push_back(x);
  }
  for (Orbit& o : r.orbits) {
    const std::size_t rep = o.points.front();
    o.stabilizer_order = static_cast<std::size_t>(
        std::count_if(group.begin(), group.end(), [rep](const Perm& g) { return g[rep] == rep; }));
  }
  return r;
}

}  // namespace sheafnet
