#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <map>
#include <numeric>

#include "sheafnet/poset.hpp"
#include "sheafnet/presheaf.hpp"
#include "sheafnet/site.hpp"

namespace testing_support {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(SHEAFNET_FIXTURE_DIR) / name;
}

/// Random DAG on n vertices: edges only go from lower to higher index, and
/// every vertex touches at least one edge.
inline sheafnet::site::SiteGraph random_dag(std::mt19937_64& rng, std::size_t n, double p) {
  sheafnet::site::SiteGraph g;
  std::bernoulli_distribution coin(p);
  for (std::size_t i = 0; i < n; ++i) g.vertices.push_back("v" + std::to_string(i));
  std::vector<bool> touched(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng)) {
        g.edges.emplace_back(i, j);
        touched[i] = touched[j] = true;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (touched[i]) continue;
    const std::size_t j = i + 1 < n ? i + 1 : i - 1;
    g.edges.emplace_back(std::min(i, j), std::max(i, j));
    touched[i] = touched[j] = true;
  }
  const auto in = g.in_degrees();
  const auto out = g.out_degrees();
  for (std::size_t i = 0; i < n; ++i) {
    using sheafnet::site::Role;
    g.roles.push_back(in[i] == 0 ? Role::input : (out[i] == 0 ? Role::output : Role::ordinary));
  }
  return g;
}

/// Random poset from a random relation compatible with index order.
inline sheafnet::FinitePoset random_poset(std::mt19937_64& rng, std::size_t n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<std::string> ids;
  std::vector<sheafnet::IndexPair> gens;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("e" + std::to_string(i));
    for (std::size_t j = 0; j < i; ++j) {
      if (coin(rng)) gens.emplace_back(j, i);
    }
  }
  return sheafnet::FinitePoset::from_relation(std::move(ids), gens);
}

/// Down-closed subsets found by filtering the full power set.
inline std::vector<sheafnet::ElementSet> brute_force_opens(const sheafnet::FinitePoset& p) {
  std::vector<sheafnet::ElementSet> out;
  const std::uint64_t limit = std::uint64_t{1} << p.size();
  for (std::uint64_t bits = 0; bits < limit; ++bits) {
    sheafnet::ElementSet s(bits);
    bool closed = true;
    for (std::size_t x : s.members()) closed = closed && p.down(x).subset_of(s);
    if (closed) out.push_back(s);
  }
  return out;
}

/// Functorial presheaf built from k "global" points: the state of a point at x
/// is its class in an equivalence that is coarser than the one at every y >= x.
inline sheafnet::presheaf::Presheaf random_presheaf(std::mt19937_64& rng, const sheafnet::FinitePoset& p,
                                                    std::size_t k, std::size_t max_states) {
  using namespace sheafnet;
  const std::size_t n = p.size();
  std::vector<std::vector<std::size_t>> cls(n, std::vector<std::size_t>(k, 0));
  std::vector<std::size_t> order = p.linear_extension();
  std::uniform_int_distribution<std::size_t> pick(0, max_states == 0 ? 0 : max_states - 1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t x = *it;
    std::vector<std::size_t> parent(k);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    for (std::size_t y : p.upper_covers(x).members()) {
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
          if (cls[y][a] == cls[y][b]) parent[find(a)] = find(b);
        }
      }
    }
    // Random extra merging into at most max_states classes.
    std::map<std::size_t, std::size_t> bucket;
    for (std::size_t a = 0; a < k; ++a) {
      const std::size_t r = find(a);
      if (bucket.count(r) == 0) bucket[r] = pick(rng);
    }
    std::map<std::size_t, std::size_t> label;
    for (std::size_t a = 0; a < k; ++a) {
      const std::size_t b = bucket[find(a)];
      if (label.count(b) == 0) label.emplace(b, label.size());
    }
    for (std::size_t a = 0; a < k; ++a) cls[x][a] = label[bucket[find(a)]];
  }
  // Points whose class merging left unused labels are compacted above.
  std::vector<std::size_t> sizes(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t a = 0; a < k; ++a) sizes[x] = std::max(sizes[x], cls[x][a] + 1);
  }
  std::map<IndexPair, presheaf::StateMap> maps;
  for (auto [lo, up] : p.covers()) {
    presheaf::StateMap m(sizes[up], 0);
    for (std::size_t a = 0; a < k; ++a) m[cls[up][a]] = cls[lo][a];
    maps[{lo, up}] = m;
  }
  return presheaf::Presheaf::make(p, sizes, maps);
}

/// Sections by filtering the full product of carriers.
inline std::vector<std::vector<std::size_t>> brute_force_sections(const sheafnet::presheaf::Presheaf& f) {
  std::vector<std::vector<std::size_t>> out;
  const std::size_t n = f.size();
  std::vector<std::size_t> t(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    if (f.carrier_size(x) == 0) return out;
  }
  while (true) {
    bool ok = true;
    for (auto [lo, up] : f.poset().covers()) ok = ok && f.restrict(lo, up, t[up]) == t[lo];
    if (ok) out.push_back(t);
    std::size_t i = n;
    while (i-- > 0) {
      if (++t[i] < f.carrier_size(i)) break;
      t[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

}  // namespace testing_support
