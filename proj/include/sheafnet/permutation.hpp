#pragma once

#include <cstddef>
#include <vector>

namespace sheafnet {

/// Permutation of {0, ..., n-1} as the image of each point.
using Perm = std::vector<std::size_t>;

Perm identity_perm(std::size_t n);
bool is_permutation(const Perm& p);
/// (a * b)(x) = a(b(x)).
Perm compose(const Perm& a, const Perm& b);
Perm inverse(const Perm& p);
/// Block sum acting on {0..|a|-1} followed by {|a|..|a|+|b|-1}.
Perm direct_sum(const Perm& a, const Perm& b);

/// All elements of the group generated by `gens` on n points.  Throws
/// BoundExceeded beyond `bound` elements and InputError for non-bijections.
std::vector<Perm> group_closure(const std::vector<Perm>& gens, std::size_t n, std::size_t bound = 10'000);

struct Orbit {
  std::vector<std::size_t> points;  // sorted; points.front() is the representative
  std::size_t stabilizer_order = 0;
};

struct OrbitReport {
  std::size_t group_order = 0;
  std::vector<Orbit> orbits;  // ordered by representative
};

/// Orbits of the generated group on {0..n-1}, with the order of the stabilizer
/// of each representative.
OrbitReport group_action_orbits(const std::vector<Perm>& gens, std::size_t n, std::size_t bound = 10'000);

}  // namespace sheafnet
