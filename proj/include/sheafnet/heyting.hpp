#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

#include "sheafnet/element_set.hpp"
#include "sheafnet/poset.hpp"
#include "sheafnet/presheaf.hpp"

namespace sheafnet::heyting {

inline ElementSet meet(ElementSet a, ElementSet b) { return a & b; }
inline ElementSet join(ElementSet a, ElementSet b) { return a | b; }

/// x is in (Q => T) iff every y <= x in Q is also in T.
ElementSet implies(const FinitePoset& p, ElementSet q, ElementSet t);
ElementSet negate(const FinitePoset& p, ElementSet q);

/// Union of every open V with V & Q contained in T, taken over `opens`.
ElementSet oracle_implies(const std::vector<ElementSet>& opens, ElementSet q, ElementSet t);
/// Same over all opens of p.  Throws BoundExceeded beyond the enumeration bound.
ElementSet oracle_implies(const FinitePoset& p, ElementSet q, ElementSet t,
                          std::size_t bound = configured_open_set_bound());

/// Sup-oracle for every consequent at once.  For fixed Q it groups the opens V
/// by V & Q and accumulates the groups over the lattice, removing one maximal
/// point at a time, so it costs O(#opens * width) per antecedent instead of
/// O(#opens^2).
class ImplicationOracle {
 public:
  explicit ImplicationOracle(const FinitePoset& p, std::size_t max_opens = std::size_t{1} << 20);

  const std::vector<ElementSet>& opens() const { return opens_; }
  std::size_t index_of(ElementSet open) const { return index_.at(open.bits()); }
  /// sup{V : V & q <= T} for every open T, aligned with opens().
  std::vector<ElementSet> implications(ElementSet q) const;

 private:
  std::vector<ElementSet> opens_;  // sorted by size
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::vector<std::vector<std::size_t>> smaller_;  // T minus one of its maximal points
};

/// Nested finite sets E_n <= ... <= E_0 over the base {0, ..., base_size-1},
/// seen as a presheaf on the chain 0 <= 1 <= ... <= n with inclusions as
/// restrictions.
struct InjectiveChain {
  std::size_t base_size = 0;
  std::vector<ElementSet> levels;

  std::size_t n() const { return levels.size() - 1; }
  /// levels[0] is the whole base; element s belongs to levels[k] for k <= depth[s].
  static InjectiveChain from_depths(const std::vector<std::size_t>& depth, std::size_t n);
  bool valid() const;
};

/// A subobject of an injective chain: Y_k <= E_k and Y_k <= Y_{k-1}.
using ChainSubobject = std::vector<ElementSet>;

bool is_chain_subobject(const InjectiveChain& e, const ChainSubobject& y);
ChainSubobject chain_top(const InjectiveChain& e);
ChainSubobject chain_bottom(const InjectiveChain& e);

/// U_0 = T_0 | (E_0 - Q_0),  U_k = U_{k-1} & (T_k | (E_k - Q_k)).
/// Throws InputError when T or Q is not a subobject of E.
ChainSubobject chain_implication(const InjectiveChain& e, const ChainSubobject& t, const ChainSubobject& q);
/// Same recurrence without validation or allocation; all spans have one entry per level.
void chain_implication_into(std::span<const ElementSet> levels, std::span<const ElementSet> t,
                            std::span<const ElementSet> q, std::span<ElementSet> out);
/// Level k is the intersection of E_j - Q_j over j <= k.
ChainSubobject chain_negation(const InjectiveChain& e, const ChainSubobject& q);

presheaf::Presheaf chain_presheaf(const InjectiveChain& e);
presheaf::Subobject to_subobject(const InjectiveChain& e, const ChainSubobject& y);
ChainSubobject from_subobject(const InjectiveChain& e, const presheaf::Subobject& y);

/// Every chain with n+1 levels over a base of size m, up to relabelling of the
/// base: one non-decreasing depth vector per isomorphism class.
std::vector<std::vector<std::size_t>> depth_profiles(std::size_t n, std::size_t m);

}  // namespace sheafnet::heyting
