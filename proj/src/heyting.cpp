#include "sheafnet/heyting.hpp"

#include <algorithm>

#include "sheafnet/error.hpp"

namespace sheafnet::heyting {

ElementSet implies(const FinitePoset& p, ElementSet q, ElementSet t) {
  ElementSet out;
  const ElementSet bad = q - t;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if ((p.down(x) & bad).empty()) out.insert(x);
  }
  return out;
}

ElementSet negate(const FinitePoset& p, ElementSet q) { return implies(p, q, ElementSet{}); }

ElementSet oracle_implies(const std::vector<ElementSet>& opens, ElementSet q, ElementSet t) {
  ElementSet out;
  for (ElementSet v : opens) {
    if ((v & q).subset_of(t)) out = out | v;
  }
  return out;
}

ElementSet oracle_implies(const FinitePoset& p, ElementSet q, ElementSet t, std::size_t bound) {
  return oracle_implies(lower_open_sets(p, bound), q, t);
}

ImplicationOracle::ImplicationOracle(const FinitePoset& p, std::size_t max_opens) {
  for_each_lower_open_set(p, [&](ElementSet s) {
    if (opens_.size() == max_opens) {
      throw BoundExceeded("lattice has more than " + std::to_string(max_opens) + " opens");
    }
    opens_.push_back(s);
    return true;
  });
  std::stable_sort(opens_.begin(), opens_.end(), [](ElementSet a, ElementSet b) { return a.size() < b.size(); });
  index_.reserve(opens_.size() * 2);
  for (std::size_t i = 0; i < opens_.size(); ++i) index_.emplace(opens_[i].bits(), i);
  smaller_.resize(opens_.size());
  for (std::size_t i = 0; i < opens_.size(); ++i) {
    const ElementSet t = opens_[i];
    for (std::size_t x : t.members()) {
      if ((p.up(x) & t) == ElementSet::singleton(x)) smaller_[i].push_back(index_.at((t - ElementSet::singleton(x)).bits()));
    }
  }
}

std::vector<ElementSet> ImplicationOracle::implications(ElementSet q) const {
  std::vector<ElementSet> u(opens_.size());
  for (ElementSet v : opens_) {
    std::size_t w = index_.at((v & q).bits());
    u[w] = u[w] | v;
  }
  for (std::size_t i = 0; i < opens_.size(); ++i) {
    for (std::size_t j : smaller_[i]) u[i] = u[i] | u[j];
  }
  return u;
}

InjectiveChain InjectiveChain::from_depths(const std::vector<std::size_t>& depth, std::size_t n) {
  if (depth.size() > ElementSet::kCapacity) throw BoundExceeded("chain base limited to 64 elements");
  InjectiveChain e;
  e.base_size = depth.size();
  e.levels.assign(n + 1, ElementSet{});
  for (std::size_t s = 0; s < depth.size(); ++s) {
    if (depth[s] > n) throw InputError("depth exceeds chain length");
    for (std::size_t k = 0; k <= depth[s]; ++k) e.levels[k].insert(s);
  }
  return e;
}

bool InjectiveChain::valid() const {
  if (levels.empty() || levels[0] != ElementSet::full(base_size)) return false;
  for (std::size_t k = 1; k < levels.size(); ++k) {
    if (!levels[k].subset_of(levels[k - 1])) return false;
  }
  return true;
}

bool is_chain_subobject(const InjectiveChain& e, const ChainSubobject& y) {
  if (y.size() != e.levels.size()) return false;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (!y[k].subset_of(e.levels[k])) return false;
    if (k > 0 && !y[k].subset_of(y[k - 1])) return false;
  }
  return true;
}

ChainSubobject chain_top(const InjectiveChain& e) { return e.levels; }

ChainSubobject chain_bottom(const InjectiveChain& e) { return ChainSubobject(e.levels.size()); }

ChainSubobject chain_implication(const InjectiveChain& e, const ChainSubobject& t, const ChainSubobject& q) {
  if (!e.valid()) throw InputError("levels do not form an injective chain");
  if (!is_chain_subobject(e, t) || !is_chain_subobject(e, q)) throw InputError("argument is not a subobject of E");
  ChainSubobject u(e.levels.size());
  chain_implication_into(e.levels, t, q, u);
  return u;
}

void chain_implication_into(std::span<const ElementSet> levels, std::span<const ElementSet> t,
                            std::span<const ElementSet> q, std::span<ElementSet> out) {
  out[0] = t[0] | (levels[0] - q[0]);
  for (std::size_t k = 1; k < out.size(); ++k) out[k] = out[k - 1] & (t[k] | (levels[k] - q[k]));
}

ChainSubobject chain_negation(const InjectiveChain& e, const ChainSubobject& q) {
  if (!e.valid()) throw InputError("levels do not form an injective chain");
  if (!is_chain_subobject(e, q)) throw InputError("argument is not a subobject of E");
  ChainSubobject out(e.levels.size());
  ElementSet acc = e.levels[0];
  for (std::size_t k = 0; k < out.size(); ++k) {
    acc = acc & (e.levels[k] - q[k]);
    out[k] = acc;
  }
  return out;
}

presheaf::Presheaf chain_presheaf(const InjectiveChain& e) {
  FinitePoset p = FinitePoset::chain(e.levels.size());
  std::vector<std::vector<std::string>> labels;
  for (ElementSet level : e.levels) {
    labels.emplace_back();
    for (std::size_t s : level.members()) labels.back().push_back("e" + std::to_string(s));
  }
  std::map<IndexPair, presheaf::StateMap> maps;
  for (std::size_t k = 1; k < e.levels.size(); ++k) {
    const auto lower = e.levels[k - 1].members();
    presheaf::StateMap m;
    for (std::size_t s : e.levels[k].members()) {
      m.push_back(static_cast<presheaf::State>(std::find(lower.begin(), lower.end(), s) - lower.begin()));
    }
    maps[{k - 1, k}] = std::move(m);
  }
  return presheaf::Presheaf::make(std::move(p), std::move(labels), maps);
}

presheaf::Subobject to_subobject(const InjectiveChain& e, const ChainSubobject& y) {
  presheaf::Subobject out;
  for (std::size_t k = 0; k < e.levels.size(); ++k) {
    const auto members = e.levels[k].members();
    out.parts.emplace_back(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (y[k].contains(members[i])) out.parts.back().set(i);
    }
  }
  return out;
}

ChainSubobject from_subobject(const InjectiveChain& e, const presheaf::Subobject& y) {
  ChainSubobject out(e.levels.size());
  for (std::size_t k = 0; k < e.levels.size(); ++k) {
    const auto members = e.levels[k].members();
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (y.parts[k].test(i)) out[k].insert(members[i]);
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> depth_profiles(std::size_t n, std::size_t m) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t lo) -> void {
    if (cur.size() == m) {
      out.push_back(cur);
      return;
    }
    for (std::size_t d = lo; d <= n; ++d) {
      cur.push_back(d);
      self(self, d);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace sheafnet::heyting
