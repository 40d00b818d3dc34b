#include "sheafnet/presheaf.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "sheafnet/error.hpp"

namespace sheafnet::presheaf {

namespace {

constexpr State kUnset = std::numeric_limits<State>::max();

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

std::string tuple_label(const std::vector<const std::vector<std::string>*>& carriers, std::span<const State> t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + (*carriers[i])[t[i]];
  return s + ")";
}

/// All tuples over the given carrier sizes, in lexicographic order.
std::vector<std::vector<State>> all_tuples(const std::vector<std::size_t>& sizes) {
  std::vector<std::vector<State>> out;
  std::size_t total = 1;
  for (std::size_t s : sizes) {
    if (s != 0 && total > kDefaultSectionBound / s) throw BoundExceeded("product carrier exceeds 10^6 states");
    total *= s;
  }
  if (total == 0) return out;
  std::vector<State> t(sizes.size(), 0);
  for (std::size_t k = 0; k < total; ++k) {
    out.push_back(t);
    for (std::size_t i = sizes.size(); i-- > 0;) {
      if (++t[i] < sizes[i]) break;
      t[i] = 0;
    }
  }
  return out;
}

void search(const Presheaf& p, const std::vector<std::size_t>& maximal, std::vector<State>& value,
            std::vector<bool>& done, SectionSet& out, std::size_t& explored, std::size_t bound) {
  if (++explored > bound) {
    throw BoundExceeded("section search explored more than " + std::to_string(bound) + " partial assignments");
  }
  const FinitePoset& poset = p.poset();
  std::size_t best = maximal.size();
  std::vector<State> best_domain;
  for (std::size_t i = 0; i < maximal.size(); ++i) {
    if (done[i]) continue;
    const std::size_t m = maximal[i];
    std::vector<State> domain;
    for (State s = 0; s < p.carrier_size(m); ++s) {
      bool ok = true;
      for (std::size_t x : poset.down(m).members()) {
        if (value[x] != kUnset && p.restrict(x, m, s) != value[x]) {
          ok = false;
          break;
        }
      }
      if (ok) domain.push_back(s);
    }
    if (best == maximal.size() || domain.size() < best_domain.size()) {
      best = i;
      best_domain = std::move(domain);
      if (best_domain.empty()) return;
    }
  }
  if (best == maximal.size()) {
    out.tuples.push_back(value);
    return;
  }
  const std::size_t m = maximal[best];
  done[best] = true;
  for (State s : best_domain) {
    std::vector<State> saved = value;
    for (std::size_t x : poset.down(m).members()) value[x] = p.restrict(x, m, s);
    search(p, maximal, value, done, out, explored, bound);
    value = std::move(saved);
  }
  done[best] = false;
}

void check_outputs(const Presheaf& p, const OutputPredicate& pred) {
  const ElementSet outs = output_elements(p);
  for (std::size_t b : pred.outputs) {
    if (b >= p.size() || !outs.contains(b)) {
      throw InputError("predicate refers to non-output element" +
                       (b < p.size() ? " '" + p.poset().id(b) + "'" : std::string()));
    }
  }
}

bool satisfies(const OutputPredicate& pred, const std::vector<State>& tuple) {
  std::vector<State> outs;
  outs.reserve(pred.outputs.size());
  for (std::size_t b : pred.outputs) outs.push_back(tuple[b]);
  return pred.holds(outs);
}

/// Tuples over `tines` that are compatible with the restrictions of p among
/// comparable tines.
std::vector<std::vector<State>> compatible_tuples(const Presheaf& p, const std::vector<std::size_t>& tines) {
  std::vector<std::size_t> sizes;
  for (std::size_t t : tines) sizes.push_back(p.carrier_size(t));
  std::vector<std::vector<State>> out;
  for (auto& t : all_tuples(sizes)) {
    bool ok = true;
    for (std::size_t i = 0; ok && i < tines.size(); ++i) {
      for (std::size_t j = 0; ok && j < tines.size(); ++j) {
        if (i != j && p.poset().leq(tines[i], tines[j])) ok = p.restrict(tines[i], tines[j], t[j]) == t[i];
      }
    }
    if (ok) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

Presheaf Presheaf::make(FinitePoset poset, std::vector<std::vector<std::string>> labels,
                        const std::map<IndexPair, StateMap>& maps) {
  const std::size_t n = poset.size();
  if (labels.size() != n) throw InputError("carrier list does not match poset size");
  Presheaf p;
  p.poset_ = std::move(poset);
  p.labels_ = std::move(labels);
  p.composite_.assign(n * n, StateMap{});

  auto check_map = [&](std::size_t lower, std::size_t upper, const StateMap& m) {
    if (m.size() != p.carrier_size(upper)) {
      throw InputError("restriction " + p.poset_.id(upper) + " -> " + p.poset_.id(lower) + " has " +
                       std::to_string(m.size()) + " entries, expected " + std::to_string(p.carrier_size(upper)));
    }
    for (State s : m) {
      if (s >= p.carrier_size(lower)) {
        throw InputError("restriction " + p.poset_.id(upper) + " -> " + p.poset_.id(lower) +
                         " maps outside the carrier of " + p.poset_.id(lower));
      }
    }
  };
  for (const auto& [pair, m] : maps) {
    auto [lower, upper] = pair;
    if (lower >= n || upper >= n || !p.poset_.leq(lower, upper)) {
      throw InputError("restriction given for a pair that is not ordered");
    }
    check_map(lower, upper, m);
  }

  for (std::size_t x = 0; x < n; ++x) {
    StateMap id(p.carrier_size(x));
    std::iota(id.begin(), id.end(), State{0});
    p.composite_[x * n + x] = std::move(id);
  }
  std::vector<bool> known(n * n, false);
  for (std::size_t x = 0; x < n; ++x) known[x * n + x] = true;
  for (std::size_t y : p.poset_.linear_extension()) {
    for (std::size_t z : p.poset_.lower_covers(y).members()) {
      auto it = maps.find({z, y});
      if (it == maps.end()) {
        throw InputError("missing restriction " + p.poset_.id(y) + " -> " + p.poset_.id(z));
      }
      const StateMap& cover = it->second;
      for (std::size_t x : p.poset_.down(z).members()) {
        const StateMap& below = p.composite_[x * n + z];
        StateMap c(cover.size());
        for (State s = 0; s < cover.size(); ++s) c[s] = below[cover[s]];
        if (!known[x * n + y]) {
          p.composite_[x * n + y] = std::move(c);
          known[x * n + y] = true;
        } else if (p.composite_[x * n + y] != c) {
          throw StructureError("restrictions from '" + p.poset_.id(y) + "' to '" + p.poset_.id(x) +
                               "' disagree along two paths");
        }
      }
    }
  }
  for (const auto& [pair, m] : maps) {
    if (p.composite_[pair.first * n + pair.second] != m) {
      throw StructureError("given restriction " + p.poset_.id(pair.second) + " -> " + p.poset_.id(pair.first) +
                           " differs from the composite of covering maps");
    }
  }
  return p;
}

Presheaf Presheaf::make(FinitePoset poset, const std::vector<std::size_t>& sizes,
                        const std::map<IndexPair, StateMap>& maps) {
  std::vector<std::vector<std::string>> labels;
  for (std::size_t s : sizes) labels.push_back(default_labels(s));
  return make(std::move(poset), std::move(labels), maps);
}

Presheaf Presheaf::constant(FinitePoset poset, std::vector<std::string> labels) {
  std::map<IndexPair, StateMap> maps;
  StateMap id(labels.size());
  std::iota(id.begin(), id.end(), State{0});
  for (const auto& c : poset.covers()) maps[c] = id;
  std::vector<std::vector<std::string>> all(poset.size(), labels);
  return make(std::move(poset), std::move(all), maps);
}

State Presheaf::state_index(std::size_t x, std::string_view label) const {
  const auto& l = labels(x);
  auto it = std::find(l.begin(), l.end(), label);
  if (it == l.end()) throw InputError("unknown state '" + std::string(label) + "' at '" + poset_.id(x) + "'");
  return static_cast<State>(it - l.begin());
}

const StateMap& Presheaf::restriction(std::size_t lower, std::size_t upper) const {
  if (!poset_.leq(lower, upper)) throw InputError("no restriction between unordered elements");
  return composite_[lower * size() + upper];
}

SectionSet sections(const Presheaf& p, std::size_t bound) {
  SectionSet out;
  std::vector<std::size_t> maximal = p.poset().maximal().members();
  std::vector<State> value(p.size(), kUnset);
  std::vector<bool> done(maximal.size(), false);
  std::size_t explored = 0;
  search(p, maximal, value, done, out, explored, bound);
  std::sort(out.tuples.begin(), out.tuples.end());
  return out;
}

Presheaf sheafify_at_forks(const Presheaf& p, const site::ForkGraph& fg) {
  const FinitePoset full = site::build_poset(fg, true);
  std::vector<std::size_t> src(full.size(), 0);  // element of full -> element of p (non-stars)
  std::vector<std::vector<std::string>> labels(full.size());
  std::map<std::size_t, std::vector<std::vector<State>>> star_tuples;
  std::map<std::size_t, std::vector<std::size_t>> star_tines;  // in p indices

  for (std::size_t v = 0; v < full.size(); ++v) {
    if (full.kind(v) != VertexKind::star) {
      src[v] = p.poset().index_of(full.id(v));
      labels[v] = p.labels(src[v]);
    }
  }
  for (const site::Fork& f : fg.forks) {
    const std::size_t star = full.index_of(fg.ids[f.star]);
    std::vector<std::size_t> tines;
    std::vector<const std::vector<std::string>*> carriers;
    for (std::size_t t : f.tines) {
      tines.push_back(p.poset().index_of(fg.ids[t]));
      carriers.push_back(&p.labels(tines.back()));
    }
    auto tuples = compatible_tuples(p, tines);
    for (const auto& t : tuples) labels[star].push_back(tuple_label(carriers, t));
    star_tuples[star] = std::move(tuples);
    star_tines[star] = std::move(tines);
  }

  std::map<IndexPair, StateMap> maps;
  for (auto [lo, up] : full.covers()) {
    StateMap m;
    if (full.kind(up) == VertexKind::star) {
      const auto& tines = star_tines.at(up);
      const std::size_t pos = static_cast<std::size_t>(std::find(tines.begin(), tines.end(), src[lo]) - tines.begin());
      for (const auto& t : star_tuples.at(up)) m.push_back(t[pos]);
    } else if (full.kind(lo) == VertexKind::star) {
      const auto& tines = star_tines.at(lo);
      const auto& tuples = star_tuples.at(lo);
      for (State s = 0; s < p.carrier_size(src[up]); ++s) {
        std::vector<State> image;
        for (std::size_t t : tines) image.push_back(p.restrict(t, src[up], s));
        m.push_back(static_cast<State>(std::lower_bound(tuples.begin(), tuples.end(), image) - tuples.begin()));
      }
    } else {
      m = p.restriction(src[lo], src[up]);
    }
    maps[{lo, up}] = std::move(m);
  }
  return Presheaf::make(full, std::move(labels), maps);
}

Presheaf feed_forward_presheaf(const site::ForkGraph& fg, const std::vector<std::size_t>& sizes,
                               const Dynamics& dynamics) {
  if (sizes.size() != fg.size()) throw InputError("carrier sizes must be given for every fork-graph vertex");
  const FinitePoset poset = site::build_poset(fg);
  const std::size_t n = poset.size();
  std::vector<std::size_t> vtx(n);
  for (std::size_t x = 0; x < n; ++x) vtx[x] = fg.index_of(poset.id(x));

  std::map<std::size_t, std::size_t> copy_source;
  for (auto [copy, original] : fg.input_copies) copy_source[copy] = original;
  std::map<std::size_t, const site::Fork*> fork_of_tang;
  for (const site::Fork& f : fg.forks) fork_of_tang[f.tang] = &f;

  // Upstream neighbour of every non-tang, non-input vertex.
  std::vector<std::size_t> parent(fg.size(), fg.size());
  for (auto [a, b] : fg.arrows) {
    if (fg.kinds[b] != VertexKind::star) parent[a] = b;
  }

  std::vector<std::vector<std::string>> labels(n);
  std::vector<std::size_t> carrier(fg.size(), 0);
  for (std::size_t v = 0; v < fg.size(); ++v) {
    if (fg.kinds[v] == VertexKind::tang || fg.kinds[v] == VertexKind::star) continue;
    auto c = copy_source.find(v);
    carrier[v] = sizes[c == copy_source.end() ? v : c->second];
  }

  // State of the chain ancestor `up` pushed down to `down` along parent links.
  auto push_down = [&](std::size_t down, std::size_t up, State s) {
    std::vector<std::size_t> path;
    for (std::size_t v = down; v != up; v = parent[v]) path.push_back(v);
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      if (copy_source.count(*it) != 0) continue;
      const State st[1] = {s};
      s = dynamics(*it, st);
    }
    return s;
  };
  auto is_ancestor = [&](std::size_t up, std::size_t down) {
    for (std::size_t v = down; v < fg.size(); v = parent[v]) {
      if (v == up) return true;
      if (fg.kinds[v] == VertexKind::tang) return false;
    }
    return false;
  };

  std::map<std::size_t, std::vector<std::vector<State>>> tang_tuples;
  for (const site::Fork& f : fg.forks) {
    std::vector<std::size_t> tsizes;
    for (std::size_t t : f.tines) tsizes.push_back(carrier[t]);
    std::vector<std::vector<State>> kept;
    for (auto& tuple : all_tuples(tsizes)) {
      bool ok = true;
      for (std::size_t i = 0; ok && i < f.tines.size(); ++i) {
        for (std::size_t j = 0; ok && j < f.tines.size(); ++j) {
          if (i != j && is_ancestor(f.tines[j], f.tines[i])) ok = push_down(f.tines[i], f.tines[j], tuple[j]) == tuple[i];
        }
      }
      if (ok) kept.push_back(std::move(tuple));
    }
    tang_tuples[f.tang] = std::move(kept);
  }

  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t v = vtx[x];
    if (fg.kinds[v] == VertexKind::tang) {
      const site::Fork& f = *fork_of_tang.at(v);
      std::vector<std::vector<std::string>> tl;
      std::vector<const std::vector<std::string>*> carriers;
      for (std::size_t t : f.tines) tl.push_back(default_labels(carrier[t]));
      for (const auto& l : tl) carriers.push_back(&l);
      for (const auto& t : tang_tuples.at(v)) labels[x].push_back(tuple_label(carriers, t));
    } else {
      labels[x] = default_labels(carrier[v]);
    }
  }

  std::map<IndexPair, StateMap> maps;
  for (auto [lo, up] : poset.covers()) {
    const std::size_t a = vtx[lo];
    const std::size_t b = vtx[up];
    StateMap m;
    if (fg.kinds[b] == VertexKind::tang) {
      const site::Fork& f = *fork_of_tang.at(b);
      const auto pos = std::find(f.tines.begin(), f.tines.end(), a);
      for (const auto& t : tang_tuples.at(b)) {
        if (pos != f.tines.end()) {
          m.push_back(t[static_cast<std::size_t>(pos - f.tines.begin())]);
        } else {
          m.push_back(dynamics(a, t));
        }
      }
    } else if (copy_source.count(a) != 0) {
      m.resize(carrier[b]);
      std::iota(m.begin(), m.end(), State{0});
    } else {
      for (State s = 0; s < carrier[b]; ++s) {
        const State st[1] = {s};
        m.push_back(dynamics(a, st));
      }
    }
    maps[{lo, up}] = std::move(m);
  }
  return Presheaf::make(poset, std::move(labels), maps);
}

OutputPredicate OutputPredicate::always(std::vector<std::size_t> outputs) {
  return {std::move(outputs), [](std::span<const State>) { return true; }};
}

OutputPredicate OutputPredicate::never(std::vector<std::size_t> outputs) {
  return {std::move(outputs), [](std::span<const State>) { return false; }};
}

OutputPredicate OutputPredicate::from_parts(std::vector<std::size_t> outputs,
                                            std::vector<boost::dynamic_bitset<>> allowed) {
  if (allowed.size() != outputs.size()) throw InputError("one allowed set per output is required");
  return {std::move(outputs), [allowed = std::move(allowed)](std::span<const State> s) {
            for (std::size_t i = 0; i < s.size(); ++i) {
              if (s[i] >= allowed[i].size() || !allowed[i].test(s[i])) return false;
            }
            return true;
          }};
}

ElementSet output_elements(const Presheaf& p) {
  const FinitePoset& poset = p.poset();
  if (!poset.has_kinds()) return poset.minimal();
  ElementSet out;
  for (std::size_t x = 0; x < poset.size(); ++x) {
    if (poset.kind(x) == VertexKind::output) out.insert(x);
  }
  return out;
}

SectionSet cats_manifold(const Presheaf& p, const OutputPredicate& pred, std::size_t bound) {
  check_outputs(p, pred);
  SectionSet all = sections(p, bound);
  SectionSet out;
  for (auto& t : all.tuples) {
    if (satisfies(pred, t)) out.tuples.push_back(std::move(t));
  }
  return out;
}

Presheaf extend_with_predicate(const Presheaf& p, const OutputPredicate& pred) {
  check_outputs(p, pred);
  if (pred.outputs.empty()) throw InputError("predicate needs at least one output element");
  const FinitePoset& base = p.poset();
  const std::size_t n = base.size();
  std::vector<std::string> ids = base.ids();
  auto fresh = [&](std::string name) {
    while (base.contains(name)) name += '\'';
    return name;
  };
  const std::size_t bstar = n, btang = n + 1, omega_b = n + 2, omega_1 = n + 3;
  ids.push_back(fresh("B*"));
  ids.push_back(fresh("B"));
  ids.push_back(fresh("omega_b"));
  ids.push_back(fresh("omega_1"));

  std::vector<IndexPair> gens(base.covers());
  for (std::size_t b : pred.outputs) gens.emplace_back(b, bstar);
  gens.emplace_back(bstar, btang);
  gens.emplace_back(omega_b, btang);
  gens.emplace_back(omega_b, omega_1);
  std::vector<VertexKind> kinds;
  if (base.has_kinds()) {
    kinds = base.kinds();
    kinds.insert(kinds.end(), {VertexKind::star, VertexKind::tang, VertexKind::ordinary, VertexKind::input});
  }
  FinitePoset ext = FinitePoset::from_relation(std::move(ids), gens, std::move(kinds));

  std::vector<std::size_t> sizes;
  std::vector<const std::vector<std::string>*> carriers;
  for (std::size_t b : pred.outputs) {
    sizes.push_back(p.carrier_size(b));
    carriers.push_back(&p.labels(b));
  }
  const auto tuples = all_tuples(sizes);

  std::vector<std::vector<std::string>> labels(n + 4);
  for (std::size_t x = 0; x < n; ++x) labels[x] = p.labels(x);
  for (const auto& t : tuples) labels[bstar].push_back(tuple_label(carriers, t));
  labels[btang] = labels[bstar];
  labels[omega_b] = {"0", "1"};
  labels[omega_1] = {"*"};

  std::map<IndexPair, StateMap> maps;
  for (const auto& c : base.covers()) maps[c] = p.restriction(c.first, c.second);
  for (std::size_t i = 0; i < pred.outputs.size(); ++i) {
    StateMap m;
    for (const auto& t : tuples) m.push_back(t[i]);
    maps[{pred.outputs[i], bstar}] = std::move(m);
  }
  StateMap id(tuples.size());
  std::iota(id.begin(), id.end(), State{0});
  maps[{bstar, btang}] = std::move(id);
  StateMap chi;
  for (const auto& t : tuples) chi.push_back(pred.holds(t) ? 1 : 0);
  maps[{omega_b, btang}] = std::move(chi);
  maps[{omega_b, omega_1}] = StateMap{1};
  return Presheaf::make(std::move(ext), std::move(labels), maps);
}

SectionSet cats_manifold_extended(const Presheaf& p, const OutputPredicate& pred, std::size_t bound) {
  const Presheaf ext = extend_with_predicate(p, pred);
  SectionSet all = sections(ext, bound);
  SectionSet out;
  for (auto& t : all.tuples) {
    t.resize(p.size());
    out.tuples.push_back(std::move(t));
  }
  std::sort(out.tuples.begin(), out.tuples.end());
  return out;
}

Subobject top(const Presheaf& p) {
  Subobject y;
  for (std::size_t x = 0; x < p.size(); ++x) y.parts.emplace_back(p.carrier_size(x)).set();
  return y;
}

Subobject bottom(const Presheaf& p) {
  Subobject y;
  for (std::size_t x = 0; x < p.size(); ++x) y.parts.emplace_back(p.carrier_size(x));
  return y;
}

bool is_subobject(const Presheaf& p, const Subobject& y) {
  if (y.parts.size() != p.size()) return false;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (y.parts[x].size() != p.carrier_size(x)) return false;
  }
  for (auto [lo, up] : p.poset().covers()) {
    for (State s = 0; s < p.carrier_size(up); ++s) {
      if (y.parts[up].test(s) && !y.parts[lo].test(p.restrict(lo, up, s))) return false;
    }
  }
  return true;
}

bool leq(const Subobject& a, const Subobject& b) {
  for (std::size_t x = 0; x < a.parts.size(); ++x) {
    if (!a.parts[x].is_subset_of(b.parts[x])) return false;
  }
  return true;
}

Subobject meet(const Subobject& a, const Subobject& b) {
  Subobject out = a;
  for (std::size_t x = 0; x < out.parts.size(); ++x) out.parts[x] &= b.parts[x];
  return out;
}

Subobject join(const Subobject& a, const Subobject& b) {
  Subobject out = a;
  for (std::size_t x = 0; x < out.parts.size(); ++x) out.parts[x] |= b.parts[x];
  return out;
}

Subobject implies(const Presheaf& p, const Subobject& q, const Subobject& t) {
  Subobject out = bottom(p);
  for (std::size_t x = 0; x < p.size(); ++x) {
    for (State s = 0; s < p.carrier_size(x); ++s) {
      bool ok = true;
      for (std::size_t y : p.poset().down(x).members()) {
        const State r = p.restrict(y, x, s);
        if (q.parts[y].test(r) && !t.parts[y].test(r)) {
          ok = false;
          break;
        }
      }
      if (ok) out.parts[x].set(s);
    }
  }
  return out;
}

Subobject negate(const Presheaf& p, const Subobject& q) { return implies(p, q, bottom(p)); }

SubobjectLattice::SubobjectLattice(const Presheaf& p) {
  std::size_t total = 0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    offset_.push_back(total);
    sizes_.push_back(p.carrier_size(x));
    total += p.carrier_size(x);
  }
  if (total > ElementSet::kCapacity) {
    throw BoundExceeded("category of elements has " + std::to_string(total) + " points; at most 64 are supported");
  }
  std::vector<std::string> ids;
  for (std::size_t x = 0; x < p.size(); ++x) {
    for (State s = 0; s < p.carrier_size(x); ++s) ids.push_back(p.poset().id(x) + ":" + p.labels(x)[s]);
  }
  std::vector<IndexPair> gens;
  for (auto [lo, up] : p.poset().covers()) {
    for (State s = 0; s < p.carrier_size(up); ++s) gens.emplace_back(point(lo, p.restrict(lo, up, s)), point(up, s));
  }
  points_ = FinitePoset::from_relation(std::move(ids), gens);
}

ElementSet SubobjectLattice::to_mask(const Subobject& y) const {
  ElementSet m;
  for (std::size_t x = 0; x < sizes_.size(); ++x) {
    for (State s = 0; s < sizes_[x]; ++s) {
      if (y.parts[x].test(s)) m.insert(point(x, s));
    }
  }
  return m;
}

Subobject SubobjectLattice::from_mask(ElementSet mask) const {
  Subobject y;
  for (std::size_t x = 0; x < sizes_.size(); ++x) {
    y.parts.emplace_back(sizes_[x]);
    for (State s = 0; s < sizes_[x]; ++s) {
      if (mask.contains(point(x, s))) y.parts[x].set(s);
    }
  }
  return y;
}

}  // namespace sheafnet::presheaf
