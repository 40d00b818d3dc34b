#include "sheafnet/groupoid.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "sheafnet/detail/union_find.hpp"
#include "sheafnet/error.hpp"

namespace sheafnet::logic {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

Morphism inverted(const Morphism& m) { return {m.dst, m.src, inverse(m.perm)}; }

}  // namespace

FiniteGroupoid FiniteGroupoid::generate(std::vector<std::string> objects, std::size_t degree,
                                        const std::vector<Morphism>& generators, std::size_t bound) {
  FiniteGroupoid g;
  g.objects_ = std::move(objects);
  g.degree_ = degree;
  g.generators_ = generators;
  const std::size_t n = g.objects_.size();
  for (const Morphism& m : generators) {
    if (m.src >= n || m.dst >= n) throw InputError("generator endpoint out of range");
    if (m.perm.size() != degree || !is_permutation(m.perm)) {
      throw InputError("generator label is not a permutation of degree " + std::to_string(degree));
    }
  }
  auto add = [&](Morphism m, std::vector<std::pair<std::size_t, bool>> word) {
    auto [it, fresh] = g.index_.emplace(m, g.morphisms_.size());
    if (!fresh) return false;
    if (g.morphisms_.size() == bound) {
      throw BoundExceeded("groupoid closure exceeds " + std::to_string(bound) + " morphisms");
    }
    g.morphisms_.push_back(std::move(m));
    g.word_.push_back(std::move(word));
    return true;
  };
  std::deque<std::size_t> queue;
  for (std::size_t o = 0; o < n; ++o) {
    add({o, o, identity_perm(degree)}, {});
    g.identity_.push_back(g.morphisms_.size() - 1);
    queue.push_back(g.morphisms_.size() - 1);
  }
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    for (std::size_t k = 0; k < generators.size(); ++k) {
      for (bool inv : {false, true}) {
        const Morphism step = inv ? inverted(generators[k]) : generators[k];
        const Morphism cur = g.morphisms_[i];
        if (step.src != cur.dst) continue;
        auto word = g.word_[i];
        word.emplace_back(k, inv);
        if (add({cur.src, step.dst, sheafnet::compose(step.perm, cur.perm)}, std::move(word))) {
          queue.push_back(g.morphisms_.size() - 1);
        }
      }
    }
  }
  for (const Morphism& m : g.morphisms_) {
    auto inv = g.find(inverted(m));
    if (!inv) throw StructureError("closure is missing an inverse");
    g.inverse_.push_back(*inv);
  }
  return g;
}

FiniteGroupoid FiniteGroupoid::discrete(std::vector<std::string> objects) {
  return generate(std::move(objects), 0, {});
}

FiniteGroupoid FiniteGroupoid::group(const std::vector<Perm>& gens, std::size_t degree, std::size_t bound) {
  std::vector<Morphism> ms;
  for (const Perm& p : gens) ms.push_back({0, 0, p});
  return generate({"*"}, degree, ms, bound);
}

FiniteGroupoid FiniteGroupoid::product(const FiniteGroupoid& a, const FiniteGroupoid& b, std::size_t bound) {
  std::vector<std::string> objects;
  for (const auto& x : a.objects()) {
    for (const auto& y : b.objects()) objects.push_back("(" + x + "," + y + ")");
  }
  const std::size_t nb = b.object_count();
  std::vector<Morphism> gens;
  for (const Morphism& g : a.generators()) {
    for (std::size_t y = 0; y < nb; ++y) {
      gens.push_back({g.src * nb + y, g.dst * nb + y, direct_sum(g.perm, identity_perm(b.degree()))});
    }
  }
  for (const Morphism& g : b.generators()) {
    for (std::size_t x = 0; x < a.object_count(); ++x) {
      gens.push_back({x * nb + g.src, x * nb + g.dst, direct_sum(identity_perm(a.degree()), g.perm)});
    }
  }
  return generate(std::move(objects), a.degree() + b.degree(), gens, bound);
}

std::optional<std::size_t> FiniteGroupoid::find(const Morphism& m) const {
  auto it = index_.find(m);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> FiniteGroupoid::compose(std::size_t g, std::size_t f) const {
  const Morphism& mg = morphisms_.at(g);
  const Morphism& mf = morphisms_.at(f);
  if (mf.dst != mg.src) return std::nullopt;
  return find({mf.src, mg.dst, sheafnet::compose(mg.perm, mf.perm)});
}

std::vector<std::string> FiniteGroupoid::validate() const {
  std::vector<std::string> defects;
  const std::size_t m = morphisms_.size();
  std::vector<std::size_t> table(m * m, kNone);
  for (std::size_t g = 0; g < m; ++g) {
    for (std::size_t f = 0; f < m; ++f) {
      if (morphisms_[f].dst != morphisms_[g].src) continue;
      auto c = compose(g, f);
      if (!c) {
        defects.push_back("composite missing from the table");
        return defects;
      }
      table[g * m + f] = *c;
    }
  }
  for (std::size_t f = 0; f < m; ++f) {
    const Morphism& mf = morphisms_[f];
    if (table[f * m + identity_[mf.src]] != f || table[identity_[mf.dst] * m + f] != f) {
      defects.push_back("identity law fails");
    }
    if (table[inverse_[f] * m + f] != identity_[mf.src] || table[f * m + inverse_[f]] != identity_[mf.dst]) {
      defects.push_back("inverse law fails");
    }
  }
  for (std::size_t h = 0; h < m; ++h) {
    for (std::size_t g = 0; g < m; ++g) {
      const std::size_t hg = table[h * m + g];
      if (hg == kNone) continue;
      for (std::size_t f = 0; f < m; ++f) {
        const std::size_t gf = table[g * m + f];
        if (gf == kNone) continue;
        if (table[hg * m + f] != table[h * m + gf]) {
          defects.push_back("associativity fails");
          return defects;
        }
      }
    }
  }
  return defects;
}

std::vector<std::size_t> connected_components(const FiniteGroupoid& g) {
  detail::Components comp(g.object_count());
  for (const Morphism& m : g.morphisms()) comp.unite(m.src, m.dst);
  return comp.labels();
}

std::size_t component_count(const FiniteGroupoid& g) {
  const auto c = connected_components(g);
  return c.empty() ? 0 : *std::max_element(c.begin(), c.end()) + 1;
}

GroupoidFunctor GroupoidFunctor::from_generators(std::shared_ptr<const FiniteGroupoid> source,
                                                 std::shared_ptr<const FiniteGroupoid> target,
                                                 std::vector<std::size_t> object_map,
                                                 const std::vector<Morphism>& generator_images) {
  const FiniteGroupoid& s = *source;
  const FiniteGroupoid& t = *target;
  if (object_map.size() != s.object_count()) throw InputError("object map has the wrong length");
  for (std::size_t o : object_map) {
    if (o >= t.object_count()) throw InputError("object map leaves the target");
  }
  if (generator_images.size() != s.generators().size()) throw InputError("one image per generator is required");
  std::vector<std::size_t> images;
  for (std::size_t k = 0; k < generator_images.size(); ++k) {
    auto idx = t.find(generator_images[k]);
    if (!idx) throw InputError("generator image is not a morphism of the target");
    const Morphism& gen = s.generators()[k];
    if (generator_images[k].src != object_map[gen.src] || generator_images[k].dst != object_map[gen.dst]) {
      throw StructureError("generator image does not respect the object map");
    }
    images.push_back(*idx);
  }
  std::vector<std::size_t> morphism_map;
  for (std::size_t i = 0; i < s.morphism_count(); ++i) {
    std::size_t cur = t.identity(object_map[s.morphism(i).src]);
    for (auto [k, inv] : s.word(i)) {
      const std::size_t step = inv ? t.inverse(images[k]) : images[k];
      auto next = t.compose(step, cur);
      if (!next) throw StructureError("generator images are not composable");
      cur = *next;
    }
    morphism_map.push_back(cur);
  }
  return from_maps(std::move(source), std::move(target), std::move(object_map), std::move(morphism_map));
}

GroupoidFunctor GroupoidFunctor::from_maps(std::shared_ptr<const FiniteGroupoid> source,
                                           std::shared_ptr<const FiniteGroupoid> target,
                                           std::vector<std::size_t> object_map,
                                           std::vector<std::size_t> morphism_map) {
  GroupoidFunctor f;
  f.source_ = std::move(source);
  f.target_ = std::move(target);
  f.objects_ = std::move(object_map);
  f.morphisms_ = std::move(morphism_map);
  if (f.objects_.size() != f.source_->object_count() || f.morphisms_.size() != f.source_->morphism_count()) {
    throw InputError("functor maps have the wrong length");
  }
  const auto defects = f.validate();
  if (!defects.empty()) throw StructureError("not a functor: " + defects.front());
  return f;
}

GroupoidFunctor GroupoidFunctor::identity(std::shared_ptr<const FiniteGroupoid> g) {
  std::vector<std::size_t> objects = identity_perm(g->object_count());
  std::vector<std::size_t> morphisms = identity_perm(g->morphism_count());
  return from_maps(g, g, std::move(objects), std::move(morphisms));
}

GroupoidFunctor GroupoidFunctor::projection(std::shared_ptr<const FiniteGroupoid> product,
                                            std::shared_ptr<const FiniteGroupoid> factor, bool second) {
  const std::size_t nf = factor->object_count();
  if (nf == 0 || product->object_count() % nf != 0) throw InputError("factor does not divide the product");
  const std::size_t other = product->object_count() / nf;
  const std::size_t nb = second ? nf : other;
  const std::size_t first_degree = product->degree() - (second ? factor->degree() : 0);
  auto on_obj = [&](std::size_t o) { return second ? o % nb : o / nb; };
  std::vector<std::size_t> objects;
  for (std::size_t o = 0; o < product->object_count(); ++o) objects.push_back(on_obj(o));
  std::vector<std::size_t> morphisms;
  for (const Morphism& m : product->morphisms()) {
    Perm p;
    if (second) {
      for (std::size_t i = first_degree; i < m.perm.size(); ++i) p.push_back(m.perm[i] - first_degree);
    } else {
      p.assign(m.perm.begin(), m.perm.begin() + static_cast<std::ptrdiff_t>(factor->degree()));
    }
    auto idx = factor->find({on_obj(m.src), on_obj(m.dst), p});
    if (!idx) throw InputError("product morphism has no factor image");
    morphisms.push_back(*idx);
  }
  return from_maps(std::move(product), std::move(factor), std::move(objects), std::move(morphisms));
}

std::vector<std::string> GroupoidFunctor::validate() const {
  std::vector<std::string> defects;
  const FiniteGroupoid& s = *source_;
  const FiniteGroupoid& t = *target_;
  for (std::size_t i = 0; i < s.morphism_count(); ++i) {
    if (morphisms_[i] >= t.morphism_count()) {
      defects.push_back("morphism image out of range");
      return defects;
    }
    const Morphism& m = s.morphism(i);
    const Morphism& img = t.morphism(morphisms_[i]);
    if (img.src != objects_[m.src] || img.dst != objects_[m.dst]) defects.push_back("endpoints not preserved");
  }
  for (std::size_t o = 0; o < s.object_count(); ++o) {
    if (morphisms_[s.identity(o)] != t.identity(objects_[o])) defects.push_back("identity not preserved");
  }
  for (std::size_t g = 0; g < s.morphism_count(); ++g) {
    for (std::size_t f = 0; f < s.morphism_count(); ++f) {
      auto gf = s.compose(g, f);
      if (!gf) continue;
      auto image = t.compose(morphisms_[g], morphisms_[f]);
      if (!image || *image != morphisms_[*gf]) {
        defects.push_back("composition not preserved");
        return defects;
      }
    }
  }
  return defects;
}

GroupoidFunctor compose(const GroupoidFunctor& g, const GroupoidFunctor& f) {
  if (f.target_ptr() != g.source_ptr()) throw InputError("functors are not composable");
  std::vector<std::size_t> objects;
  for (std::size_t o : f.object_map()) objects.push_back(g.on_object(o));
  std::vector<std::size_t> morphisms;
  for (std::size_t m : f.morphism_map()) morphisms.push_back(g.on_morphism(m));
  return GroupoidFunctor::from_maps(f.source_ptr(), g.target_ptr(), std::move(objects), std::move(morphisms));
}

ElementSet lambda_transport(const GroupoidFunctor& f, ElementSet source_components) {
  const auto cs = connected_components(f.source());
  const auto ct = connected_components(f.target());
  ElementSet out;
  for (std::size_t o = 0; o < cs.size(); ++o) {
    if (source_components.contains(cs[o])) out.insert(ct[f.on_object(o)]);
  }
  return out;
}

ElementSet tau_transport(const GroupoidFunctor& f, ElementSet target_components) {
  const auto cs = connected_components(f.source());
  const auto ct = connected_components(f.target());
  ElementSet out;
  for (std::size_t o = 0; o < cs.size(); ++o) {
    if (target_components.contains(ct[f.on_object(o)])) out.insert(cs[o]);
  }
  return out;
}

bool is_component_surjective(const GroupoidFunctor& f) {
  return lambda_transport(f, ElementSet::full(component_count(f.source()))) ==
         ElementSet::full(component_count(f.target()));
}

bool AdjunctionReport::ok() const {
  return adjunction && unit && counit && lambda_lattice && tau_boolean && section == surjective;
}

AdjunctionReport check_adjunction_and_section(const GroupoidFunctor& f) {
  const std::size_t ns = component_count(f.source());
  const std::size_t nt = component_count(f.target());
  if (ns > 20 || nt > 20 || ns + nt > 24) throw BoundExceeded("too many components for an exhaustive check");
  AdjunctionReport r;
  r.surjective = is_component_surjective(f);
  const ElementSet all_s = ElementSet::full(ns);
  const ElementSet all_t = ElementSet::full(nt);
  const std::uint64_t ps = std::uint64_t{1} << ns;
  const std::uint64_t pt = std::uint64_t{1} << nt;
  std::vector<ElementSet> lam(ps);
  std::vector<ElementSet> tau(pt);
  for (std::uint64_t a = 0; a < ps; ++a) lam[a] = lambda_transport(f, ElementSet(a));
  for (std::uint64_t q = 0; q < pt; ++q) tau[q] = tau_transport(f, ElementSet(q));

  if (!lam[0].empty()) r.lambda_lattice = false;
  for (std::uint64_t a = 0; a < ps; ++a) {
    if (!ElementSet(a).subset_of(tau[lam[a].bits()])) r.unit = false;
    for (std::uint64_t b = 0; b < ps; ++b) {
      if (lam[a | b] != (lam[a] | lam[b])) r.lambda_lattice = false;
    }
    for (std::uint64_t q = 0; q < pt; ++q) {
      if (lam[a].subset_of(ElementSet(q)) != ElementSet(a).subset_of(tau[q])) r.adjunction = false;
    }
  }
  for (std::uint64_t q = 0; q < pt; ++q) {
    const ElementSet back = lam[tau[q].bits()];
    if (!back.subset_of(ElementSet(q))) r.counit = false;
    if (back != ElementSet(q)) {
      r.section = false;
      if (!r.section_witness) r.section_witness = ElementSet(q);
    }
    if (tau[(all_t - ElementSet(q)).bits()] != (all_s - tau[q])) r.tau_boolean = false;
    for (std::uint64_t q2 = 0; q2 < pt; ++q2) {
      if (tau[q & q2] != (tau[q] & tau[q2]) || tau[q | q2] != (tau[q] | tau[q2])) r.tau_boolean = false;
    }
  }
  if (!r.adjunction) r.failures.emplace_back("lambda is not left adjoint to tau");
  if (!r.unit) r.failures.emplace_back("unit P' <= tau lambda P' fails");
  if (!r.counit) r.failures.emplace_back("counit lambda tau Q <= Q fails");
  if (!r.lambda_lattice) r.failures.emplace_back("lambda does not preserve joins");
  if (!r.tau_boolean) r.failures.emplace_back("tau does not preserve Boolean operations");
  if (r.section != r.surjective) r.failures.emplace_back("lambda tau = Id does not match component surjectivity");
  return r;
}

bool is_fibration(const GroupoidFunctor& f) { return is_multi_fibration({f}); }

bool is_multi_fibration(const std::vector<GroupoidFunctor>& fs) {
  if (fs.empty()) return true;
  const FiniteGroupoid& s = fs.front().source();
  for (const auto& f : fs) {
    if (&f.source() != &s) throw InputError("multi-fibration check needs a common source");
  }
  for (std::size_t y = 0; y < s.object_count(); ++y) {
    std::size_t expected = 1;
    for (const auto& f : fs) {
      const std::size_t fy = f.on_object(y);
      std::size_t into = 0;
      for (const Morphism& m : f.target().morphisms()) into += m.dst == fy ? 1 : 0;
      expected *= into;
    }
    std::set<std::vector<std::size_t>> lifted;
    for (std::size_t i = 0; i < s.morphism_count(); ++i) {
      if (s.morphism(i).dst != y) continue;
      std::vector<std::size_t> image;
      for (const auto& f : fs) image.push_back(f.on_morphism(i));
      lifted.insert(std::move(image));
    }
    if (lifted.size() != expected) return false;
  }
  return true;
}

}  // namespace sheafnet::logic
