#include <doctest.h>

#include <deque>
#include <random>

#include "sheafnet/error.hpp"
#include "sheafnet/groupoid.hpp"
#include "sheafnet/stack.hpp"

using namespace sheafnet;
using namespace sheafnet::logic;

namespace {

using GPtr = std::shared_ptr<const FiniteGroupoid>;

GPtr share(FiniteGroupoid g) { return std::make_shared<const FiniteGroupoid>(std::move(g)); }

std::vector<std::string> names(std::size_t n, const char* prefix = "o") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

Perm random_perm(std::mt19937_64& rng, std::size_t k) {
  Perm p = identity_perm(k);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

FiniteGroupoid random_groupoid(std::mt19937_64& rng, std::size_t objects, std::size_t gens, std::size_t degree) {
  std::uniform_int_distribution<std::size_t> obj(0, objects - 1);
  std::vector<Morphism> ms;
  for (std::size_t i = 0; i < gens; ++i) ms.push_back({obj(rng), obj(rng), random_perm(rng, degree)});
  return FiniteGroupoid::generate(names(objects), degree, ms, 400);
}

/// Functor into `target` that keeps permutation labels; the source uses
/// generators copied from target morphisms between the chosen object images.
GroupoidFunctor label_functor(std::mt19937_64& rng, const GPtr& target, std::size_t objects, std::size_t gens) {
  std::uniform_int_distribution<std::size_t> tobj(0, target->object_count() - 1);
  std::vector<std::size_t> omap;
  for (std::size_t i = 0; i < objects; ++i) omap.push_back(tobj(rng));
  std::uniform_int_distribution<std::size_t> sobj(0, objects - 1);
  std::vector<Morphism> ms;
  std::vector<Morphism> images;
  for (std::size_t i = 0; i < gens * 4 && ms.size() < gens; ++i) {
    const std::size_t a = sobj(rng);
    const std::size_t b = sobj(rng);
    std::vector<const Morphism*> candidates;
    for (const Morphism& m : target->morphisms()) {
      if (m.src == omap[a] && m.dst == omap[b]) candidates.push_back(&m);
    }
    if (candidates.empty()) continue;
    const Morphism& pick = *candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
    ms.push_back({a, b, pick.perm});
    images.push_back(pick);
  }
  auto source = share(FiniteGroupoid::generate(names(objects, "s"), target->degree(), ms, 400));
  return GroupoidFunctor::from_generators(source, target, omap, images);
}

std::vector<std::size_t> reachability_components(const FiniteGroupoid& g) {
  std::vector<std::size_t> label(g.object_count(), g.object_count());
  std::size_t next = 0;
  for (std::size_t s = 0; s < g.object_count(); ++s) {
    if (label[s] != g.object_count()) continue;
    std::deque<std::size_t> q{s};
    label[s] = next;
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop_front();
      for (const Morphism& m : g.generators()) {
        for (auto [a, b] : {std::pair{m.src, m.dst}, std::pair{m.dst, m.src}}) {
          if (a == v && label[b] == g.object_count()) {
            label[b] = next;
            q.push_back(b);
          }
        }
      }
    }
    ++next;
  }
  return label;
}

ElementSet set(std::initializer_list<std::size_t> xs) {
  ElementSet s;
  for (std::size_t x : xs) s.insert(x);
  return s;
}

}  // namespace

TEST_CASE("components") {
  CHECK(component_count(FiniteGroupoid::discrete(names(3))) == 3);
  CHECK(component_count(FiniteGroupoid::group({{1, 2, 0}}, 3)) == 1);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const FiniteGroupoid g = random_groupoid(rng, 1 + i % 6, i % 4, 1 + i % 3);
    CHECK(g.validate().empty());
    CHECK(connected_components(g) == reachability_components(g));
  }
}

TEST_CASE("group closure sizes") {
  const FiniteGroupoid s3 = FiniteGroupoid::group({{1, 0, 2}, {1, 2, 0}}, 3);
  CHECK(s3.morphism_count() == 6);
  CHECK(s3.validate().empty());
  CHECK_THROWS_AS(FiniteGroupoid::group({{1, 0, 2, 3, 4, 5}, {1, 2, 3, 4, 5, 0}}, 6), BoundExceeded);
  CHECK_THROWS_AS(FiniteGroupoid::group({{0, 0, 2}}, 3), InputError);
  const FiniteGroupoid pair = FiniteGroupoid::generate({"a", "b"}, 2, {{0, 1, {1, 0}}});
  // Two identities and the swap in each direction.
  CHECK(pair.morphism_count() == 4);
  CHECK(FiniteGroupoid::product(s3, pair).morphism_count() == 24);
}

TEST_CASE("transports along a collapsing functor") {
  auto two = share(FiniteGroupoid::discrete({"c1", "c2"}));
  auto one = share(FiniteGroupoid::discrete({"c"}));
  const GroupoidFunctor f = GroupoidFunctor::from_generators(two, one, {0, 0}, {});
  CHECK(lambda_transport(f, set({0})) == set({0}));
  CHECK(lambda_transport(f, set({1})) == set({0}));
  CHECK(tau_transport(f, set({0})) == set({0, 1}));
  CHECK(tau_transport(f, ElementSet{}) == ElementSet{});
  const AdjunctionReport r = check_adjunction_and_section(f);
  CHECK(r.ok());
  CHECK(r.surjective);
  CHECK(r.section);
  // The image of a meet is not the meet of the images here.
  CHECK(lambda_transport(f, set({0}) & set({1})) != (lambda_transport(f, set({0})) & lambda_transport(f, set({1}))));
}

TEST_CASE("identity functor") {
  std::mt19937_64 rng(2);
  auto g = share(random_groupoid(rng, 5, 3, 2));
  const GroupoidFunctor id = GroupoidFunctor::identity(g);
  const std::size_t c = component_count(*g);
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << c); ++a) {
    CHECK(lambda_transport(id, ElementSet(a)) == ElementSet(a));
    CHECK(tau_transport(id, ElementSet(a)) == ElementSet(a));
  }
  CHECK(check_adjunction_and_section(id).ok());
  CHECK(is_fibration(id));
}

TEST_CASE("non-surjective functor reports a witness") {
  auto one = share(FiniteGroupoid::discrete({"a"}));
  auto two = share(FiniteGroupoid::discrete({"x", "y"}));
  const GroupoidFunctor f = GroupoidFunctor::from_generators(one, two, {0}, {});
  const AdjunctionReport r = check_adjunction_and_section(f);
  CHECK_FALSE(r.surjective);
  CHECK_FALSE(r.section);
  REQUIRE(r.section_witness.has_value());
  CHECK(lambda_transport(f, tau_transport(f, *r.section_witness)) != *r.section_witness);
  CHECK(r.ok());
}

TEST_CASE("adjunction on random functors") {
  std::mt19937_64 rng(3);
  std::size_t surjective = 0;
  for (int i = 0; i < 150; ++i) {
    auto target = share(random_groupoid(rng, 1 + i % 6, i % 3, 2));
    const GroupoidFunctor f = label_functor(rng, target, 1 + i % 6, i % 4);
    CHECK(f.validate().empty());
    const AdjunctionReport r = check_adjunction_and_section(f);
    CHECK(r.adjunction);
    CHECK(r.unit);
    CHECK(r.counit);
    CHECK(r.lambda_lattice);
    CHECK(r.tau_boolean);
    CHECK(r.section == r.surjective);
    surjective += r.surjective ? 1 : 0;
    if (r.surjective) {
      const std::size_t nt = component_count(f.target());
      for (std::uint64_t q = 0; q < (std::uint64_t{1} << nt); ++q) {
        CHECK(lambda_transport(f, tau_transport(f, ElementSet(q))) == ElementSet(q));
      }
    }
  }
  CHECK(surjective > 10);
}

TEST_CASE("functor validation rejects inconsistent generator images") {
  auto c3 = share(FiniteGroupoid::group({{1, 2, 0}}, 3));
  auto c2 = share(FiniteGroupoid::group({{1, 0}}, 2));
  // A generator of order 3 cannot go to an element of order 2.
  CHECK_THROWS_AS(GroupoidFunctor::from_generators(c3, c2, {0}, {{0, 0, {1, 0}}}), StructureError);
  CHECK_NOTHROW(GroupoidFunctor::from_generators(c3, c2, {0}, {{0, 0, {0, 1}}}));
}

TEST_CASE("fibrations") {
  auto s3 = share(FiniteGroupoid::group({{1, 0, 2}, {1, 2, 0}}, 3));
  auto c3 = share(FiniteGroupoid::group({{1, 2, 0}}, 3));
  const GroupoidFunctor inclusion = GroupoidFunctor::from_generators(c3, s3, {0}, {{0, 0, {1, 2, 0}}});
  CHECK_FALSE(is_fibration(inclusion));
  auto s3b = share(FiniteGroupoid::group({{1, 2, 0}, {1, 0, 2}}, 3));
  const GroupoidFunctor onto =
      GroupoidFunctor::from_generators(s3b, s3, {0}, {{0, 0, {1, 2, 0}}, {0, 0, {1, 0, 2}}});
  CHECK(is_fibration(onto));

  std::mt19937_64 rng(4);
  auto a = share(random_groupoid(rng, 2, 2, 2));
  auto b = share(FiniteGroupoid::generate({"p", "q"}, 1, {{0, 1, {0}}}));
  auto ab = share(FiniteGroupoid::product(*a, *b));
  const GroupoidFunctor p1 = GroupoidFunctor::projection(ab, a, false);
  const GroupoidFunctor p2 = GroupoidFunctor::projection(ab, b, true);
  CHECK(p1.validate().empty());
  CHECK(is_fibration(p1));
  CHECK(is_fibration(p2));
  CHECK(is_multi_fibration({p1, p2}));

  // Composites of fibrations.
  for (int i = 0; i < 60; ++i) {
    auto g0 = share(random_groupoid(rng, 1 + i % 3, 2, 2));
    const GroupoidFunctor f1 = label_functor(rng, g0, 1 + i % 4, 3);
    const GroupoidFunctor f2 = label_functor(rng, f1.source_ptr(), 1 + i % 4, 3);
    if (is_fibration(f1) && is_fibration(f2)) CHECK(is_fibration(compose(f1, f2)));
  }
}

TEST_CASE("orbits and stabilizers") {
  const OrbitReport trivial = group_action_orbits({}, 4);
  CHECK(trivial.group_order == 1);
  CHECK(trivial.orbits.size() == 4);
  const OrbitReport swap = group_action_orbits({{1, 0}}, 2);
  REQUIRE(swap.orbits.size() == 1);
  CHECK(swap.orbits[0].points.size() == 2);
  CHECK(swap.orbits[0].stabilizer_order == 1);
  CHECK_THROWS_AS(group_action_orbits({{0, 0}}, 2), InputError);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 1 + i % 7;
    std::vector<Perm> gens;
    for (int k = 0; k < i % 3; ++k) gens.push_back(random_perm(rng, n));
    const OrbitReport r = group_action_orbits(gens, n);
    std::size_t total = 0;
    for (const Orbit& o : r.orbits) {
      total += o.points.size();
      CHECK(o.points.size() * o.stabilizer_order == r.group_order);
    }
    CHECK(total == n);
  }
}

TEST_CASE("set-valued fibrant objects") {
  using presheaf::Presheaf;
  // Two-element chain: element "1" below "0", map F(0) -> F(1).
  const FinitePoset shadok = FinitePoset::from_named_relation({"0", "1"}, {{"1", "0"}});
  CHECK(check_fibrant_injective(Presheaf::make(shadok, {3, 2}, {{{1, 0}, {0, 1, 1}}})).fibrant());
  CHECK_FALSE(check_fibrant_injective(Presheaf::make(shadok, {3, 2}, {{{1, 0}, {0, 0, 0}}})).fibrant());
  CHECK_FALSE(check_fibrant_injective(Presheaf::make(shadok, {0, 2}, {{{1, 0}, {}}})).fibrant());

  // Confluence: 1 <= 0 and 2 <= 0, F(0) = {a, b}, F(1) x F(2) has two tuples.
  const FinitePoset confluence = FinitePoset::from_named_relation({"0", "1", "2"}, {{"1", "0"}, {"2", "0"}});
  const auto bad = check_fibrant_injective(Presheaf::make(confluence, {2, 2, 1}, {{{1, 0}, {0, 0}}, {{2, 0}, {0, 0}}}));
  CHECK_FALSE(bad.fibrant());
  CHECK(bad.elements[0].condition == "multi-fibration");
  CHECK_FALSE(bad.elements[0].ok);
  CHECK(check_fibrant_injective(Presheaf::make(confluence, {2, 2, 1}, {{{1, 0}, {0, 1}}, {{2, 0}, {0, 0}}})).fibrant());
  // Each factor surjective but the pairing is not.
  CHECK_FALSE(
      check_fibrant_injective(Presheaf::make(confluence, {2, 2, 2}, {{{1, 0}, {0, 1}}, {{2, 0}, {0, 1}}})).fibrant());

  // Divergence: 0 <= 1 and 0 <= 2, maps F(1) -> F(0) and F(2) -> F(0).
  const FinitePoset divergence = FinitePoset::from_named_relation({"0", "1", "2"}, {{"0", "1"}, {"0", "2"}});
  CHECK(check_fibrant_injective(Presheaf::make(divergence, {2, 2, 3}, {{{0, 1}, {1, 0}}, {{0, 2}, {0, 1, 1}}})).fibrant());
  CHECK_FALSE(
      check_fibrant_injective(Presheaf::make(divergence, {2, 2, 3}, {{{0, 1}, {1, 1}}, {{0, 2}, {0, 1, 1}}})).fibrant());
}

TEST_CASE("groupoid stacks: fibrancy and coherence") {
  std::mt19937_64 rng(6);
  auto a = share(FiniteGroupoid::group({{1, 0}}, 2));
  auto b = share(FiniteGroupoid::group({{1, 2, 0}}, 3));
  auto ab = share(FiniteGroupoid::product(*a, *b));
  const FinitePoset confluence = FinitePoset::from_named_relation({"0", "1", "2"}, {{"1", "0"}, {"2", "0"}});
  std::map<IndexPair, GroupoidFunctor> glue;
  glue.emplace(IndexPair{1, 0}, GroupoidFunctor::projection(ab, a, false));
  glue.emplace(IndexPair{2, 0}, GroupoidFunctor::projection(ab, b, true));
  const StackOverPoset good = StackOverPoset::make(confluence, {ab, a, b}, glue);
  CHECK(check_fibrant_injective(good).fibrant());

  // Diagonal into a product of two copies of C2 is not a multi-fibration.
  auto a2 = share(FiniteGroupoid::group({{1, 0}}, 2));
  const GroupoidFunctor d1 = GroupoidFunctor::identity(a);
  const GroupoidFunctor d2 = GroupoidFunctor::from_generators(a, a2, {0}, {{0, 0, {1, 0}}});
  std::map<IndexPair, GroupoidFunctor> diag;
  diag.emplace(IndexPair{1, 0}, d1);
  diag.emplace(IndexPair{2, 0}, d2);
  const FibrantReport r = check_fibrant_injective(StackOverPoset::make(confluence, {a, a, a2}, diag));
  CHECK_FALSE(r.fibrant());
  CHECK_FALSE(r.elements[0].ok);
  CHECK(r.elements[1].ok);

  // Two paths x <= u <= y and x <= v <= y with different composites.
  const FinitePoset square =
      FinitePoset::from_named_relation({"x", "u", "v", "y"}, {{"x", "u"}, {"x", "v"}, {"u", "y"}, {"v", "y"}});
  auto c2 = share(FiniteGroupoid::group({{1, 0}}, 2));
  auto flip = [&](GPtr s, GPtr t) { return GroupoidFunctor::from_generators(s, t, {0}, {{0, 0, {1, 0}}}); };
  auto trivial = [&](GPtr s, GPtr t) { return GroupoidFunctor::from_generators(s, t, {0}, {{0, 0, {0, 1}}}); };
  auto gx = share(FiniteGroupoid::group({{1, 0}}, 2));
  auto gu = share(FiniteGroupoid::group({{1, 0}}, 2));
  auto gv = share(FiniteGroupoid::group({{1, 0}}, 2));
  std::map<IndexPair, GroupoidFunctor> sq;
  sq.emplace(IndexPair{0, 1}, flip(gu, gx));
  sq.emplace(IndexPair{0, 2}, flip(gv, gx));
  sq.emplace(IndexPair{1, 3}, flip(c2, gu));
  sq.emplace(IndexPair{2, 3}, trivial(c2, gv));
  CHECK_THROWS_AS(StackOverPoset::make(square, {gx, gu, gv, c2}, sq), StructureError);
  sq.erase(IndexPair{2, 3});
  sq.emplace(IndexPair{2, 3}, flip(c2, gv));
  CHECK_NOTHROW(StackOverPoset::make(square, {gx, gu, gv, c2}, sq));
}
