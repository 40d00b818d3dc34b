#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "sheafnet/carnap.hpp"

using namespace sheafnet;
using namespace sheafnet::carnap;

namespace {

std::size_t order_of(const Perm& p) {
  Perm cur = p;
  std::size_t k = 1;
  while (cur != identity_perm(p.size())) {
    cur = compose(p, cur);
    ++k;
  }
  return k;
}

const NamedPerm& generator(const SymmetryGroup& g, const std::string& name) {
  const auto it = std::find_if(g.generators.begin(), g.generators.end(), [&](const NamedPerm& np) { return np.name == name; });
  REQUIRE(it != g.generators.end());
  return *it;
}

}  // namespace

TEST_CASE("one subject, one binary attribute") {
  const CarnapLanguage lang = build_language(1, {2});
  CHECK(lang.state_count() == 2);
  const SymmetryGroup g = build_symmetry_group(lang);
  CHECK(g.order() == 2);
  const OrbitTypeReport rep = orbit_report(lang, g);
  REQUIRE(rep.orbits.size() == 1);
  CHECK(rep.orbits[0].states.size() == 2);
}

TEST_CASE("three subjects with gender and age") {
  const CarnapLanguage lang = build_language(3, {2, 2}, {"A", "G"});
  CHECK(lang.state_count() == 64);
  CHECK(lang.proposition_count_log2() == 64);
  CHECK(lang.label(0) == "A1G1,A1G1,A1G1");
  CHECK(lang.label(63) == "A2G2,A2G2,A2G2");
  for (std::size_t s = 0; s < 64; ++s) {
    std::vector<std::size_t> a;
    for (std::size_t subj = 0; subj < 3; ++subj) {
      for (std::size_t v : lang.profile(s, subj)) a.push_back(v);
    }
    CHECK(lang.state_index(a) == s);
  }

  const SymmetryGroup g = build_symmetry_group(lang);
  CHECK(g.order() == 48);

  // Independent construction: subject permutations times the isometries of
  // the value square, found by filtering all 24 relabellings of the four profiles.
  std::set<Perm> expected;
  Perm subj{0, 1, 2};
  std::vector<Perm> square;
  Perm prof{0, 1, 2, 3};  // profile index = 2 * A + G
  do {
    bool iso = true;
    for (std::size_t x = 0; x < 4; ++x) {
      for (std::size_t y = 0; y < 4; ++y) {
        iso = iso && (std::popcount(x ^ y) == std::popcount(prof[x] ^ prof[y]));
      }
    }
    if (iso) square.push_back(prof);
  } while (std::next_permutation(prof.begin(), prof.end()));
  CHECK(square.size() == 8);
  do {
    for (const Perm& sq : square) {
      Perm e(64);
      for (std::size_t s = 0; s < 64; ++s) {
        std::vector<std::size_t> img(6);
        for (std::size_t k = 0; k < 3; ++k) {
          const std::size_t p = sq[2 * lang.value(s, k, 0) + lang.value(s, k, 1)];
          img[2 * subj[k]] = p / 2;
          img[2 * subj[k] + 1] = p % 2;
        }
        e[s] = lang.state_index(img);
      }
      expected.insert(e);
    }
  } while (std::next_permutation(subj.begin(), subj.end()));
  CHECK(expected.size() == 48);
  CHECK(std::set<Perm>(g.elements.begin(), g.elements.end()) == expected);

  const Perm& sigma = generator(g, "(A G)").perm;
  const Perm& sa = generator(g, "(A1 A2)").perm;
  const Perm& sg = generator(g, "(G1 G2)").perm;
  const Perm kappa = compose(sigma, sa);
  CHECK(order_of(kappa) == 4);
  CHECK(compose(sa, sg) == compose(kappa, kappa));
  CHECK(compose(sigma, sa) == compose(sg, sigma));
  CHECK(group_closure({sigma, sa, sg}, 64).size() == 8);

  const OrbitTypeReport rep = orbit_report(lang, g);
  CHECK(rep.group_order == 48);
  CHECK(rep.types_consistent);
  std::map<std::string, std::pair<std::size_t, std::size_t>> by_type;
  std::size_t total = 0;
  for (const StateOrbit& o : rep.orbits) {
    CHECK(by_type.count(o.type) == 0);
    by_type[o.type] = {o.states.size(), o.stabilizer_order};
    CHECK(o.states.size() * o.stabilizer_order == 48);
    total += o.states.size();
  }
  CHECK(total == 64);
  CHECK(by_type.size() == 4);
  CHECK(by_type["I"] == std::pair<std::size_t, std::size_t>{4, 12});
  CHECK(by_type["II"] == std::pair<std::size_t, std::size_t>{24, 2});
  CHECK(by_type["III"] == std::pair<std::size_t, std::size_t>{12, 4});
  CHECK(by_type["IV"] == std::pair<std::size_t, std::size_t>{24, 2});

  const SimpleReport simples = simple_propositions(lang, g);
  CHECK(simples.simples.size() == 12);
  CHECK(simples.self_dual == std::optional<bool>(true));
  CHECK(simples.single_orbit);
  CHECK(simples.orbit_size == 12);
  CHECK(simples.simples[0].label == "aA1");
}

TEST_CASE("contents in the gender and age language") {
  const CarnapLanguage lang = build_language(3, {2, 2}, {"A", "G"});
  Proposition e = lang.empty_proposition();
  e.set(17);
  CHECK(lang.content(e) == 63);
  CHECK(lang.content(~e) == 1);
  CHECK(lang.content(~lang.empty_proposition()) == 0);
  const SymmetryGroup g = build_symmetry_group(lang);
  const SimpleReport simples = simple_propositions(lang, g);
  // A simple fixes one binary attribute of one subject: half the states.
  for (const Simple& sp : simples.simples) CHECK(lang.content(sp.states) == 32);
}

TEST_CASE("uniform measure is invariant") {
  const CarnapLanguage lang = build_language(3, {2, 2}, {"A", "G"});
  const SymmetryGroup g = build_symmetry_group(lang);
  const info::BooleanLanguage bl = lang.boolean_language();
  std::mt19937_64 rng(13);
  auto to_set = [](const Proposition& p) {
    ElementSet s;
    for (std::size_t i = p.find_first(); i != Proposition::npos; i = p.find_next(i)) s.insert(i);
    return s;
  };
  for (int i = 0; i < 100; ++i) {
    Proposition t(64, rng());
    t.set(static_cast<std::size_t>(i % 64));
    for (const Perm& e : g.elements) {
      const Proposition gt = act(e, t);
      CHECK(lang.content(gt) == lang.content(t));
      CHECK(info::psi_cbh(bl, to_set(gt)) == info::psi_cbh(bl, to_set(t)));
    }
  }
}

TEST_CASE("general languages") {
  CHECK_THROWS_AS(build_language(0, {2}), InputError);
  CHECK_THROWS_AS(build_language(2, {0}), InputError);
  CHECK_THROWS_AS(build_language(20, {2, 2}), BoundExceeded);
  CHECK_THROWS_AS(build_language(2, {2, 3}, {"A"}), InputError);
  const CarnapLanguage tri = build_language(2, {3});
  const SymmetryGroup gt = build_symmetry_group(tri);
  CHECK(gt.order() == 12);
  const SimpleReport st = simple_propositions(tri, gt);
  CHECK(st.simples.size() == 6);
  CHECK_FALSE(st.self_dual.has_value());
  CHECK(st.single_orbit);
  CHECK_THROWS_AS(attribute_swap(build_language(1, {2, 3}), 0, 1), InputError);
  for (std::size_t n = 1; n <= 3; ++n) {
    for (const auto& counts : std::vector<std::vector<std::size_t>>{{2}, {3}, {2, 2}, {2, 3}, {2, 2, 2}}) {
      const CarnapLanguage lang = build_language(n, counts);
      if (lang.state_count() > 512) continue;
      const SymmetryGroup g = build_symmetry_group(lang);
      const OrbitTypeReport rep = orbit_report(lang, g);
      std::size_t total = 0;
      for (const StateOrbit& o : rep.orbits) {
        total += o.states.size();
        CHECK(o.states.size() * o.stabilizer_order == g.order());
      }
      CHECK(total == lang.state_count());
      CHECK(rep.types_consistent);
    }
  }
}
