#include <doctest.h>

#include <cmath>
#include <random>

#include "sheafnet/seminfo.hpp"
#include "support.hpp"

using namespace sheafnet;
using namespace sheafnet::info;
using heyting::ChainSubobject;
using heyting::InjectiveChain;

namespace {

ElementSet set(std::initializer_list<std::size_t> xs) {
  ElementSet s;
  for (std::size_t x : xs) s.insert(x);
  return s;
}

ElementSet random_subset(std::mt19937_64& rng, ElementSet within) {
  ElementSet out;
  for (std::size_t i : within.members()) {
    if (rng() & 1U) out.insert(i);
  }
  return out;
}

BooleanLanguage random_language(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> w(0.1, 3.0);
  std::vector<double> m;
  for (std::size_t i = 0; i < n; ++i) m.push_back(w(rng));
  return BooleanLanguage::make(BooleanLanguage::uniform(n).labels(), m);
}

/// Largest V with V and Q below T, by enumeration of all subsets.
ElementSet brute_implication(std::size_t n, ElementSet q, ElementSet t) {
  ElementSet best;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
    const ElementSet v(b);
    if ((v & q).subset_of(t)) best = best | v;
  }
  return best;
}

}  // namespace

TEST_CASE("extended reals") {
  const ExtendedReal ninf = ExtendedReal::neg_infinity();
  CHECK((ninf + ExtendedReal(1.0)) == ninf);
  CHECK_THROWS_AS(ninf - ninf, IndeterminateError);
  CHECK_THROWS_AS(ninf + ExtendedReal::pos_infinity(), IndeterminateError);
  CHECK_THROWS_AS(ninf.finite_value(), IndeterminateError);
  CHECK(log_ratio(0, 2) == ninf);
  CHECK(ninf < ExtendedReal(-1e300));
}

TEST_CASE("Boolean conditioning") {
  const BooleanAlgebra alg = boolean_algebra(4);
  // States 1..4 are indices 0..3.
  CHECK(alg.condition(set({0}), set({0, 1})) == set({0, 2, 3}));
  CHECK(alg.condition(set({0}), set({0, 1})) == brute_implication(4, set({0, 1}), set({0})));
  for (std::uint64_t t = 0; t < 16; ++t) {
    CHECK(alg.condition(ElementSet(t), alg.top) == ElementSet(t));
    CHECK(alg.condition(alg.top, ElementSet(t)) == alg.top);
    for (std::uint64_t q = 0; q < 16; ++q) CHECK(alg.implies(ElementSet(q), ElementSet(t)) == brute_implication(4, ElementSet(q), ElementSet(t)));
  }
}

TEST_CASE("conditioning is a monoid action") {
  for (std::size_t n = 1; n <= 5; ++n) {
    const BooleanAlgebra alg = boolean_algebra(n);
    const auto props = all_propositions(n);
    for (const auto& t : props) {
      for (const auto& q : props) {
        CHECK(t.subset_of(alg.condition(t, q)));
        for (const auto& r : props) CHECK(alg.condition(alg.condition(t, q), r) == alg.condition(t, alg.meet(q, r)));
      }
    }
  }
  const InjectiveChain e = InjectiveChain::from_depths({0, 1, 1}, 1);
  const ChainAlgebra alg = chain_algebra(e);
  const auto props = all_propositions(e);
  CHECK(props.size() == 2 * 3 * 3);
  for (const auto& t : props) {
    CHECK(alg.condition(t, alg.top) == t);
    for (const auto& q : props) {
      CHECK(alg.leq(t, alg.condition(t, q)));
      for (const auto& r : props) CHECK(alg.condition(alg.condition(t, q), r) == alg.condition(t, alg.meet(q, r)));
    }
  }
}

TEST_CASE("content and Carnap-Bar-Hillel precision") {
  const BooleanLanguage l64 = BooleanLanguage::uniform(64);
  CHECK(l64.content(set({5})) == 63);
  CHECK(l64.content(l64.all() - set({5})) == 1);
  CHECK(l64.content(l64.all()) == 0);
  CHECK(l64.content(ElementSet{}) == 64);
  CHECK(psi_cbh(l64, l64.all()) == ExtendedReal(0.0));
  CHECK(psi_cbh(l64, set({5})).value() == doctest::Approx(std::log(1.0 / 64)).epsilon(1e-14));
  const BooleanLanguage l4 = BooleanLanguage::uniform(4);
  CHECK(psi_cbh(l4, set({0, 1})).value() == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(psi_cbh(l4, ElementSet{}) == ExtendedReal::neg_infinity());

  CHECK(psi_localized(l4, set({0, 1, 2}), set({3})) == ExtendedReal(0.0));
  CHECK(psi_localized(l4, set({0}), set({3})).value() == doctest::Approx(std::log(1.0 / 3)).epsilon(1e-14));
  CHECK(psi_localized(l4, set({0}), ElementSet{}) == psi_cbh(l4, set({0})));
  CHECK_THROWS_AS(psi_localized(l4, set({3}), set({3})), InputError);

  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const BooleanLanguage lang = random_language(rng, 1 + i % 5);
    const auto alg = boolean_algebra(lang.size());
    const auto props = all_propositions(lang.size());
    CHECK(is_strictly_increasing(alg, psi_cbh(lang), props));
    for (const auto& t : props) CHECK(psi_cbh(lang, t) <= ExtendedReal(0.0));
  }
}

TEST_CASE("chain precision") {
  const InjectiveChain e = InjectiveChain::from_depths({1, 0}, 1);  // {x} <= {x, y}
  const DeltaSequence d = DeltaSequence::make({1.0, 0.5});
  CHECK(psi_delta(e, heyting::chain_bottom(e), d) == 0.0);
  CHECK(psi_delta(e, heyting::chain_top(e), d) == 2.5);
  CHECK(psi_delta(e, heyting::chain_top(e), d, {2.0, 1.0}) == 4.0);
  CHECK_THROWS_AS(DeltaSequence::make({1.0, 0.6, 0.5}), InputError);
  CHECK_THROWS_AS(DeltaSequence::make({1.0, 1.0}), InputError);
  CHECK_NOTHROW(DeltaSequence::dyadic(6));
  CHECK_THROWS_AS(psi_delta(e, heyting::chain_top(e), DeltaSequence::dyadic(3)), InputError);

  const ChainAlgebra alg = chain_algebra(e);
  const auto props = all_propositions(e);
  const Precision<ChainSubobject> psi = [&](const ChainSubobject& t) { return ExtendedReal(psi_delta(e, t, d)); };
  CHECK(is_strictly_increasing(alg, psi, props));

  // With one level the algebra is Boolean and the double differences are non-negative.
  const InjectiveChain flat = InjectiveChain::from_depths({0, 0, 0}, 0);
  const ChainAlgebra falg = chain_algebra(flat);
  const Precision<ChainSubobject> fpsi = [&](const ChainSubobject& t) {
    return ExtendedReal(psi_delta(flat, t, DeltaSequence::dyadic(0)));
  };
  CHECK(check_concavity(falg, fpsi, concavity_domain(falg, all_propositions(flat))).min_value >= 0.0);
}

TEST_CASE("chain precision is not concave beyond one level") {
  // One point present at both levels: the subobjects form the chain 0 < a < 1.
  const InjectiveChain e = InjectiveChain::from_depths({1}, 1);
  const ChainAlgebra alg = chain_algebra(e);
  const ChainSubobject zero = heyting::chain_bottom(e);
  const ChainSubobject a{ElementSet::singleton(0), ElementSet{}};
  const ChainSubobject one = heyting::chain_top(e);
  CHECK(alg.condition(zero, a) == zero);
  CHECK(alg.condition(a, a) == one);
  for (const auto& delta : {DeltaSequence::make({1.0, 0.5}), DeltaSequence::make({5.0, 0.01})}) {
    const Precision<ChainSubobject> psi = [&](const ChainSubobject& t) { return ExtendedReal(psi_delta(e, t, delta)); };
    // I(a; 0, a) = -(psi(1) - psi(a)) = -delta_1.
    CHECK(double_difference(alg, psi, a, zero, a).value() == doctest::Approx(-delta.values()[1]).epsilon(1e-12));
    const auto rep = check_concavity(alg, psi, concavity_domain(alg, all_propositions(e)));
    CHECK(rep.min_value == doctest::Approx(-delta.values()[1]).epsilon(1e-12));
  }
  // Any strictly increasing function fails the same way, the logarithm included.
  const InjectiveChain e2 = InjectiveChain::from_depths({1, 0}, 1);
  const ChainAlgebra alg2 = chain_algebra(e2);
  const Precision<ChainSubobject> lg = [&](const ChainSubobject& t) {
    return psi_log_delta(e2, t, DeltaSequence::dyadic(1));
  };
  const auto rep = check_concavity(alg2, lg, concavity_domain(alg2, all_propositions(e2)));
  CHECK(rep.min_value < 0.0);
  REQUIRE(rep.witness.has_value());
  CHECK(double_difference(alg2, lg, rep.witness->q, rep.witness->t, rep.witness->t2).value() == rep.min_value);
}

TEST_CASE("ambiguity") {
  const BooleanLanguage l = BooleanLanguage::uniform({"00", "01", "10", "11"});
  const BooleanAlgebra alg = boolean_algebra(4);
  const auto psi = psi_cbh(l);
  const ElementSet s = l.proposition({"00", "01"});
  const ElementSet q = l.proposition({"01", "11"});
  CHECK(ambiguity(alg, psi, s, q).value() == doctest::Approx(std::log(1.5)).epsilon(1e-14));
  CHECK(ambiguity(alg, psi, s, alg.top) == ExtendedReal(0.0));

  // Over Q >= P the ambiguity of S <= not P peaks at Q = P, where S|P = not P.
  const auto props = all_propositions(4);
  for (const auto& p : props) {
    const ElementSet np = alg.negate(p);
    for (const auto& th : props) {
      if (!th.subset_of(np) || th.empty()) continue;
      double best = -1.0;
      for (const auto& qq : props) {
        if (p.subset_of(qq)) best = std::max(best, ambiguity(alg, psi, th, qq).value());
      }
      CHECK(alg.condition(th, p) == np);
      CHECK(best == (psi(np) - psi(th)).value());
    }
  }
}

TEST_CASE("cocycle identity") {
  std::mt19937_64 rng(8);
  for (bool localized : {false, true}) {
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const std::size_t n = 2 + i % 15;
      const BooleanLanguage lang = random_language(rng, n);
      const BooleanAlgebra alg = boolean_algebra(n);
      ElementSet p = localized ? random_subset(rng, lang.all()) : ElementSet{};
      if (p == lang.all()) p.erase(0);
      const ElementSet np = lang.all() - p;
      const Precision<ElementSet> psi = localized ? psi_localized(lang, p) : psi_cbh(lang);
      std::vector<CocycleSample<ElementSet>> samples;
      while (samples.size() < 50) {
        ElementSet sv = random_subset(rng, np);
        if (sv.empty()) continue;
        samples.push_back({sv, p | random_subset(rng, lang.all()), p | random_subset(rng, lang.all())});
      }
      samples.push_back({samples[0].s, samples[0].q, alg.top});
      samples.push_back({samples[0].s, samples[0].q, samples[0].q});
      const auto rep = check_cocycle(alg, coboundary(alg, psi), samples, &psi);
      worst = std::max(worst, rep.max_residual);
      CHECK(rep.within(1e-12));
    }
    CHECK(worst <= 1e-12);
  }

  // A cochain that is not a coboundary of anything breaks the identity.
  const BooleanAlgebra alg = boolean_algebra(3);
  const Cochain<ElementSet> bogus = [](ElementSet q, ElementSet s) {
    return ExtendedReal(static_cast<double>(q.size() * 3 + s.size()));
  };
  std::vector<CocycleSample<ElementSet>> samples{{set({0}), set({1}), set({2})}};
  CHECK(check_cocycle(alg, bogus, samples).max_residual > 0.5);
}

TEST_CASE("mutual information") {
  const BooleanLanguage a = BooleanLanguage::uniform({"a0", "a1", "a2"});
  const BooleanLanguage b = BooleanLanguage::make({"b0", "b1"}, {1.0, 2.0});
  const BooleanLanguage ab = BooleanLanguage::product(a, b);
  const BooleanAlgebra alg = boolean_algebra(ab.size());
  const auto psi = psi_cbh(ab);
  const auto props = all_propositions(ab.size());
  std::vector<ElementSet> first;
  std::vector<ElementSet> second;
  for (std::uint64_t m = 0; m < 8; ++m) {
    ElementSet e;
    for (std::size_t i = 0; i < 3; ++i) {
      if ((m >> i) & 1U) e = e | ElementSet(std::uint64_t{3} << (2 * i));
    }
    first.push_back(e);
  }
  for (std::uint64_t m = 0; m < 4; ++m) {
    ElementSet e;
    for (std::size_t j = 0; j < 2; ++j) {
      if ((m >> j) & 1U) e = e | ElementSet(std::uint64_t{0b010101} << j);
    }
    second.push_back(e);
  }
  double min_i = 1.0;
  for (const auto& t : props) {
    if (t.empty()) continue;
    CHECK(mutual_information(alg, psi, t, first[3], alg.top) == ExtendedReal(0.0));
    const ExtendedReal same = mutual_information(alg, psi, t, first[5], first[5]);
    const ExtendedReal viaphi = ambiguity(alg, psi, t, first[5]) - ambiguity(alg, psi, alg.condition(t, first[5]), first[5]);
    CHECK(same.value() == doctest::Approx(viaphi.value()).epsilon(1e-12));
    for (const auto& q1 : first) {
      for (const auto& q2 : second) {
        const ExtendedReal i12 = mutual_information(alg, psi, t, q1, q2);
        CHECK(i12 == mutual_information(alg, psi, t, q2, q1));
        min_i = std::min(min_i, i12.value());
      }
    }
  }
  CHECK(min_i >= -1e-12);
}

TEST_CASE("Kullback-Leibler analog") {
  std::mt19937_64 rng(9);
  const BooleanLanguage lang = random_language(rng, 8);
  const BooleanAlgebra alg = boolean_algebra(8);
  const auto psi = psi_cbh(lang);
  for (int i = 0; i < 2000; ++i) {
    const ElementSet s0 = random_subset(rng, lang.all()) | ElementSet::singleton(0);
    const ElementSet s1 = random_subset(rng, lang.all()) | ElementSet::singleton(0);
    const ElementSet q = random_subset(rng, lang.all());
    CHECK(kl_divergence(alg, psi, q, s0, s0) == ExtendedReal(0.0));
    CHECK(kl_divergence(alg, psi, alg.top, s0, s1) == ExtendedReal(0.0));
    CHECK(kl_divergence(alg, psi, q, s0, s1).value() >= -1e-12);
    CHECK(kl_distance(alg, psi, q, s0, s1) == kl_distance(alg, psi, q, s1, s0));
  }
}

TEST_CASE("concavity checks") {
  for (std::size_t n = 1; n <= 5; ++n) {
    const BooleanLanguage lang = BooleanLanguage::uniform(n);
    const BooleanAlgebra alg = boolean_algebra(n);
    const auto rep = check_concavity(alg, psi_cbh(lang), concavity_domain(alg, all_propositions(n)));
    CHECK(rep.samples > 0);
    CHECK(rep.concave(0.0));
  }
  std::mt19937_64 rng(10);
  for (int i = 0; i < 40; ++i) {
    const std::size_t n = 6 + i % 7;
    const BooleanLanguage lang = random_language(rng, n);
    const BooleanAlgebra alg = boolean_algebra(n);
    std::vector<ConcavitySample<ElementSet>> samples;
    for (int k = 0; k < 500; ++k) {
      const ElementSet p = random_subset(rng, lang.all());
      const ElementSet t2 = random_subset(rng, lang.all() - p);
      samples.push_back({p, p | random_subset(rng, lang.all()), random_subset(rng, t2), t2});
    }
    CHECK(check_concavity(alg, psi_cbh(lang), samples).concave(1e-12));
  }

  // Open-set cardinality is increasing but fails concavity on some finite topology.
  bool found = false;
  for (int i = 0; i < 200 && !found; ++i) {
    const FinitePoset p = testing_support::random_poset(rng, 3 + i % 4, 0.4);
    const BooleanAlgebra alg = open_set_algebra(p);
    const Precision<ElementSet> card = [](ElementSet t) { return open_cardinality(t); };
    const auto rep = check_concavity(alg, card, concavity_domain(alg, all_propositions(p)));
    if (rep.min_value < 0) {
      found = true;
      const auto& w = *rep.witness;
      CHECK(double_difference(alg, card, w.q, w.t, w.t2).value() < 0);
    }
  }
  CHECK(found);
  CHECK_THROWS_AS(check_concavity(boolean_algebra(2), psi_cbh(BooleanLanguage::uniform(2)),
                                  {{set({0}), set({0}), set({0}), set({0})}}),
                  InputError);
}

TEST_CASE("independence") {
  const BooleanLanguage a = BooleanLanguage::make({"m", "f"}, {1.0, 3.0});
  const BooleanLanguage b = BooleanLanguage::make({"y", "o"}, {2.0, 5.0});
  const BooleanLanguage ab = BooleanLanguage::product(a, b);
  const ElementSet male = ab.proposition({"m,y", "m,o"});
  const ElementSet young = ab.proposition({"m,y", "f,y"});
  const auto rep = check_independence(ab, male, young);
  CHECK(rep.independent);
  CHECK(rep.additivity_residual <= 1e-12);
  CHECK_FALSE(check_independence(ab, male, male).independent);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const BooleanLanguage lang = random_language(rng, 6);
    const ElementSet q = random_subset(rng, lang.all()) | ElementSet::singleton(0);
    const ElementSet r = random_subset(rng, lang.all()) | ElementSet::singleton(0);
    const double me = lang.total();
    const double direct = std::abs(-std::log(lang.mass(q & r) / me) + std::log(lang.mass(q) / me) + std::log(lang.mass(r) / me));
    CHECK(check_independence(lang, q, r).additivity_residual == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("conditioning preserves exclusion") {
  for (std::size_t n = 1; n <= 5; ++n) {
    const BooleanAlgebra alg = boolean_algebra(n);
    const auto props = all_propositions(n);
    for (const auto& p : props) {
      for (const auto& t : props) {
        if (!t.subset_of(alg.negate(p))) continue;
        CHECK(alg.condition(t, p) == alg.negate(p));
        for (const auto& q : props) {
          if (p.subset_of(q)) CHECK(conditioning_preserves_exclusion(alg, t, p, q));
        }
      }
    }
  }
  const BooleanAlgebra b2 = boolean_algebra(2);
  CHECK_THROWS_AS(conditioning_preserves_exclusion(b2, set({0}), set({0}), set({0})), InputError);

  for (const auto& depth : heyting::depth_profiles(1, 3)) {
    const InjectiveChain e = InjectiveChain::from_depths(depth, 1);
    const ChainAlgebra alg = chain_algebra(e);
    const auto props = all_propositions(e);
    for (const auto& p : props) {
      for (const auto& t : props) {
        if (!alg.leq(t, alg.negate(p))) continue;
        for (const auto& q : props) {
          if (alg.leq(p, q)) CHECK(conditioning_preserves_exclusion(alg, t, p, q));
        }
      }
    }
  }
}

TEST_CASE("degree zero invariants") {
  const BooleanAlgebra alg = boolean_algebra(3);
  const auto props = all_propositions(3);
  const DegreeZeroReport constant = degree_zero_report(alg, props, std::vector<double>(props.size(), 2.0));
  CHECK(constant.invariant);
  CHECK(constant.components == 1);
  CHECK(constant.constant_on_components);
  std::vector<double> sizes;
  for (const auto& p : props) sizes.push_back(static_cast<double>(p.size()));
  const DegreeZeroReport varying = degree_zero_report(alg, props, sizes);
  CHECK_FALSE(varying.invariant);
  CHECK_FALSE(varying.constant);

  std::mt19937_64 rng(12);
  for (int i = 0; i < 30; ++i) {
    const FinitePoset p = testing_support::random_poset(rng, 2 + i % 5, 0.4);
    const BooleanAlgebra oalg = open_set_algebra(p);
    const auto opens = all_propositions(p);
    const auto rep = degree_zero_report(oalg, opens, std::vector<double>(opens.size(), 0.0));
    CHECK(rep.invariant);
    CHECK(rep.components == 1);
  }
}
