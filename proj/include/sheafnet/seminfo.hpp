#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sheafnet/element_set.hpp"
#include "sheafnet/error.hpp"
#include "sheafnet/heyting.hpp"
#include "sheafnet/poset.hpp"

namespace sheafnet::info {

/// A real number or one of the two infinities; any operation whose IEEE result
/// would be NaN throws IndeterminateError instead.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  ExtendedReal(double v);  // NOLINT(google-explicit-constructor)

  static ExtendedReal neg_infinity() { return ExtendedReal(-std::numeric_limits<double>::infinity()); }
  static ExtendedReal pos_infinity() { return ExtendedReal(std::numeric_limits<double>::infinity()); }

  double value() const { return v_; }
  bool finite() const { return std::isfinite(v_); }
  /// Throws IndeterminateError unless finite.
  double finite_value() const;

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b);
  friend ExtendedReal operator-(ExtendedReal a, ExtendedReal b);
  friend ExtendedReal operator-(ExtendedReal a) { return ExtendedReal(-a.v_); }
  friend bool operator==(ExtendedReal a, ExtendedReal b) { return a.v_ == b.v_; }
  friend auto operator<=>(ExtendedReal a, ExtendedReal b) { return a.v_ <=> b.v_; }

 private:
  double v_ = 0.0;
};

/// ln of a non-negative ratio; ln 0 is -inf.
ExtendedReal log_ratio(double num, double den);

/// Finite set of elementary states with a strictly positive measure.
class BooleanLanguage {
 public:
  static BooleanLanguage make(std::vector<std::string> labels, std::vector<double> measure);
  static BooleanLanguage uniform(std::vector<std::string> labels);
  static BooleanLanguage uniform(std::size_t n);
  /// States are pairs "a,b"; the measure is the product measure.
  static BooleanLanguage product(const BooleanLanguage& a, const BooleanLanguage& b);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<double>& measure() const { return measure_; }
  std::size_t index_of(const std::string& label) const;
  ElementSet proposition(const std::vector<std::string>& labels) const;
  ElementSet all() const { return ElementSet::full(size()); }

  double mass(ElementSet s) const;
  double total() const { return total_; }
  /// Measure of the states excluded by t.
  double content(ElementSet t) const;

 private:
  std::vector<std::string> labels_;
  std::vector<double> measure_;
  double total_ = 0.0;
};

/// A Heyting algebra of propositions given by its operations. Theories are
/// propositions; conditioning is T|Q = (Q => T).
template <class Prop>
struct PropositionAlgebra {
  Prop top;
  Prop bottom;
  std::function<Prop(const Prop&, const Prop&)> meet;
  std::function<Prop(const Prop&, const Prop&)> join;
  /// implies(q, t) = (q => t).
  std::function<Prop(const Prop&, const Prop&)> implies;
  std::function<bool(const Prop&, const Prop&)> leq;

  Prop condition(const Prop& t, const Prop& q) const { return implies(q, t); }
  Prop negate(const Prop& q) const { return implies(q, bottom); }
};

using BooleanAlgebra = PropositionAlgebra<ElementSet>;
using ChainAlgebra = PropositionAlgebra<heyting::ChainSubobject>;

BooleanAlgebra boolean_algebra(std::size_t n);
/// Open (down-closed) sets of a finite poset.
BooleanAlgebra open_set_algebra(const FinitePoset& p);
ChainAlgebra chain_algebra(const heyting::InjectiveChain& e);

/// Every open set of p, enumerated under the configured bound.
std::vector<ElementSet> all_propositions(const FinitePoset& p);
std::vector<ElementSet> all_propositions(std::size_t n);
/// Every subobject of an injective chain.
std::vector<heyting::ChainSubobject> all_propositions(const heyting::InjectiveChain& e);

template <class Prop>
using Precision = std::function<ExtendedReal(const Prop&)>;

/// T|Q for Boolean propositions: T or not Q.
inline ElementSet condition(const BooleanLanguage& lang, ElementSet t, ElementSet q) { return t | (lang.all() - q); }

/// ln((c(bot) - c(T)) / c(bot)).
ExtendedReal psi_cbh(const BooleanLanguage& lang, ElementSet t);
/// ln((c(bot) - c(T)) / (c(bot) - c(not P))); requires T <= not P. P empty
/// falls back to psi_cbh.
ExtendedReal psi_localized(const BooleanLanguage& lang, ElementSet t, ElementSet p);
Precision<ElementSet> psi_cbh(const BooleanLanguage& lang);
Precision<ElementSet> psi_localized(const BooleanLanguage& lang, ElementSet p);

/// delta_0 > delta_1 > ... > delta_n > 0 with delta_k > delta_{k+1} + ... + delta_n.
class DeltaSequence {
 public:
  /// Throws InputError when the dominance hypothesis fails.
  static DeltaSequence make(std::vector<double> delta);
  /// delta_k = 2^-k for k = 0..n.
  static DeltaSequence dyadic(std::size_t n);
  const std::vector<double>& values() const { return delta_; }
  std::size_t n() const { return delta_.size() - 1; }

 private:
  std::vector<double> delta_;
};

/// sum_k delta_k mu(T_k); mu empty means mu = 1.
double psi_delta(const heyting::InjectiveChain& e, const heyting::ChainSubobject& t, const DeltaSequence& delta,
                 const std::vector<double>& mu = {});
/// ln psi_delta.
ExtendedReal psi_log_delta(const heyting::InjectiveChain& e, const heyting::ChainSubobject& t,
                           const DeltaSequence& delta, const std::vector<double>& mu = {});

/// |T| on open sets of a poset.
inline ExtendedReal open_cardinality(ElementSet t) { return ExtendedReal(static_cast<double>(t.size())); }

/// phi^Q(S) = psi(S|Q) - psi(S).
template <class Prop>
ExtendedReal ambiguity(const PropositionAlgebra<Prop>& alg, const Precision<Prop>& psi, const Prop& s, const Prop& q) {
  return psi(alg.condition(s, q)) - psi(s);
}

/// A one-cochain phi(Q, S) = phi^Q(S).
template <class Prop>
using Cochain = std::function<ExtendedReal(const Prop& q, const Prop& s)>;

template <class Prop>
Cochain<Prop> coboundary(const PropositionAlgebra<Prop>& alg, const Precision<Prop>& psi) {
  return [alg, psi](const Prop& q, const Prop& s) { return ambiguity(alg, psi, s, q); };
}

template <class Prop>
struct CocycleSample {
  Prop s;
  Prop q;
  Prop r;
};

struct CocycleReport {
  std::size_t samples = 0;
  double max_residual = 0.0;
  /// Residual against psi(S|Q) - psi(S) when a psi was supplied.
  std::optional<double> max_coboundary_residual;
  bool within(double tol) const {
    return max_residual <= tol && (!max_coboundary_residual || *max_coboundary_residual <= tol);
  }
};

/// Residual of phi^{Q and R}(S) = phi^Q(S) + phi^R(S|Q).
template <class Prop>
CocycleReport check_cocycle(const PropositionAlgebra<Prop>& alg, const Cochain<Prop>& phi,
                            const std::vector<CocycleSample<Prop>>& samples,
                            const Precision<Prop>* psi = nullptr) {
  CocycleReport rep;
  if (psi != nullptr) rep.max_coboundary_residual = 0.0;
  for (const auto& [s, q, r] : samples) {
    const ExtendedReal lhs = phi(alg.meet(q, r), s);
    const ExtendedReal rhs = phi(q, s) + phi(r, alg.condition(s, q));
    rep.max_residual = std::max(rep.max_residual, std::abs((lhs - rhs).finite_value()));
    if (psi != nullptr) {
      const double d = (phi(q, s) - ambiguity(alg, *psi, s, q)).finite_value();
      *rep.max_coboundary_residual = std::max(*rep.max_coboundary_residual, std::abs(d));
    }
    ++rep.samples;
  }
  return rep;
}

/// I = psi(T|Q1) + psi(T|Q2) - psi(T|Q1 and Q2) - psi(T).
template <class Prop>
ExtendedReal mutual_information(const PropositionAlgebra<Prop>& alg, const Precision<Prop>& psi, const Prop& t,
                                const Prop& q1, const Prop& q2) {
  // Grouped as (x + y) - (c + d) so swapping Q1, Q2 is bitwise symmetric and Q2 = top gives 0 exactly.
  return (psi(alg.condition(t, q1)) + psi(alg.condition(t, q2))) - (psi(alg.condition(t, alg.meet(q1, q2))) + psi(t));
}

/// D^Q(S0;S1) = psi(S0 and S1|Q) - psi(S0 and S1) - psi(S0|Q) + psi(S0).
template <class Prop>
ExtendedReal kl_divergence(const PropositionAlgebra<Prop>& alg, const Precision<Prop>& psi, const Prop& q,
                           const Prop& s0, const Prop& s1) {
  const Prop both = alg.meet(s0, s1);
  return ambiguity(alg, psi, both, q) - ambiguity(alg, psi, s0, q);
}

/// sigma(S0,S1) = D(S0;S1) + D(S1;S0).
template <class Prop>
ExtendedReal kl_distance(const PropositionAlgebra<Prop>& alg, const Precision<Prop>& psi, const Prop& q,
                         const Prop& s0, const Prop& s1) {
  return kl_divergence(alg, psi, q, s0, s1) + kl_divergence(alg, psi, q, s1, s0);
}

/// One double difference I_P(Q;T,T') with T <= T' <= not P and Q >= P.
template <class Prop>
struct ConcavitySample {
  Prop p;
  Prop q;
  Prop t;
  Prop t2;
};

template <class Prop>
struct ConcavityReport {
  std::size_t samples = 0;
  /// Samples skipped because some evaluation was infinite.
  std::size_t skipped = 0;
  double min_value = std::numeric_limits<double>::infinity();
  std::optional<ConcavitySample<Prop>> witness;
  bool concave(double tol) const { return min_value >= -tol; }
};

/// I_P(Q;T,T') = psi(T|Q) - psi(T) - psi(T'|Q) + psi(T').
template <class Prop>
ExtendedReal double_difference(const PropositionAlgebra<Prop>& alg, const Precision<Prop>& psi, const Prop& q,
                               const Prop& t, const Prop& t2) {
  return ambiguity(alg, psi, t, q) - ambiguity(alg, psi, t2, q);
}

template <class Prop>
ConcavityReport<Prop> check_concavity(const PropositionAlgebra<Prop>& alg, const Precision<Prop>& psi,
                                      const std::vector<ConcavitySample<Prop>>& samples) {
  ConcavityReport<Prop> rep;
  for (const auto& smp : samples) {
    if (!alg.leq(smp.t, smp.t2) || !alg.leq(smp.t2, alg.negate(smp.p)) || !alg.leq(smp.p, smp.q)) {
      throw InputError("concavity sample outside the domain T <= T' <= not P, Q >= P");
    }
    const ExtendedReal a = psi(alg.condition(smp.t, smp.q));
    const ExtendedReal b = psi(smp.t);
    const ExtendedReal c = psi(alg.condition(smp.t2, smp.q));
    const ExtendedReal d = psi(smp.t2);
    if (!a.finite() || !b.finite() || !c.finite() || !d.finite()) {
      ++rep.skipped;
      continue;
    }
    const double v = (a.value() - b.value()) - (c.value() - d.value());
    ++rep.samples;
    if (v < rep.min_value) {
      rep.min_value = v;
      rep.witness = smp;
    }
  }
  return rep;
}

/// Every (P, Q >= P, T <= T' <= not P) drawn from props.
template <class Prop>
std::vector<ConcavitySample<Prop>> concavity_domain(const PropositionAlgebra<Prop>& alg, const std::vector<Prop>& props) {
  std::vector<ConcavitySample<Prop>> out;
  for (const Prop& p : props) {
    const Prop np = alg.negate(p);
    std::vector<const Prop*> below;
    std::vector<const Prop*> above;
    for (const Prop& x : props) {
      if (alg.leq(x, np)) below.push_back(&x);
      if (alg.leq(p, x)) above.push_back(&x);
    }
    for (const Prop* q : above) {
      for (const Prop* t : below) {
        for (const Prop* t2 : below) {
          if (alg.leq(*t, *t2)) out.push_back({p, *q, *t, *t2});
        }
      }
    }
  }
  return out;
}

/// Strict monotonicity on the weakness order over props.
template <class Prop>
bool is_strictly_increasing(const PropositionAlgebra<Prop>& alg, const Precision<Prop>& psi, const std::vector<Prop>& props) {
  for (const Prop& a : props) {
    for (const Prop& b : props) {
      if (alg.leq(a, b) && !(a == b) && !(psi(a) < psi(b))) return false;
    }
  }
  return true;
}

struct IndependenceReport {
  bool independent = false;
  /// |inf(Q and R) - inf(Q) - inf(R)| with inf = -ln(m(.)/m(E)).
  double additivity_residual = 0.0;
};

/// Q, R independent when m(Q and R) m(E) = m(Q) m(R) up to a relative tolerance.
IndependenceReport check_independence(const BooleanLanguage& lang, ElementSet q, ElementSet r, double rel_tol = 1e-12);

/// Whether (T|Q) <= not P; throws InputError unless T <= not P and Q >= P.
template <class Prop>
bool conditioning_preserves_exclusion(const PropositionAlgebra<Prop>& alg, const Prop& t, const Prop& p, const Prop& q) {
  const Prop np = alg.negate(p);
  if (!alg.leq(t, np) || !alg.leq(p, q)) throw InputError("requires T <= not P and Q >= P");
  return alg.leq(alg.condition(t, q), np);
}

struct DegreeZeroReport {
  /// f(S|Q) = f(S) for every S, Q.
  bool invariant = false;
  /// Components of the graph joining S to every S|Q.
  std::size_t components = 0;
  bool constant_on_components = false;
  bool constant = false;
};

/// Values are compared exactly; f is given by its table over props.
template <class Prop>
DegreeZeroReport degree_zero_report(const PropositionAlgebra<Prop>& alg, const std::vector<Prop>& props,
                                    const std::vector<double>& f);

}  // namespace sheafnet::info

#include "sheafnet/detail/seminfo_impl.hpp"
