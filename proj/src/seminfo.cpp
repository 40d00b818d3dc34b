#include "sheafnet/seminfo.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace sheafnet::info {

ExtendedReal::ExtendedReal(double v) : v_(v) {
  if (std::isnan(v)) throw IndeterminateError("NaN is not an extended real");
}

double ExtendedReal::finite_value() const {
  if (!finite()) throw IndeterminateError("value is infinite");
  return v_;
}

ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
  const double r = a.v_ + b.v_;
  if (std::isnan(r)) throw IndeterminateError("opposite infinities added");
  return ExtendedReal(r);
}

ExtendedReal operator-(ExtendedReal a, ExtendedReal b) {
  const double r = a.v_ - b.v_;
  if (std::isnan(r)) throw IndeterminateError("infinity subtracted from itself");
  return ExtendedReal(r);
}

ExtendedReal log_ratio(double num, double den) {
  if (num < 0 || den <= 0) throw IndeterminateError("log of a negative ratio");
  if (num == 0) return ExtendedReal::neg_infinity();
  return ExtendedReal(std::log(num / den));
}

BooleanLanguage BooleanLanguage::make(std::vector<std::string> labels, std::vector<double> measure) {
  if (labels.size() != measure.size()) throw InputError("measure size differs from state count");
  if (labels.empty()) throw InputError("language needs at least one state");
  if (labels.size() > ElementSet::kCapacity) throw BoundExceeded("languages are limited to 64 states");
  std::set<std::string> seen;
  for (const std::string& l : labels) {
    if (!seen.insert(l).second) throw InputError("duplicate state label: " + l);
  }
  for (double m : measure) {
    if (!(m > 0) || !std::isfinite(m)) throw InputError("state measures must be finite and strictly positive");
  }
  BooleanLanguage lang;
  lang.labels_ = std::move(labels);
  lang.measure_ = std::move(measure);
  lang.total_ = std::accumulate(lang.measure_.begin(), lang.measure_.end(), 0.0);
  return lang;
}

BooleanLanguage BooleanLanguage::uniform(std::vector<std::string> labels) {
  std::vector<double> m(labels.size(), 1.0);
  return make(std::move(labels), std::move(m));
}

BooleanLanguage BooleanLanguage::uniform(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return uniform(std::move(labels));
}

BooleanLanguage BooleanLanguage::product(const BooleanLanguage& a, const BooleanLanguage& b) {
  std::vector<std::string> labels;
  std::vector<double> m;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      labels.push_back(a.labels_[i] + "," + b.labels_[j]);
      m.push_back(a.measure_[i] * b.measure_[j]);
    }
  }
  return make(std::move(labels), std::move(m));
}

std::size_t BooleanLanguage::index_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw InputError("unknown state: " + label);
  return static_cast<std::size_t>(it - labels_.begin());
}

ElementSet BooleanLanguage::proposition(const std::vector<std::string>& labels) const {
  ElementSet s;
  for (const std::string& l : labels) s.insert(index_of(l));
  return s;
}

double BooleanLanguage::mass(ElementSet s) const {
  double m = 0.0;
  for (std::size_t i : s.members()) {
    if (i >= size()) throw InputError("proposition mentions a state outside the language");
    m += measure_[i];
  }
  return m;
}

double BooleanLanguage::content(ElementSet t) const { return mass(all() - t); }

BooleanAlgebra boolean_algebra(std::size_t n) {
  const ElementSet full = ElementSet::full(n);
  BooleanAlgebra alg;
  alg.top = full;
  alg.bottom = ElementSet{};
  alg.meet = [](ElementSet a, ElementSet b) { return a & b; };
  alg.join = [](ElementSet a, ElementSet b) { return a | b; };
  alg.implies = [full](ElementSet q, ElementSet t) { return t | (full - q); };
  alg.leq = [](ElementSet a, ElementSet b) { return a.subset_of(b); };
  return alg;
}

BooleanAlgebra open_set_algebra(const FinitePoset& p) {
  BooleanAlgebra alg;
  alg.top = p.all();
  alg.bottom = ElementSet{};
  alg.meet = [](ElementSet a, ElementSet b) { return a & b; };
  alg.join = [](ElementSet a, ElementSet b) { return a | b; };
  alg.implies = [p](ElementSet q, ElementSet t) { return heyting::implies(p, q, t); };
  alg.leq = [](ElementSet a, ElementSet b) { return a.subset_of(b); };
  return alg;
}

ChainAlgebra chain_algebra(const heyting::InjectiveChain& e) {
  using heyting::ChainSubobject;
  ChainAlgebra alg;
  alg.top = heyting::chain_top(e);
  alg.bottom = heyting::chain_bottom(e);
  alg.meet = [](const ChainSubobject& a, const ChainSubobject& b) {
    ChainSubobject out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] & b[k];
    return out;
  };
  alg.join = [](const ChainSubobject& a, const ChainSubobject& b) {
    ChainSubobject out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] | b[k];
    return out;
  };
  alg.implies = [e](const ChainSubobject& q, const ChainSubobject& t) { return heyting::chain_implication(e, t, q); };
  alg.leq = [](const ChainSubobject& a, const ChainSubobject& b) {
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!a[k].subset_of(b[k])) return false;
    }
    return a.size() == b.size();
  };
  return alg;
}

std::vector<ElementSet> all_propositions(const FinitePoset& p) { return lower_open_sets(p); }

std::vector<ElementSet> all_propositions(std::size_t n) {
  if (n > 20) throw BoundExceeded("Boolean enumeration limited to 20 states");
  std::vector<ElementSet> out;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) out.emplace_back(b);
  return out;
}

std::vector<heyting::ChainSubobject> all_propositions(const heyting::InjectiveChain& e) {
  // Each base point survives in a prefix of the levels it belongs to.
  std::vector<std::size_t> depth(e.base_size, 0);
  for (std::size_t s = 0; s < e.base_size; ++s) {
    std::size_t d = 0;
    while (d < e.levels.size() && e.levels[d].contains(s)) ++d;
    depth[s] = d;
  }
  std::vector<heyting::ChainSubobject> out;
  std::vector<std::size_t> cur(e.base_size, 0);
  while (true) {
    heyting::ChainSubobject y(e.levels.size());
    for (std::size_t s = 0; s < e.base_size; ++s) {
      for (std::size_t k = 0; k < cur[s]; ++k) y[k].insert(s);
    }
    out.push_back(std::move(y));
    std::size_t i = 0;
    while (i < e.base_size && cur[i] == depth[i]) cur[i++] = 0;
    if (i == e.base_size) break;
    ++cur[i];
  }
  return out;
}

ExtendedReal psi_cbh(const BooleanLanguage& lang, ElementSet t) {
  const double cmax = lang.total();
  return log_ratio(cmax - lang.content(t), cmax);
}

ExtendedReal psi_localized(const BooleanLanguage& lang, ElementSet t, ElementSet p) {
  if (p.empty()) return psi_cbh(lang, t);
  const ElementSet np = lang.all() - p;
  if (!t.subset_of(np)) throw InputError("theory does not exclude P");
  const double cmax = lang.total();
  return log_ratio(cmax - lang.content(t), cmax - lang.content(np));
}

Precision<ElementSet> psi_cbh(const BooleanLanguage& lang) {
  return [lang](ElementSet t) { return psi_cbh(lang, t); };
}

Precision<ElementSet> psi_localized(const BooleanLanguage& lang, ElementSet p) {
  return [lang, p](ElementSet t) { return psi_localized(lang, t, p); };
}

DeltaSequence DeltaSequence::make(std::vector<double> delta) {
  if (delta.empty()) throw InputError("delta sequence is empty");
  double tail = 0.0;
  for (std::size_t k = delta.size(); k-- > 0;) {
    if (!(delta[k] > 0) || !std::isfinite(delta[k])) throw InputError("delta values must be positive");
    if (!(delta[k] > tail)) throw InputError("delta_k must exceed the sum of later terms");
    tail += delta[k];
  }
  DeltaSequence d;
  d.delta_ = std::move(delta);
  return d;
}

DeltaSequence DeltaSequence::dyadic(std::size_t n) {
  std::vector<double> d;
  for (std::size_t k = 0; k <= n; ++k) d.push_back(std::ldexp(1.0, -static_cast<int>(k)));
  return make(std::move(d));
}

double psi_delta(const heyting::InjectiveChain& e, const heyting::ChainSubobject& t, const DeltaSequence& delta,
                 const std::vector<double>& mu) {
  if (delta.values().size() != e.levels.size()) throw InputError("delta length differs from chain length");
  if (!heyting::is_chain_subobject(e, t)) throw InputError("not a subobject of the chain");
  if (!mu.empty()) {
    if (mu.size() != e.base_size) throw InputError("mu size differs from base size");
    for (double m : mu) {
      if (!(m > 0)) throw InputError("mu must be strictly positive");
    }
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    double m = 0.0;
    if (mu.empty()) {
      m = static_cast<double>(t[k].size());
    } else {
      for (std::size_t s : t[k].members()) m += mu[s];
    }
    sum += delta.values()[k] * m;
  }
  return sum;
}

ExtendedReal psi_log_delta(const heyting::InjectiveChain& e, const heyting::ChainSubobject& t,
                           const DeltaSequence& delta, const std::vector<double>& mu) {
  return log_ratio(psi_delta(e, t, delta, mu), 1.0);
}

IndependenceReport check_independence(const BooleanLanguage& lang, ElementSet q, ElementSet r, double rel_tol) {
  const double mq = lang.mass(q);
  const double mr = lang.mass(r);
  const double mqr = lang.mass(q & r);
  const double me = lang.total();
  IndependenceReport rep;
  rep.independent = std::abs(mqr * me - mq * mr) <= rel_tol * me * me;
  if (mqr == 0 || mq == 0 || mr == 0) {
    rep.additivity_residual = std::numeric_limits<double>::infinity();
    return rep;
  }
  rep.additivity_residual = std::abs(std::log(mqr / me) - std::log(mq / me) - std::log(mr / me));
  return rep;
}

}  // namespace sheafnet::info
