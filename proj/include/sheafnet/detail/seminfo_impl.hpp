#pragma once

#include <map>

#include "sheafnet/detail/union_find.hpp"

namespace sheafnet::info {

template <class Prop>
DegreeZeroReport degree_zero_report(const PropositionAlgebra<Prop>& alg, const std::vector<Prop>& props,
                                    const std::vector<double>& f) {
  if (f.size() != props.size()) throw InputError("function table size differs from proposition count");
  std::map<Prop, std::size_t> index;
  for (std::size_t i = 0; i < props.size(); ++i) index.emplace(props[i], i);
  DegreeZeroReport rep;
  rep.invariant = true;
  detail::Components comps(props.size());
  for (std::size_t s = 0; s < props.size(); ++s) {
    for (const Prop& q : props) {
      const auto it = index.find(alg.condition(props[s], q));
      if (it == index.end()) throw InputError("proposition list is not closed under conditioning");
      comps.unite(s, it->second);
      if (f[it->second] != f[s]) rep.invariant = false;
    }
  }
  const std::vector<std::size_t> labels = comps.labels();
  rep.components = props.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::optional<double>> value(rep.components);
  rep.constant_on_components = true;
  for (std::size_t i = 0; i < props.size(); ++i) {
    auto& v = value[labels[i]];
    if (!v) v = f[i];
    else if (*v != f[i]) rep.constant_on_components = false;
  }
  rep.constant = std::all_of(f.begin(), f.end(), [&](double x) { return x == f.front(); });
  return rep;
}

}  // namespace sheafnet::info
