#include "sheafnet/carnap.hpp"

#include <algorithm>
#include <set>

#include "sheafnet/error.hpp"

namespace sheafnet::carnap {

namespace {

std::string letter_name(std::size_t i, char base) {
  std::string s(1, static_cast<char>(base + i % 26));
  if (i >= 26) s += std::to_string(i / 26);
  return s;
}

}  // namespace

CarnapLanguage build_language(std::size_t n, std::vector<std::size_t> value_counts,
                              std::vector<std::string> attribute_names, std::size_t bound) {
  if (n == 0) throw InputError("a language needs at least one subject");
  if (value_counts.empty()) throw InputError("a language needs at least one attribute");
  for (std::size_t c : value_counts) {
    if (c == 0) throw InputError("every attribute needs at least one value");
  }
  if (attribute_names.empty()) {
    for (std::size_t i = 0; i < value_counts.size(); ++i) attribute_names.push_back(letter_name(i, 'A'));
  }
  if (attribute_names.size() != value_counts.size()) throw InputError("attribute names and value counts differ in length");

  std::size_t per_subject = 1;
  for (std::size_t c : value_counts) {
    if (per_subject > bound / c) throw BoundExceeded("state count exceeds bound");
    per_subject *= c;
  }
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > bound / per_subject) throw BoundExceeded("state count exceeds bound");
    total *= per_subject;
  }

  CarnapLanguage lang;
  for (std::size_t i = 0; i < n; ++i) lang.subjects_.push_back(letter_name(i, 'a'));
  lang.attributes_ = std::move(attribute_names);
  lang.value_counts_ = std::move(value_counts);
  const std::size_t k = lang.attributes_.size();
  std::vector<std::size_t> cur(n * k, 0);
  for (std::size_t s = 0; s < total; ++s) {
    lang.states_.push_back(cur);
    std::string label;
    for (std::size_t subj = 0; subj < n; ++subj) {
      if (subj > 0) label += ',';
      for (std::size_t a = 0; a < k; ++a) label += lang.attributes_[a] + std::to_string(cur[subj * k + a] + 1);
    }
    lang.labels_.push_back(std::move(label));
    for (std::size_t pos = n * k; pos-- > 0;) {
      if (++cur[pos] < lang.value_counts_[pos % k]) break;
      cur[pos] = 0;
    }
  }
  return lang;
}

std::vector<std::size_t> CarnapLanguage::profile(std::size_t s, std::size_t subj) const {
  const std::size_t k = attributes_.size();
  return {states_[s].begin() + static_cast<std::ptrdiff_t>(subj * k),
          states_[s].begin() + static_cast<std::ptrdiff_t>((subj + 1) * k)};
}

std::size_t CarnapLanguage::state_index(const std::vector<std::size_t>& assignment) const {
  const std::size_t k = attributes_.size();
  if (assignment.size() != subjects_.size() * k) throw InputError("assignment has the wrong length");
  std::size_t idx = 0;
  for (std::size_t pos = 0; pos < assignment.size(); ++pos) {
    if (assignment[pos] >= value_counts_[pos % k]) throw InputError("attribute value out of range");
    idx = idx * value_counts_[pos % k] + assignment[pos];
  }
  return idx;
}

info::BooleanLanguage CarnapLanguage::boolean_language() const { return info::BooleanLanguage::uniform(labels_); }

Perm subject_action(const CarnapLanguage& lang, const Perm& subjects) {
  if (subjects.size() != lang.subject_count() || !is_permutation(subjects)) throw InputError("not a subject permutation");
  const std::size_t k = lang.attributes().size();
  Perm out(lang.state_count());
  for (std::size_t s = 0; s < lang.state_count(); ++s) {
    std::vector<std::size_t> img(lang.subject_count() * k);
    for (std::size_t subj = 0; subj < lang.subject_count(); ++subj) {
      for (std::size_t a = 0; a < k; ++a) img[subjects[subj] * k + a] = lang.value(s, subj, a);
    }
    out[s] = lang.state_index(img);
  }
  return out;
}

Perm value_action(const CarnapLanguage& lang, std::size_t attr, const Perm& values) {
  if (attr >= lang.attributes().size()) throw InputError("attribute out of range");
  if (values.size() != lang.value_counts()[attr] || !is_permutation(values)) throw InputError("not a value permutation");
  const std::size_t k = lang.attributes().size();
  Perm out(lang.state_count());
  for (std::size_t s = 0; s < lang.state_count(); ++s) {
    std::vector<std::size_t> img(lang.subject_count() * k);
    for (std::size_t subj = 0; subj < lang.subject_count(); ++subj) {
      for (std::size_t a = 0; a < k; ++a) {
        const std::size_t v = lang.value(s, subj, a);
        img[subj * k + a] = a == attr ? values[v] : v;
      }
    }
    out[s] = lang.state_index(img);
  }
  return out;
}

Perm attribute_swap(const CarnapLanguage& lang, std::size_t a1, std::size_t a2) {
  const std::size_t k = lang.attributes().size();
  if (a1 >= k || a2 >= k) throw InputError("attribute out of range");
  if (lang.value_counts()[a1] != lang.value_counts()[a2]) throw InputError("attributes of different arity cannot be exchanged");
  Perm out(lang.state_count());
  for (std::size_t s = 0; s < lang.state_count(); ++s) {
    std::vector<std::size_t> img(lang.subject_count() * k);
    for (std::size_t subj = 0; subj < lang.subject_count(); ++subj) {
      for (std::size_t a = 0; a < k; ++a) {
        const std::size_t src = a == a1 ? a2 : a == a2 ? a1 : a;
        img[subj * k + a] = lang.value(s, subj, src);
      }
    }
    out[s] = lang.state_index(img);
  }
  return out;
}

SymmetryGroup build_symmetry_group(const CarnapLanguage& lang, std::size_t bound) {
  SymmetryGroup g;
  const std::size_t n = lang.subject_count();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Perm t = identity_perm(n);
    std::swap(t[i], t[i + 1]);
    g.generators.push_back({"(" + lang.subjects()[i] + " " + lang.subjects()[i + 1] + ")", subject_action(lang, t)});
  }
  const std::size_t k = lang.attributes().size();
  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t c = lang.value_counts()[a];
    for (std::size_t v = 0; v + 1 < c; ++v) {
      Perm t = identity_perm(c);
      std::swap(t[v], t[v + 1]);
      const std::string& name = lang.attributes()[a];
      g.generators.push_back({"(" + name + std::to_string(v + 1) + " " + name + std::to_string(v + 2) + ")",
                              value_action(lang, a, t)});
    }
  }
  for (std::size_t a1 = 0; a1 < k; ++a1) {
    // Adjacent swaps within each arity class generate all its permutations.
    for (std::size_t a2 = a1 + 1; a2 < k; ++a2) {
      if (lang.value_counts()[a1] != lang.value_counts()[a2]) continue;
      g.generators.push_back({"(" + lang.attributes()[a1] + " " + lang.attributes()[a2] + ")", attribute_swap(lang, a1, a2)});
      break;
    }
  }
  std::vector<Perm> gens;
  for (const NamedPerm& np : g.generators) gens.push_back(np.perm);
  g.elements = group_closure(gens, lang.state_count(), bound);
  return g;
}

Proposition act(const Perm& g, const Proposition& p) {
  if (g.size() != p.size()) throw InputError("permutation and proposition sizes differ");
  Proposition out(p.size());
  for (std::size_t s = p.find_first(); s != Proposition::npos; s = p.find_next(s)) out.set(g[s]);
  return out;
}

std::string state_type(const CarnapLanguage& lang, std::size_t s) {
  if (lang.subject_count() != 3) return "";
  const auto p0 = lang.profile(s, 0);
  const auto p1 = lang.profile(s, 1);
  const auto p2 = lang.profile(s, 2);
  if (p0 == p1 && p1 == p2) return "I";
  if (p0 != p1 && p1 != p2 && p0 != p2) return "IV";
  const auto& pair = p0 == p1 ? p0 : p2;
  const auto& odd = p0 == p1 ? p2 : (p0 == p2 ? p1 : p0);
  std::size_t diff = 0;
  for (std::size_t a = 0; a < pair.size(); ++a) diff += pair[a] != odd[a] ? 1 : 0;
  if (diff == 1) return "II";
  if (diff == pair.size()) return "III";
  return "";
}

OrbitTypeReport orbit_report(const CarnapLanguage& lang, const SymmetryGroup& g) {
  std::vector<Perm> gens;
  for (const NamedPerm& np : g.generators) gens.push_back(np.perm);
  const OrbitReport raw = group_action_orbits(gens, lang.state_count(), std::max<std::size_t>(g.order(), 1));
  OrbitTypeReport rep;
  rep.group_order = raw.group_order;
  for (const Orbit& o : raw.orbits) {
    StateOrbit so{o.points, o.stabilizer_order, state_type(lang, o.points.front())};
    for (std::size_t s : o.points) {
      if (state_type(lang, s) != so.type) rep.types_consistent = false;
    }
    rep.orbits.push_back(std::move(so));
  }
  return rep;
}

SimpleReport simple_propositions(const CarnapLanguage& lang, const SymmetryGroup& g) {
  SimpleReport rep;
  const std::size_t k = lang.attributes().size();
  for (std::size_t subj = 0; subj < lang.subject_count(); ++subj) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t v = 0; v < lang.value_counts()[a]; ++v) {
        Simple sp{subj, a, v, lang.subjects()[subj] + lang.attributes()[a] + std::to_string(v + 1), lang.empty_proposition()};
        for (std::size_t s = 0; s < lang.state_count(); ++s) {
          if (lang.value(s, subj, a) == v) sp.states.set(s);
        }
        rep.simples.push_back(std::move(sp));
      }
    }
  }
  const bool binary = std::all_of(lang.value_counts().begin(), lang.value_counts().end(), [](std::size_t c) { return c == 2; });
  if (binary) {
    bool ok = true;
    for (std::size_t i = 0; i < rep.simples.size(); i += 2) {
      ok = ok && (~rep.simples[i].states == rep.simples[i + 1].states);
    }
    rep.self_dual = ok;
  }
  std::set<Proposition> orbit;
  for (const Perm& e : g.elements) orbit.insert(act(e, rep.simples.front().states));
  rep.orbit_size = orbit.size();
  std::set<Proposition> all;
  for (const Simple& sp : rep.simples) all.insert(sp.states);
  rep.single_orbit = orbit == all;
  return rep;
}

}  // namespace sheafnet::carnap
