#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "sheafnet/permutation.hpp"
#include "sheafnet/seminfo.hpp"

namespace sheafnet::carnap {

inline constexpr std::size_t kDefaultStateBound = 1'000'000;
inline constexpr std::size_t kDefaultGroupBound = 10'000;

/// Subsets of the state set.
using Proposition = boost::dynamic_bitset<>;

/// n subjects, each carrying one value of every attribute.  States are all
/// assignments, in lexicographic order with subject 0 most significant.
class CarnapLanguage {
 public:
  std::size_t subject_count() const { return subjects_.size(); }
  const std::vector<std::string>& subjects() const { return subjects_; }
  const std::vector<std::string>& attributes() const { return attributes_; }
  const std::vector<std::size_t>& value_counts() const { return value_counts_; }
  std::size_t state_count() const { return states_.size(); }
  /// Value of attribute `attr` for subject `subj` in state `s`.
  std::size_t value(std::size_t s, std::size_t subj, std::size_t attr) const {
    return states_[s][subj * attributes_.size() + attr];
  }
  /// Subject profile: one value per attribute.
  std::vector<std::size_t> profile(std::size_t s, std::size_t subj) const;
  std::size_t state_index(const std::vector<std::size_t>& assignment) const;
  /// e.g. "A1G1,A1G2,A2G2"; values are numbered from 1.
  const std::string& label(std::size_t s) const { return labels_[s]; }
  /// log2 of the number of propositions, reported instead of enumerating them.
  std::size_t proposition_count_log2() const { return state_count(); }

  Proposition empty_proposition() const { return Proposition(state_count()); }
  /// Uniform content: number of excluded states.
  std::size_t content(const Proposition& t) const { return state_count() - t.count(); }
  /// The same language as a measured Boolean language (at most 64 states).
  info::BooleanLanguage boolean_language() const;

  friend CarnapLanguage build_language(std::size_t n, std::vector<std::size_t> value_counts,
                                       std::vector<std::string> attribute_names, std::size_t bound);

 private:
  std::vector<std::string> subjects_;
  std::vector<std::string> attributes_;
  std::vector<std::size_t> value_counts_;
  std::vector<std::vector<std::size_t>> states_;
  std::vector<std::string> labels_;
};

/// Subjects are named a, b, c, ...; attributes default to A, B, C, ...
CarnapLanguage build_language(std::size_t n, std::vector<std::size_t> value_counts,
                              std::vector<std::string> attribute_names = {},
                              std::size_t bound = kDefaultStateBound);

struct NamedPerm {
  std::string name;
  Perm perm;
};

/// Permutations of E induced by a subject permutation (image of each subject),
/// a value permutation of one attribute, or an exchange of two attributes with
/// equal value counts.
Perm subject_action(const CarnapLanguage& lang, const Perm& subjects);
Perm value_action(const CarnapLanguage& lang, std::size_t attr, const Perm& values);
Perm attribute_swap(const CarnapLanguage& lang, std::size_t a1, std::size_t a2);

struct SymmetryGroup {
  std::vector<NamedPerm> generators;
  std::vector<Perm> elements;
  std::size_t order() const { return elements.size(); }
};

/// Adjacent subject transpositions, adjacent value transpositions of each
/// attribute, and adjacent swaps between attributes of equal arity.
SymmetryGroup build_symmetry_group(const CarnapLanguage& lang, std::size_t bound = kDefaultGroupBound);

Proposition act(const Perm& g, const Proposition& p);

struct StateOrbit {
  std::vector<std::size_t> states;
  std::size_t stabilizer_order = 0;
  /// "I".."IV" for three subjects, empty otherwise.
  std::string type;
};

struct OrbitTypeReport {
  std::size_t group_order = 0;
  std::vector<StateOrbit> orbits;
  /// Every state in an orbit gets the orbit's type.
  bool types_consistent = true;
};

/// I: all subjects equal; II: a pair and one subject differing in a single
/// attribute; III: a pair and one subject differing in every attribute;
/// IV: all subjects distinct.  Other shapes and other subject counts give "".
std::string state_type(const CarnapLanguage& lang, std::size_t s);

OrbitTypeReport orbit_report(const CarnapLanguage& lang, const SymmetryGroup& g);

struct Simple {
  std::size_t subject = 0;
  std::size_t attribute = 0;
  std::size_t value = 0;
  /// e.g. "aA1".
  std::string label;
  Proposition states;
};

struct SimpleReport {
  std::vector<Simple> simples;
  /// Whether not(aA) is the opposite-value simple; empty when some attribute is not binary.
  std::optional<bool> self_dual;
  /// Size of the G-orbit of the first simple, among all propositions.
  std::size_t orbit_size = 0;
  /// The orbit of the first simple is exactly the set of simples.
  bool single_orbit = false;
};

SimpleReport simple_propositions(const CarnapLanguage& lang, const SymmetryGroup& g);

}  // namespace sheafnet::carnap
