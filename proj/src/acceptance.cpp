#include "sheafnet/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <random>
#include <sstream>

#include "sheafnet/carnap.hpp"
#include "sheafnet/cells.hpp"
#include "sheafnet/cubic.hpp"
#include "sheafnet/dynamics.hpp"
#include "sheafnet/error.hpp"
#include "sheafnet/groupoid.hpp"
#include "sheafnet/heyting.hpp"
#include "sheafnet/presheaf.hpp"
#include "sheafnet/seminfo.hpp"
#include "sheafnet/site.hpp"
#include "sheafnet/stack.hpp"

namespace sheafnet::acceptance {

namespace {

// Pinned tolerances and limits.
constexpr double kHeytingSeconds = 5.0;
constexpr double kChainSeconds = 30.0;
constexpr double kCarnapSeconds = 10.0;
constexpr double kCocycleTol = 1e-12;
constexpr double kInfoTol = 1e-12;
constexpr double kFdTol = 1e-6;
constexpr double kReverseTol = 1e-12;
constexpr double kFdStep = 1e-5;
constexpr double kDeltaBand = 1e-9;
constexpr double kRootResidual = 1e-10;

using Rng = std::mt19937_64;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

// Random posets compatible with index order.
FinitePoset random_poset(Rng& rng, std::size_t n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<std::string> ids;
  std::vector<IndexPair> gens;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("e" + std::to_string(i));
    for (std::size_t j = 0; j < i; ++j) {
      if (coin(rng)) gens.emplace_back(j, i);
    }
  }
  return FinitePoset::from_relation(std::move(ids), gens);
}

// Random DAG; every vertex touches an edge, roles follow degrees.
site::SiteGraph random_dag(Rng& rng, std::size_t n, double p) {
  site::SiteGraph g;
  std::bernoulli_distribution coin(p);
  for (std::size_t i = 0; i < n; ++i) g.vertices.push_back("v" + std::to_string(i));
  std::vector<bool> touched(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng)) {
        g.edges.emplace_back(i, j);
        touched[i] = touched[j] = true;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (touched[i]) continue;
    const std::size_t j = i + 1 < n ? i + 1 : i - 1;
    g.edges.emplace_back(std::min(i, j), std::max(i, j));
    touched[i] = touched[j] = true;
  }
  const auto in = g.in_degrees();
  const auto out = g.out_degrees();
  for (std::size_t i = 0; i < n; ++i) {
    g.roles.push_back(in[i] == 0 ? site::Role::input : (out[i] == 0 ? site::Role::output : site::Role::ordinary));
  }
  return g;
}

ElementSet random_subset(Rng& rng, ElementSet within) {
  ElementSet out;
  for (std::size_t i : within.members()) {
    if (rng() & 1U) out.insert(i);
  }
  return out;
}

info::BooleanLanguage random_language(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> w(0.1, 3.0);
  std::vector<double> m;
  for (std::size_t i = 0; i < n; ++i) m.push_back(w(rng));
  return info::BooleanLanguage::make(info::BooleanLanguage::uniform(n).labels(), m);
}

Outcome heyting_oracle(Rng& rng) {
  std::size_t pairs = 0, mismatches = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + std::uniform_int_distribution<std::size_t>(0, 7)(rng);
    const FinitePoset p = random_poset(rng, n, 0.3);
    const auto opens = lower_open_sets(p);
    for (ElementSet q : opens) {
      for (ElementSet t : opens) {
        ++pairs;
        if (heyting::implies(p, q, t) != heyting::oracle_implies(opens, q, t)) ++mismatches;
      }
    }
  }
  return {mismatches == 0, std::to_string(pairs) + " open pairs on 50 posets, " + std::to_string(mismatches) + " mismatches"};
}

Outcome chain_oracle() {
  using namespace heyting;
  std::size_t chains = 0, pairs = 0, mismatches = 0;
  for (std::size_t n = 0; n <= 4; ++n) {
    for (std::size_t m = 0; m <= 5; ++m) {
      for (const auto& depths : depth_profiles(n, m)) {
        const InjectiveChain e = InjectiveChain::from_depths(depths, n);
        const presheaf::Presheaf f = chain_presheaf(e);
        const presheaf::SubobjectLattice lattice(f);
        const ImplicationOracle oracle(lattice.points());
        const std::size_t levels = e.levels.size();
        // Per-level lookup from a level subset to its lattice points.
        std::vector<std::vector<ElementSet>> points(levels, std::vector<ElementSet>(std::size_t{1} << m));
        for (std::size_t k = 0; k < levels; ++k) {
          for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << m); ++bits) {
            ChainSubobject y(levels);
            y[k] = ElementSet(bits) & e.levels[k];
            points[k][bits] = lattice.to_mask(to_subobject(e, y));
          }
        }
        std::vector<ChainSubobject> subs;
        for (ElementSet mask : oracle.opens()) {
          subs.push_back(from_subobject(e, lattice.from_mask(mask)));
          if (!is_chain_subobject(e, subs.back())) ++mismatches;
        }
        std::vector<ElementSet> u(levels);
        for (std::size_t qi = 0; qi < subs.size(); ++qi) {
          const auto expected = oracle.implications(oracle.opens()[qi]);
          for (std::size_t ti = 0; ti < subs.size(); ++ti) {
            ++pairs;
            chain_implication_into(e.levels, subs[ti], subs[qi], u);
            ElementSet mask;
            for (std::size_t k = 0; k < levels; ++k) mask = mask | points[k][u[k].bits()];
            if (mask != expected[ti]) ++mismatches;
          }
        }
        // The checked entry point on a sample of pairs, through the full conversions.
        for (std::size_t qi = 0; qi < subs.size(); qi += 1 + subs.size() / 16) {
          const auto expected = oracle.implications(oracle.opens()[qi]);
          for (std::size_t ti = 0; ti < subs.size(); ti += 1 + subs.size() / 16) {
            if (lattice.to_mask(to_subobject(e, chain_implication(e, subs[ti], subs[qi]))) != expected[ti]) ++mismatches;
          }
        }
        ++chains;
      }
    }
  }
  return {mismatches == 0, std::to_string(chains) + " chains up to relabelling, " + std::to_string(pairs) + " (Q,T) pairs, " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome chain_precision() {
  using namespace heyting;
  std::size_t chains = 0, samples = 0, monotone_failures = 0;
  double min_dd = std::numeric_limits<double>::infinity();
  std::string witness;
  for (std::size_t n = 0; n <= 3; ++n) {
    const info::DeltaSequence delta = info::DeltaSequence::dyadic(n);
    for (std::size_t m = 0; m <= 4; ++m) {
      for (const auto& depths : depth_profiles(n, m)) {
        const InjectiveChain e = InjectiveChain::from_depths(depths, n);
        const info::ChainAlgebra alg = info::chain_algebra(e);
        const auto props = info::all_propositions(e);
        const std::size_t k = props.size();
        std::map<ChainSubobject, std::size_t> index;
        for (std::size_t i = 0; i < k; ++i) index.emplace(props[i], i);
        std::vector<double> psi(k);
        for (std::size_t i = 0; i < k; ++i) psi[i] = info::psi_delta(e, props[i], delta);
        std::vector<char> leq(k * k);
        std::vector<std::size_t> imp(k * k);
        for (std::size_t a = 0; a < k; ++a) {
          for (std::size_t b = 0; b < k; ++b) {
            leq[a * k + b] = alg.leq(props[a], props[b]) ? 1 : 0;
            imp[a * k + b] = index.at(alg.implies(props[a], props[b]));
          }
        }
        for (std::size_t a = 0; a < k; ++a) {
          for (std::size_t b = 0; b < k; ++b) {
            if (a != b && leq[a * k + b] && !(psi[a] < psi[b])) ++monotone_failures;
          }
        }
        // Every P, Q >= P, T <= T' <= not P.
        for (std::size_t p = 0; p < k; ++p) {
          const std::size_t np = imp[p * k + index.at(alg.bottom)];
          std::vector<std::size_t> below;
          for (std::size_t x = 0; x < k; ++x) {
            if (leq[x * k + np]) below.push_back(x);
          }
          for (std::size_t q = 0; q < k; ++q) {
            if (!leq[p * k + q]) continue;
            for (std::size_t t : below) {
              const double gain = psi[imp[q * k + t]] - psi[t];
              for (std::size_t t2 : below) {
                if (!leq[t * k + t2]) continue;
                ++samples;
                const double dd = gain - (psi[imp[q * k + t2]] - psi[t2]);
                if (dd < min_dd) {
                  min_dd = dd;
                  witness = "n=" + std::to_string(n) + " |E0|=" + std::to_string(m) + " P#" + std::to_string(p) +
                            " Q#" + std::to_string(q) + " T#" + std::to_string(t) + " T'#" + std::to_string(t2);
                }
              }
            }
          }
        }
        ++chains;
      }
    }
  }
  const bool concave = min_dd >= 0.0;
  std::string detail = std::to_string(chains) + " chains, " + std::to_string(samples) + " double differences; strictly increasing " +
                       (monotone_failures == 0 ? "yes" : "NO") + "; min double difference " + fmt(min_dd);
  if (!concave) detail += " at " + witness + " (not concave; see README)";
  return {monotone_failures == 0 && concave, detail};
}

Outcome cocycle(Rng& rng) {
  double worst[2] = {0.0, 0.0};
  std::size_t count[2] = {0, 0};
  for (int localized = 0; localized < 2; ++localized) {
    while (count[localized] < 10000) {
      const std::size_t n = 1 + std::uniform_int_distribution<std::size_t>(0, 15)(rng);
      const info::BooleanLanguage lang = random_language(rng, n);
      const info::BooleanAlgebra alg = info::boolean_algebra(n);
      ElementSet p = localized ? random_subset(rng, lang.all()) : ElementSet{};
      if (p == lang.all()) p.erase(0);
      const ElementSet np = lang.all() - p;
      const info::Precision<ElementSet> psi = localized ? info::psi_localized(lang, p) : info::psi_cbh(lang);
      std::vector<info::CocycleSample<ElementSet>> samples;
      for (int i = 0; i < 100; ++i) {
        const ElementSet s = random_subset(rng, np);
        if (s.empty()) continue;
        samples.push_back({s, p | random_subset(rng, lang.all()), p | random_subset(rng, lang.all())});
      }
      const auto rep = info::check_cocycle(alg, info::coboundary(alg, psi), samples, &psi);
      worst[localized] = std::max({worst[localized], rep.max_residual, rep.max_coboundary_residual.value_or(0.0)});
      count[localized] += rep.samples;
    }
  }
  return {worst[0] <= kCocycleTol && worst[1] <= kCocycleTol,
          std::to_string(count[0]) + " cbh / " + std::to_string(count[1]) + " localized triples; max residual " +
              fmt(worst[0]) + " / " + fmt(worst[1])};
}

Outcome information(Rng& rng) {
  bool concave = true, symmetric = true, dss = true;
  double min_i = std::numeric_limits<double>::infinity(), min_d = std::numeric_limits<double>::infinity();
  std::size_t triples = 0;
  for (std::size_t n = 1; n <= 5; ++n) {
    const info::BooleanLanguage lang = random_language(rng, n);
    const info::BooleanAlgebra alg = info::boolean_algebra(n);
    concave = concave && info::check_concavity(alg, info::psi_cbh(lang), info::concavity_domain(alg, info::all_propositions(n))).concave(0.0);
  }
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 11;
    const info::BooleanLanguage lang = random_language(rng, n);
    const info::BooleanAlgebra alg = info::boolean_algebra(n);
    const auto psi = info::psi_cbh(lang);
    for (int i = 0; i < 50; ++i) {
      const ElementSet t = random_subset(rng, lang.all()) | ElementSet::singleton(0);
      const ElementSet q1 = random_subset(rng, lang.all());
      const ElementSet q2 = random_subset(rng, lang.all());
      const auto a = info::mutual_information(alg, psi, t, q1, q2);
      symmetric = symmetric && a == info::mutual_information(alg, psi, t, q2, q1);
      min_i = std::min(min_i, a.value());
      const auto d = info::kl_divergence(alg, psi, q1, t, t | q2);
      min_d = std::min(min_d, d.value());
      dss = dss && info::kl_divergence(alg, psi, q1, t, t) == info::ExtendedReal(0.0);
      ++triples;
    }
  }
  return {concave && symmetric && dss && min_i >= -kInfoTol && min_d >= -kInfoTol,
          std::to_string(triples) + " samples; psi concave " + (concave ? "yes" : "NO") + ", symmetry " +
              (symmetric ? "exact" : "BROKEN") + ", min I " + fmt(min_i) + ", D(S;S)=0 " + (dss ? "yes" : "NO") +
              ", min D " + fmt(min_d)};
}

Outcome carnap_numbers() {
  const carnap::CarnapLanguage lang = carnap::build_language(3, {2, 2}, {"A", "G"});
  const carnap::SymmetryGroup g = carnap::build_symmetry_group(lang);
  const carnap::OrbitTypeReport rep = carnap::orbit_report(lang, g);
  std::multiset<std::pair<std::size_t, std::size_t>> got;
  for (const auto& o : rep.orbits) got.emplace(o.states.size(), o.stabilizer_order);
  const std::multiset<std::pair<std::size_t, std::size_t>> want{{4, 12}, {24, 2}, {12, 4}, {24, 2}};
  const carnap::SimpleReport simples = carnap::simple_propositions(lang, g);
  const bool ok = lang.state_count() == 64 && g.order() == 48 && got == want && simples.simples.size() == 12 &&
                  simples.self_dual == std::optional<bool>(true) && simples.single_orbit && simples.orbit_size == 12;
  std::string orbits;
  for (const auto& o : rep.orbits) {
    orbits += (orbits.empty() ? "" : " ") + o.type + ":" + std::to_string(o.states.size()) + "/" + std::to_string(o.stabilizer_order);
  }
  return {ok, "|E|=" + std::to_string(lang.state_count()) + " |G|=" + std::to_string(g.order()) + " orbits(size/stab) " + orbits +
                  "; " + std::to_string(simples.simples.size()) + " self-dual simples, one orbit of " +
                  std::to_string(simples.orbit_size)};
}

Outcome carnap_contents() {
  const carnap::CarnapLanguage lang = carnap::build_language(3, {2, 2}, {"A", "G"});
  carnap::Proposition e = lang.empty_proposition();
  e.set(0);
  const std::size_t ce = lang.content(e), cne = lang.content(~e);
  const carnap::SimpleReport simples = carnap::simple_propositions(lang, carnap::build_symmetry_group(lang));
  const std::size_t caa = lang.content(simples.simples.at(0).states);
  return {ce == 63 && cne == 1, "c(e)=" + std::to_string(ce) + " c(not e)=" + std::to_string(cne) + "; c(aA)=" +
                                    std::to_string(caa) + " by enumeration (published value 58 not reproduced, see README)"};
}

Outcome backprop(Rng& rng) {
  double worst_fd = 0.0, worst_rev = 0.0;
  std::size_t paths = 0;
  std::normal_distribution<double> g(0.0, 1.0);
  auto rvec = [&](std::size_t n) {
    dyn::Vec v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = g(rng);
    return v;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const dyn::WeightedNetwork net = dyn::random_fork_network(rng);
    const dyn::Vec w = net.random_parameters(rng, 0.7);
    std::vector<dyn::Vec> x, t;
    for (std::size_t v : net.input_vertices()) x.push_back(rvec(net.node(v).dim));
    for (std::size_t v : net.output_vertices()) t.push_back(rvec(net.node(v).dim));
    const dyn::PathGradient pg = dyn::gradient_paths(net, w, x, t);
    paths += pg.path_count;
    worst_fd = std::max(worst_fd, dyn::relative_error(pg.gradient, dyn::gradient_fd(net, w, x, t, kFdStep)));
    worst_rev = std::max(worst_rev, dyn::relative_error(pg.gradient, dyn::gradient_reverse(net, w, x, t)));
  }
  return {worst_fd <= kFdTol && worst_rev <= kReverseTol, "100 networks, " + std::to_string(paths) +
                                                              " paths; max rel. error vs FD " + fmt(worst_fd) +
                                                              ", vs reverse " + fmt(worst_rev)};
}

Outcome section_counts(Rng& rng) {
  std::size_t mismatches = 0, total = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + std::uniform_int_distribution<std::size_t>(0, 8)(rng);
    const site::SiteGraph g = random_dag(rng, n, 0.4);
    const site::ForkGraph fg = site::fork_surgery(g);
    std::uniform_int_distribution<std::size_t> states(1, 4);
    std::vector<std::size_t> sizes(fg.size());
    for (auto& s : sizes) s = states(rng);
    const std::uint64_t salt = rng();
    const presheaf::Dynamics dyn = [&](std::size_t v, std::span<const presheaf::State> src) {
      std::uint64_t h = v * 0x9E3779B97F4A7C15ULL ^ salt;
      for (presheaf::State s : src) h = (h ^ s) * 0x100000001B3ULL;
      return static_cast<presheaf::State>(h % sizes[v]);
    };
    const presheaf::Presheaf f = presheaf::feed_forward_presheaf(fg, sizes, dyn);
    std::size_t expected = 1;
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (g.roles[v] == site::Role::input) expected *= sizes[v];
    }
    const std::size_t got = presheaf::sections(f).size();
    total += got;
    if (got != expected) ++mismatches;
  }
  return {mismatches == 0, "100 sheaves, " + std::to_string(total) + " sections in total, " + std::to_string(mismatches) + " mismatches"};
}

Outcome poset_construction(Rng& rng) {
  std::size_t failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + std::uniform_int_distribution<std::size_t>(0, 10)(rng);
    try {
      const site::SiteGraph g = random_dag(rng, n, 0.35);
      const FinitePoset p = site::build_poset(site::fork_surgery(g));
      bool ok = true;
      for (std::size_t x = 0; x < p.size(); ++x) {
        for (std::size_t y = 0; y < p.size(); ++y) ok = ok && (x == y || !(p.leq(x, y) && p.leq(y, x)));
      }
      const site::StructureReport r = site::classify_vertices(p);
      for (std::size_t x : r.minimal.members()) {
        ok = ok && (r.tags[x] == VertexKind::output || r.tags[x] == VertexKind::tip || r.maximal.contains(x));
      }
      for (std::size_t x : r.maximal.members()) {
        ok = ok && (r.tags[x] == VertexKind::input || r.tags[x] == VertexKind::tang || r.minimal.contains(x));
      }
      if (!ok) ++failures;
    } catch (const StructureError&) {
      ++failures;
    }
  }
  return {failures == 0, "100 DAGs, " + std::to_string(failures) + " failures"};
}

Outcome loop_ranks(const std::filesystem::path& dir) {
  const std::size_t lstm = site::loop_rank(site::fork_surgery(site::load_architecture(dir / "lstm.json")));
  const std::size_t gru = site::loop_rank(site::fork_surgery(site::load_architecture(dir / "gru.json")));
  return {lstm == 3 && gru == 5, "LSTM " + std::to_string(lstm) + ", GRU " + std::to_string(gru)};
}

Outcome parameter_counts(const std::filesystem::path& dir) {
  const site::SiteGraph lg = site::load_architecture(dir / "lstm.json");
  const site::SiteGraph gg = site::load_architecture(dir / "gru.json");
  const site::SiteGraph mg = site::load_architecture(dir / "mgu2.json");
  std::size_t failures = 0;
  for (std::size_t m = 1; m <= 8; ++m) {
    for (std::size_t n = 1; n <= 8; ++n) {
      const bool ok =
          dyn::lstm_network(dyn::LstmParams::zeros(m, n), lg).net.weight_count() == 4 * m * m + 4 * m * n &&
          dyn::gru_network(dyn::GruParams::zeros(m, n), gg).net.weight_count() == 3 * m * m + 3 * m * n &&
          dyn::mgu2_network(dyn::Mgu2Params::zeros(m, n), mg).net.weight_count() == 2 * m * m + m * n &&
          dyn::cubic_network(dyn::CubicParams::zeros(m, n)).net.weight_count() == m * m + 2 * m * n &&
          dyn::lstm_parameter_count(m, n) == 4 * m * m + 4 * m * n && dyn::gru_parameter_count(m, n) == 3 * m * m + 3 * m * n &&
          dyn::mgu2_parameter_count(m, n) == 2 * m * m + m * n && dyn::cubic_parameter_count(m, n) == m * m + 2 * m * n;
      if (!ok) ++failures;
    }
  }
  return {failures == 0, "64 (m,n) pairs, counted on the cell networks; " + std::to_string(failures) + " mismatches"};
}

Outcome discriminant(Rng& rng) {
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  std::size_t checked = 0, disagreements = 0;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = d(rng), v = d(rng);
    const auto roots = dyn::cubic_roots(u, v);
    for (double z : roots) worst = std::max(worst, std::abs(z * z * z + u * z + v));
    const double delta = dyn::discriminant(u, v);
    if (std::abs(delta) <= kDeltaBand) continue;
    ++checked;
    std::vector<double> distinct = roots;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const std::size_t expected = delta < 0 ? 3 : 1;
    if (distinct.size() != expected || dyn::companion_real_root_count(u, v) != expected) ++disagreements;
  }
  return {disagreements == 0 && worst <= kRootResidual, std::to_string(checked) + " samples off the band, " +
                                                            std::to_string(disagreements) + " disagreements; max residual " + fmt(worst)};
}

Outcome braids() {
  const dyn::BraidReport r = dyn::braid_relation_check(dyn::BraidRep::standard());
  return {r.determinants_one && r.relation_holds && r.center_sign == -1,
          std::string("s1 s2 s1 = s2 s1 s2: ") + (r.relation_holds ? "yes" : "no") + "; (s1 s2)^3 = " +
              (r.center_sign == -1 ? "-I" : (r.center_sign == 1 ? "I" : "other"))};
}

using GPtr = std::shared_ptr<const logic::FiniteGroupoid>;

GPtr share(logic::FiniteGroupoid g) { return std::make_shared<const logic::FiniteGroupoid>(std::move(g)); }

std::vector<std::string> names(std::size_t n, const char* prefix) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

Perm random_perm(Rng& rng, std::size_t k) {
  Perm p = identity_perm(k);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

logic::FiniteGroupoid random_groupoid(Rng& rng, std::size_t objects, std::size_t gens, std::size_t degree) {
  std::uniform_int_distribution<std::size_t> obj(0, objects - 1);
  std::vector<logic::Morphism> ms;
  for (std::size_t i = 0; i < gens; ++i) ms.push_back({obj(rng), obj(rng), random_perm(rng, degree)});
  return logic::FiniteGroupoid::generate(names(objects, "o"), degree, ms, 400);
}

logic::GroupoidFunctor label_functor(Rng& rng, const GPtr& target, std::size_t objects, std::size_t gens) {
  std::uniform_int_distribution<std::size_t> tobj(0, target->object_count() - 1);
  std::vector<std::size_t> omap;
  for (std::size_t i = 0; i < objects; ++i) omap.push_back(tobj(rng));
  std::uniform_int_distribution<std::size_t> sobj(0, objects - 1);
  std::vector<logic::Morphism> ms, images;
  for (std::size_t i = 0; i < gens * 4 && ms.size() < gens; ++i) {
    const std::size_t a = sobj(rng), b = sobj(rng);
    std::vector<const logic::Morphism*> candidates;
    for (const logic::Morphism& m : target->morphisms()) {
      if (m.src == omap[a] && m.dst == omap[b]) candidates.push_back(&m);
    }
    if (candidates.empty()) continue;
    const logic::Morphism& pick = *candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
    ms.push_back({a, b, pick.perm});
    images.push_back(pick);
  }
  auto source = share(logic::FiniteGroupoid::generate(names(objects, "s"), target->degree(), ms, 400));
  return logic::GroupoidFunctor::from_generators(source, target, omap, images);
}

Outcome adjunction_and_fibrancy(Rng& rng) {
  std::size_t functors = 0, surjective = 0, failures = 0;
  for (int i = 0; i < 200; ++i) {
    auto target = share(random_groupoid(rng, 1 + i % 6, i % 3, 2));
    const logic::GroupoidFunctor f = label_functor(rng, target, 1 + i % 6, i % 4);
    const logic::AdjunctionReport r = logic::check_adjunction_and_section(f);
    ++functors;
    bool ok = r.adjunction && r.unit && r.counit && r.section == r.surjective;
    if (r.surjective) {
      ++surjective;
      const std::size_t nt = logic::component_count(f.target());
      for (std::uint64_t q = 0; q < (std::uint64_t{1} << nt); ++q) {
        ok = ok && logic::lambda_transport(f, logic::tau_transport(f, ElementSet(q))) == ElementSet(q);
      }
    }
    if (!ok) ++failures;
  }

  using presheaf::Presheaf;
  const FinitePoset shadok = FinitePoset::from_named_relation({"0", "1"}, {{"1", "0"}});
  const FinitePoset confluence = FinitePoset::from_named_relation({"0", "1", "2"}, {{"1", "0"}, {"2", "0"}});
  const FinitePoset divergence = FinitePoset::from_named_relation({"0", "1", "2"}, {{"0", "1"}, {"0", "2"}});
  struct Fixture {
    const char* name;
    Presheaf p;
    bool expect;
  };
  const std::vector<Fixture> fixtures{
      {"shadok-accept", Presheaf::make(shadok, {3, 2}, {{{1, 0}, {0, 1, 1}}}), true},
      {"shadok-reject", Presheaf::make(shadok, {3, 2}, {{{1, 0}, {0, 0, 0}}}), false},
      {"and-accept", Presheaf::make(confluence, {2, 2, 1}, {{{1, 0}, {0, 1}}, {{2, 0}, {0, 0}}}), true},
      {"and-reject", Presheaf::make(confluence, {2, 2, 2}, {{{1, 0}, {0, 1}}, {{2, 0}, {0, 1}}}), false},
      {"or-accept", Presheaf::make(divergence, {2, 2, 3}, {{{0, 1}, {1, 0}}, {{0, 2}, {0, 1, 1}}}), true},
      {"or-reject", Presheaf::make(divergence, {2, 2, 3}, {{{0, 1}, {1, 1}}, {{0, 2}, {0, 1, 1}}}), false},
  };
  std::size_t verdicts = 0;
  for (const auto& fx : fixtures) {
    if (logic::check_fibrant_injective(fx.p).fibrant() == fx.expect) ++verdicts;
  }
  return {failures == 0 && surjective > 0 && verdicts == fixtures.size(),
          std::to_string(functors) + " functors (" + std::to_string(surjective) + " surjective), " + std::to_string(failures) +
              " law failures; fibrancy fixtures " + std::to_string(verdicts) + "/" + std::to_string(fixtures.size())};
}

Outcome monoid_action() {
  std::size_t triples = 0, failures = 0;
  for (std::size_t n = 1; n <= 5; ++n) {
    const info::BooleanAlgebra alg = info::boolean_algebra(n);
    const auto props = info::all_propositions(n);
    for (const auto& t : props) {
      for (const auto& q : props) {
        for (const auto& r : props) {
          ++triples;
          if (alg.condition(alg.condition(t, q), r) != alg.condition(t, alg.meet(q, r))) ++failures;
        }
      }
    }
  }
  const FinitePoset two = FinitePoset::chain(2);
  const info::BooleanAlgebra open = info::open_set_algebra(two);
  const auto opens = info::all_propositions(two);
  for (const auto& t : opens) {
    for (const auto& q : opens) {
      for (const auto& r : opens) {
        ++triples;
        if (open.condition(open.condition(t, q), r) != open.condition(t, open.meet(q, r))) ++failures;
      }
    }
  }
  return {failures == 0, std::to_string(triples) + " triples, " + std::to_string(failures) + " failures"};
}

}  // namespace

Options default_options() {
  Options o;
  o.fixtures = SHEAFNET_FIXTURE_DIR;
  return o;
}

std::vector<CriterionResult> run(const Options& opt) {
  struct Entry {
    int id;
    const char* name;
    double limit;
    std::function<Outcome(Rng&)> body;
  };
  const std::vector<Entry> entries{
      {1, "heyting-oracle", kHeytingSeconds, [](Rng& r) { return heyting_oracle(r); }},
      {2, "chain-implication", kChainSeconds, [](Rng&) { return chain_oracle(); }},
      {3, "chain-precision-concavity", 0.0, [](Rng&) { return chain_precision(); }},
      {4, "cocycle", 0.0, [](Rng& r) { return cocycle(r); }},
      {5, "mutual-information", 0.0, [](Rng& r) { return information(r); }},
      {6, "carnap-orbits", kCarnapSeconds, [](Rng&) { return carnap_numbers(); }},
      {7, "carnap-contents", 0.0, [](Rng&) { return carnap_contents(); }},
      {8, "backprop-paths", 0.0, [](Rng& r) { return backprop(r); }},
      {9, "section-count", 0.0, [](Rng& r) { return section_counts(r); }},
      {10, "poset-construction", 0.0, [](Rng& r) { return poset_construction(r); }},
      {11, "loop-ranks", 0.0, [&](Rng&) { return loop_ranks(opt.fixtures); }},
      {12, "parameter-counts", 0.0, [&](Rng&) { return parameter_counts(opt.fixtures); }},
      {13, "discriminant", 0.0, [](Rng& r) { return discriminant(r); }},
      {14, "braid-relation", 0.0, [](Rng&) { return braids(); }},
      {15, "adjunction-fibrancy", 0.0, [](Rng& r) { return adjunction_and_fibrancy(r); }},
      {16, "monoid-action", 0.0, [](Rng&) { return monoid_action(); }},
  };
  std::vector<CriterionResult> out;
  for (const Entry& e : entries) {
    if (!opt.only.empty() && opt.only.count(e.id) == 0) continue;
    Rng rng(opt.seed * 1000003ULL + static_cast<std::uint64_t>(e.id));
    CriterionResult r;
    r.id = e.id;
    r.name = e.name;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Outcome o = e.body(rng);
      r.pass = o.pass;
      r.detail = o.detail;
    } catch (const std::exception& ex) {
      r.pass = false;
      r.detail = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (e.limit > 0.0 && r.seconds > e.limit) {
      r.pass = false;
      r.detail += "; over the " + fmt(e.limit) + " s limit";
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS " : "FAIL ") << std::setw(2) << std::setfill('0') << r.id << ' ' << r.name << ": " << r.detail
     << " (" << std::fixed << std::setprecision(2) << r.seconds << " s)";
  return os.str();
}

int run_and_print(const Options& opt, std::ostream& out) {
  int failures = 0;
  for (const CriterionResult& r : run(opt)) {
    out << format_line(r) << '\n' << std::flush;
    if (!r.pass) ++failures;
  }
  return failures;
}

}  // namespace sheafnet::acceptance
