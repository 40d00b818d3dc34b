#include "sheafnet/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "sheafnet/acceptance.hpp"
#include "sheafnet/cells.hpp"
#include "sheafnet/cubic.hpp"
#include "sheafnet/dynamics.hpp"
#include "sheafnet/error.hpp"
#include "sheafnet/heyting.hpp"
#include "sheafnet/json_io.hpp"

namespace sheafnet::cli {

namespace {

using io::json;
using Rng = std::mt19937_64;

constexpr double kCocycleTol = 1e-12;
constexpr double kNetworkTol = 1e-12;

struct Config {
  std::uint64_t seed = 0;
  std::string out_path;
  std::string format = "json";
  std::optional<std::size_t> bound;
  std::size_t section_bound = presheaf::kDefaultSectionBound;

  std::size_t open_bound() const { return bound.value_or(configured_open_set_bound()); }
};

/// A finished report: serialized text plus the exit status.
struct Report {
  std::string text;
  int status = kExitOk;
};

Report json_report(const json& doc, bool ok = true) { return {io::dump(doc), ok ? kExitOk : kExitCheckFailed}; }

void require_json(const Config& cfg, const char* command) {
  if (cfg.format != "json") throw InputError(std::string(command) + " supports only --format json");
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

Report sections_report(const Config& cfg, const presheaf::Presheaf& p, const presheaf::SectionSet& s, json extra) {
  if (cfg.format == "csv") {
    const json rows = io::sections_json(p, s);
    std::string text;
    for (std::size_t x = 0; x < p.size(); ++x) text += (x ? "," : "") + csv_cell(p.poset().id(x));
    text += '\n';
    for (const json& row : rows) {
      for (std::size_t x = 0; x < p.size(); ++x) text += (x ? "," : "") + csv_cell(row.at(p.poset().id(x)).get<std::string>());
      text += '\n';
    }
    return {text, extra.value("ok", true) ? kExitOk : kExitCheckFailed};
  }
  extra["count"] = s.size();
  extra["sections"] = io::sections_json(p, s);
  const bool ok = extra.value("ok", true);
  return json_report(extra, ok);
}

// site

Report site_command(const Config& cfg, const std::string& in, bool no_share, bool no_dup, bool stars) {
  require_json(cfg, "site");
  const site::SiteGraph g = site::load_architecture(in);
  const site::ValidationReport v = site::check_classical_directed(g);
  if (!v.ok()) {
    json list = json::array();
    for (const auto& viol : v.violations) list.push_back({{"kind", viol.kind}, {"vertices", viol.vertices}});
    return json_report({{"valid", false}, {"violations", list}}, false);
  }
  site::SurgeryOptions opt;
  opt.share_tanks = !no_share;
  opt.duplicate_inputs = !no_dup;
  json doc = io::site_report(g, opt, stars);
  doc["valid"] = true;
  return json_report(doc);
}

// sections

presheaf::Presheaf random_feed_forward(const site::ForkGraph& fg, std::size_t max_states, Rng& rng) {
  std::uniform_int_distribution<std::size_t> states(1, max_states);
  std::vector<std::size_t> sizes(fg.size());
  for (auto& s : sizes) s = states(rng);
  const std::uint64_t salt = rng();
  const presheaf::Dynamics dyn = [sizes, salt](std::size_t v, std::span<const presheaf::State> src) {
    std::uint64_t h = (v + 1) * 0x9E3779B97F4A7C15ULL ^ salt;
    for (presheaf::State s : src) h = (h ^ (s + 1)) * 0x100000001B3ULL;
    h ^= h >> 29;
    return static_cast<presheaf::State>(h % sizes[v]);
  };
  return presheaf::feed_forward_presheaf(fg, sizes, dyn);
}

Report sections_command(const Config& cfg, const std::string& in, const std::string& arch, std::size_t states) {
  if (in.empty() == arch.empty()) throw InputError("sections needs exactly one of --in or --arch");
  if (!in.empty()) {
    const presheaf::Presheaf p = io::parse_presheaf(io::read_json(in));
    return sections_report(cfg, p, presheaf::sections(p, cfg.section_bound), json::object());
  }
  if (states == 0) throw InputError("--states must be positive");
  const site::SiteGraph g = site::load_architecture(arch);
  const site::ForkGraph fg = site::fork_surgery(g);
  Rng rng(cfg.seed);
  const presheaf::Presheaf p = random_feed_forward(fg, states, rng);
  const presheaf::SectionSet s = presheaf::sections(p, cfg.section_bound);
  std::size_t expected = 1;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (g.roles[v] == site::Role::input) expected *= p.carrier_size(p.poset().index_of(g.vertices[v]));
  }
  return sections_report(cfg, p, s,
                         {{"presheaf", io::presheaf_json(p)}, {"input_product", expected}, {"ok", s.size() == expected}});
}

// cats-manifold

Report cats_command(const Config& cfg, const std::string& in, const std::string& pred_path) {
  const presheaf::Presheaf p = io::parse_presheaf(io::read_json(in));
  const auto outputs = presheaf::output_elements(p).members();
  presheaf::OutputPredicate pred = presheaf::OutputPredicate::always(outputs);
  if (!pred_path.empty()) {
    const json doc = io::read_json(pred_path);
    if (!doc.is_object()) throw InputError("predicate must map output elements to allowed states");
    std::vector<std::size_t> chosen;
    std::vector<boost::dynamic_bitset<>> allowed;
    for (const auto& [name, states] : doc.items()) {
      const std::size_t x = p.poset().index_of(name);
      boost::dynamic_bitset<> bits(p.carrier_size(x));
      if (!states.is_array()) throw InputError("allowed states of '" + name + "' must be a list");
      for (const json& s : states) {
        if (!s.is_string()) throw InputError("allowed states must be strings");
        bits.set(p.state_index(x, s.get<std::string>()));
      }
      chosen.push_back(x);
      allowed.push_back(std::move(bits));
    }
    pred = presheaf::OutputPredicate::from_parts(chosen, allowed);
  }
  const presheaf::SectionSet direct = presheaf::cats_manifold(p, pred, cfg.section_bound);
  const presheaf::SectionSet extended = presheaf::cats_manifold_extended(p, pred, cfg.section_bound);
  const bool agree = io::sections_json(p, direct) == io::sections_json(p, extended);
  return sections_report(cfg, p, direct, {{"extended_count", extended.size()}, {"extended_agrees", agree}, {"ok", agree}});
}

// heyting

Report heyting_command(const Config& cfg, const std::string& in, std::size_t chain) {
  require_json(cfg, "heyting");
  FinitePoset p;
  std::optional<presheaf::Presheaf> sheaf;
  if (!in.empty() && chain != 0) throw InputError("heyting takes --in or --chain, not both");
  if (chain != 0) {
    p = FinitePoset::chain(chain);
  } else if (!in.empty()) {
    const json doc = io::read_json(in);
    if (doc.contains("carriers")) {
      sheaf = io::parse_presheaf(doc);
      p = presheaf::SubobjectLattice(*sheaf).points();
    } else {
      p = io::parse_poset(doc);
    }
  } else {
    throw InputError("heyting needs --in or --chain");
  }
  std::vector<ElementSet> opens = lower_open_sets(p, cfg.open_bound());
  std::sort(opens.begin(), opens.end(), [](ElementSet a, ElementSet b) {
    return std::pair(a.size(), a.bits()) < std::pair(b.size(), b.bits());
  });
  auto index = [&](ElementSet s) {
    return static_cast<std::size_t>(std::find(opens.begin(), opens.end(), s) - opens.begin());
  };
  json open_list = json::array(), table = json::array(), neg = json::array();
  bool agree = true;
  for (ElementSet q : opens) {
    open_list.push_back(io::elements_json(p, q));
    json row = json::array();
    for (ElementSet t : opens) {
      const ElementSet u = heyting::implies(p, q, t);
      agree = agree && u == heyting::oracle_implies(opens, q, t);
      row.push_back(index(u));
    }
    table.push_back(row);
    neg.push_back(index(heyting::negate(p, q)));
  }
  json doc{{"elements", p.ids()}, {"opens", open_list}, {"implies", table}, {"negate", neg}, {"oracle_agrees", agree}};
  if (sheaf) {
    const presheaf::SubobjectLattice lattice(*sheaf);
    json subs = json::array();
    for (ElementSet q : opens) subs.push_back(io::subobject_json(*sheaf, lattice.from_mask(q)));
    doc["subobjects"] = subs;
  }
  return json_report(doc, agree);
}

// stack

Report fibrant_command(const Config& cfg, const std::string& in) {
  require_json(cfg, "stack check-fibrant");
  const json doc = io::read_json(in);
  if (doc.contains("fibers")) return json_report(io::fibrant_json(logic::check_fibrant_injective(io::parse_stack(doc))));
  return json_report(io::fibrant_json(logic::check_fibrant_injective(io::parse_presheaf(doc))));
}

Report adjunction_command(const Config& cfg, const std::string& in) {
  require_json(cfg, "stack adjunction");
  const logic::GroupoidFunctor f = io::parse_functor(io::read_json(in));
  const logic::AdjunctionReport r = logic::check_adjunction_and_section(f);
  return json_report(io::adjunction_json(r, f), r.ok());
}

// info

struct InfoArgs {
  std::string language;
  std::vector<std::string> theory;
  std::vector<std::string> given;
  std::vector<std::string> given2;
  std::vector<std::string> exclude;
  std::vector<double> delta;
  std::vector<std::size_t> depths;
  std::size_t samples = 1000;
  bool has_given = false;
  bool has_given2 = false;
};

ElementSet random_subset(Rng& rng, ElementSet within) {
  ElementSet out;
  for (std::size_t i : within.members()) {
    if (rng() & 1U) out.insert(i);
  }
  return out;
}

json psi_delta_report(const std::vector<double>& delta_values, const std::vector<std::size_t>& depths) {
  const info::DeltaSequence delta = info::DeltaSequence::make(delta_values);
  const heyting::InjectiveChain e = heyting::InjectiveChain::from_depths(depths, delta.n());
  const info::ChainAlgebra alg = info::chain_algebra(e);
  const auto props = info::all_propositions(e);
  if (props.size() > 512) throw BoundExceeded("psi_delta report limited to 512 chain subobjects");
  const info::Precision<heyting::ChainSubobject> psi = [&](const heyting::ChainSubobject& t) {
    return info::ExtendedReal(info::psi_delta(e, t, delta));
  };
  const auto rep = info::check_concavity(alg, psi, info::concavity_domain(alg, props));
  json doc{{"subobjects", props.size()},
           {"strictly_increasing", info::is_strictly_increasing(alg, psi, props)},
           {"samples", rep.samples},
           {"min_double_difference", io::real_json(rep.min_value)},
           {"concave", rep.concave(0.0)}};
  if (rep.witness && !rep.concave(0.0)) {
    auto levels = [](const heyting::ChainSubobject& y) {
      json out = json::array();
      for (ElementSet l : y) {
        json lv = json::array();
        for (std::size_t s : l.members()) lv.push_back(s);
        out.push_back(lv);
      }
      return out;
    };
    doc["witness"] = {{"p", levels(rep.witness->p)}, {"q", levels(rep.witness->q)}, {"t", levels(rep.witness->t)},
                      {"t_prime", levels(rep.witness->t2)}};
  }
  return doc;
}

Report info_command(const Config& cfg, const InfoArgs& a) {
  require_json(cfg, "info");
  const info::BooleanLanguage lang = io::parse_language(io::read_json(a.language));
  const info::BooleanAlgebra alg = info::boolean_algebra(lang.size());
  const ElementSet p = lang.proposition(a.exclude);
  if (p == lang.all()) throw InputError("--exclude may not cover every state");
  const ElementSet np = lang.all() - p;
  const info::Precision<ElementSet> psi = p.empty() ? info::psi_cbh(lang) : info::psi_localized(lang, p);
  const ElementSet t = a.theory.empty() ? np : lang.proposition(a.theory);
  if (!t.subset_of(np)) throw InputError("the theory must exclude every state of --exclude");
  const ElementSet q1 = lang.proposition(a.given);
  const ElementSet q2 = lang.proposition(a.given2);
  if (a.has_given && !p.subset_of(q1)) throw InputError("--given must contain every state of --exclude");
  if (a.has_given2 && !p.subset_of(q2)) throw InputError("--given2 must contain every state of --exclude");
  Rng rng(cfg.seed);

  json doc{{"states", lang.labels()}, {"theory", io::proposition_json(lang, t)}, {"psi", io::real_json(psi(t))}};
  doc["localized_at"] = io::proposition_json(lang, p);
  doc["ambiguity"] = a.has_given ? io::real_json(info::ambiguity(alg, psi, t, q1)) : json(nullptr);
  doc["mutual_information"] =
      a.has_given && a.has_given2 ? io::real_json(info::mutual_information(alg, psi, t, q1, q2)) : json(nullptr);

  std::vector<info::CocycleSample<ElementSet>> csamples;
  while (csamples.size() < a.samples && !np.empty()) {
    const ElementSet s = random_subset(rng, np);
    if (s.empty()) continue;
    csamples.push_back({s, p | random_subset(rng, lang.all()), p | random_subset(rng, lang.all())});
  }
  const auto coc = info::check_cocycle(alg, info::coboundary(alg, psi), csamples, &psi);
  const bool coc_ok = coc.within(kCocycleTol);

  // Double differences at the localizing proposition, exhaustive for small languages.
  std::vector<info::ConcavitySample<ElementSet>> dsamples;
  const bool exhaustive = lang.size() <= 6;
  if (exhaustive) {
    for (const auto& smp : info::concavity_domain(alg, info::all_propositions(lang.size()))) {
      if (smp.p == p) dsamples.push_back(smp);
    }
  } else {
    for (std::size_t i = 0; i < a.samples; ++i) {
      const ElementSet t2 = random_subset(rng, np);
      dsamples.push_back({p, p | random_subset(rng, lang.all()), random_subset(rng, t2), t2});
    }
  }
  const auto conc = info::check_concavity(alg, psi, dsamples);
  const bool conc_ok = conc.concave(kCocycleTol);

  json independence = nullptr;
  if (a.has_given && a.has_given2) {
    const auto ind = info::check_independence(lang, q1, q2);
    independence = {{"independent", ind.independent}, {"additivity_residual", io::real_json(ind.additivity_residual)}};
  }
  doc["checks"] = {{"cocycle", {{"samples", coc.samples},
                                {"max_residual", io::real_json(coc.max_residual)},
                                {"max_coboundary_residual", io::real_json(coc.max_coboundary_residual.value_or(0.0))},
                                {"ok", coc_ok}}},
                   {"concavity", {{"exhaustive", exhaustive},
                                  {"samples", conc.samples},
                                  {"skipped", conc.skipped},
                                  {"min_double_difference", io::real_json(conc.min_value)},
                                  {"ok", conc_ok}}},
                   {"independence", independence}};
  if (!a.delta.empty() || !a.depths.empty()) {
    if (a.delta.empty() || a.depths.empty()) throw InputError("--delta and --depths go together");
    doc["psi_delta"] = psi_delta_report(a.delta, a.depths);
  }
  return json_report(doc, coc_ok && conc_ok);
}

// carnap

Report carnap_command(const Config& cfg, std::size_t subjects, const std::vector<std::size_t>& attributes,
                      const std::vector<std::string>& names) {
  if (subjects == 0 || attributes.empty()) throw InputError("carnap needs at least one subject and one attribute");
  const carnap::CarnapLanguage lang = carnap::build_language(subjects, attributes, names);
  const carnap::SymmetryGroup g = carnap::build_symmetry_group(lang);
  const json doc = io::carnap_json(lang, g);
  if (cfg.format == "csv") {
    std::string text = "type,size,stabilizer,representative\n";
    for (const json& o : doc.at("orbits")) {
      text += csv_cell(o.at("type").get<std::string>()) + "," + std::to_string(o.at("size").get<std::size_t>()) + "," +
              std::to_string(o.at("stabilizer").get<std::size_t>()) + "," +
              csv_cell(o.at("representative").get<std::string>()) + "\n";
    }
    return {text, kExitOk};
  }
  return json_report(doc);
}

// dyn

dyn::Vec random_vec(Rng& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  dyn::Vec v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = g(rng);
  return v;
}

json vec_json(const dyn::Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(io::real_json(v[i]));
  return out;
}

struct CellArgs {
  std::string cell;
  std::size_t m = 2;
  std::size_t n = 2;
  std::size_t steps = 5;
  std::string fixtures;
};

Report cells_command(const Config& cfg, const CellArgs& a) {
  if (a.m == 0 || a.n == 0) throw InputError("--m and --n must be positive");
  const std::filesystem::path dir = a.fixtures.empty() ? std::filesystem::path(SHEAFNET_FIXTURE_DIR) : std::filesystem::path(a.fixtures);
  Rng rng(cfg.seed);
  std::vector<dyn::Vec> xs;
  std::vector<json> rows;
  dyn::Vec h = dyn::Vec::Zero(static_cast<Eigen::Index>(a.m));
  dyn::Vec c = h;
  double residual = 0.0;
  std::size_t params = 0;
  std::size_t net_weights = 0;

  auto record = [&](std::size_t step, const dyn::Vec& x, const dyn::Vec& hn, const dyn::Vec* cn) {
    json row{{"step", step}, {"x", vec_json(x)}, {"h", vec_json(hn)}};
    if (cn != nullptr) row["c"] = vec_json(*cn);
    rows.push_back(std::move(row));
  };

  if (a.cell == "lstm") {
    const dyn::LstmParams p = dyn::LstmParams::random(rng, a.m, a.n);
    const site::SiteGraph g = site::load_architecture(dir / "lstm.json");
    const dyn::CellNetwork net = dyn::lstm_network(p, g);
    params = dyn::lstm_parameter_count(a.m, a.n);
    net_weights = net.net.weight_count();
    for (std::size_t s = 0; s < a.steps; ++s) {
      const dyn::Vec x = random_vec(rng, a.n);
      const dyn::LstmState st = dyn::lstm_step(p, x, h, c);
      const auto ev = dyn::feedforward(net.net, net.w, net.inputs({{"x", x}, {"h_prev", h}, {"c_prev", c}}));
      residual = std::max({residual, (ev.value[net.output] - st.h).lpNorm<Eigen::Infinity>(),
                           (ev.value[g.index_of("c")] - st.c).lpNorm<Eigen::Infinity>()});
      h = st.h;
      c = st.c;
      record(s, x, h, &c);
    }
  } else if (a.cell == "gru" || a.cell == "mgu2" || a.cell == "cubic") {
    std::function<dyn::Vec(const dyn::Vec&, const dyn::Vec&)> step;
    dyn::CellNetwork net;
    if (a.cell == "gru") {
      const dyn::GruParams p = dyn::GruParams::random(rng, a.m, a.n);
      net = dyn::gru_network(p, site::load_architecture(dir / "gru.json"));
      step = [p](const dyn::Vec& x, const dyn::Vec& hp) { return dyn::gru_step(p, x, hp); };
      params = dyn::gru_parameter_count(a.m, a.n);
    } else if (a.cell == "mgu2") {
      const dyn::Mgu2Params p = dyn::Mgu2Params::random(rng, a.m, a.n);
      net = dyn::mgu2_network(p, site::load_architecture(dir / "mgu2.json"));
      step = [p](const dyn::Vec& x, const dyn::Vec& hp) { return dyn::mgu2_step(p, x, hp); };
      params = dyn::mgu2_parameter_count(a.m, a.n);
    } else {
      const dyn::CubicParams p = dyn::CubicParams::random(rng, a.m, a.n);
      net = dyn::cubic_network(p);
      step = [p](const dyn::Vec& x, const dyn::Vec& hp) { return dyn::cubic_cell_step(p, x, hp); };
      params = dyn::cubic_parameter_count(a.m, a.n);
    }
    net_weights = net.net.weight_count();
    for (std::size_t s = 0; s < a.steps; ++s) {
      const dyn::Vec x = random_vec(rng, a.n);
      const dyn::Vec hn = step(x, h);
      const auto ev = dyn::feedforward(net.net, net.w, net.inputs({{"x", x}, {"h_prev", h}}));
      residual = std::max(residual, (ev.value[net.output] - hn).lpNorm<Eigen::Infinity>());
      h = hn;
      record(s, x, h, nullptr);
    }
  } else {
    throw InputError("--cell must be one of lstm, gru, mgu2, cubic");
  }

  const bool ok = residual <= kNetworkTol && params == net_weights;
  if (cfg.format == "csv") {
    std::string text = "step,component,x_or_h,value\n";
    for (const json& r : rows) {
      for (const char* key : {"x", "h", "c"}) {
        if (!r.contains(key)) continue;
        for (std::size_t i = 0; i < r.at(key).size(); ++i) {
          text += std::to_string(r.at("step").get<std::size_t>()) + "," + std::to_string(i) + "," + key + "," +
                  csv_number(r.at(key)[i].get<double>()) + "\n";
        }
      }
    }
    return {text, ok ? kExitOk : kExitCheckFailed};
  }
  return json_report({{"cell", a.cell},
                      {"m", a.m},
                      {"n", a.n},
                      {"parameter_count", params},
                      {"network_weight_count", net_weights},
                      {"trajectory", rows},
                      {"network_max_residual", io::real_json(residual)},
                      {"ok", ok}},
                     ok);
}

Report gradcheck_command(const Config& cfg, const std::string& arch, std::size_t dim, double scale, double tol) {
  require_json(cfg, "dyn gradcheck");
  if (dim == 0) throw InputError("--dim must be positive");
  const site::SiteGraph g = site::load_architecture(arch);
  const dyn::WeightedNetwork net = dyn::default_network(g, dim);
  Rng rng(cfg.seed);
  const dyn::Vec w = net.random_parameters(rng, scale);
  std::vector<dyn::Vec> x, t;
  for (std::size_t v : net.input_vertices()) x.push_back(random_vec(rng, net.node(v).dim));
  for (std::size_t v : net.output_vertices()) t.push_back(random_vec(rng, net.node(v).dim));
  const dyn::PathGradient pg = dyn::gradient_paths(net, w, x, t);
  const double fd = dyn::relative_error(pg.gradient, dyn::gradient_fd(net, w, x, t, 1e-5));
  const double rev = dyn::relative_error(pg.gradient, dyn::gradient_reverse(net, w, x, t));
  const bool ok = fd <= tol && rev <= kNetworkTol;
  return json_report({{"parameters", net.parameter_count()},
                      {"paths", pg.path_count},
                      {"saturated", pg.saturated},
                      {"loss", io::real_json(dyn::loss(net, w, x, t))},
                      {"relative_error_fd", io::real_json(fd)},
                      {"relative_error_reverse", io::real_json(rev)},
                      {"tolerance_fd", tol},
                      {"tolerance_reverse", kNetworkTol},
                      {"ok", ok}},
                     ok);
}

Report cusp_command(const Config& cfg, std::size_t grid, double range) {
  const auto rows = dyn::cusp_scan(grid, range);
  if (cfg.format == "json") {
    json list = json::array();
    for (const auto& r : rows) {
      list.push_back({{"u", r.u}, {"v", r.v}, {"delta", io::real_json(r.delta)}, {"root_count", r.root_count}});
    }
    return json_report({{"grid", grid}, {"range", range}, {"rows", list}});
  }
  std::string text = "u,v,delta,root_count\n";
  for (const auto& r : rows) {
    text += csv_number(r.u) + "," + csv_number(r.v) + "," + csv_number(r.delta) + "," + std::to_string(r.root_count) + "\n";
  }
  return {text, kExitOk};
}

// verify

Report verify_command(const Config& cfg, bool all, const std::vector<int>& only, const std::string& fixtures) {
  if (!all && only.empty()) throw InputError("verify needs --all or --criterion");
  acceptance::Options opt = acceptance::default_options();
  opt.seed = cfg.seed;
  if (!fixtures.empty()) opt.fixtures = fixtures;
  opt.only.insert(only.begin(), only.end());
  const auto results = acceptance::run(opt);
  std::size_t failures = 0;
  for (const auto& r : results) failures += r.pass ? 0 : 1;
  if (cfg.format == "json") {
    json list = json::array();
    for (const auto& r : results) list.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    return json_report({{"criteria", list}, {"failures", failures}}, failures == 0);
  }
  std::string text;
  for (const auto& r : results) text += acceptance::format_line(r) + "\n";
  text += failures == 0 ? "all criteria pass\n" : "failing criteria: " + std::to_string(failures) + "\n";
  return {text, failures == 0 ? kExitOk : kExitCheckFailed};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite sheaf, logic and information computations on network architectures", "sheafnet"};
  app.require_subcommand(1);
  app.fallthrough();
  Config cfg;
  std::size_t bound = 0;
  app.add_option("--seed", cfg.seed, "Seed for random samplers")->default_val(0);
  app.add_option("--out", cfg.out_path, "Write the report to a file");
  app.add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--bound", bound, "Element bound for open-set enumeration (overrides SHEAFNET_BOUND)")
      ->check(CLI::PositiveNumber);
  app.add_option("--section-bound", cfg.section_bound, "Bound on explored partial sections")->check(CLI::PositiveNumber);

  std::function<Report()> action;

  auto* site_cmd = app.add_subcommand("site", "Fork surgery, poset and classification of an architecture");
  std::string site_in;
  bool no_share = false, no_dup = false, stars = false;
  site_cmd->add_option("--in", site_in, "Architecture JSON")->required()->check(CLI::ExistingFile);
  site_cmd->add_flag("--no-share-tanks", no_share, "One tank per join even when tine sets coincide");
  site_cmd->add_flag("--no-duplicate-inputs", no_dup, "Keep inputs as tines instead of primed copies");
  site_cmd->add_flag("--stars", stars, "Keep star vertices in the poset");
  site_cmd->callback([&] { action = [&] { return site_command(cfg, site_in, no_share, no_dup, stars); }; });

  auto* sec_cmd = app.add_subcommand("sections", "Global sections of a presheaf");
  std::string sec_in, sec_arch;
  std::size_t sec_states = 2;
  sec_cmd->add_option("--in", sec_in, "Presheaf JSON")->check(CLI::ExistingFile);
  sec_cmd->add_option("--arch", sec_arch, "Architecture JSON; uses a random feed-forward dynamics")->check(CLI::ExistingFile);
  sec_cmd->add_option("--states", sec_states, "Largest carrier size for --arch")->default_val(2);
  sec_cmd->callback([&] { action = [&] { return sections_command(cfg, sec_in, sec_arch, sec_states); }; });

  auto* cats_cmd = app.add_subcommand("cats-manifold", "Sections whose outputs satisfy a predicate");
  std::string cats_in, cats_pred;
  cats_cmd->add_option("--in", cats_in, "Presheaf JSON")->required()->check(CLI::ExistingFile);
  cats_cmd->add_option("--predicate", cats_pred, "JSON mapping output elements to allowed states")->check(CLI::ExistingFile);
  cats_cmd->callback([&] { action = [&] { return cats_command(cfg, cats_in, cats_pred); }; });

  auto* hey_cmd = app.add_subcommand("heyting", "Implication table of the open-set lattice");
  std::string hey_in;
  std::size_t hey_chain = 0;
  hey_cmd->add_option("--in", hey_in, "Poset or presheaf JSON")->check(CLI::ExistingFile);
  hey_cmd->add_option("--chain", hey_chain, "Use the chain 0 <= ... <= n-1");
  hey_cmd->callback([&] { action = [&] { return heyting_command(cfg, hey_in, hey_chain); }; });

  auto* stack_cmd = app.add_subcommand("stack", "Groupoid stacks and logic transport");
  stack_cmd->require_subcommand(1);
  auto* fib_cmd = stack_cmd->add_subcommand("check-fibrant", "Injective-model fibrancy of a stack or presheaf");
  std::string fib_in;
  fib_cmd->add_option("--in", fib_in, "Stack or presheaf JSON")->required()->check(CLI::ExistingFile);
  fib_cmd->callback([&] { action = [&] { return fibrant_command(cfg, fib_in); }; });
  auto* adj_cmd = stack_cmd->add_subcommand("adjunction", "Adjunction and section laws of a groupoid functor");
  std::string adj_in;
  adj_cmd->add_option("--in", adj_in, "Functor JSON")->required()->check(CLI::ExistingFile);
  adj_cmd->callback([&] { action = [&] { return adjunction_command(cfg, adj_in); }; });

  auto* info_cmd = app.add_subcommand("info", "Precision, ambiguity and mutual information on a language");
  InfoArgs ia;
  info_cmd->add_option("--language", ia.language, "Language JSON")->required()->check(CLI::ExistingFile);
  info_cmd->add_option("--theory", ia.theory, "Theory as comma-separated states (default: not P)")->delimiter(',');
  auto* given_opt = info_cmd->add_option("--given", ia.given, "Conditioning proposition Q1")->delimiter(',');
  auto* given2_opt = info_cmd->add_option("--given2", ia.given2, "Second proposition Q2")->delimiter(',');
  info_cmd->add_option("--exclude", ia.exclude, "Localize at P: theories exclude these states")->delimiter(',');
  info_cmd->add_option("--samples", ia.samples, "Random cocycle samples")->default_val(1000);
  info_cmd->add_option("--delta", ia.delta, "Delta sequence for the chain precision")->delimiter(',');
  info_cmd->add_option("--depths", ia.depths, "Depth of each base element of the chain")->delimiter(',');
  info_cmd->callback([&] {
    ia.has_given = given_opt->count() > 0;
    ia.has_given2 = given2_opt->count() > 0;
    action = [&] { return info_command(cfg, ia); };
  });

  auto* carnap_cmd = app.add_subcommand("carnap", "Symmetry orbits of a monadic language");
  std::size_t subjects = 3;
  std::vector<std::size_t> attributes{2, 2};
  std::vector<std::string> attr_names;
  carnap_cmd->add_option("--subjects", subjects, "Number of subjects")->default_val(3);
  carnap_cmd->add_option("--attributes", attributes, "Value count of each attribute")->delimiter(',');
  carnap_cmd->add_option("--names", attr_names, "Attribute names")->delimiter(',');
  carnap_cmd->callback([&] { action = [&] { return carnap_command(cfg, subjects, attributes, attr_names); }; });

  auto* dyn_cmd = app.add_subcommand("dyn", "Network dynamics: cells, gradient checks, cusp scan");
  dyn_cmd->require_subcommand(0, 1);
  CellArgs ca;
  dyn_cmd->add_option("--cell", ca.cell, "Cell to unroll")->check(CLI::IsMember({"lstm", "gru", "mgu2", "cubic"}));
  dyn_cmd->add_option("--m", ca.m, "Hidden size")->default_val(2);
  dyn_cmd->add_option("--n", ca.n, "Input size")->default_val(2);
  dyn_cmd->add_option("--steps", ca.steps, "Time steps")->default_val(5);
  dyn_cmd->add_option("--fixtures", ca.fixtures, "Directory with the cell architecture files")->check(CLI::ExistingDirectory);
  auto* grad_cmd = dyn_cmd->add_subcommand("gradcheck", "Path-sum gradient against reverse mode and finite differences");
  std::string grad_arch;
  std::size_t grad_dim = 2;
  double grad_scale = 0.7, grad_tol = 1e-6;
  grad_cmd->add_option("--arch", grad_arch, "Architecture JSON")->required()->check(CLI::ExistingFile);
  grad_cmd->add_option("--dim", grad_dim, "Width of every vertex")->default_val(2);
  grad_cmd->add_option("--scale", grad_scale, "Scale of the random weights")->default_val(0.7);
  grad_cmd->add_option("--tol", grad_tol, "Tolerance against finite differences")->default_val(1e-6);
  grad_cmd->callback([&] { action = [&] { return gradcheck_command(cfg, grad_arch, grad_dim, grad_scale, grad_tol); }; });
  auto* cusp_cmd = dyn_cmd->add_subcommand("cusp", "Discriminant and real root count over a (u, v) grid");
  std::size_t grid = 100;
  double range = 2.0;
  cusp_cmd->add_option("--grid", grid, "Points per axis")->default_val(100);
  cusp_cmd->add_option("--range", range, "Half-width of the square")->default_val(2.0);
  cusp_cmd->callback([&] { action = [&] { return cusp_command(cfg, grid, range); }; });
  dyn_cmd->callback([&] {
    if (dyn_cmd->get_subcommands().empty()) {
      if (ca.cell.empty()) throw CLI::RequiredError("--cell");
      action = [&] { return cells_command(cfg, ca); };
    }
  });

  auto* verify_cmd = app.add_subcommand("verify", "Acceptance suite");
  bool verify_all = false;
  std::vector<int> criteria;
  std::string verify_fixtures;
  verify_cmd->add_flag("--all", verify_all, "Run every criterion");
  verify_cmd->add_option("--criterion", criteria, "Run the listed criteria")->delimiter(',');
  verify_cmd->add_option("--fixtures", verify_fixtures, "Fixture directory")->check(CLI::ExistingDirectory);
  verify_cmd->callback([&] { action = [&] { return verify_command(cfg, verify_all, criteria, verify_fixtures); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }
  if (bound != 0) cfg.bound = bound;
  // CSV is the natural default for the scans; JSON elsewhere.
  const bool format_given = app.get_option("--format")->count() > 0;
  if (!format_given && cusp_cmd->parsed()) cfg.format = "csv";
  if (!format_given && verify_cmd->parsed()) cfg.format = "text";

  try {
    const Report r = action();
    if (cfg.out_path.empty()) {
      out << r.text;
    } else {
      std::ofstream f(cfg.out_path, std::ios::binary);
      if (!f) throw InputError("cannot write '" + cfg.out_path + "'");
      f << r.text;
    }
    return r.status;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const BoundExceeded& e) {
    err << "bound exceeded: " << e.what() << '\n';
    return kExitInputError;
  } catch (const StructureError& e) {
    err << "structure error: " << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace sheafnet::cli
