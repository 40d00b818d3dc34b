#include "sheafnet/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "sheafnet/error.hpp"

namespace sheafnet::io {

namespace {

const json& field(const json& doc, const char* name, const char* what) {
  if (!doc.is_object() || !doc.contains(name)) throw InputError(std::string(what) + " needs a '" + name + "' field");
  return doc.at(name);
}

std::string as_string(const json& v, const std::string& what) {
  if (!v.is_string()) throw InputError(what + " must be a string");
  return v.get<std::string>();
}

std::size_t as_index(const json& v, const std::string& what) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw InputError(what + " must be a non-negative integer");
  return v.get<std::size_t>();
}

std::vector<std::string> string_list(const json& v, const std::string& what) {
  if (!v.is_array()) throw InputError(what + " must be an array of strings");
  std::vector<std::string> out;
  for (const json& e : v) out.push_back(as_string(e, what + " entry"));
  return out;
}

IndexPair parse_pair_key(const FinitePoset& p, const std::string& key) {
  const auto at = key.find("<=");
  if (at == std::string::npos) throw InputError("map key '" + key + "' is not of the form x<=y");
  return {p.index_of(key.substr(0, at)), p.index_of(key.substr(at + 2))};
}

Perm parse_perm(const json& v, std::size_t degree) {
  if (v.is_null()) return identity_perm(degree);
  if (!v.is_array()) throw InputError("perm must be an array of indices");
  Perm p;
  for (const json& e : v) p.push_back(as_index(e, "perm entry"));
  if (p.size() != degree || !is_permutation(p)) throw InputError("perm is not a permutation of degree " + std::to_string(degree));
  return p;
}

std::size_t object_index(const logic::FiniteGroupoid& g, const json& v) {
  const std::string name = as_string(v, "object");
  const auto& objs = g.objects();
  const auto it = std::find(objs.begin(), objs.end(), name);
  if (it == objs.end()) throw InputError("unknown object '" + name + "'");
  return static_cast<std::size_t>(it - objs.begin());
}


}  // namespace

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

FinitePoset parse_poset(const json& doc) {
  std::vector<std::string> ids = string_list(field(doc, "elements", "poset"), "poset elements");
  std::vector<std::pair<std::string, std::string>> gens;
  if (doc.contains("leq")) {
    for (const json& e : doc.at("leq")) {
      if (!e.is_array() || e.size() != 2) throw InputError("poset 'leq' entries must be pairs");
      gens.emplace_back(as_string(e[0], "leq entry"), as_string(e[1], "leq entry"));
    }
  }
  return FinitePoset::from_named_relation(std::move(ids), gens);
}

json poset_json(const FinitePoset& p) {
  json leq = json::array();
  for (auto [x, y] : p.covers()) leq.push_back({p.id(x), p.id(y)});
  return {{"elements", p.ids()}, {"leq", leq}};
}

presheaf::Presheaf parse_presheaf(const json& doc) {
  FinitePoset p = parse_poset(field(doc, "poset", "presheaf"));
  const json& carriers = field(doc, "carriers", "presheaf");
  std::vector<std::vector<std::string>> labels(p.size());
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (!carriers.contains(p.id(x))) throw InputError("no carrier for element '" + p.id(x) + "'");
    labels[x] = string_list(carriers.at(p.id(x)), "carrier of '" + p.id(x) + "'");
  }
  auto label_index = [&](std::size_t x, const std::string& s) {
    const auto it = std::find(labels[x].begin(), labels[x].end(), s);
    if (it == labels[x].end()) throw InputError("unknown state '" + s + "' at '" + p.id(x) + "'");
    return static_cast<presheaf::State>(it - labels[x].begin());
  };
  std::map<IndexPair, presheaf::StateMap> maps;
  if (doc.contains("maps")) {
    for (const auto& [key, table] : doc.at("maps").items()) {
      const IndexPair xy = parse_pair_key(p, key);
      if (!table.is_object()) throw InputError("map '" + key + "' must be an object");
      presheaf::StateMap m(labels[xy.second].size(), static_cast<presheaf::State>(-1));
      for (const auto& [sy, sx] : table.items()) m[label_index(xy.second, sy)] = label_index(xy.first, as_string(sx, "map value"));
      if (std::find(m.begin(), m.end(), static_cast<presheaf::State>(-1)) != m.end()) {
        throw InputError("map '" + key + "' is not total");
      }
      maps[xy] = std::move(m);
    }
  }
  return presheaf::Presheaf::make(std::move(p), std::move(labels), maps);
}

json presheaf_json(const presheaf::Presheaf& p) {
  json carriers = json::object();
  json maps = json::object();
  const FinitePoset& po = p.poset();
  for (std::size_t x = 0; x < p.size(); ++x) carriers[po.id(x)] = p.labels(x);
  for (auto [x, y] : po.covers()) {
    json table = json::object();
    for (presheaf::State s = 0; s < p.carrier_size(y); ++s) table[p.labels(y)[s]] = p.labels(x)[p.restrict(x, y, s)];
    maps[po.id(x) + "<=" + po.id(y)] = table;
  }
  return {{"poset", poset_json(po)}, {"carriers", carriers}, {"maps", maps}};
}

presheaf::Subobject parse_subobject(const presheaf::Presheaf& p, const json& doc) {
  if (!doc.is_object()) throw InputError("subobject must map elements to state lists");
  presheaf::Subobject y = presheaf::bottom(p);
  for (const auto& [name, states] : doc.items()) {
    const std::size_t x = p.poset().index_of(name);
    for (const std::string& s : string_list(states, "subobject part")) y.parts[x].set(p.state_index(x, s));
  }
  if (!presheaf::is_subobject(p, y)) throw InputError("parts are not closed under restriction");
  return y;
}

json subobject_json(const presheaf::Presheaf& p, const presheaf::Subobject& y) {
  json out = json::object();
  for (std::size_t x = 0; x < p.size(); ++x) {
    json part = json::array();
    for (presheaf::State s = 0; s < p.carrier_size(x); ++s) {
      if (y.parts[x].test(s)) part.push_back(p.labels(x)[s]);
    }
    out[p.poset().id(x)] = part;
  }
  return out;
}

json sections_json(const presheaf::Presheaf& p, const presheaf::SectionSet& s) {
  std::vector<json> rows;
  for (const auto& t : s.tuples) {
    json row = json::object();
    for (std::size_t x = 0; x < p.size(); ++x) row[p.poset().id(x)] = p.labels(x)[t[x]];
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

NamedGroupoid parse_groupoid(const json& doc) {
  std::vector<std::string> objects = string_list(field(doc, "objects", "groupoid"), "groupoid objects");
  const json gens = doc.contains("generators") ? doc.at("generators") : json::array();
  if (!gens.is_array()) throw InputError("groupoid 'generators' must be an array");
  std::size_t degree = doc.contains("degree") ? as_index(doc.at("degree"), "degree") : 1;
  if (!doc.contains("degree")) {
    for (const json& g : gens) {
      if (g.contains("perm") && g.at("perm").is_array()) degree = std::max(degree, g.at("perm").size());
    }
  }
  NamedGroupoid out;
  std::vector<logic::Morphism> ms;
  auto obj = [&](const json& v) {
    const std::string name = as_string(v, "generator endpoint");
    const auto it = std::find(objects.begin(), objects.end(), name);
    if (it == objects.end()) throw InputError("unknown object '" + name + "'");
    return static_cast<std::size_t>(it - objects.begin());
  };
  for (const json& g : gens) {
    ms.push_back({obj(field(g, "src", "generator")), obj(field(g, "dst", "generator")),
                  parse_perm(g.contains("perm") ? g.at("perm") : json(), degree)});
    const std::string id = g.contains("id") ? as_string(g.at("id"), "generator id") : "g" + std::to_string(ms.size() - 1);
    if (std::find(out.generator_ids.begin(), out.generator_ids.end(), id) != out.generator_ids.end()) {
      throw InputError("duplicate generator id '" + id + "'");
    }
    out.generator_ids.push_back(id);
  }
  out.groupoid = std::make_shared<const logic::FiniteGroupoid>(logic::FiniteGroupoid::generate(std::move(objects), degree, ms));
  return out;
}

logic::GroupoidFunctor parse_functor_maps(const NamedGroupoid& source, const NamedGroupoid& target, const json& doc) {
  const logic::FiniteGroupoid& s = *source.groupoid;
  const logic::FiniteGroupoid& t = *target.groupoid;
  if (s.degree() != t.degree()) throw InputError("source and target groupoids have different degrees");
  const json& objects = field(doc, "objects", "functor");
  std::vector<std::size_t> omap;
  for (const std::string& o : s.objects()) {
    if (!objects.contains(o)) throw InputError("functor does not map object '" + o + "'");
    omap.push_back(object_index(t, objects.at(o)));
  }
  const json gens = doc.contains("generators") ? doc.at("generators") : json::object();
  std::vector<logic::Morphism> images;
  for (std::size_t i = 0; i < source.generator_ids.size(); ++i) {
    const std::string& id = source.generator_ids[i];
    const logic::Morphism& g = s.generators()[i];
    if (!gens.contains(id)) throw InputError("functor does not map generator '" + id + "'");
    const json& img = gens.at(id);
    if (img.is_string() && img.get<std::string>() == "id") {
      if (omap[g.src] != omap[g.dst]) throw InputError("identity image for generator '" + id + "' between distinct objects");
      images.push_back({omap[g.src], omap[g.dst], identity_perm(t.degree())});
    } else if (img.is_string()) {
      const auto it = std::find(target.generator_ids.begin(), target.generator_ids.end(), img.get<std::string>());
      if (it == target.generator_ids.end()) throw InputError("unknown target generator '" + img.get<std::string>() + "'");
      images.push_back(t.generators()[static_cast<std::size_t>(it - target.generator_ids.begin())]);
    } else {
      images.push_back({object_index(t, field(img, "src", "generator image")), object_index(t, field(img, "dst", "generator image")),
                        parse_perm(img.contains("perm") ? img.at("perm") : json(), t.degree())});
    }
  }
  return logic::GroupoidFunctor::from_generators(source.groupoid, target.groupoid, std::move(omap), images);
}

logic::GroupoidFunctor parse_functor(const json& doc) {
  return parse_functor_maps(parse_groupoid(field(doc, "source", "functor")), parse_groupoid(field(doc, "target", "functor")), doc);
}

logic::StackOverPoset parse_stack(const json& doc) {
  FinitePoset p = parse_poset(field(doc, "poset", "stack"));
  const json& fibers = field(doc, "fibers", "stack");
  std::vector<NamedGroupoid> named;
  std::vector<std::shared_ptr<const logic::FiniteGroupoid>> ptrs;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (!fibers.contains(p.id(x))) throw InputError("no fiber for element '" + p.id(x) + "'");
    named.push_back(parse_groupoid(fibers.at(p.id(x))));
    ptrs.push_back(named.back().groupoid);
  }
  std::map<IndexPair, logic::GroupoidFunctor> glue;
  if (doc.contains("glue")) {
    for (const auto& [key, maps] : doc.at("glue").items()) {
      const IndexPair xy = parse_pair_key(p, key);
      glue.emplace(xy, parse_functor_maps(named[xy.second], named[xy.first], maps));
    }
  }
  return logic::StackOverPoset::make(std::move(p), std::move(ptrs), std::move(glue));
}

info::BooleanLanguage parse_language(const json& doc) {
  std::vector<std::string> states = string_list(field(doc, "states", "language"), "language states");
  if (states.size() > ElementSet::kCapacity) throw InputError("languages are limited to 64 states");
  std::vector<double> measure(states.size(), 1.0);
  if (doc.contains("measure")) {
    const json& m = doc.at("measure");
    if (!m.is_object()) throw InputError("'measure' must map states to numbers");
    for (const auto& [state, value] : m.items()) {
      const auto it = std::find(states.begin(), states.end(), state);
      if (it == states.end()) throw InputError("measure given for unknown state '" + state + "'");
      if (!value.is_number()) throw InputError("measure of '" + state + "' must be a number");
      measure[static_cast<std::size_t>(it - states.begin())] = value.get<double>();
    }
  }
  return info::BooleanLanguage::make(std::move(states), std::move(measure));
}

ElementSet parse_proposition(const info::BooleanLanguage& lang, const json& doc) {
  return lang.proposition(string_list(doc, "proposition"));
}

json proposition_json(const info::BooleanLanguage& lang, ElementSet s) {
  json out = json::array();
  for (std::size_t i : s.members()) out.push_back(lang.labels()[i]);
  return out;
}

json real_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json real_json(info::ExtendedReal v) { return real_json(v.value()); }

json elements_json(const FinitePoset& p, ElementSet s) {
  json out = json::array();
  for (std::size_t i : s.members()) out.push_back(p.id(i));
  return out;
}

json site_report(const site::SiteGraph& g, const site::SurgeryOptions& options, bool include_stars) {
  const site::ForkGraph fg = site::fork_surgery(g, options);
  const FinitePoset p = site::build_poset(fg, include_stars);
  const site::StructureReport r = site::classify_vertices(p);
  json tags = json::object();
  for (std::size_t x = 0; x < p.size(); ++x) tags[p.id(x)] = std::string(to_string(r.tags[x]));
  json forks = json::array();
  for (const site::Fork& f : fg.forks) {
    json tines = json::array(), handles = json::array();
    for (std::size_t t : f.tines) tines.push_back(fg.ids[t]);
    for (std::size_t h : f.handles) handles.push_back(fg.ids[h]);
    forks.push_back({{"tang", fg.ids[f.tang]}, {"star", fg.ids[f.star]}, {"tines", tines}, {"handles", handles}});
  }
  json copies = json::object();
  for (auto [copy, original] : fg.input_copies) copies[fg.ids[copy]] = fg.ids[original];
  return {{"poset", poset_json(p)},
          {"classification",
           {{"tags", tags},
            {"minimal", elements_json(p, r.minimal)},
            {"maximal", elements_json(p, r.maximal)},
            {"tree_count", r.tree_count},
            {"forest", r.forest}}},
          {"loop_rank", site::loop_rank(fg)},
          {"surgery", {{"forks", forks}, {"input_copies", copies}}}};
}

json fibrant_json(const logic::FibrantReport& r) {
  json elems = json::array();
  for (const auto& v : r.elements) {
    elems.push_back({{"element", v.element}, {"condition", v.condition}, {"ok", v.ok}, {"reason", v.reason}});
  }
  return {{"fibrant", r.fibrant()}, {"elements", elems}};
}

json adjunction_json(const logic::AdjunctionReport& r, const logic::GroupoidFunctor& f) {
  json out{{"adjunction", r.adjunction},       {"unit", r.unit},
           {"counit", r.counit},               {"surjective", r.surjective},
           {"section", r.section},             {"lambda_lattice", r.lambda_lattice},
           {"tau_boolean", r.tau_boolean},     {"ok", r.ok()},
           {"failures", r.failures},           {"fibration", logic::is_fibration(f)},
           {"source_components", logic::component_count(f.source())},
           {"target_components", logic::component_count(f.target())}};
  if (r.section_witness) {
    json w = json::array();
    for (std::size_t c : r.section_witness->members()) w.push_back(c);
    out["section_witness"] = w;
  }
  return out;
}

json carnap_json(const carnap::CarnapLanguage& lang, const carnap::SymmetryGroup& g) {
  const carnap::OrbitTypeReport rep = carnap::orbit_report(lang, g);
  std::vector<const carnap::StateOrbit*> orbits;
  for (const auto& o : rep.orbits) orbits.push_back(&o);
  std::sort(orbits.begin(), orbits.end(), [](const auto* a, const auto* b) {
    return std::tie(a->type, a->states.front()) < std::tie(b->type, b->states.front());
  });
  json orbit_list = json::array();
  for (const auto* o : orbits) {
    orbit_list.push_back({{"size", o->states.size()},
                          {"stabilizer", o->stabilizer_order},
                          {"type", o->type},
                          {"representative", lang.label(o->states.front())}});
  }
  const carnap::SimpleReport simples = carnap::simple_propositions(lang, g);
  json labels = json::array();
  for (const auto& s : simples.simples) labels.push_back(s.label);
  carnap::Proposition e = lang.empty_proposition();
  e.set(0);
  json content{{"state", lang.content(e)}, {"not_state", lang.content(~e)}};
  if (!simples.simples.empty()) content["simple"] = lang.content(simples.simples.front().states);
  json simple_json{{"count", simples.simples.size()},
                   {"labels", labels},
                   {"single_orbit", simples.single_orbit},
                   {"orbit_size", simples.orbit_size}};
  simple_json["self_dual"] = simples.self_dual ? json(*simples.self_dual) : json(nullptr);
  return {{"states", lang.state_count()},
          {"group_order", g.order()},
          {"orbits", orbit_list},
          {"types_consistent", rep.types_consistent},
          {"simples", simple_json},
          {"content", content}};
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace sheafnet::io
