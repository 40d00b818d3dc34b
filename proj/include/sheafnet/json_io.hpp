#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "sheafnet/carnap.hpp"
#include "sheafnet/groupoid.hpp"
#include "sheafnet/poset.hpp"
#include "sheafnet/presheaf.hpp"
#include "sheafnet/seminfo.hpp"
#include "sheafnet/site.hpp"
#include "sheafnet/stack.hpp"

/// Document formats read and written by the command-line tool.  Every parser
/// throws InputError on malformed documents.  Objects serialize with sorted
/// keys, so equal values give byte-identical dumps.
namespace sheafnet::io {

using nlohmann::json;

json read_json(const std::filesystem::path& path);
json parse_json(const std::string& text);

/// {"elements":[id...], "leq":[[x,y]...]}; each pair is a generator x <= y.
FinitePoset parse_poset(const json& doc);
/// Elements and covering pairs.
json poset_json(const FinitePoset& p);

/// {"poset":..., "carriers":{x:[state...]}, "maps":{"x<=y":{state_y:state_x}}}.
presheaf::Presheaf parse_presheaf(const json& doc);
json presheaf_json(const presheaf::Presheaf& p);

/// {x:[state...]}; elements left out get the empty part.
presheaf::Subobject parse_subobject(const presheaf::Presheaf& p, const json& doc);
json subobject_json(const presheaf::Presheaf& p, const presheaf::Subobject& y);

/// Sections as an array of {element: state label}.
json sections_json(const presheaf::Presheaf& p, const presheaf::SectionSet& s);

/// {"objects":[...], "degree":k, "generators":[{"src","dst","id","perm":[...]}...]}.
/// "perm" defaults to the identity, "degree" to the longest perm (at least 1).
struct NamedGroupoid {
  std::shared_ptr<const logic::FiniteGroupoid> groupoid;
  std::vector<std::string> generator_ids;
};
NamedGroupoid parse_groupoid(const json& doc);

/// {"objects":{src_obj:dst_obj}, "generators":{src_gen: image}} where an image is
/// a target generator id, "id", or {"src","dst","perm"}.
logic::GroupoidFunctor parse_functor_maps(const NamedGroupoid& source, const NamedGroupoid& target, const json& doc);
/// {"source":groupoid, "target":groupoid, "objects":..., "generators":...}.
logic::GroupoidFunctor parse_functor(const json& doc);

/// {"poset":..., "fibers":{x:groupoid}, "glue":{"x<=y":functor maps}} for
/// every covering pair; the functor runs from the fiber at y to the fiber at x.
logic::StackOverPoset parse_stack(const json& doc);

/// {"states":[...], "measure":{state:value}?}; the measure defaults to 1.
info::BooleanLanguage parse_language(const json& doc);
/// A proposition as a list of state labels.
ElementSet parse_proposition(const info::BooleanLanguage& lang, const json& doc);
json proposition_json(const info::BooleanLanguage& lang, ElementSet s);

/// Finite values as numbers, infinities as the strings "inf" and "-inf".
json real_json(info::ExtendedReal v);
json real_json(double v);

json elements_json(const FinitePoset& p, ElementSet s);

json site_report(const site::SiteGraph& g, const site::SurgeryOptions& options, bool include_stars);
json fibrant_json(const logic::FibrantReport& r);
json adjunction_json(const logic::AdjunctionReport& r, const logic::GroupoidFunctor& f);
json carnap_json(const carnap::CarnapLanguage& lang, const carnap::SymmetryGroup& g);

/// Two-space indented dump with a trailing newline.
std::string dump(const json& doc);

}  // namespace sheafnet::io
