#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sheafnet/cli.hpp"
#include "support.hpp"

using nlohmann::json;
using testing_support::fixture;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = sheafnet::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string example(const std::string& name) { return fixture("examples/" + name).string(); }

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("site report on the chain fixture") {
  const Run r = run({"site", "--in", fixture("chain.json").string()});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["loop_rank"] == 0);
  CHECK(doc["valid"] == true);
  CHECK(doc["classification"]["maximal"] == json{"x"});
  CHECK(doc["classification"]["minimal"] == json{"y"});
  CHECK(json::parse(run({"site", "--in", fixture("lstm.json").string()}).out)["loop_rank"] == 3);
  CHECK(json::parse(run({"site", "--in", fixture("gru.json").string()}).out)["loop_rank"] == 5);
}

TEST_CASE("cyclic architecture is a check failure") {
  const auto path = temp_file("sheafnet_cycle.json", R"({"nodes":["x","a","b","y"],
    "edges":[["x","a"],["a","b"],["b","a"],["b","y"]]})");
  const Run r = run({"site", "--in", path.string()});
  CHECK(r.code == 1);
  CHECK(json::parse(r.out)["violations"][0]["kind"] == "cycle");
}

TEST_CASE("input errors exit with 2") {
  const auto bad = temp_file("sheafnet_bad.json", "{\"nodes\": [");
  CHECK(run({"site", "--in", bad.string()}).code == 2);
  CHECK(run({"site", "--in", "/nonexistent/arch.json"}).code == 2);
  CHECK(run({"no-such-command"}).code == 2);
  CHECK(run({"heyting", "--chain", "2", "--format", "csv"}).code == 2);
  CHECK(run({"heyting", "--chain", "2", "--format", "xml"}).code == 2);
  CHECK(run({"dyn"}).code == 2);
}

TEST_CASE("heyting table of the 2-chain") {
  const Run r = run({"heyting", "--chain", "2"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["opens"] == json::parse(R"([[], ["0"], ["0", "1"]])"));
  // Brute force: Q => T is the union of the opens V with V & Q inside T.
  const std::vector<std::set<std::string>> opens{{}, {"0"}, {"0", "1"}};
  for (std::size_t q = 0; q < 3; ++q) {
    for (std::size_t t = 0; t < 3; ++t) {
      std::set<std::string> u;
      for (const auto& v : opens) {
        bool inside = true;
        for (const auto& x : v) inside = inside && (!opens[q].count(x) || opens[t].count(x));
        if (inside) u.insert(v.begin(), v.end());
      }
      const std::size_t idx = static_cast<std::size_t>(std::find(opens.begin(), opens.end(), u) - opens.begin());
      CHECK(doc["implies"][q][t] == idx);
    }
  }
  CHECK(doc["implies"] == json::parse("[[2,2,2],[0,2,2],[0,1,2]]"));
  CHECK(doc["oracle_agrees"] == true);
}

TEST_CASE("enumeration bound from the environment and the flag") {
  ::setenv("SHEAFNET_BOUND", "1", 1);
  CHECK(run({"heyting", "--chain", "2"}).code == 2);
  CHECK(run({"--bound", "4", "heyting", "--chain", "2"}).code == 0);
  ::unsetenv("SHEAFNET_BOUND");
  CHECK(run({"heyting", "--chain", "2"}).code == 0);
}

TEST_CASE("carnap orbit report") {
  const Run r = run({"carnap", "--subjects", "3", "--attributes", "2,2"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["states"] == 64);
  CHECK(doc["group_order"] == 48);
  std::vector<std::size_t> sizes, stabilizers;
  for (const json& o : doc["orbits"]) {
    sizes.push_back(o["size"]);
    stabilizers.push_back(o["stabilizer"]);
  }
  CHECK(sizes == std::vector<std::size_t>{4, 24, 12, 24});
  CHECK(stabilizers == std::vector<std::size_t>{12, 2, 4, 2});
  CHECK(doc["simples"]["count"] == 12);
  CHECK(doc["simples"]["self_dual"] == true);
  CHECK(doc["content"]["state"] == 63);
  CHECK(doc["content"]["not_state"] == 1);
}

TEST_CASE("cusp scan emits csv with a header row") {
  const Run r = run({"dyn", "cusp", "--grid", "3"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "u,v,delta,root_count");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 9);
  CHECK(r.out.find("-2,0,-32,3\n") != std::string::npos);
}

TEST_CASE("same seed gives byte-identical reports") {
  const std::vector<std::vector<std::string>> commands{
      {"--seed", "7", "dyn", "--cell", "lstm", "--m", "3", "--n", "2", "--steps", "4"},
      {"--seed", "7", "info", "--language", example("language.json"), "--theory", "s1,s2", "--given", "s1,s3"},
      {"--seed", "7", "sections", "--arch", fixture("diamond.json").string(), "--states", "3"},
      {"--seed", "7", "dyn", "gradcheck", "--arch", fixture("gru.json").string()},
  };
  for (const auto& c : commands) {
    const Run a = run(c), b = run(c);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(!a.out.empty());
  }
  const Run other = run({"--seed", "8", "dyn", "--cell", "lstm", "--m", "3", "--n", "2", "--steps", "4"});
  CHECK(other.out != run(commands[0]).out);
}

TEST_CASE("cell trajectories agree with their networks") {
  for (const char* cell : {"lstm", "gru", "mgu2", "cubic"}) {
    const Run r = run({"dyn", "--cell", cell, "--m", "2", "--n", "3", "--steps", "3"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["ok"] == true);
    CHECK(doc["trajectory"].size() == 3);
    CHECK(doc["parameter_count"] == doc["network_weight_count"]);
  }
}

TEST_CASE("sections of a feed-forward sheaf match the input product") {
  const Run r = run({"--seed", "3", "sections", "--arch", fixture("lstm.json").string(), "--states", "2"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["count"] == doc["input_product"]);
}

TEST_CASE("presheaf subcommands on the example files") {
  const Run s = run({"sections", "--in", example("shadok.json")});
  REQUIRE(s.code == 0);
  CHECK(json::parse(s.out)["count"] == 3);
  const Run c = run({"cats-manifold", "--in", example("shadok.json"), "--predicate", example("predicate.json")});
  REQUIRE(c.code == 0);
  CHECK(json::parse(c.out)["count"] == 1);
  CHECK(json::parse(c.out)["extended_agrees"] == true);
  const Run csv = run({"sections", "--in", example("confluence.json"), "--format", "csv"});
  CHECK(csv.out == "y,u,v\n0,0,0\n1,1,1\n");
}

TEST_CASE("stack subcommands") {
  const Run f = run({"stack", "check-fibrant", "--in", example("shadok.json")});
  REQUIRE(f.code == 0);
  CHECK(json::parse(f.out)["fibrant"] == true);
  const auto reject = temp_file("sheafnet_shadok_reject.json", R"({
    "poset": {"elements": ["out", "in"], "leq": [["out", "in"]]},
    "carriers": {"in": ["a", "b"], "out": ["yes", "no"]},
    "maps": {"out<=in": {"a": "yes", "b": "yes"}}})");
  const Run rj = run({"stack", "check-fibrant", "--in", reject.string()});
  REQUIRE(rj.code == 0);
  CHECK(json::parse(rj.out)["fibrant"] == false);
  const Run g = run({"stack", "check-fibrant", "--in", example("stack.json")});
  REQUIRE(g.code == 0);
  CHECK(json::parse(g.out)["fibrant"] == true);
  const Run a = run({"stack", "adjunction", "--in", example("functor.json")});
  REQUIRE(a.code == 0);
  CHECK(json::parse(a.out)["surjective"] == true);
  CHECK(json::parse(a.out)["section"] == true);
  CHECK(run({"stack"}).code == 2);
}

TEST_CASE("info report fields") {
  const Run r = run({"info", "--language", example("language.json"), "--theory", "s1,s2", "--given", "s1,s3", "--given2",
                     "s2,s3,s4"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  // Measure 1,2,3,4: psi(T) = ln(3/10); T|Q1 = {s1,s2,s4} so the ambiguity is ln(7/3).
  CHECK(doc["psi"].get<double>() == doctest::Approx(std::log(0.3)).epsilon(1e-15));
  CHECK(doc["ambiguity"].get<double>() == doctest::Approx(std::log(7.0 / 3.0)).epsilon(1e-15));
  CHECK(doc["mutual_information"] == 0.0);
  CHECK(doc["checks"]["cocycle"]["ok"] == true);
  CHECK(doc["checks"]["concavity"]["ok"] == true);
  CHECK(doc["checks"]["independence"]["independent"] == false);
  CHECK(run({"info", "--language", example("language.json"), "--theory", "nope"}).code == 2);
}

TEST_CASE("verify runs selected criteria and --out writes the report") {
  const auto path = std::filesystem::temp_directory_path() / "sheafnet_verify.txt";
  const Run r = run({"--out", path.string(), "verify", "--criterion", "11,14"});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("PASS 11 loop-ranks", 0) == 0);
  CHECK(run({"verify", "--criterion", "3"}).code == 1);
  CHECK(run({"verify"}).code == 2);
}
