#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "freehaus/run.hpp"

using namespace freehaus;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::StartsWith;
using Catch::Matchers::WithinAbs;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "freehaus");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string data(const std::string& name) {
  const char* dir = std::getenv("FREEHAUS_DATA");
  return (fs::path(dir ? dir : "data") / name).string();
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "freehaus_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p.string();
}

const char* kSpike = R"({"support": [0, 1], "diffuse": {"kind": "piecewise_linear_cdf", "mass": 1,
  "params": {"knots": [[0, 0], [1e-300, 0.5], [1, 1]]}}})";

}  // namespace

TEST_CASE("dim on example42 prints 2/3") {
  const auto r = cli({"dim", "--measure", data("example42.json")});
  REQUIRE(r.code == 0);
  const auto d = r.doc();
  CHECK_THAT(d["results"]["alpha"].get<double>(), WithinAbs(2.0 / 3.0, 1e-9));
  CHECK(d["exit_code"] == 0);
  CHECK(d["tool"]["name"] == "freehaus");
  CHECK(d["tool"]["version"] == kVersion);
  CHECK(d["formulas"].contains("alpha"));

  const auto text = cli({"dim", "--measure", data("example42.json"), "--format", "text"});
  CHECK_THAT(text.out, ContainsSubstring("alpha = 0.666666"));
}

TEST_CASE("bounds on the two-atom measure") {
  const auto r = cli({"bounds", "--measure", data("two_atoms.json")});
  REQUIRE(r.code == 0);
  const auto res = r.doc()["results"];
  CHECK_THAT(res["upper"].get<double>(), WithinAbs(3.022589, 1e-6));
  CHECK_THAT(res["lower"].get<double>(), WithinAbs(-2.928054, 1e-6));
  CHECK(res["alpha"] == 0.5);
}

TEST_CASE("gamma product series as CSV") {
  const auto r = cli({"series", "lemma41", "--ks", "10,100,1000", "--format", "csv"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,value,target,gap");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == 3);
  CHECK_THAT(rows.back(), StartsWith("1000,"));
  const double gap = std::stod(rows.back().substr(rows.back().rfind(',') + 1));
  CHECK(std::fabs(gap) < 0.05);
}

TEST_CASE("energy and chi commands") {
  const auto e = cli({"energy", "--measure", data("uniform.json")});
  REQUIRE(e.code == 0);
  CHECK_THAT(e.doc()["results"]["energy"]["value"].get<double>(), WithinAbs(-1.5, 1e-6));
  CHECK(e.doc()["results"]["energy"]["status"] == "converged");

  const auto c = cli({"chi", "--measure", data("semicircle.json")});
  REQUIRE(c.code == 0);
  CHECK_THAT(c.doc()["results"]["chi"].get<double>(), WithinAbs(1.418939, 1e-5));

  const auto atoms = cli({"chi", "--measure", data("two_atoms.json")});
  REQUIRE(atoms.code == 0);
  CHECK(atoms.doc()["results"]["chi"] == "-inf");
}

TEST_CASE("report: one measure omits the family section, two include it") {
  const auto one = cli({"report", "--measure", data("half_atom_uniform.json")});
  REQUIRE(one.code == 0);
  CHECK_FALSE(one.doc()["results"].contains("family"));
  CHECK(one.doc()["results"]["measures"].size() == 1);

  const auto two = cli({"report", "--measure", data("two_atoms.json"), "--measure", data("two_atoms.json")});
  REQUIRE(two.code == 0);
  const auto fam = two.doc()["results"]["family"];
  CHECK_THAT(fam["K2"].get<double>(), WithinAbs(2.0 * std::log(16.0 * std::sqrt(2.0)) + 0.5, 1e-12));
  CHECK(fam["beta"] == 1.0);
  CHECK(two.doc()["formulas"].contains("family.K2"));

  const auto u = cli({"report", "--measure", data("semicircle.json")});
  REQUIRE(u.code == 0);
  CHECK_THAT(u.doc()["results"]["measures"][0]["h1_identity"].get<double>(), WithinAbs(std::log(2.0), 1e-6));
}

TEST_CASE("divergent energy: -inf markers and exit 3") {
  const std::string spike = write_file("spike.json", kSpike);
  const auto r = cli({"report", "--measure", spike, "--floor", "-100"});
  CHECK(r.code == kExitEnergy);
  CHECK_THAT(r.err, StartsWith("freehaus: energy: "));
  const auto d = r.doc();
  CHECK(d["exit_code"] == kExitEnergy);
  CHECK(d["results"]["measures"][0]["energy"]["value"] == "-inf");
  CHECK(d["results"]["measures"][0]["bounds"]["lower"] == "-inf");

  const auto e = cli({"energy", "--measure", spike, "--floor", "-100"});
  CHECK(e.code == kExitEnergy);
  CHECK(e.doc()["results"]["energy"]["status"] == "divergent");

  const auto slow = cli({"energy", "--measure", spike, "--tol", "1e-30"});
  CHECK(slow.code == kExitEnergy);
  CHECK(slow.doc()["results"]["energy"]["status"] == "not_converged");
}

TEST_CASE("no-solution for the inner equation exits 4") {
  const auto r = cli({"microstate", "--measure", data("uniform.json"), "--k", "20", "--eps", "1", "--t", "0.39"});
  CHECK(r.code == kExitNoSolution);
  CHECK_THAT(r.err, StartsWith("freehaus: no-solution: "));
  CHECK(r.out.empty());

  const auto ok = cli({"microstate", "--measure", data("uniform.json"), "--k", "20", "--eps", "1", "--t", "0.1"});
  REQUIRE(ok.code == 0);
  CHECK(ok.doc()["results"].contains("log_volume_bound"));
}

TEST_CASE("usage errors exit 1 with one diagnostic line") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"energy"},
           {"frobnicate"},
           {"dim", "--measure", data("uniform.json"), "--k", "5"},
           {"series", "--ks", "10"},
           {"series", "lemma41"},
           {"series", "lemma41", "--ks", "10,5"},
           {"series", "lemma41", "--ks", "10,9000"},
           {"microstate", "--measure", data("uniform.json")},
           {"microstate", "--measure", data("uniform.json"), "--k", "5", "--eps", "1"},
           {"energy", "--measure", data("uniform.json"), "--format", "xml"},
           {"energy", "--measure", data("uniform.json"), "--tol", "-1"},
       }) {
    const auto r = cli(args);
    INFO("args " << json(args).dump());
    CHECK(r.code == kExitUsage);
    CHECK_THAT(r.err, StartsWith("freehaus: usage: "));
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  }
}

TEST_CASE("invalid measures exit 2 and cite the problem") {
  const auto missing = cli({"energy", "--measure", data("does_not_exist.json")});
  CHECK(missing.code == kExitInvalidMeasure);
  const std::string bad = write_file("bad.json", R"({"support": [0, 1], "atoms": [{"location": 0, "weight": "x"}]})");
  const auto r = cli({"energy", "--measure", bad});
  CHECK(r.code == kExitInvalidMeasure);
  CHECK_THAT(r.err, ContainsSubstring("$.atoms[0].weight"));
  const std::string light = write_file("light.json", R"({"support": [0, 1], "atoms": [{"location": 0, "weight": 0.5}]})");
  CHECK(cli({"validate", "--measure", light}).code == kExitInvalidMeasure);
  CHECK(cli({"microstate", "--measure", data("uniform.json"), "--k", "16", "--kind", "B"}).code == kExitInvalidMeasure);
}

TEST_CASE("--out writes the report and nothing to stdout") {
  const fs::path out = scratch_dir() / "dim.json";
  fs::remove(out);
  const auto r = cli({"dim", "--measure", data("example42.json"), "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(out);
  const json d = json::parse(in);
  CHECK_THAT(d["results"]["alpha"].get<double>(), WithinAbs(2.0 / 3.0, 1e-9));
}

TEST_CASE("reports re-parse and rerunning the echoed inputs is bit-for-bit") {
  const std::vector<std::vector<std::string>> runs = {
      {"bounds", "--measure", data("half_atom_uniform.json"), "--tol", "1e-8"},
      {"report", "--measure", data("example42.json"), "--measure", data("piecewise.json")},
      {"selberg", "--k", "3", "--eps", "0.5", "--samples", "20000", "--seed", "7"},
      {"series", "offdiag", "--measure", data("half_atom_uniform.json"), "--ks", "50,100"},
      {"microstate", "--measure", data("half_atom_uniform.json"), "--k", "16", "--kind", "B"},
  };
  int n = 0;
  for (const auto& args : runs) {
    const auto first = cli(args);
    REQUIRE(first.code == 0);
    const json d = first.doc();
    const json in = d["inputs"];

    std::vector<std::string> again = {d["command"].get<std::string>()};
    if (in.contains("series")) again.push_back(in["series"].get<std::string>());
    if (in.contains("measures")) {
      for (const auto& m : in["measures"]) {
        again.push_back("--measure");
        again.push_back(write_file("echo" + std::to_string(n++) + ".json", m["spec"].dump()));
      }
    }
    for (const char* key : {"k", "eps", "t", "tol", "floor", "samples", "seed", "kind"}) {
      if (!in.contains(key)) continue;
      again.push_back(std::string("--") + key);
      again.push_back(in[key].is_string() ? in[key].get<std::string>() : in[key].dump());
    }
    if (in.contains("ks")) {
      std::string list;
      for (const auto& k : in["ks"]) list += (list.empty() ? "" : ",") + k.dump();
      again.push_back("--ks");
      again.push_back(list);
    }
    const auto second = cli(again);
    REQUIRE(second.code == 0);
    const json e = second.doc();
    INFO("command " << d["command"]);
    // Paths differ between the runs; everything else must match exactly.
    json a = d["results"];
    json b = e["results"];
    if (a.contains("measures")) {
      for (auto& m : a["measures"]) m.erase("path");
      for (auto& m : b["measures"]) m.erase("path");
    }
    CHECK(b.dump() == a.dump());
    CHECK(e["formulas"] == d["formulas"]);
  }
}

TEST_CASE("series regularized sweeps the default eps list") {
  const auto r = cli({"series", "regularized", "--measure", data("uniform.json"), "--ks", "10,20"});
  REQUIRE(r.code == 0);
  const auto s = r.doc()["results"]["series"];
  REQUIRE(s.size() == 3);
  const auto csv = cli({"series", "regularized", "--measure", data("uniform.json"), "--ks", "10,20", "--format", "csv"});
  CHECK_THAT(csv.out, ContainsSubstring("# regularized eps=0.1\n"));
}

TEST_CASE("microstate CSV is one eigenvalue per line") {
  const auto r = cli({"microstate", "--measure", data("uniform.json"), "--k", "4", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "0.25\n0.5\n0.75\n1\n");
}
