#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"
#include "f3bp/model.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = f3bp::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("fractions are accepted") {
  CHECK(f3bp::cli::parse_number("1/3") == doctest::Approx(1.0 / 3));
  CHECK(f3bp::cli::parse_number(" 0.25 ") == 0.25);
  CHECK_THROWS_AS(f3bp::cli::parse_number("1/0"), f3bp::InvalidInput);
  CHECK_THROWS_AS(f3bp::cli::parse_number("abc"), f3bp::InvalidInput);
}

TEST_CASE("equilibria on equal radii at H = 0") {
  const auto r = run({"equilibria", "--radii", "1/3,1/3,1/3", "--H", "0"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["schema_version"] == 1);
  const auto& recs = j["records"];
  REQUIRE(recs.size() == 5);
  int lr_stable = 0, er_unstable = 0;
  for (const auto& x : recs) {
    lr_stable += x["class"] == "LR" && x["verdict"] == "stable";
    er_unstable += x["class"] == "ER" && x["verdict"] == "unstable";
  }
  CHECK(lr_stable == 2);
  CHECK(er_unstable == 3);
}

TEST_CASE("masses are canonicalised and the permutation echoed") {
  const auto r = run({"equilibria", "--masses", "0.2,0.5,0.3", "--H", "0"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["params"]["masses"][0].get<double>() == doctest::Approx(0.5));
  CHECK(j["params"]["masses"][2].get<double>() == doctest::Approx(0.2));
  CHECK(j["params"]["permutation"] == json::array({1, 2, 0}));
}

TEST_CASE("usage errors exit with 2") {
  auto r = run({"equilibria", "--H", "-1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("H must be nonnegative") != std::string::npos);
  CHECK(run({"equilibria", "--radii", "1,2"}).code == 2);
  CHECK(run({"equilibria", "--radii", "1,1,1", "--masses", "1,1,1"}).code == 2);
  CHECK(run({"region", "--chart", "XYZ"}).code == 2);
  CHECK(run({"equilibria", "--format", "xml"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
}

TEST_CASE("CSV numbers carry 17 significant digits") {
  const auto r = run({"equilibria", "--radii", "0.4,0.35,0.25", "--H", "0.3", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# schema_version=1\n", 0) == 0);
  CHECK(r.out.find("class,label,branch,orientation,contacts,H,d12,d23,d31") != std::string::npos);
  CHECK(r.out.find("0.29999999999999999") != std::string::npos);
}

TEST_CASE("identical runs give identical bytes") {
  const std::vector<std::string> args{"equilibria", "--radii", "0.4,0.35,0.25", "--H", "1.7"};
  CHECK(run(args).out == run(args).out);
  const std::vector<std::string> v{"verify", "--radii", "0.4,0.35,0.25", "--res", "24", "--seed", "9"};
  CHECK(run(v).out == run(v).out);
}

TEST_CASE("sweep writes the graph and the branch samples") {
  const auto dir = std::filesystem::temp_directory_path() / "f3bp_cli_sweep";
  std::filesystem::create_directories(dir);
  const auto r = run({"sweep", "--radii", "1,1,1", "--H-range", "0.2:0.5", "--res", "120", "--out",
                      (dir / "eq.json").string()});
  REQUIRE(r.code == 0);
  const auto j = json::parse(slurp(dir / "eq.json"));
  bool lr_end = false;
  for (const auto& e : j["events"])
    for (const auto& p : e["participants"])
      if (p["family"] == "LR/single" && p["type"] == "end") {
        lr_end = true;
        CHECK(std::abs(e["H"].get<double>() - 26.0 / 135.0 * std::pow(1.5, 1.5)) <= 1e-6);
      }
  CHECK(lr_end);
  for (const auto& s : j["samples"]) CHECK(s["stable"].get<int>() >= 1);
  const std::string csv = slurp(dir / "eq.branches.csv");
  CHECK(csv.find("class,label,H,d12,d23,d31,verdict\n") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("region writes field and boundary files") {
  const auto dir = std::filesystem::temp_directory_path() / "f3bp_cli_region";
  std::filesystem::create_directories(dir);
  const auto r = run({"region", "--chart", "LO-mode", "--res", "48", "--format", "csv", "--out",
                      (dir / "lo").string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "lo.field.csv").find("m1,m3,value\n") != std::string::npos);
  const std::string b = slurp(dir / "lo.boundary.csv");
  CHECK(b.find("polyline,m1,m3\n") != std::string::npos);
  CHECK(b.size() > 40);
  const auto ea = run({"region", "--chart", "EA132", "--res", "64", "--format", "json"});
  REQUIRE(ea.code == 0);
  CHECK(json::parse(ea.out)["sign_change"] == false);
  std::filesystem::remove_all(dir);
}

TEST_CASE("verify passes by default and fails on an injected fault") {
  const auto ok = run({"verify", "--res", "32"});
  CHECK(ok.code == 0);
  CHECK(json::parse(ok.out)["pass"] == true);
  const auto bad = run({"verify", "--radii", "0.4,0.35,0.25", "--res", "32", "--inject-fault"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("oracle_agreement") != std::string::npos);
  CHECK(bad.err.find("has no matching critical point") != std::string::npos);
}
