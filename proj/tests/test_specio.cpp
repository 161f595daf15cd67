#include <cmath>
#include <sstream>

#include "doctest.h"
#include "lcsbp/manifest.hpp"
#include "lcsbp/specio.hpp"

using namespace lcsbp;

TEST_CASE("spec round trip in canonical form") {
  std::vector<MechanismSpec> specs(6);
  specs[0].sigma = 1.0;
  specs[0].gamma = -0.5;
  specs[1] = stable_mechanism(1.5, 2.0);
  specs[2].c = 3.0;
  specs[2].levy = LevyMeasure::log_tail(0.5, 1.0);
  specs[3].levy = LevyMeasure::atoms({{2.0, 1.0}, {0.5, 0.25}});
  specs[4].lambda = 0.3;
  specs[4].levy = LevyMeasure::tabulated({0.1, 1.0, 2.0}, {1.0, 0.5, 0.0});
  specs[5] = truncate(stable_mechanism(0.7, 1.0), 10.0);
  for (auto& s : specs) {
    std::string text = dump_spec(s);
    MechanismSpec back = parse_spec(text);
    CHECK(back == s);
    CHECK(dump_spec(back) == text);
  }
}

TEST_CASE("spec parse errors") {
  CHECK_THROWS_AS(parse_spec("{"), SpecParseError);
  CHECK_THROWS_AS(parse_spec(R"({"lambda": 1})"), SpecParseError);
  CHECK_THROWS_AS(parse_spec(R"({"c": 1, "bogus": 2})"), SpecParseError);
  CHECK_THROWS_AS(parse_spec(R"({"c": -1})"), SpecParseError);
  CHECK_THROWS_AS(parse_spec(R"({"c": 1, "levy": {"kind": "cauchy"}})"), SpecParseError);
  CHECK_THROWS_AS(parse_spec(R"({"c": 1, "levy": {"kind": "power_tail", "params": {"alpha": 3, "scale": 1}}})"),
                  SpecParseError);
  auto s = parse_spec(R"({"c": 2, "lambda": 1, "levy": {"kind": "atoms", "params": {"atoms": [{"size": 3, "mass": 0.5}]}}})");
  CHECK(s.c == 2.0);
  CHECK(eval_psi(s, 1.0) == doctest::Approx(-1 + 0.5 * (std::exp(-3.0) - 1)));
  CHECK_THROWS_AS(load_spec("/nonexistent/spec.json"), SpecParseError);
}

TEST_CASE("CSV quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_number(0.1) == "0.1");
  CHECK(csv_number(INFINITY) == "inf");
  std::ostringstream o;
  CsvWriter w(o, {"x", "y"});
  w.row(std::vector<double>{1.0, 2.5});
  CHECK(o.str() == "x,y\r\n1,2.5\r\n");
  CHECK_THROWS(w.row(std::vector<double>{1.0}));
}

TEST_CASE("manifest digests") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  RunManifest m;
  m.command = "classify";
  m.seed = 7;
  m.outputs.push_back({"out.csv", sha256_hex("")});
  std::string j = manifest_json(m);
  CHECK(j.find("\"seed\": 7") != std::string::npos);
  CHECK(j.find("e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855") != std::string::npos);
  CHECK(manifest_path_for("x.csv") == "x.csv.manifest.json");
}
