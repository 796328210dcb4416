#include "doctest.h"

#include "subwalk/report.hpp"

#include <cstdlib>
#include <sstream>

using namespace subwalk;

TEST_SUITE("report") {
  TEST_CASE("csv quoting") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
  }

  TEST_CASE("csv table uses CRLF") {
    CsvTable t{{"x", "y"}, {}};
    t.add({"1", "0,0,1"});
    std::ostringstream out;
    t.write(out);
    CHECK(out.str() == "x,y\r\n1,\"0,0,1\"\r\n");
  }

  TEST_CASE("number formatting round-trips") {
    CHECK(fmt(0.1) == "0.1");
    CHECK(std::stod(fmt(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(fmt(1.0 / 0.0) == "inf");
  }

  TEST_CASE("timestamp honours SOURCE_DATE_EPOCH") {
    setenv("SOURCE_DATE_EPOCH", "0", 1);
    CHECK(utc_timestamp() == "1970-01-01T00:00:00Z");
    setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
    CHECK(utc_timestamp() == "2023-11-14T22:13:20Z");
    unsetenv("SOURCE_DATE_EPOCH");
    CHECK(utc_timestamp().size() == 20);
  }

  TEST_CASE("manifest fields") {
    auto m = make_manifest("simulate", Json{{"trials", 10}}, 99u);
    m.outputs.push_back("out.csv");
    const auto j = to_json(m);
    CHECK(j["subcommand"] == "simulate");
    CHECK(j["seed"] == 99);
    CHECK(j["version"] == SUBWALK_VERSION);
    CHECK(j["parameters"]["trials"] == 10);
    CHECK(j["outputs"][0] == "out.csv");
    CHECK(to_json(make_manifest("green", Json::object()))["seed"].is_null());
  }

  TEST_CASE("non-finite numbers become null") {
    GreenValue v;
    v.value = std::nan("");
    CHECK(to_json(v)["value"].is_null());
  }

  TEST_CASE("hyperplane report serialisation") {
    HyperplaneReport r;
    r.d = 3;
    r.alpha = 1.0;
    r.rows = {{0.1, 2.0}, {0.01, 3.5}};
    r.verdict = "massive";
    const auto j = to_json(r);
    CHECK(j["rows"].size() == 2);
    CHECK(j["rows"][1]["integral"] == 3.5);
    std::ostringstream out;
    to_csv(r).write(out);
    CHECK(out.str() == "epsilon,integral\r\n0.1,2\r\n0.01,3.5\r\n");
  }
}
