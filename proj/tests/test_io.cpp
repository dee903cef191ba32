#include <cstdio>
#include <fstream>
#include <sstream>

#include "calr/errors.hpp"
#include "calr/io.hpp"
#include "doctest.h"

using namespace calr;

namespace {

const char* kConfig = R"J({
  "dimension": 2,
  "omega_radius": 8.0,
  "annulus": {"r2": 1.0, "r3": 4.0},
  "profile": {"kind": "expr", "value": "2+sin(r)"},
  "source": {"radius": 2.5, "spectrum": {"kind": "explicit", "coefficients": [
    {"l": 0, "re": 1.0, "im": 0.0}, {"l": 3, "k": 1, "re": 0.5, "im": -0.25}]}},
  "sweep": {"delta_start": 1e-2, "delta_end": 1e-6, "points": 9},
  "cutoff": 8
})J";

}  // namespace

TEST_CASE("config round trip") {
  const RunConfig c = parse_config(json::parse(kConfig));
  CHECK(c.profile_expr == "2+sin(r)");
  CHECK(c.source.coefficients.size() == 2);
  CHECK(c.source.coefficient({3, 1}) == cplx(0.5, -0.25));
  CHECK(c.sweep.deltas().size() == 9);
  const RunConfig d = parse_config(to_json(c));
  CHECK(dump_json(to_json(d)) == dump_json(to_json(c)));
  CHECK(d.medium().describe() == c.medium().describe());

  const RunConfig g = parse_config(json::parse(R"({"dimension": 2, "omega_radius": 8, "annulus": {"r2": 1, "r3": 4},
    "profile": {"kind": "constant", "value": 1}, "source": {"radius": 1.5, "spectrum": {"kind": "geometric", "t": 0.85}},
    "cutoff": 50})"));
  CHECK(g.source.infinite_tail);
  CHECK(g.source.cutoff == 50);
  CHECK(g.source.coefficients.size() == 101);
}

TEST_CASE("config errors") {
  auto bad = [](const std::string& patch_from, const std::string& patch_to) {
    std::string s = kConfig;
    s.replace(s.find(patch_from), patch_from.size(), patch_to);
    return s;
  };
  CHECK_THROWS_AS(parse_config(json::parse(bad("\"dimension\": 2", "\"dimension\": 4"))), ValidationError);
  CHECK_THROWS_AS(parse_config(json::parse(bad("\"r3\": 4.0", "\"r3\": 9.0"))), ValidationError);
  CHECK_THROWS_AS(parse_config(json::parse(bad("2+sin(r)", "2+sin("))), ValidationError);
  CHECK_THROWS_AS(parse_config(json::parse(bad("\"kind\": \"expr\"", "\"kind\": \"table\""))), ValidationError);
  CHECK_THROWS_AS(parse_config(json::parse(bad("\"l\": 3, \"k\": 1", "\"l\": 30, \"k\": 1"))), ValidationError);
  CHECK_THROWS_AS(parse_config(json::parse(bad("\"omega_radius\": 8.0,", "\"omega_radius\": \"x\","))), ValidationError);
  CHECK_THROWS_AS(parse_config(json::parse(bad("\"radius\": 2.5", "\"radius\": -1"))), ValidationError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ValidationError);
  // Non-elliptic annulus coefficient.
  CHECK_THROWS_AS(parse_config(json::parse(bad("2+sin(r)", "sin(r)"))).medium(), ValidationError);
}

TEST_CASE("number formatting and CSV") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1e-10) == "1e-10");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-HUGE_VAL) == "-inf");

  SweepRow r;
  r.delta = 0.1;
  r.power = 1.0 / 3.0;
  r.shell_energy = 2.0;
  r.u_farfield_h1 = 0.5;
  r.v_farfield_h1 = 0.25;
  r.c_delta = 3.0;
  const std::string csv = sweep_csv({r});
  CHECK(csv == std::string(kSweepHeader) + "\n0.10000000000000001,0.33333333333333331,2,0.5,0.25,3\n");
  CHECK(std::string(kSweepHeader) == "delta,power,shell_energy,u_farfield_h1,v_farfield_h1,c_delta");
}

TEST_CASE("JSON output is deterministic") {
  json j;
  j["b"] = 0.1;
  j["a"] = {1.0, 2.5, std::nan("")};
  j["s"] = "text";
  const std::string once = dump_json(j);
  CHECK(once == dump_json(j));
  CHECK(once.find("0.10000000000000001") != std::string::npos);
  CHECK(once.find("null") != std::string::npos);
  CHECK(once.find("\"b\"") < once.find("\"a\""));

  const RunConfig c = parse_config(json::parse(kConfig));
  const Field f = solve_field(c.medium(), c.source, 1e-3, c.cutoff);
  const std::string a = dump_json(field_to_json(f));
  const std::string b = dump_json(field_to_json(solve_field(c.medium(), c.source, 1e-3, c.cutoff)));
  CHECK(a == b);
  const json back = json::parse(a);
  CHECK(back["modes"].size() == 2);

  const std::string path = "test_io_tmp.csv";
  write_file(path, "x\n");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "x\n");
  std::remove(path.c_str());
  CHECK_THROWS_AS(write_file("/nonexistent/dir/x.csv", "x"), ValidationError);
}
