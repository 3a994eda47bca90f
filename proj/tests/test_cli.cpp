#include "cli.hpp"

#include "tileopt/simulate.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

auto run(std::vector<std::string> args) -> Result {
  std::ostringstream out, err;
  int code = tileopt::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

auto fixture(const std::string &name) -> std::string {
  return std::string(TILEOPT_FIXTURE_DIR) + "/" + name + ".json";
}

auto json_of(const Result &r) -> nlohmann::json { return nlohmann::json::parse(r.out); }

} // namespace

TEST_CASE("bound on the matmul fixture") {
  auto r = run({"bound", fixture("matmul"), "--cache", "4096"});
  REQUIRE(r.code == 0);
  auto j = json_of(r);
  CHECK(j["schema"] == "1");
  CHECK(j["kind"] == "bound");
  CHECK(j["k_hat"].get<double>() == doctest::Approx(1.5));
  CHECK(j["lower_bound_rounded"] == 2097152);
  CHECK(r.err.empty());
}

TEST_CASE("certify the matmul fixture") {
  auto r = run({"certify", fixture("matmul"), "--cache", "4096"});
  REQUIRE(r.code == 0);
  auto j = json_of(r);
  CHECK(j["gap"].get<double>() == 0.0);
  CHECK(j["valid"] == true);

  auto q = run({"certify", fixture("matmul"), "--cache", "4096", "--mode", "rational"});
  REQUIRE(q.code == 0);
  CHECK(json_of(q)["k_hat_exact"] == "3/2");
  CHECK(json_of(q)["lp_value_exact"] == "3/2");
}

TEST_CASE("verify with the subset oracle") {
  auto r = run({"verify", fixture("nbody_small"), "--cache", "2", "--oracle", "subset"});
  REQUIRE(r.code == 0);
  CHECK(json_of(r)["rectangle_optimal"] == true);
}

TEST_CASE("verify with the rectangle oracle") {
  auto r = run({"verify", "fixture:nbody", "--cache", "16", "--format", "json"});
  REQUIRE(r.code == 0);
  auto j = json_of(r);
  CHECK(j["upper_bound_holds"] == true);
  CHECK(j["realized_within_factor"] == true);
  CHECK(j["optimum_volume"] == 256);

  auto capped = run({"verify", fixture("matmul"), "--cache", "4096", "--cap", "1000"});
  CHECK(capped.code == 1);
  CHECK(capped.err.rfind("error[limit]:", 0) == 0);
}

TEST_CASE("tile, simulate and codegen") {
  auto t = run({"tile", fixture("matmul"), "--cache", "4096"});
  REQUIRE(t.code == 0);
  CHECK(json_of(t)["tile"] == nlohmann::json::array({64, 64, 64}));

  auto s = run({"simulate", fixture("matmul"), "--cache", "4096"});
  REQUIRE(s.code == 0);
  CHECK(json_of(s)["words_moved"] == 6291456);
  CHECK(json_of(s)["ratio"].get<double>() == doctest::Approx(3.0));

  auto e = run({"simulate", fixture("matmul"), "--cache", "16", "--tile", "8,8,8"});
  CHECK(e.code == 1);
  CHECK(e.err.rfind("error[validation]:", 0) == 0);

  auto c = run({"codegen", fixture("nbody_small"), "--tile", "3,2", "--format", "text"});
  REQUIRE(c.code == 0);
  auto program = tileopt::parse_tiled_program(c.out);
  std::size_t visits = 0;
  tileopt::interpret(program, [&](std::span<const std::int64_t>) { ++visits; });
  CHECK(visits == 16);
}

TEST_CASE("strict footprint flag") {
  auto r = run({"tile", fixture("conv"), "--cache", "4096", "--strict-footprint"});
  REQUIRE(r.code == 0);
  auto j = json_of(r);
  CHECK(j["strict_footprint"] == true);
  std::uint64_t sum = 0;
  for (auto &[k, v] : j["footprints"].items())
    sum += v.get<std::uint64_t>();
  CHECK(sum <= 4096);
}

TEST_CASE("output is byte-identical across runs") {
  for (const char *cmd : {"bound", "tile", "certify", "simulate", "verify"}) {
    std::vector<std::string> args{cmd, fixture("tensor"), "--cache", "1024"};
    if (std::string(cmd) == "verify")
      args = {cmd, fixture("nbody_small"), "--cache", "4"};
    auto a = run(args);
    auto b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("text format") {
  auto r = run({"bound", fixture("matmul"), "--cache", "4096", "--format", "text",
                "--mode", "rational"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("k_hat = 3/2") != std::string::npos);
}

TEST_CASE("input errors exit 1 with a prefixed message") {
  auto missing = run({"bound", "/nonexistent/x.json", "--cache", "16"});
  CHECK(missing.code == 1);
  CHECK(missing.err.rfind("error[validation]:", 0) == 0);

  auto small = run({"bound", fixture("matmul"), "--cache", "1"});
  CHECK(small.code == 1);

  auto nocache = run({"bound", fixture("matmul")});
  CHECK(nocache.code == 1);

  auto irrational = run({"bound", fixture("nbody"), "--cache", "64", "--mode", "rational"});
  CHECK(irrational.code == 1);
  CHECK(irrational.err.find("rational") != std::string::npos);

  auto usage = run({"bound", fixture("matmul"), "--cache", "16", "--mode", "fuzzy"});
  CHECK(usage.code == 1);
  CHECK(usage.err.rfind("error[usage]:", 0) == 0);

  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);

  auto bad = std::string(TILEOPT_BINARY_DIR) + "/bad.json";
  std::ofstream(bad) << R"({"name": "bad", "loops": [{"index": "x1", "bound": 2},
    {"index": "x4", "bound": 2}], "arrays": [{"name": "A", "support": ["x1"]}]})";
  auto uncovered = run({"bound", bad, "--cache", "16"});
  CHECK(uncovered.code == 1);
  CHECK(uncovered.err.find("x4") != std::string::npos);
}

TEST_CASE("help exits 0") {
  auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("certify") != std::string::npos);
}
