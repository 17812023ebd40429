#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "lgo/app.hpp"
#include "lgo/error.hpp"

using namespace lgo;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path workdir() {
  const fs::path dir = fs::temp_directory_path() / "lgo_app_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write_spec(const char* name, const std::string& text) {
  const fs::path p = workdir() / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(const std::string& command, const fs::path& spec, Overrides o = {}) {
  std::ostringstream err;
  return run_command(command, spec, o, err);
}

const char* kDiscStep = R"({
  "domain": {"shape": "disc", "radius": 1.0}, "nodes": 48,
  "boundary": {"type": "step", "theta0": 0.0},
  "obstacle": {"type": "none"}, "stencil": 16,
  "diagnostics": {"barrier": {"points": 3}, "contact": {"windows": 30}},
  "output": "disc_step", "seed": 4
})";

}  // namespace

TEST_CASE("spec parsing") {
  const ProblemSpec s = parse_spec(kDiscStep, "/base");
  CHECK(std::get<DiscShape>(s.domain.shape).radius == 1.0);
  CHECK(s.domain.h == doctest::Approx(2.0 / 48));
  CHECK(s.boundary.type == "step");
  CHECK(s.output == fs::path("/base/disc_step"));
  CHECK(s.seed == 4);
  CHECK(s.diagnostics.barrier);
  CHECK(s.diagnostics.barrier_points == 3);
  CHECK_FALSE(s.collar_given);

  CHECK_THROWS_AS(parse_spec("{", "."), SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"domain": {"shape": "disc", "radius": 1}, "h": 0.1, "colour": 1})", "."), SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"domain": {"shape": "hexagon"}, "h": 0.1})", "."), SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"domain": {"shape": "disc", "radius": 1}})", "."), SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"domain": {"shape": "disc", "radius": "one"}, "h": 0.1})", "."), SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"boundary": {"type": "csv"}})", "."), SpecError);
  CHECK_THROWS_AS(parse_spec(R"({"domain": {"shape": "disc", "radius": 1}, "h": 0.1, "diagnostics": {"barrier": {"delta": 0.5, "lambda": 1}}})", "."), SpecError);
}

TEST_CASE("flags override the file") {
  ProblemSpec s = parse_spec(kDiscStep, ".");
  Overrides o;
  o.levels = 7;
  o.stencil = 8;
  o.seed = 99;
  o.output = "elsewhere";
  apply_overrides(s, o);
  CHECK(s.ladder == LadderMode::Uniform);
  CHECK(s.uniform_levels == 7);
  CHECK(s.stencil == 8);
  CHECK(s.seed == 99);
  CHECK(s.output == fs::path("elsewhere"));
}

TEST_CASE("solve writes its artifacts") {
  const fs::path spec = write_spec("disc_step.json", kDiscStep);
  fs::remove_all(workdir() / "disc_step");
  REQUIRE(run("solve", spec) == kExitOk);
  const fs::path out = workdir() / "disc_step";
  for (const char* f : {"u.csv", "levels.lgobv", "report.json", "holder.tsv"}) {
    CHECK(fs::exists(out / f));
  }
  const json r = json::parse(slurp(out / "report.json"));
  CHECK(r["kind"] == "solve");
  CHECK(r["coarea"]["ok"] == true);
  CHECK(r["nesting"]["ok"] == true);
  CHECK(r["seed"] == 4);
  CHECK(r.contains("versions"));
  CHECK(r.contains("tolerances"));
  CHECK_FALSE(r.contains("timings"));
  CHECK(r["contact"]["violations"] == 0);

  const std::string u = slurp(out / "u.csv");
  const std::string report = slurp(out / "report.json");
  REQUIRE(run("solve", spec) == kExitOk);
  CHECK(slurp(out / "u.csv") == u);
  CHECK(slurp(out / "report.json") == report);

  Overrides timed;
  timed.timings = true;
  REQUIRE(run("solve", spec, timed) == kExitOk);
  CHECK(json::parse(slurp(out / "report.json")).contains("timings"));
}

TEST_CASE("spec errors exit with 3") {
  const fs::path missing = write_spec("missing_csv.json", R"({
    "domain": {"shape": "disc", "radius": 1.0}, "nodes": 16,
    "boundary": {"type": "csv", "path": "no_such_file.csv"}, "output": "missing"})");
  CHECK(run("solve", missing) == kExitSpec);
  CHECK(run("solve", workdir() / "no_such_spec.json") == kExitSpec);
  const fs::path stencil = write_spec("stencil.json", R"({
    "domain": {"shape": "disc", "radius": 1.0}, "nodes": 16, "stencil": 6, "output": "s"})");
  CHECK(run("solve", stencil) == kExitSpec);
}

TEST_CASE("oracle command") {
  const fs::path spec = write_spec("tiny.json", R"({
    "domain": {"shape": "rectangle", "width": 4.0, "height": 4.0}, "h": 1.0, "collar": 2,
    "boundary": {"type": "step", "theta0": 0.4, "low": 0.0, "high": 2.0},
    "obstacle": {"type": "cone", "apex": [0.0, 0.0], "height": 1.5, "slope": 1.0},
    "stencil": 8, "output": "tiny"})");
  CHECK(run("oracle", spec) == kExitOk);
  const json r = json::parse(slurp(workdir() / "tiny" / "oracle_report.json"));
  CHECK(r["match"] == true);
  CHECK(r["field_enumerated"] == true);

  Overrides fault;
  fault.inject_fault = true;
  CHECK(run("oracle", spec, fault) == kExitOracleMismatch);
  CHECK(json::parse(slurp(workdir() / "tiny" / "oracle_report.json"))["match"] == false);

  const fs::path big = write_spec("big.json", R"({
    "domain": {"shape": "disc", "radius": 1.0}, "nodes": 32,
    "boundary": {"type": "step"}, "output": "big"})");
  CHECK(run("oracle", big) == kExitSpec);
}

TEST_CASE("foam command") {
  const fs::path one = write_spec("foam1.json", R"({
    "foam": {"v": [0, 0, 1, 1], "epsilon": 0.1, "J": 1, "raster": 64, "trials": 20,
             "two_ball": false}, "output": "foam1", "seed": 2})");
  CHECK(run("foam", one) == kExitOk);
  const json stage = json::parse(slurp(workdir() / "foam1" / "stage.json"));
  CHECK(stage["balls"].size() == 1);
  CHECK(fs::exists(workdir() / "foam1" / "foam.pgm"));
  const json r = json::parse(slurp(workdir() / "foam1" / "foam_report.json"));
  CHECK(r["ok"] == true);
  CHECK(r["J"] == 1);

  const fs::path small = write_spec("foam_small.json", R"({
    "foam": {"v": [0, 0, 0.05, 0.05], "epsilon": 0.1, "J": 3}, "output": "foam_small"})");
  CHECK(run("foam", small) == kExitInfeasible);
  const fs::path none = write_spec("foam_none.json", R"({"output": "x"})");
  CHECK(run("foam", none) == kExitSpec);
}
