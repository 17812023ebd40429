#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lgo/foam.hpp"
#include "lgo/grid.hpp"
#include "lgo/solver.hpp"

namespace lgo {

enum ExitCode : int {
  kExitOk = 0,
  kExitOracleMismatch = 1,
  kExitNesting = 2,
  kExitSpec = 3,
  kExitInfeasible = 4,
};

struct BoundarySpec {
  std::string type = "constant";  // constant | step | holder | csv
  double value = 0.0;
  double theta0 = 0.0;
  double low = 0.0;
  double high = 1.0;
  double alpha = 0.5;
  std::optional<std::uint64_t> seed;
  double quantum = 0.0;
  std::filesystem::path path;
};

struct ObstacleSpec {
  std::string type = "none";  // none | cone | bumps | csv
  Point apex{};
  double height = 0.0;
  double slope = 1.0;
  std::optional<std::uint64_t> seed;
  std::filesystem::path path;
};

struct DiagnosticsSpec {
  bool holder = true;
  std::size_t holder_pairs = 400;
  bool barrier = false;
  std::size_t barrier_points = 10;
  double barrier_alpha = 0.5;
  double barrier_delta = 0.25;
  double barrier_lambda = 1.0;
  bool contact = false;
  std::size_t contact_windows = 200;
  bool density = true;
  std::size_t density_points = 5;
};

struct FoamSpec {
  RectRegion v{0.0, 0.0, 1.0, 1.0};
  double epsilon = 0.1;
  std::size_t j = 30;
  int points_per_side = 64;
  int raster = 256;
  int stencil = 16;
  std::size_t trials = 500;
  std::vector<double> tube_widths{0.5, 0.8};  // fractions of the smaller diameter
  double coverage_distance = 0.05;
  bool two_ball = true;
  double two_ball_big = 1.0;
  double two_ball_small = 0.05;
  double two_ball_distance = 3.0;
  int two_ball_nodes = 512;
};

/// A problem description as read from JSON. Relative paths resolve against
/// the spec file's directory.
struct ProblemSpec {
  DomainDescriptor domain;
  bool collar_given = false;
  BoundarySpec boundary;
  ObstacleSpec obstacle;
  int stencil = 16;
  LadderMode ladder = LadderMode::Quantized;
  int uniform_levels = 0;
  DiagnosticsSpec diagnostics;
  std::optional<FoamSpec> foam;
  std::filesystem::path output = "out";
  std::uint64_t seed = 0;
};

/// Throws SpecError on malformed input.
ProblemSpec parse_spec(const std::string& json_text, const std::filesystem::path& base_dir);
ProblemSpec load_spec(const std::filesystem::path& path);

/// Command-line overrides applied on top of the file.
struct Overrides {
  std::optional<int> levels;
  std::optional<int> stencil;
  std::optional<std::filesystem::path> output;
  std::optional<std::uint64_t> seed;
  bool timings = false;
  bool inject_fault = false;
  std::optional<std::size_t> dimacs_level;
};

void apply_overrides(ProblemSpec& spec, const Overrides& o);

/// Builds the domain, data and obstacle. Throws SpecError.
Problem build_problem(const ProblemSpec& spec);
LevelLadder build_ladder(const ProblemSpec& spec, const Problem& problem);

/// Each writes its artifacts into spec.output and reports errors on `err`.
int run_solve(const ProblemSpec& spec, const Overrides& o, std::ostream& err);
int run_oracle(const ProblemSpec& spec, const Overrides& o, std::ostream& err);
int run_foam(const ProblemSpec& spec, const Overrides& o, std::ostream& err);

/// Loads the spec and dispatches; all library errors become exit codes.
int run_command(const std::string& command, const std::filesystem::path& spec_path,
                const Overrides& o, std::ostream& err);

}  // namespace lgo
