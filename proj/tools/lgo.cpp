#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lgo/app.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Least-gradient obstacle problems on pixel grids"};
  app.require_subcommand(1);

  lgo::Overrides o;
  std::string spec_path;
  std::string out;
  int levels = 0;
  int stencil = 0;
  std::uint64_t seed = 0;
  std::size_t dimacs = 0;

  auto* solve = app.add_subcommand("solve", "Solve every level and write u, levels and report");
  solve->add_option("spec", spec_path, "problem spec (JSON)")->required()->check(CLI::ExistingFile);
  CLI::Option* levels_opt = solve->add_option("--levels", levels, "uniform ladder with m levels")->check(CLI::PositiveNumber);
  CLI::Option* stencil_opt = solve->add_option("--stencil", stencil, "stencil order")->check(CLI::IsMember({4, 8, 16}));
  CLI::Option* dimacs_opt = solve->add_option("--dimacs", dimacs, "also dump the flow network of this level index");

  auto* oracle = app.add_subcommand("oracle", "Compare the solver with exhaustive enumeration");
  oracle->add_option("spec", spec_path, "problem spec (JSON)")->required()->check(CLI::ExistingFile);
  oracle->add_flag("--inject-fault", o.inject_fault, "corrupt one level before comparing");

  auto* foam = app.add_subcommand("foam", "Build a foam stage and check it");
  foam->add_option("spec", spec_path, "problem spec (JSON)")->required()->check(CLI::ExistingFile);

  for (CLI::App* sub : {solve, oracle, foam}) {
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "seed override");
    sub->add_flag("--timings", o.timings, "add wall-clock timings to the report");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lgo::kExitSpec;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (levels_opt->count()) o.levels = levels;
  if (stencil_opt->count()) o.stencil = stencil;
  if (dimacs_opt->count()) o.dimacs_level = dimacs;
  if (chosen->count("--out")) o.output = out;
  if (chosen->count("--seed")) o.seed = seed;
  return lgo::run_command(chosen->get_name(), spec_path, o, std::cerr);
}
