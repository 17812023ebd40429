#include "lgo/app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lgo/data.hpp"
#include "lgo/diagnostics.hpp"
#include "lgo/error.hpp"
#include "lgo/io.hpp"
#include "lgo/mincut.hpp"
#include "lgo/oracle.hpp"
#include "lgo/parallel.hpp"

namespace lgo {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr const char* kVersion = "1.0.0";

void allow_keys(const json& obj, const char* where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw SpecError(std::string(where) + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw SpecError("unknown key '" + k + "' in " + where);
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw SpecError(std::string("key '") + key + "' has the wrong type");
  }
}

template <typename T>
T get_required(const json& obj, const char* key, const char* where) {
  if (!obj.contains(key)) throw SpecError(std::string(where) + " needs '" + key + "'");
  return get_or<T>(obj, key, T{});
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

json versions() {
  return json{{"lgo", kVersion},
              {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
              {"compiler", __VERSION__}};
}

json domain_summary(const GridDomain& d) {
  return json{{"width", d.width()},
              {"height", d.height()},
              {"h", d.h()},
              {"collar_width", d.collar_width()},
              {"interior_nodes", d.interior_nodes().size()},
              {"ring_nodes", d.ring_nodes().size()}};
}

json ladder_json(const LevelLadder& ladder) {
  return json{{"mode", ladder.mode == LadderMode::Quantized ? "quantized" : "uniform"},
              {"a", ladder.a},
              {"b", ladder.b},
              {"levels", ladder.levels.size()},
              {"max_gap", ladder.max_gap()}};
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw SpecError("cannot create output directory " + dir.string());
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

double domain_diameter(const GridDomain& d) {
  return std::hypot(d.core_width() * d.h(), d.core_height() * d.h());
}

// Profiles at boundary nodes of one level set whose largest ball stays in
// the grid.
json density_section(const PixelSet& e, const Stencil& stencil, std::size_t points,
                     std::uint64_t seed) {
  const GridDomain& d = e.domain();
  const double h = d.h();
  const int r_max = std::min(32, std::min(d.width(), d.height()) / 2 - 2);
  if (r_max < 4) return nullptr;
  const std::vector<double> radii{r_max * h / 4.0, r_max * h / 2.0, r_max * h};
  const int reach = r_max + 1;
  std::vector<std::size_t> candidates;
  for (std::size_t n : d.interior_nodes()) {
    const int i = d.col(n);
    const int j = d.row(n);
    if (i < reach || j < reach || i >= d.width() - reach || j >= d.height() - reach) continue;
    if (on_boundary(e, n)) candidates.push_back(n);
  }
  std::mt19937_64 rng(seed);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  if (candidates.size() > points) candidates.resize(points);
  std::sort(candidates.begin(), candidates.end());
  json rows = json::array();
  bool monotone = true;
  bool bounds = true;
  for (std::size_t x : candidates) {
    const DensityProfile prof = density_profile(e, x, radii);
    const DensityBound lb = density_lower_bound(e, x, radii.back(), stencil);
    monotone = monotone && prof.monotone;
    if (lb.preconditions) bounds = bounds && lb.holds;
    rows.push_back(json{{"x", x},
                        {"radii", prof.radii},
                        {"ratios", prof.ratios},
                        {"tolerance", prof.tolerance},
                        {"monotone", prof.monotone},
                        {"subminimizing", lb.preconditions},
                        {"bound", lb.bound},
                        {"bound_holds", lb.holds}});
  }
  return json{{"points", rows}, {"monotone", monotone}, {"bounds_hold", bounds},
              {"delta_2", delta_2()}};
}

}  // namespace

ProblemSpec parse_spec(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw SpecError(std::string("spec is not valid JSON: ") + e.what());
  }
  allow_keys(j, "spec",
             {"domain", "h", "nodes", "collar", "boundary", "obstacle", "stencil", "ladder",
              "diagnostics", "foam", "output", "seed"});
  ProblemSpec spec;
  spec.seed = get_or<std::uint64_t>(j, "seed", 0);
  spec.stencil = get_or<int>(j, "stencil", 16);
  spec.output = resolve(base_dir, get_or<std::string>(j, "output", "out"));

  if (j.contains("domain")) {
    const json& dj = j.at("domain");
    allow_keys(dj, "domain", {"shape", "radius", "width", "height", "path", "require_connected"});
    const std::string shape = get_required<std::string>(dj, "shape", "domain");
    double extent = 1.0;
    if (shape == "disc") {
      const double r = get_required<double>(dj, "radius", "disc domain");
      spec.domain.shape = DiscShape{r};
      extent = 2.0 * r;
    } else if (shape == "rectangle") {
      const double w = get_required<double>(dj, "width", "rectangle domain");
      const double h = get_required<double>(dj, "height", "rectangle domain");
      spec.domain.shape = RectangleShape{w, h};
      extent = std::max(w, h);
    } else if (shape == "mask") {
      spec.domain.shape = MaskShape{resolve(base_dir, get_required<std::string>(dj, "path", "mask domain")),
                                    get_or<bool>(dj, "require_connected", false)};
    } else {
      throw SpecError("unknown domain shape '" + shape + "'");
    }
    if (j.contains("h")) {
      spec.domain.h = get_or<double>(j, "h", 0.0);
    } else if (j.contains("nodes")) {
      const int nodes = get_or<int>(j, "nodes", 0);
      if (nodes < 1) throw SpecError("'nodes' must be positive");
      spec.domain.h = extent / nodes;
    } else if (shape == "mask") {
      spec.domain.h = 1.0;
    } else {
      throw SpecError("spec needs 'h' or 'nodes'");
    }
  }
  if (j.contains("collar")) {
    spec.domain.collar_width = get_or<int>(j, "collar", 2);
    spec.collar_given = true;
  }

  if (j.contains("boundary")) {
    const json& bj = j.at("boundary");
    allow_keys(bj, "boundary",
               {"type", "value", "theta0", "low", "high", "alpha", "seed", "quantum", "path"});
    BoundarySpec& b = spec.boundary;
    b.type = get_required<std::string>(bj, "type", "boundary");
    b.value = get_or<double>(bj, "value", 0.0);
    b.theta0 = get_or<double>(bj, "theta0", 0.0);
    b.low = get_or<double>(bj, "low", 0.0);
    b.high = get_or<double>(bj, "high", 1.0);
    b.alpha = get_or<double>(bj, "alpha", 0.5);
    if (bj.contains("seed")) b.seed = get_or<std::uint64_t>(bj, "seed", 0);
    b.quantum = get_or<double>(bj, "quantum", 0.0);
    if (bj.contains("path")) b.path = resolve(base_dir, get_or<std::string>(bj, "path", ""));
    if (b.type != "constant" && b.type != "step" && b.type != "holder" && b.type != "csv") {
      throw SpecError("unknown boundary type '" + b.type + "'");
    }
    if (b.type == "csv" && b.path.empty()) throw SpecError("csv boundary needs 'path'");
  }

  if (j.contains("obstacle")) {
    const json& oj = j.at("obstacle");
    allow_keys(oj, "obstacle", {"type", "apex", "height", "slope", "seed", "path"});
    ObstacleSpec& o = spec.obstacle;
    o.type = get_required<std::string>(oj, "type", "obstacle");
    if (oj.contains("apex")) {
      const auto apex = get_or<std::vector<double>>(oj, "apex", {});
      if (apex.size() != 2) throw SpecError("obstacle apex needs two coordinates");
      o.apex = {apex[0], apex[1]};
    }
    o.height = get_or<double>(oj, "height", 0.0);
    o.slope = get_or<double>(oj, "slope", 1.0);
    if (oj.contains("seed")) o.seed = get_or<std::uint64_t>(oj, "seed", 0);
    if (oj.contains("path")) o.path = resolve(base_dir, get_or<std::string>(oj, "path", ""));
    if (o.type != "none" && o.type != "cone" && o.type != "bumps" && o.type != "csv") {
      throw SpecError("unknown obstacle type '" + o.type + "'");
    }
    if (o.type == "csv" && o.path.empty()) throw SpecError("csv obstacle needs 'path'");
  }

  if (j.contains("ladder")) {
    const json& lj = j.at("ladder");
    allow_keys(lj, "ladder", {"mode", "levels"});
    const std::string mode = get_required<std::string>(lj, "mode", "ladder");
    if (mode == "quantized") {
      spec.ladder = LadderMode::Quantized;
    } else if (mode == "uniform") {
      spec.ladder = LadderMode::Uniform;
      spec.uniform_levels = get_required<int>(lj, "levels", "uniform ladder");
    } else {
      throw SpecError("unknown ladder mode '" + mode + "'");
    }
  }

  if (j.contains("diagnostics")) {
    const json& dj = j.at("diagnostics");
    allow_keys(dj, "diagnostics", {"holder", "barrier", "contact", "density"});
    DiagnosticsSpec& d = spec.diagnostics;
    if (dj.contains("holder")) {
      const json& hj = dj.at("holder");
      if (hj.is_boolean()) {
        d.holder = hj.get<bool>();
      } else {
        allow_keys(hj, "holder diagnostics", {"pairs"});
        d.holder = true;
        d.holder_pairs = get_or<std::size_t>(hj, "pairs", d.holder_pairs);
      }
    }
    if (dj.contains("barrier")) {
      const json& bj = dj.at("barrier");
      if (bj.is_boolean()) {
        d.barrier = bj.get<bool>();
      } else {
        allow_keys(bj, "barrier diagnostics", {"points", "alpha", "delta", "lambda"});
        d.barrier = true;
        d.barrier_points = get_or<std::size_t>(bj, "points", d.barrier_points);
        d.barrier_alpha = get_or<double>(bj, "alpha", d.barrier_alpha);
        d.barrier_delta = get_or<double>(bj, "delta", d.barrier_delta);
        d.barrier_lambda = get_or<double>(bj, "lambda", d.barrier_lambda);
        if (!(d.barrier_delta > 0.0) || !(d.barrier_lambda > 2.0 * d.barrier_delta)) {
          throw SpecError("barrier needs delta > 0 and lambda > 2 delta");
        }
      }
    }
    if (dj.contains("contact")) {
      const json& cj = dj.at("contact");
      if (cj.is_boolean()) {
        d.contact = cj.get<bool>();
      } else {
        allow_keys(cj, "contact diagnostics", {"windows"});
        d.contact = true;
        d.contact_windows = get_or<std::size_t>(cj, "windows", d.contact_windows);
      }
    }
    if (dj.contains("density")) {
      const json& nj = dj.at("density");
      if (nj.is_boolean()) {
        d.density = nj.get<bool>();
      } else {
        allow_keys(nj, "density diagnostics", {"points"});
        d.density = true;
        d.density_points = get_or<std::size_t>(nj, "points", d.density_points);
      }
    }
  }

  if (j.contains("foam")) {
    const json& fj = j.at("foam");
    allow_keys(fj, "foam",
               {"v", "epsilon", "J", "points_per_side", "raster", "stencil", "trials",
                "tube_widths", "coverage_distance", "two_ball"});
    FoamSpec f;
    if (fj.contains("v")) {
      const auto v = get_or<std::vector<double>>(fj, "v", {});
      if (v.size() != 4) throw SpecError("foam 'v' needs [x0, y0, x1, y1]");
      f.v = {v[0], v[1], v[2], v[3]};
    }
    f.epsilon = get_or<double>(fj, "epsilon", f.epsilon);
    f.j = get_or<std::size_t>(fj, "J", f.j);
    f.points_per_side = get_or<int>(fj, "points_per_side", f.points_per_side);
    f.raster = get_or<int>(fj, "raster", f.raster);
    f.stencil = get_or<int>(fj, "stencil", f.stencil);
    f.trials = get_or<std::size_t>(fj, "trials", f.trials);
    f.tube_widths = get_or<std::vector<double>>(fj, "tube_widths", f.tube_widths);
    f.coverage_distance = get_or<double>(fj, "coverage_distance", f.coverage_distance);
    if (fj.contains("two_ball")) {
      const json& tj = fj.at("two_ball");
      if (tj.is_boolean()) {
        f.two_ball = tj.get<bool>();
      } else {
        allow_keys(tj, "two_ball", {"big", "small", "distance", "nodes"});
        f.two_ball = true;
        f.two_ball_big = get_or<double>(tj, "big", f.two_ball_big);
        f.two_ball_small = get_or<double>(tj, "small", f.two_ball_small);
        f.two_ball_distance = get_or<double>(tj, "distance", f.two_ball_distance);
        f.two_ball_nodes = get_or<int>(tj, "nodes", f.two_ball_nodes);
      }
    }
    spec.foam = f;
  }
  return spec;
}

ProblemSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read spec file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str(), path.parent_path());
}

void apply_overrides(ProblemSpec& spec, const Overrides& o) {
  if (o.levels) {
    spec.ladder = LadderMode::Uniform;
    spec.uniform_levels = *o.levels;
  }
  if (o.stencil) spec.stencil = *o.stencil;
  if (o.output) spec.output = *o.output;
  if (o.seed) spec.seed = *o.seed;
}

Problem build_problem(const ProblemSpec& spec) {
  if (spec.stencil != 4 && spec.stencil != 8 && spec.stencil != 16) {
    throw SpecError("stencil order must be 4, 8 or 16");
  }
  if (!(spec.domain.h > 0.0)) throw SpecError("grid spacing must be positive");
  const Stencil stencil = make_stencil(spec.stencil, spec.domain.h);
  DomainDescriptor desc = spec.domain;
  if (!spec.collar_given) desc.collar_width = std::max(2, stencil.radius());
  DomainPtr domain;
  try {
    domain = build_domain(desc);
  } catch (const PreconditionError& e) {
    throw SpecError(e.what());
  }

  const BoundarySpec& b = spec.boundary;
  ScalarField g = [&] {
    if (b.type == "constant") return constant_data(domain, b.value);
    if (b.type == "step") return step_data(domain, b.theta0, b.low, b.high);
    if (b.type == "holder") {
      return holder_data(domain, b.alpha, b.seed.value_or(spec.seed), b.quantum);
    }
    return read_field_csv(b.path, domain, FieldRegion::Ring);
  }();
  g.require_finite("boundary data");

  const ObstacleSpec& o = spec.obstacle;
  ScalarField psi = [&] {
    if (o.type == "none") return inactive_obstacle(g);
    if (o.type == "cone") return cone_obstacle(g, o.apex, o.height, o.slope);
    if (o.type == "bumps") return bump_obstacle(g, o.seed.value_or(spec.seed));
    return read_field_csv(o.path, domain, FieldRegion::Closure);
  }();
  return make_problem(std::move(g), std::move(psi), stencil);
}

LevelLadder build_ladder(const ProblemSpec& spec, const Problem& problem) {
  return make_ladder(problem.g, problem.psi, spec.ladder, spec.uniform_levels);
}

int run_solve(const ProblemSpec& spec, const Overrides& o, std::ostream& err) {
  const auto t0 = Clock::now();
  if (std::holds_alternative<MaskShape>(spec.domain.shape)) {
    err << "warning: mask domains are not checked for the boundary curvature "
           "conditions the construction assumes\n";
  }
  const Problem problem = build_problem(spec);
  const LevelLadder ladder = build_ladder(spec, problem);
  const double t_setup = seconds_since(t0);
  ensure_dir(spec.output);

  if (o.dimacs_level) {
    if (*o.dimacs_level >= ladder.levels.size()) {
      throw SpecError("--dimacs level index out of range");
    }
    const LevelConstraints c = level_constraints(problem, ladder.levels[*o.dimacs_level].threshold);
    FlowNetwork net(problem.domain, problem.stencil, c.forced_in, c.forced_out);
    std::ofstream out(spec.output / "level.dimacs");
    net.write_dimacs(out);
  }

  const auto t1 = Clock::now();
  const Solution sol = solve(problem, ladder, SolveOptions{default_thread_count()});
  const double t_solve = seconds_since(t1);

  const auto t2 = Clock::now();
  write_field_csv(spec.output / "u.csv", sol.u);
  write_levels(spec.output / "levels.lgobv", sol);

  const GridDomain& d = *problem.domain;
  json report;
  report["kind"] = "solve";
  report["versions"] = versions();
  report["seed"] = spec.seed;
  report["domain"] = domain_summary(d);
  report["stencil"] = problem.stencil.order();
  report["ladder"] = ladder_json(ladder);

  json levels = json::array();
  for (std::size_t k = 0; k < sol.levels.size(); ++k) {
    const LevelSolution& l = sol.levels[k];
    levels.push_back(json{{"t", l.t},
                          {"value", l.value},
                          {"perimeter", l.perimeter.interior() + l.perimeter.crossing()},
                          {"perimeter_interior", l.perimeter.interior()},
                          {"volume", l.a.count_in_closure()},
                          {"minimizers_tied", l.e_min.count() != l.e.count()}});
  }
  report["levels"] = levels;

  std::size_t touching_pairs = 0;
  std::size_t touching_max = 0;
  for (std::size_t t : sol.nesting.touching) {
    touching_pairs += t > 0;
    touching_max = std::max(touching_max, t);
  }
  report["nesting"] = json{{"ok", sol.nesting.ok},
                           {"pairs", sol.nesting.touching.size()},
                           {"touching_pairs", touching_pairs},
                           {"touching_max", touching_max},
                           {"touching", sol.nesting.touching}};

  const CoareaLedger ledger = coarea_ledger(sol, problem.stencil);
  json rows = json::array();
  for (const CoareaRow& r : ledger.rows) {
    rows.push_back(json{{"t", r.t}, {"perimeter", r.perimeter}, {"gap_times_perimeter", r.contribution}});
  }
  report["coarea"] = json{{"ok", ledger.ok},
                          {"sum", ledger.sum},
                          {"edgewise_tv", ledger.edgewise_tv},
                          {"relative_error", ledger.relative_error},
                          {"rows", rows}};
  report["tv"] = json{{"total", sol.tv}, {"interior", sol.tv_interior}};

  std::string tsv = "distance\tabs_difference\n";
  const DiagnosticsSpec& ds = spec.diagnostics;
  if (ds.holder) {
    const auto pairs = boundary_pairs(d, ds.holder_pairs, 2.0 * d.h(), domain_diameter(d) / 4.0,
                                      spec.seed);
    if (pairs.size() < 100) {
      report["holder"] = json{{"defined", false}, {"reason", "fewer than 100 pairs available"}};
    } else {
      const HolderFit fit = holder_exponent(sol.u, pairs);
      for (const HolderSample& s : fit.samples) {
        tsv += format_double(s.distance) + '\t' + format_double(s.difference) + '\n';
      }
      json hj{{"defined", fit.defined}, {"pairs", fit.pairs}, {"used", fit.used}};
      if (fit.defined) {
        hj["beta"] = fit.beta;
        hj["constant"] = fit.constant;
        hj["residual"] = fit.residual;
      } else {
        hj["reason"] = "all differences are zero";
      }
      report["holder"] = hj;
    }
  } else {
    report["holder"] = json{{"defined", false}, {"reason", "disabled"}};
  }
  write_text(spec.output / "holder.tsv", tsv);

  json barriers = json::array();
  if (ds.barrier) {
    const std::vector<double> dist = ring_distance(d);
    const auto& ring = d.ring_nodes();
    const std::size_t points = std::min(ds.barrier_points, ring.size());
    for (std::size_t k = 0; k < points; ++k) {
      BarrierParams p;
      p.x0 = ring[k * ring.size() / points];
      p.alpha = ds.barrier_alpha;
      p.delta = ds.barrier_delta;
      p.lambda = ds.barrier_lambda;
      const BarrierSweep sw =
          barrier_sweep(p, problem.g, problem.psi, sol.u, dist, 1e-3, 1e6, 2.0);
      json bj{{"x0", p.x0}, {"lambda", p.lambda}, {"delta", p.delta}, {"alpha", p.alpha},
              {"holds", sw.k.has_value()}, {"tried", sw.ks.size()}};
      if (sw.k) bj["k"] = *sw.k;
      if (sw.at_k) bj["nodes"] = sw.at_k->nodes;
      barriers.push_back(bj);
    }
  }
  report["barriers"] = barriers;

  if (ds.contact) {
    const ContactSurvey cs = contact_survey(sol, problem.stencil, ds.contact_windows, spec.seed);
    report["contact"] = json{{"windows", cs.windows},     {"verified", cs.verified},
                             {"disjoint", cs.disjoint},   {"locally_equal", cs.locally_equal},
                             {"violations", cs.violations}, {"outside", cs.outside}};
  } else {
    report["contact"] = nullptr;
  }
  if (ds.density && !sol.levels.empty()) {
    report["density"] = density_section(sol.levels[sol.levels.size() / 2].e, problem.stencil,
                                        ds.density_points, spec.seed);
  } else {
    report["density"] = nullptr;
  }
  report["tolerances"] = json{{"coarea_relative", ledger.tolerance},
                              {"boundary_trace", ladder.mode == LadderMode::Quantized ? 0.0 : ladder.max_gap()},
                              {"obstacle", ladder.mode == LadderMode::Quantized ? 0.0 : ladder.max_gap()}};
  if (o.timings) {
    report["timings"] = json{{"setup_s", t_setup}, {"solve_s", t_solve},
                             {"diagnostics_s", seconds_since(t2)}};
  }
  write_json(spec.output / "report.json", report);
  return kExitOk;
}

int run_oracle(const ProblemSpec& spec, const Overrides& o, std::ostream& err) {
  const Problem problem = build_problem(spec);
  const LevelLadder ladder = build_ladder(spec, problem);
  Solution sol = solve(problem, ladder, SolveOptions{default_thread_count()});
  if (o.inject_fault) corrupt_solution(problem, sol);
  OracleReport r;
  try {
    r = oracle_compare(problem, sol);
  } catch (const PreconditionError& e) {
    throw SpecError(std::string("grid too large for the oracle: ") + e.what());
  }
  ensure_dir(spec.output);
  json report;
  report["kind"] = "oracle";
  report["versions"] = versions();
  report["seed"] = spec.seed;
  report["domain"] = domain_summary(*problem.domain);
  report["ladder"] = ladder_json(ladder);
  json levels = json::array();
  for (const OracleLevelRow& row : r.levels) {
    levels.push_back(json{{"t", row.t},
                          {"free_nodes", row.free_nodes},
                          {"oracle_ticks", row.oracle_ticks},
                          {"solver_ticks", row.solver_ticks},
                          {"e_max_match", row.e_max_match},
                          {"e_min_match", row.e_min_match},
                          {"unique_largest", row.unique_largest}});
  }
  report["levels"] = levels;
  report["oracle_tv"] = r.oracle_tv;
  report["solver_tv"] = r.solver_tv;
  report["solver_edgewise_tv"] = r.solver_edgewise_tv;
  report["field_enumerated"] = r.field_enumerated;
  report["fields"] = r.fields;
  if (r.field_enumerated) report["field_min_tv"] = r.field_min_tv;
  report["fault_injected"] = o.inject_fault;
  report["match"] = r.ok();
  report["mismatches"] = r.mismatches;
  write_json(spec.output / "oracle_report.json", report);
  for (const std::string& m : r.mismatches) err << "oracle mismatch: " << m << '\n';
  return r.ok() ? kExitOk : kExitOracleMismatch;
}

int run_foam(const ProblemSpec& spec, const Overrides& o, std::ostream& err) {
  if (!spec.foam) throw SpecError("foam command needs a 'foam' section");
  const FoamSpec& f = *spec.foam;
  const auto t0 = Clock::now();
  if (f.stencil != 4 && f.stencil != 8 && f.stencil != 16) {
    throw SpecError("foam stencil order must be 4, 8 or 16");
  }
  FoamStage stage;
  try {
    stage = foamy_construct(f.v, f.epsilon, f.j, dense_sequence(f.v, f.points_per_side, spec.seed));
  } catch (const PreconditionError& e) {
    throw SpecError(e.what());
  }
  const StageAudit audit = audit_stage(stage);

  // Raster frame: V padded on every side; the domain is centered at the
  // origin, so the stage is shifted to V's center. The pad keeps every ball
  // at least four stencil radii from the frame.
  const double side = std::max(f.v.x1 - f.v.x0, f.v.y1 - f.v.y0);
  const int radius = make_stencil(f.stencil, 1.0).radius();
  if (f.raster <= 16 * radius) {
    throw SpecError("foam raster needs more than " + std::to_string(16 * radius) + " nodes per side");
  }
  const double pad = std::max(0.125 * side, 4.0 * radius * side / (f.raster - 8.0 * radius));
  const double h = (side + 2.0 * pad) / f.raster;
  const Stencil stencil = make_stencil(f.stencil, h);
  const DomainPtr domain = build_domain(
      {RectangleShape{(f.v.x1 - f.v.x0) + 2.0 * pad, (f.v.y1 - f.v.y0) + 2.0 * pad}, h,
       std::max(2, stencil.radius())});
  const Point mid{(f.v.x0 + f.v.x1) / 2.0, (f.v.y0 + f.v.y1) / 2.0};
  FoamStage local = stage;
  local.v = {f.v.x0 - mid.x, f.v.y0 - mid.y, f.v.x1 - mid.x, f.v.y1 - mid.y};
  for (Ball& b : local.balls) b.center = {b.center.x - mid.x, b.center.y - mid.y};

  std::vector<double> cover;
  bool cover_monotone = true;
  for (std::size_t k = 1; k <= local.balls.size(); ++k) {
    FoamStage prefix = local;
    prefix.balls.resize(k);
    cover.push_back(coverage(prefix, *domain, f.coverage_distance));
    if (k > 1 && cover[k - 1] < cover[k - 2]) cover_monotone = false;
  }

  const SuperminimalityReport sup = foam_superminimality_check(
      local, domain, stencil, f.trials, f.tube_widths, spec.seed);

  json two;
  bool two_ok = true;
  if (f.two_ball) {
    const Ball big{{0.0, 0.0}, f.two_ball_big};
    const Ball small{{f.two_ball_distance, 0.0}, f.two_ball_small};
    const TwoBallResult exact = two_ball_solution(big, small);
    const DiscreteTwoBall disc = discrete_two_ball(big, small, f.two_ball_nodes, f.stencil);
    two_ok = disc.relative_error <= 0.02;
    two = json{{"big", f.two_ball_big},
               {"small", f.two_ball_small},
               {"distance", f.two_ball_distance},
               {"union_perimeter", exact.union_perimeter},
               {"hull_perimeter", exact.hull_perimeter},
               {"optimal", exact.optimal == TwoBallOptimum::Union ? "union" : "hull"},
               {"margin", exact.margin},
               {"nodes", f.two_ball_nodes},
               {"discrete_perimeter", disc.discrete},
               {"relative_error", disc.relative_error},
               {"ok", two_ok}};
  } else {
    two = nullptr;
  }

  ensure_dir(spec.output);
  json stage_json;
  stage_json["v"] = {stage.v.x0, stage.v.y0, stage.v.x1, stage.v.y1};
  stage_json["epsilon"] = stage.epsilon;
  json balls = json::array();
  for (std::size_t k = 0; k < stage.balls.size(); ++k) {
    balls.push_back(json{{"center", {stage.balls[k].center.x, stage.balls[k].center.y}},
                         {"radius", stage.balls[k].radius},
                         {"delta", stage.deltas[k]},
                         {"pair_margin", stage.pair_margins[k]}});
  }
  stage_json["balls"] = balls;
  write_json(spec.output / "stage.json", stage_json);

  const PixelSet raster = rasterize(local, domain);
  std::vector<std::uint8_t> gray;
  gray.reserve(domain->size());
  for (int j = domain->height() - 1; j >= 0; --j) {
    for (int i = 0; i < domain->width(); ++i) {
      gray.push_back(raster.contains(domain->index(i, j)) ? 255 : 0);
    }
  }
  write_pgm(spec.output / "foam.pgm", domain->width(), domain->height(), gray);

  const bool ok = audit.ok() && sup.ok() && two_ok && cover_monotone;
  json report;
  report["kind"] = "foam";
  report["versions"] = versions();
  report["seed"] = spec.seed;
  report["J"] = stage.index();
  report["epsilon"] = stage.epsilon;
  report["area"] = stage.area();
  report["area_bound"] = 3.141592653589793 * stage.epsilon * stage.epsilon;
  report["delta_J"] = stage.delta_j();
  report["tail_bound"] = stage.tail_bound();
  report["points_used"] = stage.points_used;
  report["points_skipped"] = stage.points_skipped;
  report["audit"] = json{{"disjoint", audit.disjoint},
                         {"radii_halving", audit.radii_halving},
                         {"area_bound", audit.area_bound},
                         {"margins_positive", audit.margins_positive},
                         {"deltas_decreasing", audit.deltas_decreasing},
                         {"tail", audit.tail}};
  report["coverage"] = json{{"distance", f.coverage_distance}, {"by_stage", cover},
                            {"monotone", cover_monotone}};
  json tubes = json::array();
  for (const TubeCheck& t : sup.tubes) {
    tubes.push_back(json{{"a", t.a}, {"b", t.b}, {"width", t.width},
                         {"closed_form", t.closed_form}, {"margin", t.margin},
                         {"discrete", t.discrete}, {"holds", t.holds}});
  }
  report["superminimality"] = json{{"windows", sup.windows},
                                   {"window_failures", sup.window_failures},
                                   {"tubes", tubes}};
  report["two_ball"] = two;
  report["delta_2"] = delta_2();
  report["ok"] = ok;
  if (o.timings) report["timings"] = json{{"total_s", seconds_since(t0)}};
  write_json(spec.output / "foam_report.json", report);
  if (!ok) err << "foam verdicts failed; see foam_report.json\n";
  return ok ? kExitOk : kExitOracleMismatch;
}

int run_command(const std::string& command, const std::filesystem::path& spec_path,
                const Overrides& o, std::ostream& err) {
  try {
    ProblemSpec spec = load_spec(spec_path);
    apply_overrides(spec, o);
    if (command == "solve") return run_solve(spec, o, err);
    if (command == "oracle") return run_oracle(spec, o, err);
    if (command == "foam") return run_foam(spec, o, err);
    err << "unknown command " << command << '\n';
    return kExitSpec;
  } catch (const NestingViolation& e) {
    err << "error: " << e.what() << '\n';
    return kExitNesting;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const SpecError& e) {
    err << "spec error: " << e.what() << '\n';
    return kExitSpec;
  } catch (const PreconditionError& e) {
    err << "spec error: " << e.what() << '\n';
    return kExitSpec;
  }
}

}  // namespace lgo
