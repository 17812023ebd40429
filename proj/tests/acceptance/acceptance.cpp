// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support/brute_force.hpp"
#include "../support/instances.hpp"
#include "../support/oracles.hpp"
#include "lgo/data.hpp"
#include "lgo/diagnostics.hpp"
#include "lgo/error.hpp"
#include "lgo/foam.hpp"
#include "lgo/mincut.hpp"
#include "lgo/oracle.hpp"
#include "lgo/parallel.hpp"
#include "lgo/solver.hpp"

using namespace lgo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool same_doubles(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Instances shared by criteria 1-4, built on first use.
struct Shared {
  std::vector<Problem> tiny;
  std::vector<Solution> tiny_solutions;
  std::vector<Problem> grids;
  std::vector<Solution> grid_solutions;
  std::size_t grid_failures = 0;
  std::vector<std::string> grid_errors;
  std::optional<Problem> holder;
  std::optional<Solution> holder_solution;
};

Shared& shared() {
  static Shared s;
  return s;
}

void build_tiny() {
  Shared& s = shared();
  if (!s.tiny.empty()) return;
  std::mt19937_64 rng(1001);
  for (int trial = 0; trial < 60; ++trial) {
    s.tiny.push_back(inst::random_tiny_problem(rng, trial, 2 + trial % 3));
    const Problem& p = s.tiny.back();
    s.tiny_solutions.push_back(solve(p, make_ladder(p.g, p.psi, LadderMode::Quantized)));
  }
}

void build_grids() {
  Shared& s = shared();
  if (!s.grids.empty() || s.grid_failures) return;
  std::mt19937_64 rng(2002);
  for (int trial = 0; trial < 100; ++trial) {
    Problem p = inst::random_disc_problem(rng, trial, 4 + trial % 5);
    try {
      Solution sol = solve(p, make_ladder(p.g, p.psi, LadderMode::Quantized));
      s.grids.push_back(std::move(p));
      s.grid_solutions.push_back(std::move(sol));
    } catch (const NestingViolation& e) {
      ++s.grid_failures;
      s.grid_errors.push_back(e.what());
    }
  }
}

void build_holder() {
  Shared& s = shared();
  if (s.holder) return;
  auto d = build_domain({DiscShape{1.0}, 2.0 / 256, 2});
  const ScalarField g = holder_data(d, 0.5, 0);
  s.holder = make_problem(g, inactive_obstacle(g), make_stencil(16, d->h()));
  s.holder_solution =
      solve(*s.holder, make_ladder(s.holder->g, s.holder->psi, LadderMode::Quantized),
            SolveOptions{default_thread_count()});
}

Outcome criterion_1() {
  build_tiny();
  const Shared& s = shared();
  std::size_t levels = 0, bad = 0, fields = 0, max_free = 0;
  for (std::size_t k = 0; k < s.tiny.size(); ++k) {
    const Problem& p = s.tiny[k];
    const Solution& sol = s.tiny_solutions[k];
    const auto edges = brute::omega_edges(*p.domain, p.stencil);
    double tv = 0.0;
    double previous = sol.ladder.a;
    for (std::size_t l = 0; l < sol.levels.size(); ++l) {
      const Level& level = sol.ladder.levels[l];
      const auto status = brute::level_status(p.g, p.psi, p.extended, level.threshold);
      max_free = std::max<std::size_t>(max_free, std::count(status.begin(), status.end(), 0));
      const auto m = brute::minimize_level(edges, status);
      const auto& e = sol.levels[l].e;
      ++levels;
      if (brute::cut_ticks(edges, e.bits()) != m.min_ticks) ++bad;
      if (e.bits() != m.largest) ++bad;
      if (sol.levels[l].e_min.bits() != m.intersection) ++bad;
      tv += (level.value - previous) * static_cast<double>(m.min_ticks) * p.stencil.tick_length();
      previous = level.value;
    }
    if (std::abs(tv - sol.tv) > 1e-12 * std::max(1.0, tv)) ++bad;
    const OracleReport r = oracle_compare(p, sol);
    if (!r.ok()) ++bad;
    if (r.field_enumerated) ++fields;
  }
  return {bad == 0 && s.tiny.size() >= 50 && max_free <= 22,
          fmt("%zu instances, %zu levels, up to %zu free nodes, %zu with whole-field enumeration, %zu mismatches",
              s.tiny.size(), levels, max_free, fields, bad)};
}

Outcome criterion_2() {
  build_grids();
  const Shared& s = shared();
  std::size_t pairs = 0, violations = s.grid_failures, touching = 0;
  for (const Solution& sol : s.grid_solutions) {
    const NestingVerdict v = nesting_audit(sol.levels);
    if (!v.ok) ++violations;
    // every pair, not only consecutive ones
    for (std::size_t a = 0; a < sol.levels.size(); ++a) {
      for (std::size_t b = a + 1; b < sol.levels.size(); ++b) {
        ++pairs;
        if (!sol.levels[b].e.subset_of(sol.levels[a].e)) ++violations;
      }
    }
    for (std::size_t t : v.touching) touching += t > 0;
  }
  const std::size_t n = s.grid_solutions.size() + s.grid_failures;
  return {violations == 0 && n >= 100,
          fmt("%zu instances at 64 x 64, %zu level pairs, %zu violations, %zu consecutive pairs touching",
              n, pairs, violations, touching)};
}

Outcome criterion_3() {
  build_tiny();
  build_grids();
  const Shared& s = shared();
  std::size_t count = 0, bad = 0;
  double worst = 0.0;
  auto check = [&](const Problem& p, const Solution& sol) {
    const CoareaLedger l = coarea_ledger(sol, p.stencil);
    const double direct = edgewise_tv(sol.extended, p.stencil, false);
    const double rel = std::abs(l.sum - direct) / std::max(1.0, std::abs(direct));
    worst = std::max(worst, rel);
    ++count;
    if (!l.ok || rel > 1e-9) ++bad;
  };
  for (std::size_t k = 0; k < s.tiny.size(); ++k) check(s.tiny[k], s.tiny_solutions[k]);
  for (std::size_t k = 0; k < s.grids.size(); ++k) check(s.grids[k], s.grid_solutions[k]);
  return {bad == 0, fmt("%zu instances, worst relative error %.3g (limit 1e-9)", count, worst)};
}

Outcome criterion_4() {
  build_grids();
  const Shared& s = shared();
  std::size_t ring_bad = 0, obstacle_bad = 0, nodes = 0;
  for (std::size_t k = 0; k < s.grids.size(); ++k) {
    const Problem& p = s.grids[k];
    const Solution& sol = s.grid_solutions[k];
    for (std::size_t n : p.domain->ring_nodes()) ring_bad += sol.u[n] != p.g[n];
    for (std::size_t n : p.domain->interior_nodes()) {
      obstacle_bad += !(sol.u[n] >= p.psi[n]);
      ++nodes;
    }
  }
  return {ring_bad == 0 && obstacle_bad == 0 && !s.grids.empty(),
          fmt("%zu instances, %zu ring mismatches, %zu of %zu interior nodes below the obstacle",
              s.grids.size(), ring_bad, obstacle_bad, nodes)};
}

Outcome criterion_5() {
  std::mt19937_64 rng(5005);
  std::size_t identical = 0;
  const int count = 20;
  for (int trial = 0; trial < count; ++trial) {
    Problem base = inst::random_disc_problem(rng, trial * 4, 4 + trial % 4);  // inactive obstacle
    double lo = INFINITY;
    for (std::size_t n : base.domain->ring_nodes()) lo = std::min(lo, base.g[n]);
    ScalarField psi(base.domain, FieldRegion::Closure);
    std::uniform_real_distribution<double> below(0.0, 1.0);
    for (std::size_t n : base.domain->closure_nodes()) psi[n] = lo - (trial % 2 ? below(rng) : 0.5);
    const Problem low = make_problem(base.g, psi, base.stencil);
    const Solution a = solve(base, make_ladder(base.g, base.psi, LadderMode::Quantized));
    const Solution b = solve(low, make_ladder(low.g, low.psi, LadderMode::Quantized));
    identical += same_doubles(a.u.values(), b.u.values()) &&
                 same_doubles(a.extended.values(), b.extended.values());
  }
  return {identical == count, fmt("%zu of %d instances byte-identical", identical, count)};
}

Outcome criterion_6() {
  auto d = build_domain({DiscShape{1.0}, 2.0 / 256, 2});
  const double h = d->h();
  const ScalarField g = step_data(d, 0.0, 0.0, 1.0);
  const Problem p = make_problem(g, inactive_obstacle(g), make_stencil(16, h));
  const Solution sol = solve(p, make_ladder(p.g, p.psi, LadderMode::Quantized), SolveOptions{default_thread_count()});
  const LevelSolution* half = nullptr;
  for (const auto& l : sol.levels) {
    if (l.t > 0.0 && l.t < 1.0) half = &l;
  }
  if (!half) return {false, "no level between the two data values"};
  // boundary nodes of E inside the closure
  std::vector<Point> boundary;
  for (std::size_t n : d->closure_nodes()) {
    if (!half->e.contains(n)) continue;
    const int i = d->col(n), j = d->row(n);
    const std::size_t nb[4] = {d->index(i + 1, j), d->index(i - 1, j), d->index(i, j + 1), d->index(i, j - 1)};
    for (std::size_t m : nb) {
      if (d->in_closure(m) && !half->e.contains(m)) {
        boundary.push_back(d->position(n));
        break;
      }
    }
  }
  double from_set = 0.0;
  for (const Point& q : boundary) {
    const double y = std::clamp(q.y, -1.0, 1.0);
    from_set = std::max(from_set, std::hypot(q.x, q.y - y));
  }
  double from_chord = 0.0;
  for (int k = 0; k <= 4000; ++k) {
    const double y = -1.0 + 2.0 * k / 4000;
    double best = INFINITY;
    for (const Point& q : boundary) best = std::min(best, std::hypot(q.x, q.y - y));
    from_chord = std::max(from_chord, best);
  }
  const double hausdorff = std::max(from_set, from_chord) / h;
  const double perim = half->perimeter.interior() + half->perimeter.crossing();
  const double rel = std::abs(perim - 2.0) / 2.0;
  return {hausdorff <= 2.0 && rel <= 0.02,
          fmt("Hausdorff %.3f px (limit 2), perimeter %.6f vs chord 2 (%.3f%%, limit 2%%)", hausdorff,
              perim, 100 * rel)};
}

Outcome criterion_7() {
  build_holder();
  const Shared& s = shared();
  const GridDomain& d = *s.holder->domain;
  const auto pairs = boundary_pairs(d, 400, 2 * d.h(), 2.0 / 4, 7);
  const HolderFit fit = holder_exponent(s.holder_solution->u, pairs);
  return {fit.defined && fit.beta >= 0.15,
          fmt("%zu levels, beta %.4f (limit >= 0.15), C %.4f, residual %.4f, %zu of %zu pairs used",
              s.holder_solution->levels.size(), fit.beta, fit.constant, fit.residual, fit.used, fit.pairs)};
}

Outcome criterion_8() {
  build_holder();
  const Shared& s = shared();
  const GridDomain& d = *s.holder->domain;
  const std::vector<double> dist = ring_distance(d);
  std::size_t held = 0;
  double k_max = 0.0;
  std::size_t nodes = 0;
  for (std::size_t k = 0; k < 10; ++k) {
    BarrierParams params;
    params.x0 = d.ring_nodes()[k * d.ring_nodes().size() / 10];
    params.alpha = 0.5;
    params.delta = 0.25;
    params.lambda = 1.0;
    const BarrierSweep sw = barrier_sweep(params, s.holder->g, s.holder->psi, s.holder_solution->u,
                                          dist, 1e-3, 1e6, 1.25);
    if (sw.k) {
      ++held;
      k_max = std::max(k_max, *sw.k);
      nodes += sw.at_k->nodes;
    }
  }
  return {held == 10, fmt("%zu of 10 boundary points sandwiched, largest K %.4g, %zu nodes checked",
                          held, k_max, nodes)};
}

Outcome criterion_9() {
  build_holder();
  build_grids();
  const Shared& s = shared();
  std::size_t drawn = 0, verified = 0, disjoint = 0, equal = 0, violations = 0, outside = 0;
  auto add = [&](const ContactSurvey& c) {
    drawn += c.windows;
    verified += c.verified;
    disjoint += c.disjoint;
    equal += c.locally_equal;
    violations += c.violations;
    outside += c.outside;
  };
  for (std::uint64_t seed = 1; verified < 1000 && seed <= 20; ++seed) {
    add(contact_survey(*s.holder_solution, s.holder->stencil, 500, seed));
  }
  const std::size_t holder_verified = verified;
  for (std::size_t k = 0; k < 20 && k < s.grids.size(); ++k) {
    add(contact_survey(s.grid_solutions[k], s.grids[k].stencil, 100, 900 + k));
  }
  return {violations == 0 && holder_verified >= 1000,
          fmt("%zu windows drawn, %zu verified (%zu on the Hoelder instance), %zu disjoint, %zu locally equal, %zu violations; %zu contacts differ only outside the window",
              drawn, verified, holder_verified, disjoint, equal, violations, outside)};
}

Outcome criterion_10() {
  const double quad = oracle::delta_2_quadrature();
  const oracle::MonteCarlo mc = oracle::delta_2_monte_carlo(10'000'000, 10);
  const double d2 = delta_2();
  bool ok = std::abs(d2 - quad) < 1e-6 && std::abs(d2 - mc.estimate) < 3 * mc.sigma;
  std::string detail = fmt("delta(2) %.9f, quadrature %.9f, Monte Carlo %.6f +- %.1e", d2, quad,
                           mc.estimate, mc.sigma);

  std::size_t sets = 0, failures = 0;
  auto d = build_domain({RectangleShape{40.0, 40.0}, 1.0, 2});
  const double r = 12.0;
  const std::vector<double> radii{3.0, 6.0, 12.0};
  auto check = [&](const PixelSet& e, std::size_t x, const Stencil& st) {
    const DensityBound b = density_lower_bound(e, x, r, st);
    const DensityProfile prof = density_profile(e, x, radii);
    ++sets;
    if (!b.preconditions || !b.holds || !prof.monotone) ++failures;
  };
  const int ci = d->width() / 2, cj = d->height() / 2;
  PixelSet half(d), quarter(d);
  for (std::size_t n = 0; n < d->size(); ++n) {
    half.set(n, d->col(n) <= ci);
    quarter.set(n, d->col(n) <= ci && d->row(n) <= cj);
  }
  check(half, d->index(ci, cj), make_stencil(16, 1.0));
  check(quarter, d->index(ci, cj), make_stencil(4, 1.0));

  // least-perimeter sets on 20 x 20 windows, verified subminimizing by
  // exhaustive enumeration around the point and by cut on the ball
  std::mt19937_64 rng(1010);
  auto w = build_domain({RectangleShape{20.0, 20.0}, 1.0, 2});
  const Stencil st = make_stencil(8, 1.0);
  std::size_t built = 0;
  for (int trial = 0; trial < 80 && built < 30; ++trial) {
    PixelSet in(w), out(w);
    const double angle = std::uniform_real_distribution<double>(0, 2 * std::numbers::pi)(rng);
    const double offset = std::uniform_real_distribution<double>(-6, 6)(rng);
    for (std::size_t n = 0; n < w->size(); ++n) {
      if (w->in_closure(n)) continue;
      const Point q = w->position(n);
      const double side = q.x * std::cos(angle) + q.y * std::sin(angle) - offset +
                          std::uniform_real_distribution<double>(-3, 3)(rng);
      (side < 0 ? in : out).set(n);
    }
    const PixelSet e = solve_min_cut(w, st, in, out).e_max;
    std::vector<std::size_t> candidates;
    for (std::size_t x : w->closure_nodes()) {
      const int i = w->col(x), j = w->row(x);
      if (std::min({i, j, w->width() - 1 - i, w->height() - 1 - j}) >= 8 && on_boundary(e, x)) {
        candidates.push_back(x);
      }
    }
    if (candidates.empty()) continue;
    const std::size_t x = candidates[rng() % candidates.size()];
    std::vector<std::size_t> window;
    for (int j = w->row(x) - 2; j <= w->row(x) + 1; ++j) {
      for (int i = w->col(x) - 2; i <= w->col(x) + 2; ++i) window.push_back(w->index(i, j));
    }
    if (!minimality_oracle(e, window, MinimalityMode::Sub, st).holds) continue;
    const DensityBound b = density_lower_bound(e, x, 8.0, st);
    if (!b.preconditions) continue;
    ++built;
    ++sets;
    const std::vector<double> small{2.0, 4.0, 8.0};
    if (!b.holds || !density_profile(e, x, small).monotone) ++failures;
  }
  ok = ok && failures == 0 && built >= 20;
  detail += fmt("; %zu verified subminimizers (%zu from 20 x 20 windows), %zu failures", sets, built,
                failures);
  return {ok, detail};
}

Outcome criterion_11() {
  const RectRegion v{0, 0, 1, 1};
  const double eps = 0.1;
  const FoamStage s = foamy_construct(v, eps, 30, dense_sequence(v, 64, 11));
  const double pi = std::numbers::pi;
  bool ok = s.index() == 30 && s.area() < pi * eps * eps;
  bool deltas = true, tail_ok = true;
  for (double dl : s.deltas) deltas = deltas && dl > 0.0;
  for (std::size_t j = 1; j < s.index(); ++j) deltas = deltas && s.pair_margins[j] > 0.0;
  double tail = 0.0;
  for (std::size_t j = s.index(); j-- > 1;) {
    tail += 2 * pi * s.balls[j].radius;
    tail_ok = tail_ok && tail < s.deltas[j - 1];
  }
  // tubes between every pair of the stage, closed form
  bool tubes = true;
  for (std::size_t a = 0; a < s.index(); ++a) {
    for (std::size_t b = a + 1; b < s.index(); ++b) {
      const double w = 1.6 * std::min(s.balls[a].radius, s.balls[b].radius);
      tubes = tubes && tube_increase(s.balls[a], s.balls[b], w) > 0.0;
    }
  }
  // discrete tubes on the rasterized stage
  FoamStage local = s;
  for (Ball& b : local.balls) b.center = {b.center.x - 0.5, b.center.y - 0.5};
  local.v = {-0.5, -0.5, 0.5, 0.5};
  auto d = build_domain({RectangleShape{1.25, 1.25}, 1.25 / 1024, 2});
  const SuperminimalityReport sup =
      foam_superminimality_check(local, d, make_stencil(16, d->h()), 300, {0.5, 0.8}, 11);
  std::size_t tube_fail = 0;
  for (const TubeCheck& t : sup.tubes) tube_fail += !(t.discrete > 0.0 && t.closed_form >= t.margin);
  const DiscreteTwoBall two = discrete_two_ball({{0, 0}, 1.0}, {{3, 0}, 0.05}, 512, 16);
  ok = ok && deltas && tail_ok && tubes && sup.ok() && tube_fail == 0 && !sup.tubes.empty() &&
       two.relative_error <= 0.02;
  return {ok, fmt("area %.6f < %.6f, margins %s, tail %s, %zu raster tubes (%zu failed), two-ball error %.4f%% (limit 2%%)",
                  s.area(), pi * eps * eps, deltas ? "positive" : "NOT positive",
                  tail_ok ? "holds" : "fails", sup.tubes.size(), tube_fail, 100 * two.relative_error)};
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    out[fs::relative(entry.path(), dir).string()] = s.str();
  }
  return out;
}

Outcome criterion_12() {
  const fs::path root = fs::temp_directory_path() / "lgo_acceptance_determinism";
  fs::remove_all(root);
  struct Run {
    const char* command;
    const char* spec;
  };
  const Run runs[] = {{"solve", "disc_step.json"},
                      {"solve", "square_cone.json"},
                      {"oracle", "tiny_oracle.json"},
                      {"foam", "foam.json"}};
  std::size_t files = 0, differing = 0, failed = 0;
  for (const Run& run : runs) {
    std::map<std::string, std::string> trees[2];
    for (int t = 0; t < 2; ++t) {
      const fs::path out = root / (std::string(run.spec) + (t ? ".b" : ".a"));
      const std::string cmd = std::string("LG_THREADS=") + (t ? "4" : "1") + " '" + LGO_CLI + "' " +
                              run.command + " '" + LGO_SPECS + "/" + run.spec + "' --out '" +
                              out.string() + "' 2>/dev/null";
      if (std::system(cmd.c_str()) != 0) ++failed;
      trees[t] = read_tree(out);
    }
    files += trees[0].size();
    if (trees[0] != trees[1]) ++differing;
  }
  return {failed == 0 && differing == 0 && files > 0,
          fmt("%zu specs, %zu artifacts compared across LG_THREADS=1 and 4, %zu specs differ, %zu runs failed",
              std::size(runs), files, differing, failed)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0: no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "oracle equivalence", 120, criterion_1},
      {2, "nesting", 300, criterion_2},
      {3, "co-area identity", 0, criterion_3},
      {4, "boundary and obstacle", 0, criterion_4},
      {5, "inactive obstacle", 0, criterion_5},
      {6, "chord", 60, criterion_6},
      {7, "Hoelder exponent", 0, criterion_7},
      {8, "barrier sandwich", 0, criterion_8},
      {9, "contact probe", 0, criterion_9},
      {10, "density constant and bounds", 0, criterion_10},
      {11, "foam", 180, criterion_11},
      {12, "determinism", 0, criterion_12},
  };
  std::set<int> wanted;
  for (int k = 1; k < argc; ++k) wanted.insert(std::atoi(argv[k]));
  int failures = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // criteria 3 and 4 reuse instances built by 1 and 2, so their time is
    // only the extra work
    if (c.limit_s > 0 && secs > c.limit_s) {
      o.pass = false;
      o.detail += fmt("; runtime %.1f s exceeds %.0f s", secs, c.limit_s);
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.id << "  " << c.name << ": " << o.detail
              << fmt("  [%.1f s]", secs) << std::endl;
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
