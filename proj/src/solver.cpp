#include "lgo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>

#include "lgo/error.hpp"
#include "lgo/mincut.hpp"
#include "lgo/parallel.hpp"

namespace lgo {

namespace {

constexpr int kDx4[4] = {1, -1, 0, 0};
constexpr int kDy4[4] = {0, 0, 1, -1};

std::vector<double> data_values(const ScalarField& g, const ScalarField& psi) {
  const GridDomain& domain = g.domain();
  std::vector<double> values;
  for (std::size_t n : domain.ring_nodes()) {
    if (!std::isfinite(g[n])) {
      throw SpecError("boundary data undefined at ring node " + std::to_string(n));
    }
    values.push_back(g[n]);
  }
  for (std::size_t n : psi.domain().closure_nodes()) {
    if (!std::isfinite(psi[n])) {
      throw SpecError("obstacle undefined at node " + std::to_string(n));
    }
    values.push_back(psi[n]);
  }
  if (values.empty()) throw SpecError("no boundary or obstacle data");
  std::sort(values.begin(), values.end());
  return values;
}

}  // namespace

unsigned default_thread_count() {
  if (const char* env = std::getenv("LG_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double LevelLadder::max_gap() const {
  double gap = 0.0;
  double previous = a;
  for (const Level& level : levels) {
    gap = std::max(gap, level.value - previous);
    previous = level.value;
  }
  return std::max(gap, b - previous);
}

LevelLadder make_ladder(const ScalarField& g, const ScalarField& psi, LadderMode mode,
                        int m) {
  std::vector<double> values = data_values(g, psi);
  LevelLadder ladder;
  ladder.mode = mode;
  ladder.a = values.front();
  ladder.b = values.back();
  if (mode == LadderMode::Quantized) {
    values.erase(std::unique(values.begin(), values.end()), values.end());
    double min_gap = 1.0;
    for (std::size_t k = 1; k < values.size(); ++k) {
      min_gap = k == 1 ? values[1] - values[0] : std::min(min_gap, values[k] - values[k - 1]);
    }
    const double eps = 0.5 * min_gap;
    for (double v : values) ladder.levels.push_back({v - eps, v});
    return ladder;
  }
  if (m < 1) throw SpecError("uniform ladder needs at least one level");
  if (!(ladder.b > ladder.a)) {
    throw SpecError("uniform ladder needs non-constant data");
  }
  for (int i = 1; i <= m; ++i) {
    const double t = ladder.a + i * (ladder.b - ladder.a) / (m + 1);
    ladder.levels.push_back({t, t});
  }
  return ladder;
}

Problem make_problem(ScalarField g, ScalarField psi, const Stencil& stencil) {
  const DomainPtr domain = g.domain_ptr();
  if (psi.domain_ptr() != domain) {
    throw SpecError("boundary data and obstacle live on different domains");
  }
  for (std::size_t n : domain->ring_nodes()) {
    if (!std::isfinite(g[n])) {
      throw SpecError("boundary data undefined at ring node " + std::to_string(n));
    }
  }
  for (std::size_t n : domain->closure_nodes()) {
    if (!std::isfinite(psi[n])) {
      throw SpecError("obstacle undefined at node " + std::to_string(n));
    }
  }
  for (std::size_t n : domain->ring_nodes()) {
    if (g[n] < psi[n]) {
      throw SpecError("obstacle exceeds boundary data at ring node " +
                      std::to_string(n));
    }
  }
  if (domain->collar_width() < stencil.radius()) {
    throw SpecError("collar width " + std::to_string(domain->collar_width()) +
                    " is smaller than the stencil radius " +
                    std::to_string(stencil.radius()));
  }
  if (std::abs(stencil.h() - domain->h()) > 1e-12 * domain->h()) {
    throw SpecError("stencil spacing differs from the grid spacing");
  }
  ScalarField extended = extend_boundary_data(g);
  return Problem{domain, std::move(g), std::move(psi), std::move(extended), stencil};
}

LevelConstraints level_constraints(const Problem& problem, double t) {
  const GridDomain& domain = *problem.domain;
  const PixelSet trace = ring_superlevel(problem.g, t);
  const PixelSet outside = exterior_superlevel(problem.extended, t);
  PixelSet forced_in = obstacle_superlevel(problem.psi, t).united(trace).united(outside);
  PixelSet forced_out(problem.domain);
  for (std::size_t n = 0; n < domain.size(); ++n) {
    const NodeLabel label = domain.label(n);
    if (label == NodeLabel::Collar && !outside.contains(n)) forced_out.set(n);
    if (label == NodeLabel::Ring && !trace.contains(n)) forced_out.set(n);
  }
  return {std::move(forced_in), std::move(forced_out)};
}

LevelSolution solve_level(const Problem& problem, const Level& level) {
  const LevelConstraints c = level_constraints(problem, level.threshold);
  FlowNetwork net(problem.domain, problem.stencil, c.forced_in, c.forced_out);
  net.max_flow();
  CutResult cut = net.extract_cuts();
  PixelSet a = cut.e_max.closure_part();
  return LevelSolution{level.threshold, level.value, std::move(cut.e_max),
                       std::move(cut.e_min), std::move(a), cut.perimeter,
                       cut.flow_ticks};
}

NestingVerdict nesting_audit(std::span<const LevelSolution> levels) {
  NestingVerdict verdict;
  for (std::size_t k = 1; k < levels.size(); ++k) {
    const PixelSet& lower = levels[k - 1].e;
    const PixelSet& upper = levels[k].e;
    std::vector<std::size_t> missing = upper.missing_from(lower);
    if (!missing.empty()) {
      verdict.ok = false;
      verdict.lower = k - 1;
      verdict.upper = k;
      verdict.witness = std::move(missing);
      return verdict;
    }
    const GridDomain& domain = upper.domain();
    std::size_t touching = 0;
    for (std::size_t n : domain.interior_nodes()) {
      if (!upper.contains(n)) continue;
      for (int d = 0; d < 4; ++d) {
        const std::size_t m = domain.index(domain.col(n) + kDx4[d], domain.row(n) + kDy4[d]);
        if (!lower.contains(m)) {
          ++touching;
          break;
        }
      }
    }
    verdict.touching.push_back(touching);
  }
  return verdict;
}

Solution solve(const Problem& problem, const LevelLadder& ladder,
               const SolveOptions& options) {
  const std::size_t count = ladder.levels.size();
  std::vector<std::optional<LevelSolution>> slots(count);
  parallel_for(count, options.threads, [&](std::size_t k) {
    slots[k] = solve_level(problem, ladder.levels[k]);
  });

  Solution sol{problem.domain,
               ladder,
               {},
               ScalarField(problem.domain, FieldRegion::Closure),
               ScalarField(problem.domain, FieldRegion::Everywhere),
               0.0,
               0.0,
               {}};
  sol.levels.reserve(count);
  for (auto& s : slots) sol.levels.push_back(std::move(*s));

  sol.nesting = nesting_audit(sol.levels);
  if (!sol.nesting.ok) {
    throw NestingViolation(sol.levels[sol.nesting.lower].t,
                           sol.levels[sol.nesting.upper].t, sol.nesting.witness);
  }

  const GridDomain& domain = *problem.domain;
  for (std::size_t n = 0; n < domain.size(); ++n) {
    double v = ladder.a;
    for (const LevelSolution& level : sol.levels) {
      if (level.e.contains(n)) v = level.value;
    }
    sol.extended[n] = v;
    if (domain.in_closure(n)) sol.u[n] = v;
  }

  const double tick = problem.stencil.tick_length();
  double previous = ladder.a;
  for (const LevelSolution& level : sol.levels) {
    const double gap = level.value - previous;
    sol.tv += gap * static_cast<double>(level.perimeter.interior_ticks +
                                        level.perimeter.crossing_ticks) * tick;
    sol.tv_interior += gap * static_cast<double>(level.perimeter.interior_ticks) * tick;
    previous = level.value;
  }
  return sol;
}

double edgewise_tv(const ScalarField& f, const Stencil& stencil, bool interior_only) {
  const GridDomain& domain = f.domain();
  const auto& half = stencil.half_offsets();
  const auto& ticks = stencil.half_ticks();
  double sum = 0.0;
  for (int j = 0; j < domain.height(); ++j) {
    for (int i = 0; i < domain.width(); ++i) {
      const std::size_t p = domain.index(i, j);
      for (std::size_t k = 0; k < half.size(); ++k) {
        const int qi = i + half[k].dx;
        const int qj = j + half[k].dy;
        if (!domain.in_grid(qi, qj)) continue;
        const std::size_t q = domain.index(qi, qj);
        const bool p_in = domain.in_closure(p);
        const bool q_in = domain.in_closure(q);
        if (interior_only ? !(p_in && q_in) : !(p_in || q_in)) continue;
        sum += static_cast<double>(ticks[k]) * stencil.tick_length() * std::abs(f[p] - f[q]);
      }
    }
  }
  return sum;
}

}  // namespace lgo
