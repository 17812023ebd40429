#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lgo/grid.hpp"
#include "lgo/perimeter.hpp"

namespace lgo {

/// One rung of the ladder. Superlevel sets are taken at `threshold`; nodes
/// in the level's set are assigned at least `value`.
struct Level {
  double threshold = 0.0;
  double value = 0.0;
};

enum class LadderMode : std::uint8_t { Quantized, Uniform };

struct LevelLadder {
  std::vector<Level> levels;  // strictly increasing thresholds and values
  double a = 0.0;
  double b = 0.0;
  LadderMode mode = LadderMode::Quantized;

  /// Largest gap between consecutive values, including a and b at the ends.
  double max_gap() const;
};

/// Quantized: one level per distinct value v of g (ring) and psi (closure),
/// at threshold v - eps with eps half the smallest gap. Uniform: m levels at
/// a + i (b - a) / (m + 1), i = 1..m, each assigning its own threshold.
LevelLadder make_ladder(const ScalarField& g, const ScalarField& psi, LadderMode mode,
                        int m = 0);

/// Validated inputs shared by every level solve. Immutable.
struct Problem {
  DomainPtr domain;
  ScalarField g;         // ring
  ScalarField psi;       // closure
  ScalarField extended;  // G on collar and ring
  Stencil stencil;
};

/// Throws SpecError when g is undefined on the ring, psi undefined on the
/// closure, g < psi somewhere on the ring, or the collar is narrower than
/// the stencil radius.
Problem make_problem(ScalarField g, ScalarField psi, const Stencil& stencil);

struct LevelConstraints {
  PixelSet forced_in;   // L_t, the exterior superlevel and the ring trace {g >= t}
  PixelSet forced_out;  // the rest of the collar and of the ring
};

LevelConstraints level_constraints(const Problem& problem, double t);

struct LevelSolution {
  double t = 0.0;
  double value = 0.0;
  PixelSet e;      // volume-maximal minimizer
  PixelSet e_min;  // volume-minimal minimizer
  PixelSet a;      // e restricted to the closure
  PerimeterValue perimeter;  // of e over Omega
  std::int64_t flow_ticks = 0;
};

LevelSolution solve_level(const Problem& problem, const Level& level);

struct NestingVerdict {
  bool ok = true;
  std::size_t lower = 0;  // ladder index s of the first violating pair
  std::size_t upper = 0;  // ladder index t > s
  std::vector<std::size_t> witness;  // nodes of E_t missing from E_s
  /// Per consecutive pair: Interior nodes in E_t with a 4-neighbor outside
  /// E_s, i.e. places where the two boundaries touch.
  std::vector<std::size_t> touching;
};

/// Checks E_t inside E_s for consecutive levels (inclusion is transitive).
/// Levels must be sorted by threshold.
NestingVerdict nesting_audit(std::span<const LevelSolution> levels);

struct SolveOptions {
  unsigned threads = 1;
};

struct Solution {
  DomainPtr domain;
  LevelLadder ladder;
  std::vector<LevelSolution> levels;
  ScalarField u;         // closure
  ScalarField extended;  // u on the closure, quantized G on the collar
  double tv = 0.0;           // sum of gap * P(E_k, Omega)
  double tv_interior = 0.0;  // same with interior edges only
  NestingVerdict nesting;
};

/// Solves every level (concurrently when options.threads > 1; the result
/// does not depend on the thread count), audits nesting and assembles u.
/// Throws NestingViolation when the audit fails.
Solution solve(const Problem& problem, const LevelLadder& ladder,
               const SolveOptions& options = {});

/// Sum of w |f(p) - f(q)| over stencil edges touching the closure, or only
/// over edges joining two closure nodes when interior_only is set.
double edgewise_tv(const ScalarField& f, const Stencil& stencil, bool interior_only);

}  // namespace lgo
