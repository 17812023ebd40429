#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lgo/grid.hpp"
#include "lgo/perimeter.hpp"

namespace lgo {

/// |D_1| / |B_1| in the plane: the part of the unit disc cut off by a unit
/// circle meeting it orthogonally, over pi.
double delta_2();

struct Ball {
  Point center;
  double radius = 0.0;
};

double ball_perimeter(const Ball& b);

enum class TwoBallOptimum : std::uint8_t { Union, Hull };

struct TwoBallResult {
  double union_perimeter = 0.0;
  double hull_perimeter = 0.0;
  TwoBallOptimum optimal = TwoBallOptimum::Union;
  double margin = 0.0;  // |hull - union|
};

/// Perimeter of the convex hull of two disjoint discs: two outer tangent
/// segments plus the two outer arcs.
double hull_perimeter(const Ball& a, const Ball& b);

/// Throws PreconditionError when the closed discs meet.
TwoBallResult two_ball_solution(const Ball& a, const Ball& b);

/// Extra perimeter of joining two disjoint discs by a straight tube of width
/// w along the segment between the centers. Needs w below both diameters.
double tube_increase(const Ball& a, const Ball& b, double width);

struct RectRegion {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 1.0;
  double y1 = 1.0;
};

struct FoamStage {
  RectRegion v;
  double epsilon = 0.0;
  std::vector<Ball> balls;      // positive radii only, in construction order
  std::vector<double> deltas;   // delta_j after ball j
  std::vector<double> pair_margins;  // least two-ball margin of ball j (0 for j = 1)
  std::size_t points_used = 0;  // sequence points consumed, including skipped ones
  std::size_t points_skipped = 0;  // points already covered by earlier balls

  std::size_t index() const { return balls.size(); }
  double area() const;
  double delta_j() const { return deltas.empty() ? 0.0 : deltas.back(); }
  /// Upper bound on the perimeter of every later ball together: the radius
  /// schedule keeps it below delta_J.
  double tail_bound() const { return delta_j(); }
};

/// Lattice points of V at `per_side` points per side, shuffled by a
/// generator seeded with `seed`.
std::vector<Point> dense_sequence(const RectRegion& v, int per_side, std::uint64_t seed);

/// Places J balls by the inductive radius rules. Throws InfeasibleError when
/// the sequence runs out or V cannot hold the first ball.
FoamStage foamy_construct(const RectRegion& v, double epsilon, std::size_t j,
                          const std::vector<Point>& sequence);

struct StageAudit {
  bool disjoint = true;     // closures pairwise apart and inside V
  bool radii_halving = true;  // r_1 < eps / 2, r_{j+1} <= r_j / 2
  bool area_bound = true;   // total area < pi eps^2
  bool margins_positive = true;
  bool deltas_decreasing = true;  // delta_{j+1} <= delta_j / 2
  bool tail = true;  // sum_{j > J'} P(B_j) < delta_J' for every J' < J
  bool ok() const {
    return disjoint && radii_halving && area_bound && margins_positive &&
           deltas_decreasing && tail;
  }
};

StageAudit audit_stage(const FoamStage& stage);

/// Nodes strictly inside some ball.
PixelSet rasterize(const FoamStage& stage, const DomainPtr& domain);

/// Fraction of grid nodes inside V within distance d of F_J.
double coverage(const FoamStage& stage, const GridDomain& domain, double d);

struct TubeCheck {
  std::size_t a = 0;
  std::size_t b = 0;
  double width = 0.0;
  double closed_form = 0.0;  // continuum increase
  double margin = 0.0;       // hull margin of the pair
  double discrete = 0.0;     // raster perimeter increase
  bool holds = false;        // discrete > 0 and closed_form >= margin
};

struct SuperminimalityReport {
  std::size_t windows = 0;
  std::size_t window_failures = 0;
  std::vector<TubeCheck> tubes;
  bool ok() const;
};

/// Rasterizes F_J, runs the Super oracle on random windows that straddle
/// ball boundaries, and joins resolved pairs of balls by tubes of the given
/// widths.
SuperminimalityReport foam_superminimality_check(const FoamStage& stage,
                                                 const DomainPtr& domain,
                                                 const Stencil& stencil,
                                                 std::size_t trials,
                                                 const std::vector<double>& widths,
                                                 std::uint64_t seed);

struct DiscreteTwoBall {
  double closed_form = 0.0;  // min of union and hull perimeters
  double discrete = 0.0;     // least raster perimeter containing both discs
  double relative_error = 0.0;
};

/// Solves the two-disc obstacle problem by min cut on a square raster of
/// `nodes` nodes per side framing both discs.
DiscreteTwoBall discrete_two_ball(const Ball& a, const Ball& b, int nodes, int order);

}  // namespace lgo
