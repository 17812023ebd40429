#include "lgo/foam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "lgo/error.hpp"
#include "lgo/mincut.hpp"

namespace lgo {

namespace {

constexpr double kPi = std::numbers::pi;

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double gap_to_frame(const RectRegion& v, Point p) {
  return std::min({p.x - v.x0, v.x1 - p.x, p.y - v.y0, v.y1 - p.y});
}

// Least two-ball margin of `b` against every ball in `prior`; negative when
// the hull wins against some ball.
double least_margin(const std::vector<Ball>& prior, const Ball& b) {
  double m = std::numeric_limits<double>::infinity();
  for (const Ball& k : prior) {
    const TwoBallResult r = two_ball_solution(k, b);
    m = std::min(m, r.optimal == TwoBallOptimum::Union ? r.margin : -r.margin);
  }
  return m;
}

}  // namespace

double delta_2() { return (kPi / 2.0 - 1.0) / kPi; }

double ball_perimeter(const Ball& b) { return 2.0 * kPi * b.radius; }

double hull_perimeter(const Ball& a, const Ball& b) {
  const double big = std::max(a.radius, b.radius);
  const double small = std::min(a.radius, b.radius);
  const double d = distance(a.center, b.center);
  const double beta = std::asin((big - small) / d);
  return 2.0 * std::sqrt(d * d - (big - small) * (big - small)) + big * (kPi + 2.0 * beta) +
         small * (kPi - 2.0 * beta);
}

TwoBallResult two_ball_solution(const Ball& a, const Ball& b) {
  if (!(a.radius > 0.0) || !(b.radius > 0.0)) {
    throw PreconditionError("ball radii must be positive");
  }
  if (distance(a.center, b.center) <= a.radius + b.radius) {
    throw PreconditionError("closed balls overlap");
  }
  TwoBallResult r;
  r.union_perimeter = ball_perimeter(a) + ball_perimeter(b);
  r.hull_perimeter = hull_perimeter(a, b);
  r.optimal = r.union_perimeter < r.hull_perimeter ? TwoBallOptimum::Union : TwoBallOptimum::Hull;
  r.margin = std::abs(r.hull_perimeter - r.union_perimeter);
  return r;
}

double tube_increase(const Ball& a, const Ball& b, double width) {
  const double w = width / 2.0;
  if (!(width > 0.0) || w >= std::min(a.radius, b.radius)) {
    throw PreconditionError("tube width must be positive and below both diameters");
  }
  const double d = distance(a.center, b.center);
  const double side = d - std::sqrt(a.radius * a.radius - w * w) -
                      std::sqrt(b.radius * b.radius - w * w);
  return 2.0 * side - 2.0 * a.radius * std::asin(w / a.radius) -
         2.0 * b.radius * std::asin(w / b.radius);
}

double FoamStage::area() const {
  double sum = 0.0;
  for (const Ball& b : balls) sum += kPi * b.radius * b.radius;
  return sum;
}

std::vector<Point> dense_sequence(const RectRegion& v, int per_side, std::uint64_t seed) {
  if (per_side < 1) throw PreconditionError("sequence needs at least one point per side");
  std::vector<Point> points;
  for (int j = 0; j < per_side; ++j) {
    for (int i = 0; i < per_side; ++i) {
      points.push_back({v.x0 + (v.x1 - v.x0) * (i + 0.5) / per_side,
                        v.y0 + (v.y1 - v.y0) * (j + 0.5) / per_side});
    }
  }
  std::mt19937_64 rng(seed);
  // Fisher-Yates with the raw generator, so the order does not depend on the
  // standard library's distribution implementation.
  for (std::size_t k = points.size(); k > 1; --k) {
    std::swap(points[k - 1], points[rng() % k]);
  }
  return points;
}

FoamStage foamy_construct(const RectRegion& v, double epsilon, std::size_t j,
                          const std::vector<Point>& sequence) {
  if (!(epsilon > 0.0)) throw PreconditionError("epsilon must be positive");
  if (j < 1) throw PreconditionError("J must be at least 1");
  if (!(v.x1 > v.x0) || !(v.y1 > v.y0)) throw PreconditionError("V is empty");
  FoamStage stage;
  stage.v = v;
  stage.epsilon = epsilon;
  const double first_radius = 0.45 * epsilon;
  for (const Point& p : sequence) {
    if (stage.balls.size() == j) break;
    ++stage.points_used;
    double gap = gap_to_frame(v, p);
    bool covered = false;
    for (const Ball& b : stage.balls) {
      const double d = distance(p, b.center) - b.radius;
      if (d <= 0.0) covered = true;
      gap = std::min(gap, d);
    }
    if (covered || !(gap > 0.0)) {
      ++stage.points_skipped;
      continue;
    }
    if (stage.balls.empty()) {
      if (first_radius >= gap) {
        ++stage.points_skipped;
        continue;
      }
      stage.balls.push_back({p, first_radius});
      stage.deltas.push_back(ball_perimeter(stage.balls.back()));
      stage.pair_margins.push_back(0.0);
      continue;
    }
    const double previous_delta = stage.deltas.back();
    double r = std::min({stage.balls.back().radius / 2.0, 0.9 * gap,
                         0.9 * previous_delta / (4.0 * kPi)});
    double margin = least_margin(stage.balls, {p, r});
    for (int halvings = 0; !(margin > 0.0); ++halvings) {
      if (halvings == 60) {
        throw InfeasibleError("no radius gives a positive two-ball margin");
      }
      r /= 2.0;
      margin = least_margin(stage.balls, {p, r});
    }
    stage.balls.push_back({p, r});
    stage.pair_margins.push_back(margin);
    stage.deltas.push_back(std::min(previous_delta / 2.0, margin / 2.0));
  }
  if (stage.balls.empty()) {
    throw InfeasibleError("V cannot hold a first ball of radius " +
                          std::to_string(first_radius));
  }
  if (stage.balls.size() < j) {
    throw InfeasibleError("point sequence exhausted after " +
                          std::to_string(stage.balls.size()) + " of " + std::to_string(j) +
                          " balls");
  }
  return stage;
}

StageAudit audit_stage(const FoamStage& stage) {
  StageAudit audit;
  const auto& balls = stage.balls;
  for (std::size_t a = 0; a < balls.size(); ++a) {
    if (!(gap_to_frame(stage.v, balls[a].center) > balls[a].radius)) audit.disjoint = false;
    for (std::size_t b = a + 1; b < balls.size(); ++b) {
      if (!(distance(balls[a].center, balls[b].center) > balls[a].radius + balls[b].radius)) {
        audit.disjoint = false;
      }
    }
    if (a == 0 && !(balls[0].radius < stage.epsilon / 2.0)) audit.radii_halving = false;
    if (a > 0 && !(balls[a].radius <= balls[a - 1].radius / 2.0)) audit.radii_halving = false;
    if (a > 0 && !(stage.pair_margins[a] > 0.0)) audit.margins_positive = false;
    if (!(stage.deltas[a] > 0.0)) audit.margins_positive = false;
    if (a > 0 && !(stage.deltas[a] <= stage.deltas[a - 1] / 2.0)) audit.deltas_decreasing = false;
  }
  audit.area_bound = stage.area() < kPi * stage.epsilon * stage.epsilon;
  for (std::size_t k = 0; k + 1 < balls.size(); ++k) {
    double tail = 0.0;
    for (std::size_t m = k + 1; m < balls.size(); ++m) tail += ball_perimeter(balls[m]);
    if (!(tail < stage.deltas[k])) audit.tail = false;
  }
  return audit;
}

PixelSet rasterize(const FoamStage& stage, const DomainPtr& domain) {
  PixelSet out(domain);
  for (std::size_t n = 0; n < domain->size(); ++n) {
    const Point p = domain->position(n);
    for (const Ball& b : stage.balls) {
      if (distance(p, b.center) < b.radius) {
        out.set(n);
        break;
      }
    }
  }
  return out;
}

double coverage(const FoamStage& stage, const GridDomain& domain, double d) {
  std::size_t total = 0;
  std::size_t near = 0;
  for (std::size_t n = 0; n < domain.size(); ++n) {
    const Point p = domain.position(n);
    if (p.x <= stage.v.x0 || p.x >= stage.v.x1 || p.y <= stage.v.y0 || p.y >= stage.v.y1) {
      continue;
    }
    ++total;
    for (const Ball& b : stage.balls) {
      if (distance(p, b.center) - b.radius <= d) {
        ++near;
        break;
      }
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(near) / static_cast<double>(total);
}

bool SuperminimalityReport::ok() const {
  if (window_failures != 0) return false;
  return std::all_of(tubes.begin(), tubes.end(), [](const TubeCheck& t) { return t.holds; });
}

SuperminimalityReport foam_superminimality_check(const FoamStage& stage,
                                                 const DomainPtr& domain,
                                                 const Stencil& stencil,
                                                 std::size_t trials,
                                                 const std::vector<double>& widths,
                                                 std::uint64_t seed) {
  const GridDomain& d = *domain;
  const double h = d.h();
  // The raster of F_J is replaced by the least-perimeter set containing it
  // (the smallest such), which is superminimizing on the grid by
  // construction; the continuum discs are not exactly so after rounding.
  PixelSet forced_out(domain);
  for (std::size_t n = 0; n < d.size(); ++n) {
    if (!d.in_closure(n) || d.label(n) == NodeLabel::Ring) forced_out.set(n);
  }
  const PixelSet raster = rasterize(stage, domain);
  const CutResult cut = solve_min_cut(domain, stencil, raster, forced_out);
  const PixelSet& f = cut.e_min;
  const std::int64_t base = perimeter(f, Region::plane(), stencil).total_ticks();

  std::vector<std::size_t> resolved;
  for (std::size_t k = 0; k < stage.balls.size(); ++k) {
    if (stage.balls[k].radius >= 3.0 * h) resolved.push_back(k);
  }

  SuperminimalityReport report;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (!resolved.empty()) {
    for (std::size_t t = 0; t < trials; ++t) {
      const Ball& b = stage.balls[resolved[rng() % resolved.size()]];
      const double angle = 2.0 * kPi * unit(rng);
      const std::size_t c = d.nearest_node({b.center.x + b.radius * std::cos(angle),
                                            b.center.y + b.radius * std::sin(angle)});
      std::vector<std::size_t> window;
      for (int j = d.row(c) - 2; j <= d.row(c) + 1; ++j) {
        for (int i = d.col(c) - 2; i <= d.col(c) + 2; ++i) {
          if (d.in_grid(i, j) && d.in_closure(d.index(i, j)) &&
              d.label(d.index(i, j)) != NodeLabel::Ring) {
            window.push_back(d.index(i, j));
          }
        }
      }
      ++report.windows;
      if (!minimality_oracle(f, window, MinimalityMode::Super, stencil).holds) {
        ++report.window_failures;
      }
    }
  }

  for (std::size_t x = 0; x < resolved.size(); ++x) {
    for (std::size_t y = x + 1; y < resolved.size(); ++y) {
      const Ball& a = stage.balls[resolved[x]];
      const Ball& b = stage.balls[resolved[y]];
      const double small = std::min(a.radius, b.radius);
      for (double fraction : widths) {
        TubeCheck tube;
        tube.a = resolved[x];
        tube.b = resolved[y];
        tube.width = fraction * 2.0 * small;
        if (tube.width < 2.0 * h || !(fraction < 1.0)) continue;
        tube.closed_form = tube_increase(a, b, tube.width);
        tube.margin = two_ball_solution(a, b).margin;
        PixelSet g = f;
        const double ux = b.center.x - a.center.x;
        const double uy = b.center.y - a.center.y;
        const double len = std::hypot(ux, uy);
        for (std::size_t n = 0; n < d.size(); ++n) {
          if (forced_out.contains(n)) continue;
          const Point p = d.position(n);
          const double s = ((p.x - a.center.x) * ux + (p.y - a.center.y) * uy) / len;
          const double off = std::abs((p.x - a.center.x) * uy - (p.y - a.center.y) * ux) / len;
          if (s > 0.0 && s < len && off < tube.width / 2.0) g.set(n);
        }
        tube.discrete = static_cast<double>(perimeter(g, Region::plane(), stencil).total_ticks() -
                                            base) *
                        stencil.tick_length();
        const double slack = 0.02 * (ball_perimeter(a) + ball_perimeter(b) + 2.0 * len);
        tube.holds = tube.discrete > 0.0 && tube.closed_form >= tube.margin &&
                     tube.discrete >= tube.margin - slack;
        report.tubes.push_back(tube);
      }
    }
  }
  return report;
}

DiscreteTwoBall discrete_two_ball(const Ball& a, const Ball& b, int nodes, int order) {
  const TwoBallResult exact = two_ball_solution(a, b);
  const double x0 = std::min(a.center.x - a.radius, b.center.x - b.radius);
  const double x1 = std::max(a.center.x + a.radius, b.center.x + b.radius);
  const double y0 = std::min(a.center.y - a.radius, b.center.y - b.radius);
  const double y1 = std::max(a.center.y + a.radius, b.center.y + b.radius);
  const double side = 1.25 * std::max(x1 - x0, y1 - y0);
  const double h = side / nodes;
  const Point mid{(x0 + x1) / 2.0, (y0 + y1) / 2.0};
  const Stencil stencil = make_stencil(order, h);
  DomainPtr domain = build_domain({RectangleShape{side, side}, h, std::max(2, stencil.radius())});
  PixelSet in(domain), out(domain);
  for (std::size_t n = 0; n < domain->size(); ++n) {
    if (!domain->in_closure(n) || domain->label(n) == NodeLabel::Ring) {
      out.set(n);
      continue;
    }
    const Point p = domain->position(n);
    const Point q{p.x + mid.x, p.y + mid.y};
    if (distance(q, a.center) < a.radius || distance(q, b.center) < b.radius) in.set(n);
  }
  const CutResult cut = solve_min_cut(domain, stencil, in, out);
  DiscreteTwoBall r;
  r.closed_form = std::min(exact.union_perimeter, exact.hull_perimeter);
  r.discrete = static_cast<double>(cut.flow_ticks + cut.offset_ticks) * stencil.tick_length();
  r.relative_error = std::abs(r.discrete - r.closed_form) / r.closed_form;
  return r;
}

}  // namespace lgo
