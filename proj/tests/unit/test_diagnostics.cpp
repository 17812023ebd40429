#include <cmath>
#include <numbers>
#include <random>

#include "../support/brute_force.hpp"
#include "../support/instances.hpp"
#include "doctest.h"
#include "lgo/data.hpp"
#include "lgo/diagnostics.hpp"
#include "lgo/error.hpp"
#include "lgo/foam.hpp"
#include "lgo/mincut.hpp"

using namespace lgo;

namespace {

DomainPtr square(int nodes, int collar = 2) {
  return build_domain({RectangleShape{double(nodes), double(nodes)}, 1.0, collar});
}

PixelSet half_plane(const DomainPtr& d) {
  PixelSet e(d);
  for (std::size_t n = 0; n < d->size(); ++n) e.set(n, d->col(n) < d->width() / 2);
  return e;
}

std::size_t center_node(const GridDomain& d) { return d.index(d.width() / 2, d.height() / 2); }

}  // namespace

TEST_CASE("co-area ledger") {
  SUBCASE("constant data: every row is zero") {
    auto d = build_domain({DiscShape{1.0}, 0.125, 2});
    const ScalarField g = constant_data(d, 3.0);
    const Problem p = make_problem(g, inactive_obstacle(g), make_stencil(16, 0.125));
    const Solution sol = solve(p, make_ladder(p.g, p.psi, LadderMode::Quantized));
    const CoareaLedger l = coarea_ledger(sol, p.stencil);
    for (const auto& r : l.rows) CHECK(r.contribution == 0.0);
    CHECK(l.sum == 0.0);
    CHECK(l.ok);
  }
  SUBCASE("two-valued data: one row, gap times the chord cut") {
    auto d = build_domain({DiscShape{1.0}, 0.0625, 2});
    const ScalarField g = step_data(d, 0.0, 0.0, 2.0);
    const Problem p = make_problem(g, inactive_obstacle(g), make_stencil(8, 0.0625));
    const Solution sol = solve(p, make_ladder(p.g, p.psi, LadderMode::Quantized));
    const CoareaLedger l = coarea_ledger(sol, p.stencil);
    REQUIRE(l.rows.size() == 2);
    CHECK(l.rows[0].contribution == 0.0);
    const auto edges = brute::omega_edges(*d, p.stencil);
    const double cut = brute::cut_ticks(edges, sol.levels[1].e.bits()) * p.stencil.tick_length();
    CHECK(l.rows[1].contribution == doctest::Approx(2.0 * cut).epsilon(1e-12));
    CHECK(l.ok);
  }
  SUBCASE("random instances: sum equals the edge-wise variation") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 6; ++trial) {
      const Problem p = inst::random_disc_problem(rng, trial, 5);
      const Solution sol = solve(p, make_ladder(p.g, p.psi, LadderMode::Quantized));
      const CoareaLedger l = coarea_ledger(sol, p.stencil);
      CHECK(l.ok);
      CHECK(l.relative_error <= 1e-9);
    }
  }
}

TEST_CASE("Hoelder fit") {
  SUBCASE("linear ramp on a square has exponent one") {
    auto d = build_domain({RectangleShape{2.0, 2.0}, 1.0 / 32, 2});
    ScalarField u(d, FieldRegion::Closure);
    for (std::size_t n : d->closure_nodes()) u[n] = d->position(n).x;
    const auto pairs = boundary_pairs(*d, 400, 2.0 / 32, 0.7, 1);
    CHECK(pairs.size() == 400);
    const HolderFit fit = holder_exponent(u, pairs);
    REQUIRE(fit.defined);
    // pairs along the ramp's level lines have zero difference and drop out
    CHECK(fit.beta == doctest::Approx(1.0).epsilon(0.15));
  }
  SUBCASE("constant field has no exponent") {
    auto d = build_domain({DiscShape{1.0}, 1.0 / 32, 2});
    ScalarField u(d, FieldRegion::Closure);
    for (std::size_t n : d->closure_nodes()) u[n] = 1.0;
    const HolderFit fit = holder_exponent(u, boundary_pairs(*d, 200, 1.0 / 16, 0.5, 2));
    CHECK_FALSE(fit.defined);
  }
  SUBCASE("known power law is recovered") {
    auto d = build_domain({DiscShape{1.0}, 1.0 / 64, 2});
    ScalarField u(d, FieldRegion::Closure);
    const auto pairs = boundary_pairs(*d, 300, 2.0 / 64, 0.5, 3);
    // u depends on the distance to one boundary point only
    const Point x0 = d->position(pairs.front().first);
    for (std::size_t n : d->closure_nodes()) {
      const Point x = d->position(n);
      u[n] = 2.0 * std::pow(std::hypot(x.x - x0.x, x.y - x0.y), 0.3);
    }
    std::vector<std::pair<std::size_t, std::size_t>> anchored;
    for (const auto& [r, n] : pairs) anchored.push_back({pairs.front().first, n});
    const HolderFit fit = holder_exponent(u, anchored);
    REQUIRE(fit.defined);
    CHECK(fit.beta == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(fit.constant == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(fit.residual < 1e-9);
  }
  SUBCASE("too few pairs") {
    auto d = build_domain({DiscShape{1.0}, 1.0 / 16, 2});
    ScalarField u(d, FieldRegion::Closure);
    CHECK_THROWS_AS(holder_exponent(u, boundary_pairs(*d, 50, 0.125, 0.5, 1)), PreconditionError);
  }
}

TEST_CASE("barrier functions") {
  auto d = build_domain({DiscShape{1.0}, 1.0 / 32, 2});
  const ScalarField g = holder_data(d, 0.5, 0, 1.0 / 16);
  const ScalarField psi = inactive_obstacle(g);
  const Problem p = make_problem(g, psi, make_stencil(16, 1.0 / 32));
  const Solution sol = solve(p, make_ladder(p.g, p.psi, LadderMode::Quantized));
  const std::vector<double> dist = ring_distance(*d);
  BarrierParams params;
  params.x0 = d->ring_nodes()[d->ring_nodes().size() / 3];
  params.delta = 0.25;
  params.lambda = 1.0;
  params.alpha = 0.5;
  params.k = 3.0;

  SUBCASE("both barriers equal g at the base point") {
    const BarrierResult r = barrier_eval(params, g, psi, sol.u, dist);
    CHECK(r.lower[params.x0] == g[params.x0]);
    CHECK(r.upper[params.x0] == g[params.x0]);
    CHECK(r.nodes > 0);
  }
  SUBCASE("very negative obstacle leaves the pure power barrier") {
    ScalarField low(d, FieldRegion::Closure);
    for (std::size_t n : d->closure_nodes()) low[n] = -1e300;
    const BarrierResult r = barrier_eval(params, g, low, sol.u, dist);
    const Point x0 = d->position(params.x0);
    for (std::size_t n : d->closure_nodes()) {
      if (std::isnan(r.lower[n])) continue;
      const Point x = d->position(n);
      const double v = std::pow(std::hypot(x.x - x0.x, x.y - x0.y), 2) + params.lambda * dist[n];
      CHECK(r.lower[n] == doctest::Approx(g[params.x0] - 3.0 * std::pow(v, 0.25)));
    }
  }
  SUBCASE("lambda must exceed twice delta") {
    params.lambda = 0.5;
    CHECK_THROWS_AS(barrier_eval(params, g, psi, sol.u, dist), PreconditionError);
  }
  SUBCASE("base point must be on the ring") {
    params.x0 = d->interior_nodes().front();
    CHECK_THROWS_AS(barrier_eval(params, g, psi, sol.u, dist), PreconditionError);
  }
  SUBCASE("a swept K sandwiches the solution") {
    for (std::size_t k = 0; k < 8; ++k) {
      params.x0 = d->ring_nodes()[k * d->ring_nodes().size() / 8];
      const BarrierSweep s = barrier_sweep(params, g, psi, sol.u, dist, 1e-3, 1e6, 2.0);
      REQUIRE(s.k.has_value());
      CHECK(s.at_k->holds);
      if (s.ks.size() > 1) {
        params.k = s.ks[s.ks.size() - 2];
        CHECK_FALSE(barrier_eval(params, g, psi, sol.u, dist).holds);
      }
    }
  }
}

TEST_CASE("contact probe") {
  auto d = square(20);
  std::vector<std::size_t> window;
  for (int j = 8; j < 12; ++j) {
    for (int i = 8; i < 13; ++i) window.push_back(d->index(i, j));
  }
  const PixelSet e = half_plane(d);
  SUBCASE("equal sets are locally equal") {
    CHECK(contact_probe(e, e, window, 2).kind == Contact::LocallyEqual);
  }
  SUBCASE("separated half-planes have disjoint boundaries") {
    PixelSet f(d);
    for (std::size_t n = 0; n < d->size(); ++n) f.set(n, d->col(n) < d->width() / 2 + 3);
    CHECK(contact_probe(e, f, window, 2).kind == Contact::DisjointBoundaries);
  }
  SUBCASE("touching but diverging sets are a violation") {
    PixelSet f = e;
    f.set(d->index(d->width() / 2, 10));
    const ContactVerdict v = contact_probe(e, f, window, 2);
    CHECK(v.kind == Contact::Violation);
    REQUIRE(v.witness.size() == 1);
    CHECK(v.witness[0] == d->index(d->width() / 2, 10));
  }
  SUBCASE("E must lie inside F") {
    CHECK_THROWS_AS(contact_probe(e, PixelSet(d), window, 2), PreconditionError);
  }
}

TEST_CASE("contact survey on solved nested level sets") {
  std::mt19937_64 rng(21);
  std::size_t verified = 0;
  for (int trial = 0; trial < 4; ++trial) {
    const Problem p = inst::random_disc_problem(rng, trial + 1, 6);
    const Solution sol = solve(p, make_ladder(p.g, p.psi, LadderMode::Quantized));
    const ContactSurvey s = contact_survey(sol, p.stencil, 100, trial);
    CHECK(s.violations == 0);
    CHECK(s.disjoint + s.locally_equal == s.verified);
    verified += s.verified;
  }
  CHECK(verified > 100);
}

TEST_CASE("density profile") {
  auto d = square(40);
  const std::vector<double> radii{3.0, 6.0, 10.0};
  SUBCASE("everything: ratios are one") {
    PixelSet all(d);
    for (std::size_t n = 0; n < d->size(); ++n) all.set(n);
    const DensityProfile p = density_profile(all, center_node(*d), radii);
    for (double r : p.ratios) CHECK(r == 1.0);
    CHECK(p.monotone);
  }
  SUBCASE("half-plane: ratios near one half, monotone within tolerance") {
    const PixelSet e = half_plane(d);
    const std::size_t x = d->index(d->width() / 2 - 1, d->height() / 2);
    const DensityProfile p = density_profile(e, x, radii);
    for (std::size_t k = 0; k < radii.size(); ++k) {
      CHECK(std::abs(p.ratios[k] - 0.5) <= p.tolerance[k]);
    }
    CHECK(p.monotone);
  }
  SUBCASE("radius overflow and bad radii") {
    const PixelSet e = half_plane(d);
    const std::vector<double> big{30.0};
    CHECK_THROWS_AS(density_profile(e, center_node(*d), big), PreconditionError);
    const std::vector<double> bad{4.0, 2.0};
    CHECK_THROWS_AS(density_profile(e, center_node(*d), bad), PreconditionError);
  }
}

TEST_CASE("density lower bound") {
  auto d = square(40);
  const double r = 12.0;
  SUBCASE("half-plane") {
    const PixelSet e = half_plane(d);
    const DensityBound b = density_lower_bound(e, d->index(d->width() / 2 - 1, d->height() / 2), r,
                                               make_stencil(16, 1.0));
    CHECK(b.preconditions);
    CHECK(b.holds);
    CHECK(b.ratio == doctest::Approx(0.5).epsilon(0.1));
  }
  SUBCASE("quarter-plane corner under the axis stencil") {
    PixelSet e(d);
    const int ci = d->width() / 2;
    const int cj = d->height() / 2;
    for (std::size_t n = 0; n < d->size(); ++n) e.set(n, d->col(n) <= ci && d->row(n) <= cj);
    const DensityBound b = density_lower_bound(e, d->index(ci, cj), r, make_stencil(4, 1.0));
    CHECK(b.preconditions);
    CHECK(b.holds);
    CHECK(b.ratio >= delta_2());
    CHECK(b.ratio == doctest::Approx(0.25).epsilon(0.25));
  }
  SUBCASE("a one-pixel spike is not subminimizing") {
    PixelSet e = half_plane(d);
    const int i0 = d->width() / 2;
    const int j0 = d->height() / 2;
    for (int i = i0; i < i0 + 6; ++i) e.set(d->index(i, j0));
    const DensityBound b = density_lower_bound(e, d->index(i0 + 5, j0), r, make_stencil(16, 1.0));
    CHECK_FALSE(b.preconditions);
    CHECK_FALSE(b.holds);
  }
}

TEST_CASE("density checks on cut-built subminimizers in 20 x 20 windows") {
  // Least-perimeter sets with random forced pixels are minimizing, hence
  // subminimizing, away from the forced pixels.
  std::mt19937_64 rng(4);
  auto d = square(20, 2);
  const Stencil s = make_stencil(8, 1.0);
  std::size_t verdicts = 0;
  for (int trial = 0; trial < 60; ++trial) {
    PixelSet in(d);
    PixelSet out(d);
    for (std::size_t n = 0; n < d->size(); ++n) {
      if (d->in_closure(n)) continue;
      const int i = d->col(n);
      (i < 2 + static_cast<int>(rng() % 20) ? in : out).set(n);
    }
    const CutResult cut = solve_min_cut(d, s, in, out);
    std::vector<std::size_t> boundary;
    for (std::size_t x : d->closure_nodes()) {
      const int i = d->col(x);
      const int j = d->row(x);
      if (std::min({i, j, d->width() - 1 - i, d->height() - 1 - j}) >= 4 && on_boundary(cut.e_max, x)) {
        boundary.push_back(x);
      }
    }
    for (int k = 0; k < 3 && !boundary.empty(); ++k) {
      const std::size_t x = boundary[rng() % boundary.size()];
      const int i = d->col(x);
      const int j = d->row(x);
      const int room = std::min({i, j, d->width() - 1 - i, d->height() - 1 - j});
      const double r = room;
      const DensityBound b = density_lower_bound(cut.e_max, x, r, s);
      if (!b.preconditions) continue;
      ++verdicts;
      CHECK(b.holds);
      const std::vector<double> radii{r / 2, r};
      CHECK(density_profile(cut.e_max, x, radii).monotone);
    }
  }
  CHECK(verdicts >= 20);
}
