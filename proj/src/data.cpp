#include "lgo/data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace lgo {

namespace {

double ring_min(const ScalarField& g) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t n : g.domain().ring_nodes()) m = std::min(m, g[n]);
  return m;
}

double ring_max(const ScalarField& g) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t n : g.domain().ring_nodes()) m = std::max(m, g[n]);
  return m;
}

void clip_to_trace(ScalarField& psi, const ScalarField& g) {
  for (std::size_t n : g.domain().ring_nodes()) psi[n] = std::min(psi[n], g[n]);
}

}  // namespace

double node_angle(const GridDomain& domain, std::size_t n) {
  const Point p = domain.position(n);
  return std::atan2(p.y, p.x);
}

ScalarField constant_data(const DomainPtr& domain, double c) {
  ScalarField g(domain, FieldRegion::Ring);
  for (std::size_t n : domain->ring_nodes()) g[n] = c;
  return g;
}

ScalarField step_data(const DomainPtr& domain, double theta0, double low, double high) {
  ScalarField g(domain, FieldRegion::Ring);
  for (std::size_t n : domain->ring_nodes()) {
    g[n] = std::cos(node_angle(*domain, n) - theta0) > 0.0 ? high : low;
  }
  return g;
}

ScalarField holder_data(const DomainPtr& domain, double alpha, std::uint64_t seed,
                        double quantum) {
  double phase = 0.0;
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    phase = std::uniform_real_distribution<double>(-std::numbers::pi, std::numbers::pi)(rng);
  }
  ScalarField g(domain, FieldRegion::Ring);
  for (std::size_t n : domain->ring_nodes()) {
    double d = node_angle(*domain, n) - phase;
    while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    while (d <= -std::numbers::pi) d += 2.0 * std::numbers::pi;
    double v = std::pow(std::abs(d), alpha);
    if (quantum > 0.0) v = quantum * std::round(v / quantum);
    g[n] = v;
  }
  return g;
}

ScalarField inactive_obstacle(const ScalarField& g) {
  const double floor = ring_min(g);
  ScalarField psi(g.domain_ptr(), FieldRegion::Closure);
  for (std::size_t n : g.domain().closure_nodes()) psi[n] = floor;
  return psi;
}

ScalarField cone_obstacle(const ScalarField& g, Point apex, double height, double slope) {
  ScalarField psi(g.domain_ptr(), FieldRegion::Closure);
  for (std::size_t n : g.domain().closure_nodes()) {
    const Point p = g.domain().position(n);
    psi[n] = height - slope * std::hypot(p.x - apex.x, p.y - apex.y);
  }
  clip_to_trace(psi, g);
  return psi;
}

ScalarField bump_obstacle(const ScalarField& g, std::uint64_t seed) {
  const GridDomain& domain = g.domain();
  const double lo = ring_min(g);
  const double hi = ring_max(g);
  const double span = std::max(hi - lo, 1.0);
  const double rx = 0.6 * domain.h() * 0.5 * domain.core_width();
  const double ry = 0.6 * domain.h() * 0.5 * domain.core_height();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_real_distribution<double> H(0.25, 1.5);
  struct Bump {
    Point c;
    double height;
    double slope;
  };
  std::vector<Bump> bumps;
  for (int k = 0; k < 3; ++k) {
    const Point c{rx * U(rng), ry * U(rng)};
    const double height = lo + span * H(rng);
    const double slope = span / (0.25 * std::max(rx, ry) * (1.0 + 0.5 * (U(rng) + 1.0)));
    bumps.push_back({c, height, slope});
  }
  ScalarField psi(g.domain_ptr(), FieldRegion::Closure);
  for (std::size_t n : domain.closure_nodes()) {
    const Point p = domain.position(n);
    double v = lo;
    for (const Bump& b : bumps) {
      v = std::max(v, b.height - b.slope * std::hypot(p.x - b.c.x, p.y - b.c.y));
    }
    psi[n] = v;
  }
  clip_to_trace(psi, g);
  return psi;
}

}  // namespace lgo
