#include "lgo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "lgo/error.hpp"
#include "lgo/foam.hpp"
#include "lgo/mincut.hpp"

namespace lgo {

namespace {

double dist(const GridDomain& d, std::size_t p, std::size_t q) {
  const Point a = d.position(p);
  const Point b = d.position(q);
  return std::hypot(a.x - b.x, a.y - b.y);
}

void require_ball_inside(const GridDomain& d, std::size_t x, double r) {
  const int reach = static_cast<int>(std::floor(r / d.h() + 1e-9));
  const int i = d.col(x);
  const int j = d.row(x);
  if (i - reach < 0 || j - reach < 0 || i + reach >= d.width() || j + reach >= d.height()) {
    throw PreconditionError("ball of radius " + std::to_string(r) + " leaves the grid");
  }
}

}  // namespace

CoareaLedger coarea_ledger(const Solution& solution, const Stencil& stencil) {
  CoareaLedger ledger;
  double previous = solution.ladder.a;
  for (const LevelSolution& level : solution.levels) {
    CoareaRow row;
    row.t = level.t;
    row.value = level.value;
    row.gap = level.value - previous;
    row.perimeter = level.perimeter.interior() + level.perimeter.crossing();
    row.contribution = row.gap * static_cast<double>(level.perimeter.interior_ticks +
                                                     level.perimeter.crossing_ticks) *
                       stencil.tick_length();
    ledger.sum += row.contribution;
    ledger.rows.push_back(row);
    previous = level.value;
  }
  ledger.edgewise_tv = edgewise_tv(solution.extended, stencil, false);
  const double scale = std::max(std::abs(ledger.sum), std::abs(ledger.edgewise_tv));
  ledger.relative_error = scale > 0.0 ? std::abs(ledger.sum - ledger.edgewise_tv) / scale : 0.0;
  ledger.ok = ledger.relative_error <= ledger.tolerance;
  return ledger;
}

std::vector<std::pair<std::size_t, std::size_t>> boundary_pairs(
    const GridDomain& domain, std::size_t count, double min_distance,
    double max_distance, std::uint64_t seed) {
  if (!(min_distance > 0.0) || !(max_distance > min_distance)) {
    throw PreconditionError("pair distances need 0 < min < max");
  }
  const auto& ring = domain.ring_nodes();
  if (ring.empty()) throw PreconditionError("domain has no ring nodes");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, ring.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  const std::size_t attempts = 200 * count;
  for (std::size_t k = 0; k < attempts && pairs.size() < count; ++k) {
    const std::size_t x0 = ring[pick(rng)];
    const double r = min_distance * std::pow(max_distance / min_distance, unit(rng));
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    const Point c = domain.position(x0);
    const std::size_t x = domain.nearest_node({c.x + r * std::cos(angle), c.y + r * std::sin(angle)});
    if (x == x0 || !domain.in_closure(x)) continue;
    const double d = dist(domain, x0, x);
    if (d < min_distance || d > max_distance) continue;
    pairs.emplace_back(x0, x);
  }
  return pairs;
}

HolderFit holder_exponent(const ScalarField& u,
                          std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  if (pairs.size() < 100) {
    throw PreconditionError("the Hoelder fit needs at least 100 pairs, got " +
                            std::to_string(pairs.size()));
  }
  const GridDomain& domain = u.domain();
  HolderFit fit;
  fit.pairs = pairs.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<std::pair<double, double>> logs;
  for (const auto& [x0, x] : pairs) {
    const HolderSample s{dist(domain, x0, x), std::abs(u[x] - u[x0])};
    fit.samples.push_back(s);
    if (!(s.difference > 0.0)) continue;
    const double lx = std::log(s.distance);
    const double ly = std::log(s.difference);
    logs.emplace_back(lx, ly);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  fit.used = logs.size();
  const double n = static_cast<double>(logs.size());
  const double denom = n * sxx - sx * sx;
  if (logs.size() < 2 || !(denom > 0.0)) return fit;
  fit.defined = true;
  fit.beta = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.beta * sx) / n;
  fit.constant = std::exp(intercept);
  double ss = 0.0;
  for (const auto& [lx, ly] : logs) {
    const double e = ly - (intercept + fit.beta * lx);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

std::vector<double> ring_distance(const GridDomain& domain) {
  std::vector<double> out(domain.size(), std::numeric_limits<double>::infinity());
  for (std::size_t n = 0; n < domain.size(); ++n) {
    for (std::size_t r : domain.ring_nodes()) out[n] = std::min(out[n], dist(domain, n, r));
  }
  return out;
}

BarrierResult barrier_eval(const BarrierParams& params, const ScalarField& g,
                           const ScalarField& psi, const ScalarField& u,
                           std::span<const double> distance) {
  const GridDomain& domain = u.domain();
  if (!(params.lambda > 2.0 * params.delta)) {
    throw PreconditionError("barrier needs lambda > 2 delta");
  }
  if (params.x0 >= domain.size() || domain.label(params.x0) != NodeLabel::Ring) {
    throw PreconditionError("barrier base point must be a ring node");
  }
  if (distance.size() != domain.size()) {
    throw PreconditionError("distance field does not match the domain");
  }
  BarrierResult out{ScalarField(u.domain_ptr(), FieldRegion::Closure),
                    ScalarField(u.domain_ptr(), FieldRegion::Closure), 0, 0, true};
  const double base = g[params.x0];
  for (std::size_t n : domain.closure_nodes()) {
    if (dist(domain, n, params.x0) >= params.delta) continue;
    const double v = std::pow(dist(domain, n, params.x0), 2) + params.lambda * distance[n];
    const double bump = params.k * std::pow(v, 0.5 * params.alpha);
    const double lower = std::max(psi[n], base - bump);
    const double upper = base + bump;
    out.lower[n] = lower;
    out.upper[n] = upper;
    ++out.nodes;
    if (!(lower <= u[n] && u[n] <= upper)) ++out.violations;
  }
  out.holds = out.violations == 0;
  return out;
}

BarrierSweep barrier_sweep(BarrierParams params, const ScalarField& g,
                           const ScalarField& psi, const ScalarField& u,
                           std::span<const double> distance, double k_min,
                           double k_max, double factor) {
  if (!(k_min > 0.0) || !(factor > 1.0)) {
    throw PreconditionError("K sweep needs k_min > 0 and factor > 1");
  }
  BarrierSweep sweep;
  for (double k = k_min; k <= k_max * (1.0 + 1e-12); k *= factor) {
    params.k = k;
    sweep.ks.push_back(k);
    sweep.at_k = barrier_eval(params, g, psi, u, distance);
    if (sweep.at_k->holds) {
      sweep.k = k;
      break;
    }
  }
  return sweep;
}

ContactVerdict contact_probe(const PixelSet& e, const PixelSet& f,
                             std::span<const std::size_t> window, int radius) {
  if (!e.subset_of(f)) throw PreconditionError("contact probe needs E inside F");
  const GridDomain& d = e.domain();
  std::vector<std::uint8_t> in_window(d.size(), 0);
  for (std::size_t n : window) in_window[n] = 1;
  constexpr int dx[4] = {1, -1, 0, 0};
  constexpr int dy[4] = {0, 0, 1, -1};
  ContactVerdict verdict;
  std::vector<std::uint8_t> flagged(d.size(), 0);
  for (std::size_t p : window) {
    if (!e.contains(p)) continue;
    for (int k = 0; k < 4; ++k) {
      const int qi = d.col(p) + dx[k];
      const int qj = d.row(p) + dy[k];
      if (!d.in_grid(qi, qj)) continue;
      const std::size_t q = d.index(qi, qj);
      if (!in_window[q] || f.contains(q)) continue;
      ++verdict.shared;
      for (int j = d.row(p) - radius; j <= d.row(p) + radius; ++j) {
        for (int i = d.col(p) - radius; i <= d.col(p) + radius; ++i) {
          if (!d.in_grid(i, j)) continue;
          const std::size_t m = d.index(i, j);
          if (e.contains(m) == f.contains(m) || flagged[m]) continue;
          flagged[m] = 1;
          if (in_window[m]) {
            verdict.witness.push_back(m);
          } else {
            ++verdict.outside;
          }
        }
      }
    }
  }
  std::sort(verdict.witness.begin(), verdict.witness.end());
  if (verdict.shared == 0) {
    verdict.kind = Contact::DisjointBoundaries;
  } else {
    verdict.kind = verdict.witness.empty() ? Contact::LocallyEqual : Contact::Violation;
  }
  return verdict;
}

ContactSurvey contact_survey(const Solution& solution, const Stencil& stencil,
                             std::size_t windows, std::uint64_t seed) {
  ContactSurvey survey;
  if (solution.levels.size() < 2) return survey;
  const GridDomain& d = *solution.domain;
  std::mt19937_64 rng(seed);
  // Candidate centers per pair, built on first use.
  std::vector<std::vector<std::size_t>> centers(solution.levels.size() - 1);
  std::vector<std::uint8_t> built(centers.size(), 0);
  for (std::size_t w = 0; w < windows; ++w) {
    ++survey.windows;
    const std::size_t k = rng() % centers.size();
    const PixelSet& upper = solution.levels[k + 1].e;
    const PixelSet& lower = solution.levels[k].e;
    if (!built[k]) {
      built[k] = 1;
      for (std::size_t n : d.interior_nodes()) {
        if (on_boundary(upper, n)) centers[k].push_back(n);
      }
    }
    if (centers[k].empty()) continue;
    const std::size_t c = centers[k][rng() % centers[k].size()];
    std::vector<std::size_t> window;
    for (int j = d.row(c) - 2; j <= d.row(c) + 1; ++j) {
      for (int i = d.col(c) - 2; i <= d.col(c) + 2; ++i) {
        if (d.in_grid(i, j) && d.label(d.index(i, j)) == NodeLabel::Interior) {
          window.push_back(d.index(i, j));
        }
      }
    }
    if (!minimality_oracle(upper, window, MinimalityMode::Sub, stencil).holds) continue;
    if (!minimality_oracle(lower, window, MinimalityMode::Super, stencil).holds) continue;
    ++survey.verified;
    const ContactVerdict v = contact_probe(upper, lower, window, stencil.radius());
    if (v.outside > 0) ++survey.outside;
    switch (v.kind) {
      case Contact::DisjointBoundaries:
        ++survey.disjoint;
        break;
      case Contact::LocallyEqual:
        ++survey.locally_equal;
        break;
      case Contact::Violation:
        ++survey.violations;
        survey.violation_levels.push_back(k);
        break;
    }
  }
  return survey;
}

std::vector<std::size_t> ball_nodes(const GridDomain& domain, std::size_t x, double r) {
  const int reach = static_cast<int>(std::floor(r / domain.h() + 1e-9));
  std::vector<std::size_t> out;
  for (int j = domain.row(x) - reach; j <= domain.row(x) + reach; ++j) {
    for (int i = domain.col(x) - reach; i <= domain.col(x) + reach; ++i) {
      if (!domain.in_grid(i, j)) continue;
      const std::size_t n = domain.index(i, j);
      if (dist(domain, n, x) <= r) out.push_back(n);
    }
  }
  return out;
}

DensityProfile density_profile(const PixelSet& e, std::size_t x,
                               std::span<const double> radii) {
  const GridDomain& d = e.domain();
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] > radii[k - 1]))) {
      throw PreconditionError("radii must be positive and increasing");
    }
  }
  if (!radii.empty()) require_ball_inside(d, x, radii.back());
  DensityProfile profile;
  profile.monotone = true;
  for (double r : radii) {
    const auto ball = ball_nodes(d, x, r);
    std::size_t inside = 0;
    for (std::size_t n : ball) inside += e.contains(n);
    profile.radii.push_back(r);
    profile.ratios.push_back(static_cast<double>(inside) / static_cast<double>(ball.size()));
    profile.tolerance.push_back(2.0 * d.h() / r);
  }
  for (std::size_t k = 0; k + 1 < profile.ratios.size(); ++k) {
    if (profile.ratios[k + 1] < profile.ratios[k] - profile.tolerance[k]) {
      profile.monotone = false;
    }
  }
  return profile;
}

bool on_boundary(const PixelSet& e, std::size_t x) {
  const GridDomain& d = e.domain();
  if (!e.contains(x)) return false;
  constexpr int dx[4] = {1, -1, 0, 0};
  constexpr int dy[4] = {0, 0, 1, -1};
  for (int k = 0; k < 4; ++k) {
    const int i = d.col(x) + dx[k];
    const int j = d.row(x) + dy[k];
    if (d.in_grid(i, j) && !e.contains(d.index(i, j))) return true;
  }
  return false;
}

DensityBound density_lower_bound(const PixelSet& e, std::size_t x, double r,
                                 const Stencil& stencil) {
  const GridDomain& d = e.domain();
  require_ball_inside(d, x, r);
  DensityBound out;
  out.bound = delta_2() - 4.0 * d.h() / r;
  if (!on_boundary(e, x)) return out;
  const auto ball = ball_nodes(d, x, r);
  if (!verify_minimality_by_cut(e, ball, MinimalityMode::Sub, stencil).holds) return out;
  out.preconditions = true;
  std::size_t inside = 0;
  for (std::size_t n : ball) inside += e.contains(n);
  out.ratio = static_cast<double>(inside) / static_cast<double>(ball.size());
  out.holds = out.ratio >= out.bound;
  return out;
}

}  // namespace lgo
