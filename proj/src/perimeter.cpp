#include "lgo/perimeter.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "lgo/error.hpp"

namespace lgo {

namespace {

std::vector<Offset> half_offsets_for(int order) {
  switch (order) {
    case 4:
      return {{1, 0}, {0, 1}};
    case 8:
      return {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
    case 16:
      return {{1, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 1}, {-1, 2}, {-1, 1}, {-2, 1}};
    default:
      throw PreconditionError("unsupported stencil order " + std::to_string(order) +
                              " (expected 4, 8 or 16)");
  }
}

}  // namespace

Stencil make_stencil(int order, double h) {
  if (!(h > 0.0)) throw PreconditionError("stencil spacing must be positive");
  Stencil s;
  s.order_ = order;
  s.h_ = h;
  s.half_offsets_ = half_offsets_for(order);

  const std::size_t m = s.half_offsets_.size();
  std::vector<double> angle(m);
  for (std::size_t k = 0; k < m; ++k) {
    angle[k] = std::atan2(s.half_offsets_[k].dy, s.half_offsets_[k].dx);
  }
  // half_offsets_for lists directions by increasing angle in [0, pi).
  for (std::size_t k = 0; k < m; ++k) {
    const Offset o = s.half_offsets_[k];
    const double length = std::hypot(o.dx, o.dy);
    double weight_over_h = 1.0;
    if (order != 4) {
      const double prev = k == 0 ? angle[m - 1] - std::numbers::pi : angle[k - 1];
      const double next = k + 1 == m ? angle[0] + std::numbers::pi : angle[k + 1];
      const double dphi = 0.5 * (next - prev);
      weight_over_h = dphi / (2.0 * length);
    }
    s.half_ticks_.push_back(static_cast<std::int64_t>(
        std::llround(weight_over_h * static_cast<double>(Stencil::kTicksPerSpacing))));
    s.radius_ = std::max({s.radius_, std::abs(o.dx), std::abs(o.dy)});
  }
  for (std::size_t k = 0; k < m; ++k) {
    const Offset o = s.half_offsets_[k];
    s.offsets_.push_back(o);
    s.ticks_.push_back(s.half_ticks_[k]);
    s.offsets_.push_back({-o.dx, -o.dy});
    s.ticks_.push_back(s.half_ticks_[k]);
  }
  return s;
}

PerimeterValue perimeter(const PixelSet& set, const Region& region,
                         const Stencil& stencil) {
  const GridDomain& domain = set.domain();
  if (region.kind == Region::Kind::Ball) {
    if (!(region.radius > 0.0) ||
        std::abs(region.center.x) + region.radius > domain.half_extent_x() + 1e-12 ||
        std::abs(region.center.y) + region.radius > domain.half_extent_y() + 1e-12) {
      throw PreconditionError("ball region extends outside the domain grid");
    }
  }
  PerimeterValue value;
  value.tick_length = stencil.tick_length();
  const auto& bits = set.bits();
  const auto& half = stencil.half_offsets();
  const auto& ticks = stencil.half_ticks();
  const double r2 = region.radius * region.radius;

  for (int j = 0; j < domain.height(); ++j) {
    for (int i = 0; i < domain.width(); ++i) {
      const std::size_t p = domain.index(i, j);
      for (std::size_t k = 0; k < half.size(); ++k) {
        const int qi = i + half[k].dx;
        const int qj = j + half[k].dy;
        if (!domain.in_grid(qi, qj)) continue;
        const std::size_t q = domain.index(qi, qj);
        if (bits[p] == bits[q]) continue;
        const bool p_in = domain.in_closure(p);
        const bool q_in = domain.in_closure(q);
        if (region.kind == Region::Kind::Omega && !p_in && !q_in) continue;
        if (region.kind == Region::Kind::Ball) {
          const Point a = domain.position(p);
          const Point b = domain.position(q);
          const double mx = 0.5 * (a.x + b.x) - region.center.x;
          const double my = 0.5 * (a.y + b.y) - region.center.y;
          if (!(mx * mx + my * my < r2)) continue;
        }
        if (p_in && q_in) {
          value.interior_ticks += ticks[k];
        } else if (p_in || q_in) {
          value.crossing_ticks += ticks[k];
        } else {
          value.exterior_ticks += ticks[k];
        }
      }
    }
  }
  return value;
}

bool submodularity_check(const PixelSet& e, const PixelSet& f,
                         const Stencil& stencil) {
  const Region all = Region::plane();
  const std::int64_t lhs = perimeter(e.united(f), all, stencil).total_ticks() +
                           perimeter(e.intersected(f), all, stencil).total_ticks();
  const std::int64_t rhs = perimeter(e, all, stencil).total_ticks() +
                           perimeter(f, all, stencil).total_ticks();
  return lhs <= rhs;
}

std::int64_t flip_delta_ticks(std::span<const std::uint8_t> bits,
                              const GridDomain& domain, std::size_t node,
                              const Stencil& stencil) {
  const int i = domain.col(node);
  const int j = domain.row(node);
  const auto& offsets = stencil.offsets();
  const auto& ticks = stencil.ticks();
  std::int64_t delta = 0;
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    const int qi = i + offsets[k].dx;
    const int qj = j + offsets[k].dy;
    if (!domain.in_grid(qi, qj)) continue;
    const std::size_t q = domain.index(qi, qj);
    delta += (bits[q] == bits[node]) ? ticks[k] : -ticks[k];
  }
  return delta;
}

MinimalityVerdict minimality_oracle(const PixelSet& set,
                                    std::span<const std::size_t> window,
                                    MinimalityMode mode, const Stencil& stencil) {
  if (window.size() > kMaxOracleWindow) {
    throw PreconditionError("oracle window has " + std::to_string(window.size()) +
                            " nodes; enumeration bound is " +
                            std::to_string(kMaxOracleWindow));
  }
  const GridDomain& domain = set.domain();
  std::vector<std::size_t> sorted(window.begin(), window.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw PreconditionError("oracle window lists a node twice");
  }
  for (std::size_t n : window) {
    if (n >= domain.size()) throw PreconditionError("oracle window node outside grid");
  }

  // Window positions that the mode allows to flip.
  std::vector<unsigned> flippable;
  for (unsigned k = 0; k < window.size(); ++k) {
    const bool member = set.contains(window[k]);
    if (mode == MinimalityMode::Min || (mode == MinimalityMode::Super && !member) ||
        (mode == MinimalityMode::Sub && member)) {
      flippable.push_back(k);
    }
  }

  std::vector<std::uint8_t> bits = set.bits();
  MinimalityVerdict verdict;
  const std::uint64_t states = std::uint64_t{1} << flippable.size();
  verdict.competitors = static_cast<std::size_t>(states);

  std::int64_t delta = 0;
  std::uint32_t mask = 0;
  std::int64_t best_gain = 0;
  std::uint32_t best_mask = 0;
  int best_pop = -1;
  for (std::uint64_t g = 1; g < states; ++g) {
    const unsigned bit = static_cast<unsigned>(std::countr_zero(g));
    const std::size_t node = window[flippable[bit]];
    delta += flip_delta_ticks(bits, domain, node, stencil);
    bits[node] ^= 1;
    mask ^= std::uint32_t{1} << flippable[bit];
    if (delta < 0) {
      const int pop = std::popcount(mask);
      if (best_pop < 0 || pop < best_pop || (pop == best_pop && mask < best_mask)) {
        best_pop = pop;
        best_mask = mask;
        best_gain = delta;
      }
    }
  }
  if (best_pop >= 0) {
    verdict.holds = false;
    PixelSet witness = set;
    for (unsigned k = 0; k < window.size(); ++k) {
      if (best_mask & (std::uint32_t{1} << k)) witness.set(window[k], !set.contains(window[k]));
    }
    verdict.witness = std::move(witness);
    verdict.witness_gain_ticks = best_gain;
  }
  return verdict;
}

}  // namespace lgo
