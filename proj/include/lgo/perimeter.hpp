#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lgo/grid.hpp"

namespace lgo {

struct Offset {
  int dx = 0;
  int dy = 0;
  friend bool operator==(Offset, Offset) = default;
};

/// Neighborhood offsets with Cauchy-Crofton edge weights.
///
/// Weights are held as integer ticks: one tick is `tick_length()` length
/// units, so every perimeter is an exact integer and ties between competing
/// sets compare exactly. `half_offsets()` holds one representative of each
/// {o, -o} pair; an unordered grid edge is visited once through it.
class Stencil {
 public:
  static constexpr std::int64_t kTicksPerSpacing = std::int64_t{1} << 24;

  int order() const { return order_; }
  double h() const { return h_; }
  int radius() const { return radius_; }
  double tick_length() const { return h_ / static_cast<double>(kTicksPerSpacing); }

  const std::vector<Offset>& offsets() const { return offsets_; }
  const std::vector<Offset>& half_offsets() const { return half_offsets_; }
  /// Weight in ticks, per half offset.
  const std::vector<std::int64_t>& half_ticks() const { return half_ticks_; }
  /// Weight in ticks, per entry of offsets().
  const std::vector<std::int64_t>& ticks() const { return ticks_; }
  /// Weight in length units, per entry of offsets().
  double weight(std::size_t k) const {
    return static_cast<double>(ticks_[k]) * tick_length();
  }

  friend Stencil make_stencil(int order, double h);

 private:
  int order_ = 0;
  double h_ = 0.0;
  int radius_ = 0;
  std::vector<Offset> offsets_;
  std::vector<std::int64_t> ticks_;
  std::vector<Offset> half_offsets_;
  std::vector<std::int64_t> half_ticks_;
};

/// order 4: weight h per axis edge (Manhattan perimeter).
/// order 8, 16: Cauchy-Crofton weights h * dphi / (2 |o|), where dphi is the
/// angular width of the direction's Voronoi cell on the half circle.
Stencil make_stencil(int order, double h);

/// Ticks of edge-class totals. "interior" edges join two Omega nodes,
/// "crossing" edges join Omega and collar, "exterior" edges join two collar
/// nodes.
struct PerimeterValue {
  std::int64_t interior_ticks = 0;
  std::int64_t crossing_ticks = 0;
  std::int64_t exterior_ticks = 0;
  double tick_length = 0.0;

  std::int64_t total_ticks() const {
    return interior_ticks + crossing_ticks + exterior_ticks;
  }
  double interior() const { return static_cast<double>(interior_ticks) * tick_length; }
  double crossing() const { return static_cast<double>(crossing_ticks) * tick_length; }
  double exterior() const { return static_cast<double>(exterior_ticks) * tick_length; }
  double total() const { return static_cast<double>(total_ticks()) * tick_length; }
};

struct Region {
  enum class Kind : std::uint8_t { Omega, Plane, Ball };
  Kind kind = Kind::Plane;
  Point center{};
  double radius = 0.0;

  static Region omega() { return {Kind::Omega, {}, 0.0}; }
  static Region plane() { return {Kind::Plane, {}, 0.0}; }
  static Region ball(Point c, double r) { return {Kind::Ball, c, r}; }
};

/// Discrete perimeter: each unordered stencil edge {p, q} with exactly one
/// endpoint in E contributes its weight once. Region Omega keeps interior
/// and crossing edges; Ball keeps edges whose midpoint lies in the open ball.
PerimeterValue perimeter(const PixelSet& set, const Region& region,
                         const Stencil& stencil);

/// P(E u F) + P(E n F) <= P(E) + P(F) over the whole grid.
bool submodularity_check(const PixelSet& e, const PixelSet& f,
                         const Stencil& stencil);

enum class MinimalityMode : std::uint8_t { Min, Sub, Super };

struct MinimalityVerdict {
  bool holds = true;
  /// Present when violated: a competitor of least symmetric difference.
  std::optional<PixelSet> witness;
  /// P(witness) - P(E) in ticks (negative when violated).
  std::int64_t witness_gain_ticks = 0;
  std::size_t competitors = 0;
};

constexpr std::size_t kMaxOracleWindow = 22;

/// Exhaustive check over all competitors F with E (triangle) F inside the
/// window. Min: every F; Super: only F = E u S; Sub: only F = E n S.
/// Ties among violating witnesses go to the smallest window bitmask, where
/// bit k corresponds to window[k].
MinimalityVerdict minimality_oracle(const PixelSet& set,
                                    std::span<const std::size_t> window,
                                    MinimalityMode mode, const Stencil& stencil);

/// Sum over stencil neighbors of the tick change caused by flipping `node`.
std::int64_t flip_delta_ticks(std::span<const std::uint8_t> bits,
                              const GridDomain& domain, std::size_t node,
                              const Stencil& stencil);

}  // namespace lgo
