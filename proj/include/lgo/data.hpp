#pragma once

#include <cstdint>

#include "lgo/grid.hpp"

namespace lgo {

/// Polar angle of a node about the grid center, in (-pi, pi].
double node_angle(const GridDomain& domain, std::size_t n);

ScalarField constant_data(const DomainPtr& domain, double c);

/// `high` on ring nodes with cos(theta - theta0) > 0, `low` elsewhere.
ScalarField step_data(const DomainPtr& domain, double theta0, double low = 0.0,
                      double high = 1.0);

/// |theta - phase|^alpha with the difference wrapped into (-pi, pi]. The
/// phase is 0 for seed 0 and otherwise drawn uniformly from a generator
/// seeded with `seed`. A positive quantum rounds values to its multiples.
ScalarField holder_data(const DomainPtr& domain, double alpha, std::uint64_t seed,
                        double quantum = 0.0);

/// Constant obstacle at min g: never active.
ScalarField inactive_obstacle(const ScalarField& g);

/// height - slope |x - apex|, lowered to g on the ring where it exceeds it.
ScalarField cone_obstacle(const ScalarField& g, Point apex, double height, double slope);

/// Maximum of three seeded cones, floored at min g and lowered to g on the
/// ring.
ScalarField bump_obstacle(const ScalarField& g, std::uint64_t seed);

}  // namespace lgo
