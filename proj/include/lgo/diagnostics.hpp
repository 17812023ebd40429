#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lgo/grid.hpp"
#include "lgo/perimeter.hpp"
#include "lgo/solver.hpp"

namespace lgo {

struct CoareaRow {
  double t = 0.0;
  double value = 0.0;
  double gap = 0.0;        // value minus the previous value (a for the first)
  double perimeter = 0.0;  // P(E_t, Omega)
  double contribution = 0.0;
};

struct CoareaLedger {
  std::vector<CoareaRow> rows;
  double sum = 0.0;
  double edgewise_tv = 0.0;
  double relative_error = 0.0;
  double tolerance = 1e-9;
  bool ok = false;
};

CoareaLedger coarea_ledger(const Solution& solution, const Stencil& stencil);

struct HolderSample {
  double distance = 0.0;
  double difference = 0.0;
};

struct HolderFit {
  bool defined = false;  // false when every difference is zero
  double beta = 0.0;
  double constant = 0.0;
  double residual = 0.0;  // root mean square, in log units
  std::size_t pairs = 0;
  std::size_t used = 0;   // pairs with nonzero difference
  std::vector<HolderSample> samples;  // every pair, in input order
};

/// Seeded sample of (ring node, closure node) pairs whose distances cover
/// [min_distance, max_distance] evenly on a log scale.
std::vector<std::pair<std::size_t, std::size_t>> boundary_pairs(
    const GridDomain& domain, std::size_t count, double min_distance,
    double max_distance, std::uint64_t seed);

/// Least-squares fit of log|u(x) - u(x0)| against log|x - x0|. Needs at
/// least 100 pairs.
HolderFit holder_exponent(const ScalarField& u,
                          std::span<const std::pair<std::size_t, std::size_t>> pairs);

struct BarrierParams {
  std::size_t x0 = 0;  // ring node
  double lambda = 1.0;
  double k = 1.0;
  double alpha = 1.0;
  double delta = 0.1;  // radius of U(x0, delta)
};

struct BarrierResult {
  ScalarField lower;  // omega minus on U, NaN elsewhere
  ScalarField upper;  // omega plus on U, NaN elsewhere
  std::size_t nodes = 0;  // closure nodes in U
  std::size_t violations = 0;
  bool holds = false;  // lower <= u <= upper on U
};

/// Euclidean distance from each node to the nearest ring node.
std::vector<double> ring_distance(const GridDomain& domain);

/// Throws PreconditionError unless lambda > 2 delta and x0 is a ring node.
/// `distance` is ring_distance(domain) (passed in so sweeps reuse it).
BarrierResult barrier_eval(const BarrierParams& params, const ScalarField& g,
                           const ScalarField& psi, const ScalarField& u,
                           std::span<const double> distance);

struct BarrierSweep {
  std::vector<double> ks;      // tried, ascending
  std::optional<double> k;     // least K that sandwiches u
  std::optional<BarrierResult> at_k;  // evaluation at that K, or the last tried
};

/// Tries K over a geometric sequence until the sandwich holds.
BarrierSweep barrier_sweep(BarrierParams params, const ScalarField& g,
                           const ScalarField& psi, const ScalarField& u,
                           std::span<const double> distance, double k_min,
                           double k_max, double factor);

enum class Contact : std::uint8_t { DisjointBoundaries, LocallyEqual, Violation };

struct ContactVerdict {
  Contact kind = Contact::DisjointBoundaries;
  std::size_t shared = 0;  // shared boundary edges inside the window
  std::vector<std::size_t> witness;  // window nodes where E and F differ near one
  std::size_t outside = 0;  // differing nodes near one but outside the window
};

/// Requires E inside F (PreconditionError otherwise). A boundary edge is a
/// 4-edge {p, q} with p in the set and q outside; shared edges are boundary
/// edges of both sets with both ends in the window. Around each shared edge
/// the sets are compared on the window nodes within the square of the given
/// radius; differences outside the window are only counted.
ContactVerdict contact_probe(const PixelSet& e, const PixelSet& f,
                             std::span<const std::size_t> window, int radius);

struct ContactSurvey {
  std::size_t windows = 0;     // windows drawn
  std::size_t verified = 0;    // windows whose minimality preconditions held
  std::size_t disjoint = 0;
  std::size_t locally_equal = 0;
  std::size_t violations = 0;
  std::size_t outside = 0;  // windows with differences next to, not in, the window
  std::vector<std::size_t> violation_levels;  // lower ladder index per violation
};

/// Draws windows of at most 20 nodes around boundary nodes of E_t for random
/// consecutive level pairs s < t, keeps those where E_t passes the Sub
/// oracle and E_s the Super oracle, and probes the contact of E_t and E_s.
ContactSurvey contact_survey(const Solution& solution, const Stencil& stencil,
                             std::size_t windows, std::uint64_t seed);

/// Nodes at distance at most r from the node x (whole grid).
std::vector<std::size_t> ball_nodes(const GridDomain& domain, std::size_t x, double r);

struct DensityProfile {
  std::vector<double> radii;
  std::vector<double> ratios;     // |E n B_r| / |B_r| in node counts
  std::vector<double> tolerance;  // 2h/r per radius
  bool monotone = false;          // ratio[k+1] >= ratio[k] - tolerance[k]
};

/// Throws PreconditionError when radii are not increasing or the largest
/// ball leaves the grid.
DensityProfile density_profile(const PixelSet& e, std::size_t x,
                               std::span<const double> radii);

struct DensityBound {
  bool preconditions = false;  // x on the boundary and E subminimizing in B
  double ratio = 0.0;
  double bound = 0.0;  // delta(2) - 4h/r
  bool holds = false;
};

/// Lower density bound at a boundary node. The subminimizing precondition is
/// checked exactly on B(x, r) by min cut; when it fails no verdict is given.
DensityBound density_lower_bound(const PixelSet& e, std::size_t x, double r,
                                 const Stencil& stencil);

/// x in E with a 4-neighbor outside E.
bool on_boundary(const PixelSet& e, std::size_t x);

}  // namespace lgo
