#include "lgo/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "lgo/error.hpp"

namespace lgo {

namespace {

std::vector<std::size_t> free_nodes(const GridDomain& domain, const LevelConstraints& c) {
  std::vector<std::size_t> out;
  for (std::size_t n : domain.closure_nodes()) {
    if (!c.forced_in.contains(n) && !c.forced_out.contains(n)) out.push_back(n);
  }
  return out;
}

bool close(double x, double y) {
  return std::abs(x - y) <= 1e-9 * std::max(1.0, std::max(std::abs(x), std::abs(y)));
}

struct FieldSearch {
  std::uint64_t fields = 0;
  double min_tv = std::numeric_limits<double>::infinity();
};

// Odometer over ladder-valued fields u >= lower on the free nodes. Level
// perimeters are kept as exact tick counts and updated per change.
FieldSearch search_fields(const Problem& problem, const LevelLadder& ladder,
                          const std::vector<int>& lower,
                          const std::vector<std::size_t>& movable) {
  const GridDomain& domain = *problem.domain;
  const Stencil& s = problem.stencil;
  const int top = static_cast<int>(ladder.levels.size());
  std::vector<int> idx = lower;  // value index per node, 0 = a
  std::vector<std::int64_t> p(top + 1, 0);  // p[k]: ticks of {idx >= k}, k >= 1
  for (int k = 1; k <= top; ++k) {
    PixelSet e(problem.domain);
    for (std::size_t n = 0; n < domain.size(); ++n) e.set(n, idx[n] >= k);
    p[k] = perimeter(e, Region::omega(), s).total_ticks();
  }
  std::vector<double> gap(top + 1, 0.0);
  double previous = ladder.a;
  for (int k = 1; k <= top; ++k) {
    gap[k] = ladder.levels[k - 1].value - previous;
    previous = ladder.levels[k - 1].value;
  }
  auto tv = [&] {
    double sum = 0.0;
    for (int k = 1; k <= top; ++k) sum += gap[k] * static_cast<double>(p[k]) * s.tick_length();
    return sum;
  };
  auto change = [&](std::size_t n, int to) {
    const int from = idx[n];
    const int lo = std::min(from, to) + 1;
    const int hi = std::max(from, to);
    const int i = domain.col(n);
    const int j = domain.row(n);
    for (std::size_t o = 0; o < s.offsets().size(); ++o) {
      const int qi = i + s.offsets()[o].dx;
      const int qj = j + s.offsets()[o].dy;
      if (!domain.in_grid(qi, qj)) continue;
      const int m = idx[domain.index(qi, qj)];
      for (int k = lo; k <= hi; ++k) {
        const bool n_in = from >= k;
        p[k] += ((m >= k) == n_in) ? s.ticks()[o] : -s.ticks()[o];
      }
    }
    idx[n] = to;
  };

  FieldSearch out;
  while (true) {
    ++out.fields;
    out.min_tv = std::min(out.min_tv, tv());
    std::size_t d = 0;
    for (; d < movable.size(); ++d) {
      const std::size_t n = movable[d];
      if (idx[n] < top) {
        change(n, idx[n] + 1);
        break;
      }
      change(n, lower[n]);
    }
    if (d == movable.size()) break;
  }
  return out;
}

}  // namespace

LevelEnumeration enumerate_level(const Problem& problem, const Level& level) {
  const GridDomain& domain = *problem.domain;
  const LevelConstraints c = level_constraints(problem, level.threshold);
  const std::vector<std::size_t> free = free_nodes(domain, c);
  if (free.size() > kMaxOracleWindow) {
    throw PreconditionError("level t=" + std::to_string(level.threshold) + " has " +
                            std::to_string(free.size()) +
                            " free nodes; enumeration bound is " +
                            std::to_string(kMaxOracleWindow));
  }
  std::vector<std::uint8_t> bits = c.forced_in.bits();
  std::int64_t ticks =
      perimeter(c.forced_in, Region::omega(), problem.stencil).total_ticks();

  LevelEnumeration out{free.size(), ticks, 0, c.forced_in, c.forced_in, 0};
  std::vector<std::uint8_t> intersection = bits;
  std::vector<std::uint8_t> largest = bits;
  int largest_volume = -1;
  std::uint32_t mask = 0;
  const std::uint64_t states = std::uint64_t{1} << free.size();
  for (std::uint64_t step = 0; step < states; ++step) {
    if (step > 0) {
      const int k = std::countr_zero(step);
      const std::size_t n = free[k];
      ticks += flip_delta_ticks(bits, domain, n, problem.stencil);
      bits[n] ^= 1;
      mask ^= std::uint32_t{1} << k;
    }
    if (step == 0 || ticks < out.min_ticks) {
      out.min_ticks = ticks;
      out.minimizers = 0;
      intersection = bits;
      largest_volume = -1;
    }
    if (ticks == out.min_ticks) {
      ++out.minimizers;
      for (std::size_t n : free) intersection[n] &= bits[n];
      const int volume = std::popcount(mask);
      if (volume > largest_volume) {
        largest_volume = volume;
        largest = bits;
        out.largest_count = 0;
      }
      if (volume == largest_volume) ++out.largest_count;
    }
  }
  out.intersection = PixelSet(problem.domain, std::move(intersection));
  out.largest = PixelSet(problem.domain, std::move(largest));
  return out;
}

OracleReport oracle_compare(const Problem& problem, const Solution& solution) {
  const GridDomain& domain = *problem.domain;
  const LevelLadder& ladder = solution.ladder;
  const double tick = problem.stencil.tick_length();
  OracleReport report;
  report.solver_tv = solution.tv;

  std::vector<int> lower(domain.size(), 0);
  double previous = ladder.a;
  for (std::size_t k = 0; k < ladder.levels.size(); ++k) {
    const Level& level = ladder.levels[k];
    const LevelSolution& sol = solution.levels[k];
    const LevelEnumeration en = enumerate_level(problem, level);
    OracleLevelRow row;
    row.t = level.threshold;
    row.free_nodes = en.free_nodes;
    row.oracle_ticks = en.min_ticks;
    row.solver_ticks = sol.perimeter.total_ticks();
    row.e_max_match = en.largest == sol.e;
    row.e_min_match = en.intersection == sol.e_min;
    row.unique_largest = en.largest_count == 1;
    const std::string at = " at t=" + std::to_string(level.threshold);
    if (row.oracle_ticks != row.solver_ticks) {
      report.mismatches.push_back("perimeter differs" + at);
    }
    if (!row.e_max_match) report.mismatches.push_back("E_max differs" + at);
    if (!row.e_min_match) report.mismatches.push_back("E_min differs" + at);
    if (!row.unique_largest) {
      report.mismatches.push_back("volume-maximal minimizer not unique" + at);
    }
    report.levels.push_back(row);
    report.oracle_tv += (level.value - previous) * static_cast<double>(en.min_ticks) * tick;
    previous = level.value;

    const LevelConstraints c = level_constraints(problem, level.threshold);
    for (std::size_t n = 0; n < domain.size(); ++n) {
      if (c.forced_in.contains(n)) lower[n] = static_cast<int>(k) + 1;
    }
  }
  if (!close(report.oracle_tv, report.solver_tv)) {
    report.mismatches.push_back("total variation differs from the level-wise minimum");
  }
  report.solver_edgewise_tv = edgewise_tv(solution.extended, problem.stencil, false);
  if (!close(report.solver_edgewise_tv, report.solver_tv)) {
    report.mismatches.push_back("edge-wise total variation of u differs from the ledger");
  }

  // Ring values are fixed by the trace; interior nodes range over the
  // ladder values at or above their obstacle floor.
  std::vector<std::size_t> movable;
  double count = 1.0;
  const double top = static_cast<double>(ladder.levels.size());
  for (std::size_t n : domain.interior_nodes()) {
    if (lower[n] < static_cast<int>(top)) {
      movable.push_back(n);
      count *= top - lower[n] + 1.0;
    }
  }
  if (count <= static_cast<double>(kMaxOracleFields)) {
    const FieldSearch fs = search_fields(problem, ladder, lower, movable);
    report.field_enumerated = true;
    report.fields = fs.fields;
    report.field_min_tv = fs.min_tv;
    if (!close(fs.min_tv, report.solver_tv)) {
      report.mismatches.push_back("total variation exceeds the whole-field minimum");
    }
  }
  return report;
}

void corrupt_solution(const Problem& problem, Solution& solution) {
  const std::size_t count = solution.levels.size();
  // middle level first, then outward
  for (std::size_t step = 0; step < count; ++step) {
    const std::size_t k = step % 2 ? count / 2 - (step + 1) / 2 : count / 2 + step / 2;
    if (k >= count) continue;
    LevelSolution& level = solution.levels[k];
    const LevelConstraints c = level_constraints(problem, level.t);
    const std::vector<std::size_t> free = free_nodes(*problem.domain, c);
    if (free.empty()) continue;
    const std::size_t n = free.front();
    level.e.set(n, !level.e.contains(n));
    level.a.set(n, level.e.contains(n));
    return;
  }
  throw PreconditionError("no level has a free node to corrupt");
}

}  // namespace lgo
