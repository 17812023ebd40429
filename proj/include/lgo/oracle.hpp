#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lgo/solver.hpp"

namespace lgo {

/// Exhaustive answer for one level: every assignment of the free closure
/// nodes is visited.
struct LevelEnumeration {
  std::size_t free_nodes = 0;
  std::int64_t min_ticks = 0;  // least P(E, Omega) over admissible E
  std::size_t minimizers = 0;
  PixelSet intersection;  // of all minimizers
  PixelSet largest;       // the volume-maximal minimizer
  std::size_t largest_count = 0;  // minimizers reaching the largest volume
};

/// Throws PreconditionError when the level has more than kMaxOracleWindow
/// free nodes.
LevelEnumeration enumerate_level(const Problem& problem, const Level& level);

struct OracleLevelRow {
  double t = 0.0;
  std::size_t free_nodes = 0;
  std::int64_t oracle_ticks = 0;
  std::int64_t solver_ticks = 0;
  bool e_max_match = false;
  bool e_min_match = false;
  bool unique_largest = false;
};

struct OracleReport {
  std::vector<OracleLevelRow> levels;
  double oracle_tv = 0.0;  // sum of gap * least perimeter
  double solver_tv = 0.0;
  /// Whole-field enumeration over ladder values, run when small enough.
  bool field_enumerated = false;
  std::uint64_t fields = 0;
  double field_min_tv = 0.0;
  double solver_edgewise_tv = 0.0;
  std::vector<std::string> mismatches;

  bool ok() const { return mismatches.empty(); }
};

/// Fields with at most this many candidates are enumerated whole.
constexpr std::uint64_t kMaxOracleFields = 5'000'000;

/// Compares a solution against enumeration, level by level and, when the
/// field count allows, over every admissible ladder-valued field.
OracleReport oracle_compare(const Problem& problem, const Solution& solution);

/// Test hook: flips the membership of one free node in the level nearest the
/// middle that has one, so that the comparison must fail.
void corrupt_solution(const Problem& problem, Solution& solution);

}  // namespace lgo
