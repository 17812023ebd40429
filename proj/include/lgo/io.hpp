#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lgo/grid.hpp"
#include "lgo/solver.hpp"

namespace lgo {

/// Core block of the grid, one CSV row per grid row from the bottom, "nan"
/// where the field is undefined. Values are shortest round-trip decimals.
void write_field_csv(const std::filesystem::path& path, const ScalarField& field);

/// Reads a field written in the same layout. Cells that are empty, "nan" or
/// outside `region` are left undefined. Throws SpecError on a missing file
/// or a shape mismatch.
ScalarField read_field_csv(const std::filesystem::path& path, const DomainPtr& domain,
                           FieldRegion region);

/// One level of a level file.
struct StoredLevel {
  double threshold = 0.0;
  double value = 0.0;
  std::vector<std::uint8_t> bits;  // whole grid, row-major
};

struct LevelFile {
  int width = 0;
  int height = 0;
  std::vector<StoredLevel> levels;
};

/// Run-length encoded level sets over the whole grid (collar included):
///   LGOBV1
///   <width> <height> <level count>
///   <threshold> <value> <first bit> <run count> <run lengths...>
/// one line per level.
void write_levels(const std::filesystem::path& path, const Solution& solution);
LevelFile read_levels(const std::filesystem::path& path);

/// Writes a text file, throwing SpecError when it cannot be opened.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal that reads back to the same double ("nan" for NaN).
std::string format_double(double v);

}  // namespace lgo
