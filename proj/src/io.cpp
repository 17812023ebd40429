#include "lgo/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lgo/error.hpp"

namespace lgo {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SpecError("cannot write " + path.string());
  out << text;
  if (!out) throw SpecError("write failed for " + path.string());
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& field) {
  const GridDomain& d = field.domain();
  std::string text;
  for (int j = 0; j < d.core_height(); ++j) {
    for (int i = 0; i < d.core_width(); ++i) {
      const std::size_t n = d.core_to_grid(i, j);
      if (i > 0) text += ',';
      text += format_double(field.defines(n) ? field[n] : std::nan(""));
    }
    text += '\n';
  }
  write_text(path, text);
}

ScalarField read_field_csv(const std::filesystem::path& path, const DomainPtr& domain,
                           FieldRegion region) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read field file " + path.string());
  ScalarField field(domain, region);
  std::string line;
  int j = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (j >= domain->core_height()) {
      throw SpecError(path.string() + ": more rows than the grid has (" +
                      std::to_string(domain->core_height()) + ")");
    }
    std::stringstream row(line);
    std::string cell;
    int i = 0;
    while (std::getline(row, cell, ',')) {
      if (i >= domain->core_width()) {
        throw SpecError(path.string() + ": row " + std::to_string(j) + " is too long");
      }
      const std::size_t n = domain->core_to_grid(i, j);
      const auto first = cell.find_first_not_of(" \t");
      const auto last = cell.find_last_not_of(" \t");
      const std::string s = first == std::string::npos ? "" : cell.substr(first, last - first + 1);
      if (!s.empty() && s != "nan" && s != "NaN" && field.defines(n)) {
        double v = 0.0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
          throw SpecError(path.string() + ": bad number '" + s + "'");
        }
        field[n] = v;
      }
      ++i;
    }
    if (i != domain->core_width()) {
      throw SpecError(path.string() + ": row " + std::to_string(j) + " has " +
                      std::to_string(i) + " cells, expected " +
                      std::to_string(domain->core_width()));
    }
    ++j;
  }
  if (j != domain->core_height()) {
    throw SpecError(path.string() + ": " + std::to_string(j) + " rows, expected " +
                    std::to_string(domain->core_height()));
  }
  return field;
}

void write_levels(const std::filesystem::path& path, const Solution& solution) {
  const GridDomain& d = *solution.domain;
  std::string text = "LGOBV1\n";
  text += std::to_string(d.width()) + ' ' + std::to_string(d.height()) + ' ' +
          std::to_string(solution.levels.size()) + '\n';
  for (const LevelSolution& level : solution.levels) {
    const auto& bits = level.e.bits();
    std::vector<std::size_t> runs;
    std::size_t run = 0;
    for (std::size_t n = 0; n < bits.size(); ++n) {
      if (n > 0 && bits[n] != bits[n - 1]) {
        runs.push_back(run);
        run = 0;
      }
      ++run;
    }
    if (!bits.empty()) runs.push_back(run);
    text += format_double(level.t) + ' ' + format_double(level.value) + ' ' +
            (bits.empty() ? "0" : std::to_string(bits[0])) + ' ' + std::to_string(runs.size());
    for (std::size_t r : runs) text += ' ' + std::to_string(r);
    text += '\n';
  }
  write_text(path, text);
}

LevelFile read_levels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read level file " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "LGOBV1") throw SpecError(path.string() + ": not an LGOBV1 file");
  LevelFile file;
  std::size_t count = 0;
  in >> file.width >> file.height >> count;
  if (!in || file.width <= 0 || file.height <= 0) {
    throw SpecError(path.string() + ": bad header");
  }
  const std::size_t size = static_cast<std::size_t>(file.width) * file.height;
  for (std::size_t k = 0; k < count; ++k) {
    StoredLevel level;
    std::string t, v;
    int first = 0;
    std::size_t nruns = 0;
    in >> t >> v >> first >> nruns;
    if (!in) throw SpecError(path.string() + ": truncated level " + std::to_string(k));
    level.threshold = std::stod(t);
    level.value = std::stod(v);
    std::uint8_t bit = first ? 1 : 0;
    for (std::size_t r = 0; r < nruns; ++r) {
      std::size_t len = 0;
      in >> len;
      if (!in || level.bits.size() + len > size) {
        throw SpecError(path.string() + ": bad run in level " + std::to_string(k));
      }
      level.bits.insert(level.bits.end(), len, bit);
      bit ^= 1;
    }
    if (level.bits.size() != size) {
      throw SpecError(path.string() + ": level " + std::to_string(k) + " covers " +
                      std::to_string(level.bits.size()) + " of " + std::to_string(size) +
                      " nodes");
    }
    file.levels.push_back(std::move(level));
  }
  return file;
}

}  // namespace lgo
