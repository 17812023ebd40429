#include "lgo/grid.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include "lgo/error.hpp"

namespace lgo {

namespace {

constexpr int kDx4[4] = {1, -1, 0, 0};
constexpr int kDy4[4] = {0, 0, 1, -1};

}  // namespace

GridDomain::GridDomain(int core_width, int core_height, double h,
                       int collar_width, std::span<const std::uint8_t> core_mask,
                       bool require_connected)
    : width_(core_width + 2 * collar_width),
      height_(core_height + 2 * collar_width),
      collar_(collar_width),
      h_(h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw SpecError("grid spacing h must be positive");
  }
  if (collar_width < 1) throw SpecError("collar_width must be at least 1");
  if (core_width < 1 || core_height < 1) {
    throw SpecError("domain has an empty node block");
  }
  if (core_mask.size() !=
      static_cast<std::size_t>(core_width) * static_cast<std::size_t>(core_height)) {
    throw SpecError("mask size does not match the node block");
  }

  std::vector<std::uint8_t> inside(static_cast<std::size_t>(width_) * height_, 0);
  for (int cj = 0; cj < core_height; ++cj) {
    for (int ci = 0; ci < core_width; ++ci) {
      inside[index(ci + collar_, cj + collar_)] =
          core_mask[static_cast<std::size_t>(cj) * core_width + ci] ? 1 : 0;
    }
  }

  labels_.assign(inside.size(), NodeLabel::Collar);
  for (int j = 0; j < height_; ++j) {
    for (int i = 0; i < width_; ++i) {
      const std::size_t n = index(i, j);
      if (!inside[n]) continue;
      bool touches_collar = false;
      for (int k = 0; k < 4; ++k) {
        const int ni = i + kDx4[k];
        const int nj = j + kDy4[k];
        if (!in_grid(ni, nj) || !inside[index(ni, nj)]) touches_collar = true;
      }
      labels_[n] = touches_collar ? NodeLabel::Ring : NodeLabel::Interior;
    }
  }
  for (std::size_t n = 0; n < labels_.size(); ++n) {
    if (labels_[n] == NodeLabel::Ring) ring_.push_back(n);
    if (labels_[n] == NodeLabel::Interior) interior_.push_back(n);
    if (labels_[n] != NodeLabel::Collar) closure_.push_back(n);
  }
  if (closure_.empty()) throw SpecError("domain has an empty interior");
  if (require_connected && closure_components(*this) != 1) {
    throw SpecError("domain interior is not connected");
  }
}

Point GridDomain::position(std::size_t n) const {
  return {(col(n) - 0.5 * (width_ - 1)) * h_, (row(n) - 0.5 * (height_ - 1)) * h_};
}

std::size_t GridDomain::nearest_node(Point p) const {
  const int i = static_cast<int>(std::lround(p.x / h_ + 0.5 * (width_ - 1)));
  const int j = static_cast<int>(std::lround(p.y / h_ + 0.5 * (height_ - 1)));
  return index(std::clamp(i, 0, width_ - 1), std::clamp(j, 0, height_ - 1));
}

std::size_t closure_components(const GridDomain& domain) {
  std::vector<std::uint8_t> seen(domain.size(), 0);
  std::size_t components = 0;
  std::queue<std::size_t> queue;
  for (std::size_t start : domain.closure_nodes()) {
    if (seen[start]) continue;
    ++components;
    seen[start] = 1;
    queue.push(start);
    while (!queue.empty()) {
      const std::size_t n = queue.front();
      queue.pop();
      for (int k = 0; k < 4; ++k) {
        const int ni = domain.col(n) + kDx4[k];
        const int nj = domain.row(n) + kDy4[k];
        if (!domain.in_grid(ni, nj)) continue;
        const std::size_t m = domain.index(ni, nj);
        if (seen[m] || !domain.in_closure(m)) continue;
        seen[m] = 1;
        queue.push(m);
      }
    }
  }
  return components;
}

DomainPtr build_domain(const DomainDescriptor& d) {
  if (!(d.h > 0.0)) throw SpecError("grid spacing h must be positive");
  if (d.collar_width < 1) throw SpecError("collar_width must be at least 1");

  if (const auto* disc = std::get_if<DiscShape>(&d.shape)) {
    if (!(disc->radius > 0.0)) throw SpecError("disc radius must be positive");
    const int n = 2 * static_cast<int>(std::ceil(disc->radius / d.h - 1e-9));
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) * n, 0);
    const double r2 = disc->radius * disc->radius;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const double x = (i - 0.5 * (n - 1)) * d.h;
        const double y = (j - 0.5 * (n - 1)) * d.h;
        mask[static_cast<std::size_t>(j) * n + i] = (x * x + y * y < r2) ? 1 : 0;
      }
    }
    return std::make_shared<GridDomain>(n, n, d.h, d.collar_width, mask, false);
  }
  if (const auto* rect = std::get_if<RectangleShape>(&d.shape)) {
    const int nx = static_cast<int>(std::lround(rect->width / d.h));
    const int ny = static_cast<int>(std::lround(rect->height / d.h));
    if (nx < 1 || ny < 1) throw SpecError("rectangle has an empty interior");
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(nx) * ny, 1);
    return std::make_shared<GridDomain>(nx, ny, d.h, d.collar_width, mask, false);
  }
  const auto& file = std::get<MaskShape>(d.shape);
  const MaskImage image = read_pgm_mask(file.path);
  return std::make_shared<GridDomain>(image.width, image.height, d.h,
                                      d.collar_width, image.inside,
                                      file.require_connected);
}

namespace {

// Next whitespace-separated PGM header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string token;
  char c = 0;
  while (in.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(in, rest);
      if (!token.empty()) break;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(c);
  }
  return token;
}

int pgm_int(std::istream& in, const std::filesystem::path& path) {
  const std::string token = pgm_token(in);
  try {
    std::size_t used = 0;
    const int value = std::stoi(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw SpecError("malformed PGM header in " + path.string());
  }
}

}  // namespace

MaskImage read_pgm_mask(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot open mask file " + path.string());
  const std::string magic = pgm_token(in);
  if (magic != "P2" && magic != "P5") {
    throw SpecError("mask file is not a P2/P5 PGM: " + path.string());
  }
  MaskImage image;
  image.width = pgm_int(in, path);
  image.height = pgm_int(in, path);
  const int maxval = pgm_int(in, path);
  if (image.width < 1 || image.height < 1 || maxval < 1 || maxval > 65535) {
    throw SpecError("invalid PGM dimensions in " + path.string());
  }
  const std::size_t count = static_cast<std::size_t>(image.width) * image.height;
  image.inside.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    int value = 0;
    if (magic == "P2") {
      value = pgm_int(in, path);
    } else if (maxval < 256) {
      char byte = 0;
      if (!in.get(byte)) throw SpecError("truncated PGM data in " + path.string());
      value = static_cast<unsigned char>(byte);
    } else {
      char hi = 0, lo = 0;
      if (!in.get(hi) || !in.get(lo)) {
        throw SpecError("truncated PGM data in " + path.string());
      }
      value = (static_cast<unsigned char>(hi) << 8) | static_cast<unsigned char>(lo);
    }
    image.inside[k] = value > 0 ? 1 : 0;
  }
  return image;
}

void write_pgm(const std::filesystem::path& path, int width, int height,
               std::span<const std::uint8_t> gray) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SpecError("cannot write " + path.string());
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(gray.data()),
            static_cast<std::streamsize>(gray.size()));
}

bool region_contains(const GridDomain& domain, FieldRegion region,
                     std::size_t node) {
  const NodeLabel label = domain.label(node);
  switch (region) {
    case FieldRegion::Ring:
      return label == NodeLabel::Ring;
    case FieldRegion::Closure:
      return label != NodeLabel::Collar;
    case FieldRegion::Collar:
      return label == NodeLabel::Collar;
    case FieldRegion::CollarAndRing:
      return label != NodeLabel::Interior;
    case FieldRegion::Everywhere:
      return true;
  }
  return false;
}

ScalarField::ScalarField(DomainPtr domain, FieldRegion region)
    : domain_(std::move(domain)),
      region_(region),
      values_(domain_->size(), std::numeric_limits<double>::quiet_NaN()) {}

ScalarField::ScalarField(DomainPtr domain, FieldRegion region,
                         std::vector<double> values)
    : domain_(std::move(domain)), region_(region), values_(std::move(values)) {
  if (values_.size() != domain_->size()) {
    throw SpecError("field size does not match its domain");
  }
}

void ScalarField::require_finite(const char* what) const {
  for (std::size_t n = 0; n < values_.size(); ++n) {
    if (defines(n) && !std::isfinite(values_[n])) {
      throw SpecError(std::string(what) + " is undefined at node " +
                      std::to_string(n));
    }
  }
}

PixelSet::PixelSet(DomainPtr domain)
    : domain_(std::move(domain)), bits_(domain_->size(), 0) {}

PixelSet::PixelSet(DomainPtr domain, std::vector<std::uint8_t> bits)
    : domain_(std::move(domain)), bits_(std::move(bits)) {
  if (bits_.size() != domain_->size()) {
    throw PreconditionError("pixel set size does not match its domain");
  }
}

std::size_t PixelSet::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

std::size_t PixelSet::count_in_closure() const {
  std::size_t c = 0;
  for (std::size_t n : domain_->closure_nodes()) c += bits_[n];
  return c;
}

void PixelSet::require_same_domain(const PixelSet& other) const {
  if (other.bits_.size() != bits_.size()) {
    throw PreconditionError("pixel sets live on different domains");
  }
}

bool PixelSet::subset_of(const PixelSet& other) const {
  require_same_domain(other);
  for (std::size_t n = 0; n < bits_.size(); ++n) {
    if (bits_[n] && !other.bits_[n]) return false;
  }
  return true;
}

std::vector<std::size_t> PixelSet::missing_from(const PixelSet& other) const {
  require_same_domain(other);
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < bits_.size(); ++n) {
    if (bits_[n] && !other.bits_[n]) out.push_back(n);
  }
  return out;
}

PixelSet PixelSet::united(const PixelSet& other) const {
  require_same_domain(other);
  PixelSet out(domain_);
  for (std::size_t n = 0; n < bits_.size(); ++n) out.bits_[n] = bits_[n] | other.bits_[n];
  return out;
}

PixelSet PixelSet::intersected(const PixelSet& other) const {
  require_same_domain(other);
  PixelSet out(domain_);
  for (std::size_t n = 0; n < bits_.size(); ++n) out.bits_[n] = bits_[n] & other.bits_[n];
  return out;
}

PixelSet PixelSet::complement() const {
  PixelSet out(domain_);
  for (std::size_t n = 0; n < bits_.size(); ++n) out.bits_[n] = bits_[n] ? 0 : 1;
  return out;
}

PixelSet PixelSet::closure_part() const {
  PixelSet out(domain_);
  for (std::size_t n : domain_->closure_nodes()) out.bits_[n] = bits_[n];
  return out;
}

ScalarField extend_boundary_data(const ScalarField& g) {
  const GridDomain& domain = g.domain();
  const auto& ring = domain.ring_nodes();
  for (std::size_t n : ring) {
    if (!std::isfinite(g[n])) {
      throw SpecError("boundary data undefined at ring node " + std::to_string(n));
    }
  }
  ScalarField extended(g.domain_ptr(), FieldRegion::CollarAndRing);
  for (std::size_t n : ring) extended[n] = g[n];

  // Squared distances in node units are integers, so ties are exact; ring is
  // sorted by index, so the first strict improvement wins ties.
  for (std::size_t n = 0; n < domain.size(); ++n) {
    if (domain.label(n) != NodeLabel::Collar) continue;
    const long i = domain.col(n);
    const long j = domain.row(n);
    long best = std::numeric_limits<long>::max();
    std::size_t best_node = ring.front();
    for (std::size_t r : ring) {
      const long di = domain.col(r) - i;
      const long dj = domain.row(r) - j;
      const long d2 = di * di + dj * dj;
      if (d2 < best) {
        best = d2;
        best_node = r;
      }
    }
    extended[n] = g[best_node];
  }
  return extended;
}

PixelSet obstacle_superlevel(const ScalarField& psi, double t) {
  const GridDomain& domain = psi.domain();
  PixelSet out(psi.domain_ptr());
  for (std::size_t n : domain.closure_nodes()) {
    if (!(psi[n] > t)) continue;
    out.set(n);
    for (int k = 0; k < 4; ++k) {
      const int ni = domain.col(n) + kDx4[k];
      const int nj = domain.row(n) + kDy4[k];
      if (!domain.in_grid(ni, nj)) continue;
      const std::size_t m = domain.index(ni, nj);
      if (domain.label(m) == NodeLabel::Interior) out.set(m);
    }
  }
  return out;
}

PixelSet exterior_superlevel(const ScalarField& extended, double t) {
  const GridDomain& domain = extended.domain();
  PixelSet out(extended.domain_ptr());
  for (std::size_t n = 0; n < domain.size(); ++n) {
    if (domain.label(n) == NodeLabel::Collar && extended[n] >= t) out.set(n);
  }
  return out;
}

PixelSet ring_superlevel(const ScalarField& g, double t) {
  PixelSet out(g.domain_ptr());
  for (std::size_t n : g.domain().ring_nodes()) {
    if (g[n] >= t) out.set(n);
  }
  return out;
}

}  // namespace lgo
