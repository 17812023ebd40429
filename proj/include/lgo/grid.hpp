#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace lgo {

enum class NodeLabel : std::uint8_t {
  Collar,    // discrete stand-in for R^n minus the closure of Omega
  Ring,      // Omega nodes 4-adjacent to the collar; carries the boundary trace
  Interior,  // remaining Omega nodes
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct DiscShape {
  double radius = 1.0;
};

struct RectangleShape {
  double width = 1.0;
  double height = 1.0;
};

struct MaskShape {
  std::filesystem::path path;
  bool require_connected = false;
};

/// Input for build_domain. Node (i, j) of the core block sits at
/// ((i - (n-1)/2) h, (j - (m-1)/2) h); the collar pads the block on all sides.
struct DomainDescriptor {
  std::variant<DiscShape, RectangleShape, MaskShape> shape;
  double h = 0.0;
  int collar_width = 2;
};

/// Pixel mask for Omega plus a collar. Immutable after construction.
class GridDomain {
 public:
  GridDomain(int core_width, int core_height, double h, int collar_width,
             std::span<const std::uint8_t> core_mask, bool require_connected);

  int width() const { return width_; }
  int height() const { return height_; }
  int core_width() const { return width_ - 2 * collar_; }
  int core_height() const { return height_ - 2 * collar_; }
  int collar_width() const { return collar_; }
  double h() const { return h_; }
  std::size_t size() const { return labels_.size(); }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(i);
  }
  int col(std::size_t n) const { return static_cast<int>(n % width_); }
  int row(std::size_t n) const { return static_cast<int>(n / width_); }
  bool in_grid(int i, int j) const {
    return i >= 0 && j >= 0 && i < width_ && j < height_;
  }

  NodeLabel label(std::size_t n) const { return labels_[n]; }
  bool in_closure(std::size_t n) const {
    return labels_[n] != NodeLabel::Collar;
  }
  Point position(std::size_t n) const;
  /// Nearest node to a coordinate (may lie outside the grid; returned clamped).
  std::size_t nearest_node(Point p) const;

  const std::vector<std::size_t>& ring_nodes() const { return ring_; }
  const std::vector<std::size_t>& interior_nodes() const { return interior_; }
  /// Interior and ring nodes in index order.
  const std::vector<std::size_t>& closure_nodes() const { return closure_; }

  /// Index of a core-block node in the padded grid.
  std::size_t core_to_grid(int ci, int cj) const {
    return index(ci + collar_, cj + collar_);
  }

  /// Largest coordinate extent of the grid from its center, per axis.
  double half_extent_x() const { return 0.5 * (width_ - 1) * h_; }
  double half_extent_y() const { return 0.5 * (height_ - 1) * h_; }

 private:
  int width_;
  int height_;
  int collar_;
  double h_;
  std::vector<NodeLabel> labels_;
  std::vector<std::size_t> ring_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> closure_;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

DomainPtr build_domain(const DomainDescriptor& descriptor);

/// Reads a P2 or P5 PGM. Returns the core mask (1 = Omega) and its size.
struct MaskImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> inside;
};
MaskImage read_pgm_mask(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, int width, int height,
               std::span<const std::uint8_t> gray);

enum class FieldRegion : std::uint8_t { Ring, Closure, Collar, CollarAndRing, Everywhere };

bool region_contains(const GridDomain& domain, FieldRegion region,
                     std::size_t node);

/// Real values on grid nodes. Values outside the defined region are NaN.
class ScalarField {
 public:
  ScalarField(DomainPtr domain, FieldRegion region);
  ScalarField(DomainPtr domain, FieldRegion region, std::vector<double> values);

  const GridDomain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  FieldRegion region() const { return region_; }
  double operator[](std::size_t n) const { return values_[n]; }
  double& operator[](std::size_t n) { return values_[n]; }
  const std::vector<double>& values() const { return values_; }
  bool defines(std::size_t n) const {
    return region_contains(*domain_, region_, n);
  }

  /// Throws SpecError if some node of the region holds a non-finite value.
  void require_finite(const char* what) const;

 private:
  DomainPtr domain_;
  FieldRegion region_;
  std::vector<double> values_;
};

/// Binary membership per grid node.
class PixelSet {
 public:
  explicit PixelSet(DomainPtr domain);
  PixelSet(DomainPtr domain, std::vector<std::uint8_t> bits);

  const GridDomain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  std::size_t size() const { return bits_.size(); }
  bool contains(std::size_t n) const { return bits_[n] != 0; }
  void set(std::size_t n, bool v = true) { bits_[n] = v ? 1 : 0; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  std::size_t count() const;
  std::size_t count_in_closure() const;
  bool empty() const { return count() == 0; }
  bool subset_of(const PixelSet& other) const;
  /// Nodes of *this that are missing from other.
  std::vector<std::size_t> missing_from(const PixelSet& other) const;

  PixelSet united(const PixelSet& other) const;
  PixelSet intersected(const PixelSet& other) const;
  PixelSet complement() const;
  PixelSet closure_part() const;  // restriction to interior and ring nodes

  friend bool operator==(const PixelSet& a, const PixelSet& b) {
    return a.bits_ == b.bits_;
  }

 private:
  void require_same_domain(const PixelSet& other) const;

  DomainPtr domain_;
  std::vector<std::uint8_t> bits_;
};

/// Extends boundary data from the ring to the collar by nearest ring node
/// (Euclidean; ties go to the smaller node index). Result is defined on
/// collar and ring and equals g on the ring.
ScalarField extend_boundary_data(const ScalarField& g);

/// Discrete closure of {psi > t}: Omega nodes with psi > t plus their
/// 4-neighbors labeled Interior.
PixelSet obstacle_superlevel(const ScalarField& psi, double t);

/// Collar nodes with G >= t.
PixelSet exterior_superlevel(const ScalarField& extended, double t);

/// Ring nodes with g >= t (the pinned trace of a level set).
PixelSet ring_superlevel(const ScalarField& g, double t);

/// 4-connected components of Omega (interior and ring).
std::size_t closure_components(const GridDomain& domain);

}  // namespace lgo
