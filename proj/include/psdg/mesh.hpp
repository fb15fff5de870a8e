#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace psdg {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double distance(Point a, Point b);

/// Axis-aligned rectangle [lower.x, upper.x] x [lower.y, upper.y].
struct Rectangle {
  Point lower{0.0, 0.0};
  Point upper{1.0, 1.0};
  double area() const { return (upper.x - lower.x) * (upper.y - lower.y); }
};

enum class FaceKind { Interior, Dirichlet, Neumann };

struct Face {
  std::array<std::size_t, 2> vertices{};
  FaceKind kind = FaceKind::Dirichlet;
  std::size_t plus = 0;
  std::optional<std::size_t> minus;
  /// Unit outward normal of the plus element.
  Point normal;
  double length = 0.0;

  bool is_boundary() const { return !minus.has_value(); }
};

/// Vertex pair (unordered) -> boundary kind, used to carry tags through
/// mesh rebuilds and file import.
using BoundaryTags = std::map<std::pair<std::size_t, std::size_t>, FaceKind>;

/// Immutable polygonal mesh of a planar domain.
///
/// Elements are counter-clockwise vertex loops. Faces are the straight
/// segments between consecutive loop vertices; a segment shared by two loops
/// is an interior face whose plus side is the lower-indexed element.
/// Boundary faces default to Dirichlet unless tagged otherwise.
class PolyMesh {
 public:
  PolyMesh() = default;
  /// Validates the loops (simple, counter-clockwise, conforming edges) and
  /// builds face connectivity. Throws std::invalid_argument on bad input.
  PolyMesh(std::vector<Point> vertices,
           std::vector<std::vector<std::size_t>> elements,
           const BoundaryTags& tags = {});

  std::span<const Point> vertices() const { return vertices_; }
  std::span<const std::vector<std::size_t>> elements() const { return elements_; }
  std::span<const Face> faces() const { return faces_; }
  /// Face indices bounding element e, in loop order.
  std::span<const std::size_t> element_faces(std::size_t e) const {
    return element_faces_[e];
  }

  std::size_t num_elements() const { return elements_.size(); }
  std::size_t num_faces() const { return faces_.size(); }
  std::size_t num_interior_faces() const;
  std::size_t count_faces(FaceKind kind) const;

  std::vector<Point> element_polygon(std::size_t e) const;
  double element_area(std::size_t e) const { return areas_[e]; }
  Point element_centroid(std::size_t e) const { return centroids_[e]; }
  double element_diameter(std::size_t e) const { return diameters_[e]; }
  std::span<const double> element_diameters() const { return diameters_; }
  /// h = max over element diameters.
  double mesh_size() const { return mesh_size_; }
  double total_area() const;
  Rectangle bounding_box() const;
  Point face_midpoint(std::size_t f) const;

  /// Set by agglomerate() when no legal merge remained before the target.
  bool incomplete_agglomeration() const { return incomplete_agglomeration_; }

  BoundaryTags boundary_tags() const;

  friend bool operator==(const PolyMesh&, const PolyMesh&);

 private:
  friend PolyMesh agglomerate(const PolyMesh&, std::size_t, std::uint64_t);

  std::vector<Point> vertices_;
  std::vector<std::vector<std::size_t>> elements_;
  std::vector<Face> faces_;
  std::vector<std::vector<std::size_t>> element_faces_;
  std::vector<double> areas_;
  std::vector<Point> centroids_;
  std::vector<double> diameters_;
  double mesh_size_ = 0.0;
  bool incomplete_agglomeration_ = false;
};

/// nx * ny rectangular elements tiling the domain; all boundary faces Dirichlet.
PolyMesh build_cartesian_mesh(int nx, int ny, const Rectangle& domain = {});

/// Seeded greedy pairwise merging of face-adjacent elements until
/// `target_elements` remain. Merges that would produce a polygon that is not
/// simple or not star-shaped with respect to its centroid are skipped.
PolyMesh agglomerate(const PolyMesh& mesh, std::size_t target_elements,
                     std::uint64_t seed);

/// Tags each boundary face Neumann iff the predicate holds at its midpoint.
PolyMesh classify_boundary(const PolyMesh& mesh,
                           const std::function<bool(Point)>& neumann);

/// Named Neumann predicates for the unit square and general rectangles:
/// "none", "all", "right", "left", "top", "bottom", "left-right".
std::function<bool(Point)> neumann_predicate(const std::string& name,
                                             const Rectangle& domain = {});

// Plain-text mesh format:
//   NV NE
//   x y                  (NV lines)
//   k i1 ... ik          (NE lines, counter-clockwise vertex loops)
//   a b D|N              (optional boundary tags)
PolyMesh read_mesh(std::istream& in);
PolyMesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const PolyMesh& mesh);

double polygon_signed_area(std::span<const Point> polygon);
Point polygon_centroid(std::span<const Point> polygon);
bool polygon_is_simple(std::span<const Point> polygon);
/// True if every triangle (centroid, v_i, v_{i+1}) has positive area.
bool polygon_is_centroid_star_shaped(std::span<const Point> polygon);

}  // namespace psdg
