#include "psdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace psdg {

namespace {

using EdgeKey = std::pair<std::size_t, std::size_t>;

EdgeKey edge_key(std::size_t a, std::size_t b) {
  return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  auto orient = [](Point a, Point b, Point c) { return cross(b - a, c - a); };
  auto on_segment = [](Point a, Point b, Point c) {
    return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
  };
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

double polygon_diameter(std::span<const Point> poly) {
  double d = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    for (std::size_t j = i + 1; j < poly.size(); ++j) {
      d = std::max(d, distance(poly[i], poly[j]));
    }
  }
  return d;
}

std::vector<Point> gather(std::span<const Point> vertices,
                          std::span<const std::size_t> loop) {
  std::vector<Point> poly;
  poly.reserve(loop.size());
  for (auto v : loop) poly.push_back(vertices[v]);
  return poly;
}

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double polygon_signed_area(std::span<const Point> polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    twice += cross(polygon[i], polygon[(i + 1) % n]);
  }
  return 0.5 * twice;
}

Point polygon_centroid(std::span<const Point> polygon) {
  // Shift to the first vertex to limit cancellation.
  const Point origin = polygon.front();
  double area2 = 0.0;
  Point c;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = polygon[i] - origin;
    const Point b = polygon[(i + 1) % n] - origin;
    const double w = cross(a, b);
    area2 += w;
    c = c + w * (a + b);
  }
  return origin + (1.0 / (3.0 * area2)) * c;
}

bool polygon_is_simple(std::span<const Point> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // Adjacent edges share exactly one endpoint.
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(polygon[i], polygon[(i + 1) % n], polygon[j],
                             polygon[(j + 1) % n])) {
        return false;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (polygon[i].x == polygon[j].x && polygon[i].y == polygon[j].y) {
        return false;
      }
    }
  }
  return true;
}

bool polygon_is_centroid_star_shaped(std::span<const Point> polygon) {
  const double area = polygon_signed_area(polygon);
  if (!(area > 0.0)) return false;
  const Point c = polygon_centroid(polygon);
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 0.5 * cross(polygon[i] - c, polygon[(i + 1) % n] - c);
    if (!(t > 1e-10 * area)) return false;
  }
  return true;
}

PolyMesh::PolyMesh(std::vector<Point> vertices,
                   std::vector<std::vector<std::size_t>> elements,
                   const BoundaryTags& tags)
    : vertices_(std::move(vertices)), elements_(std::move(elements)) {
  if (elements_.empty()) throw std::invalid_argument("mesh has no elements");
  const std::size_t ne = elements_.size();
  areas_.resize(ne);
  centroids_.resize(ne);
  diameters_.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& loop = elements_[e];
    if (loop.size() < 3) {
      throw std::invalid_argument("element " + std::to_string(e) +
                                  " has fewer than three vertices");
    }
    for (auto v : loop) {
      if (v >= vertices_.size()) {
        throw std::invalid_argument("element " + std::to_string(e) +
                                    " references a missing vertex");
      }
    }
    const auto poly = gather(vertices_, loop);
    if (!polygon_is_simple(poly)) {
      throw std::invalid_argument("element " + std::to_string(e) +
                                  " is not a simple polygon");
    }
    areas_[e] = polygon_signed_area(poly);
    if (!(areas_[e] > 0.0)) {
      throw std::invalid_argument("element " + std::to_string(e) +
                                  " is not counter-clockwise");
    }
    centroids_[e] = polygon_centroid(poly);
    diameters_[e] = polygon_diameter(poly);
  }
  mesh_size_ = *std::max_element(diameters_.begin(), diameters_.end());

  std::map<EdgeKey, std::size_t> face_of_edge;
  element_faces_.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& loop = elements_[e];
    for (std::size_t l = 0; l < loop.size(); ++l) {
      const std::size_t a = loop[l];
      const std::size_t b = loop[(l + 1) % loop.size()];
      const auto key = edge_key(a, b);
      auto it = face_of_edge.find(key);
      if (it == face_of_edge.end()) {
        Face face;
        face.vertices = {a, b};
        face.plus = e;
        const Point t = vertices_[b] - vertices_[a];
        face.length = std::hypot(t.x, t.y);
        if (!(face.length > 0.0)) {
          throw std::invalid_argument("zero-length face in element " +
                                      std::to_string(e));
        }
        face.normal = {t.y / face.length, -t.x / face.length};
        face_of_edge.emplace(key, faces_.size());
        element_faces_[e].push_back(faces_.size());
        faces_.push_back(face);
      } else {
        Face& face = faces_[it->second];
        if (face.minus || face.plus == e || face.vertices[0] != b ||
            face.vertices[1] != a) {
          throw std::invalid_argument("non-conforming edge between vertices " +
                                      std::to_string(a) + " and " +
                                      std::to_string(b));
        }
        face.minus = e;
        face.kind = FaceKind::Interior;
        element_faces_[e].push_back(it->second);
      }
    }
  }
  for (auto& face : faces_) {
    if (face.minus) continue;
    auto it = tags.find(edge_key(face.vertices[0], face.vertices[1]));
    face.kind = (it != tags.end() && it->second == FaceKind::Neumann)
                    ? FaceKind::Neumann
                    : FaceKind::Dirichlet;
  }
}

std::size_t PolyMesh::num_interior_faces() const {
  return count_faces(FaceKind::Interior);
}

std::size_t PolyMesh::count_faces(FaceKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      faces_.begin(), faces_.end(),
      [kind](const Face& f) { return f.kind == kind; }));
}

std::vector<Point> PolyMesh::element_polygon(std::size_t e) const {
  return gather(vertices_, elements_[e]);
}

double PolyMesh::total_area() const {
  return std::accumulate(areas_.begin(), areas_.end(), 0.0);
}

Rectangle PolyMesh::bounding_box() const {
  Rectangle box{vertices_.front(), vertices_.front()};
  for (const auto& v : vertices_) {
    box.lower.x = std::min(box.lower.x, v.x);
    box.lower.y = std::min(box.lower.y, v.y);
    box.upper.x = std::max(box.upper.x, v.x);
    box.upper.y = std::max(box.upper.y, v.y);
  }
  return box;
}

Point PolyMesh::face_midpoint(std::size_t f) const {
  const auto& face = faces_[f];
  return 0.5 * (vertices_[face.vertices[0]] + vertices_[face.vertices[1]]);
}

BoundaryTags PolyMesh::boundary_tags() const {
  BoundaryTags tags;
  for (const auto& face : faces_) {
    if (face.is_boundary()) {
      tags[edge_key(face.vertices[0], face.vertices[1])] = face.kind;
    }
  }
  return tags;
}

bool operator==(const PolyMesh& a, const PolyMesh& b) {
  if (a.vertices_.size() != b.vertices_.size()) return false;
  for (std::size_t i = 0; i < a.vertices_.size(); ++i) {
    if (a.vertices_[i].x != b.vertices_[i].x ||
        a.vertices_[i].y != b.vertices_[i].y) {
      return false;
    }
  }
  if (a.elements_ != b.elements_ || a.faces_.size() != b.faces_.size()) {
    return false;
  }
  for (std::size_t f = 0; f < a.faces_.size(); ++f) {
    if (a.faces_[f].kind != b.faces_[f].kind ||
        a.faces_[f].vertices != b.faces_[f].vertices) {
      return false;
    }
  }
  return true;
}

PolyMesh build_cartesian_mesh(int nx, int ny, const Rectangle& domain) {
  if (nx < 1 || ny < 1) {
    throw std::invalid_argument("cartesian mesh needs at least one element per axis");
  }
  const double wx = domain.upper.x - domain.lower.x;
  const double wy = domain.upper.y - domain.lower.y;
  if (!(wx > 0.0) || !(wy > 0.0)) {
    throw std::invalid_argument("degenerate mesh domain");
  }
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      // Exact end points, no accumulated drift.
      const double x = i == nx ? domain.upper.x : domain.lower.x + wx * i / nx;
      const double y = j == ny ? domain.upper.y : domain.lower.y + wy * j / ny;
      vertices.push_back({x, y});
    }
  }
  auto id = [nx](int i, int j) {
    return static_cast<std::size_t>(j * (nx + 1) + i);
  };
  std::vector<std::vector<std::size_t>> elements;
  elements.reserve(static_cast<std::size_t>(nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return PolyMesh(std::move(vertices), std::move(elements));
}

namespace {

// Union of two face-adjacent loops with shared edges removed. Returns nullopt
// when the result is not a single simple loop.
std::optional<std::vector<std::size_t>> merge_loops(
    std::span<const Point> vertices, const std::vector<std::size_t>& a,
    const std::vector<std::size_t>& b) {
  auto directed = [](const std::vector<std::size_t>& loop) {
    std::vector<EdgeKey> edges;
    for (std::size_t l = 0; l < loop.size(); ++l) {
      edges.emplace_back(loop[l], loop[(l + 1) % loop.size()]);
    }
    return edges;
  };
  const auto ea = directed(a);
  const auto eb = directed(b);
  std::map<EdgeKey, int> present;
  for (const auto& e : ea) present[e] = 0;
  for (const auto& e : eb) present[e] = 1;
  std::map<std::size_t, std::size_t> next;
  std::size_t shared = 0;
  std::size_t remaining = 0;
  for (const auto* edges : {&ea, &eb}) {
    for (const auto& [u, v] : *edges) {
      if (present.count({v, u})) {
        ++shared;
        continue;
      }
      if (!next.emplace(u, v).second) return std::nullopt;  // pinch vertex
      ++remaining;
    }
  }
  if (shared == 0) return std::nullopt;
  std::size_t start = 0;
  bool found = false;
  for (auto v : a) {
    if (next.count(v)) {
      start = v;
      found = true;
      break;
    }
  }
  if (!found) return std::nullopt;
  std::vector<std::size_t> loop{start};
  for (std::size_t v = next.at(start); v != start;) {
    loop.push_back(v);
    auto it = next.find(v);
    if (it == next.end() || loop.size() > remaining) return std::nullopt;
    v = it->second;
  }
  if (loop.size() != remaining) return std::nullopt;  // more than one loop
  const auto poly = gather(vertices, loop);
  if (!polygon_is_simple(poly) || !polygon_is_centroid_star_shaped(poly)) {
    return std::nullopt;
  }
  return loop;
}

}  // namespace

PolyMesh agglomerate(const PolyMesh& mesh, std::size_t target_elements,
                     std::uint64_t seed) {
  if (target_elements == 0 || target_elements > mesh.num_elements()) {
    throw std::invalid_argument("agglomeration target must lie in [1, element count]");
  }
  if (target_elements == mesh.num_elements()) return mesh;

  std::mt19937_64 rng(seed);
  auto uniform = [&rng] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  const auto vertices = mesh.vertices();
  std::vector<std::vector<std::size_t>> loops(mesh.elements().begin(),
                                              mesh.elements().end());
  std::vector<bool> alive(loops.size(), true);
  std::vector<double> area(loops.size());
  std::vector<double> jitter(loops.size());
  for (std::size_t e = 0; e < loops.size(); ++e) {
    area[e] = mesh.element_area(e);
    jitter[e] = uniform();
  }
  std::size_t count = loops.size();
  bool stuck = false;

  while (count > target_elements) {
    std::map<EdgeKey, std::vector<std::size_t>> owners;
    for (std::size_t e = 0; e < loops.size(); ++e) {
      if (!alive[e]) continue;
      const auto& loop = loops[e];
      for (std::size_t l = 0; l < loop.size(); ++l) {
        owners[edge_key(loop[l], loop[(l + 1) % loop.size()])].push_back(e);
      }
    }
    std::vector<std::vector<std::size_t>> neighbours(loops.size());
    for (const auto& [key, list] : owners) {
      if (list.size() == 2) {
        neighbours[list[0]].push_back(list[1]);
        neighbours[list[1]].push_back(list[0]);
      }
    }
    std::vector<std::size_t> order;
    for (std::size_t e = 0; e < loops.size(); ++e) {
      if (alive[e]) order.push_back(e);
    }
    // Smallest (jittered) elements merge first, which keeps sizes balanced.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return area[i] * (1.0 + 0.5 * jitter[i]) < area[j] * (1.0 + 0.5 * jitter[j]);
    });

    bool merged = false;
    for (auto e : order) {
      auto& nb = neighbours[e];
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
      std::vector<std::pair<double, std::size_t>> ranked;
      for (auto n : nb) {
        std::vector<Point> pts = gather(vertices, loops[e]);
        for (auto v : loops[n]) pts.push_back(vertices[v]);
        ranked.emplace_back(polygon_diameter(pts) * (1.0 + 0.25 * jitter[n]), n);
      }
      std::sort(ranked.begin(), ranked.end());
      for (const auto& [score, n] : ranked) {
        const std::size_t keep = std::min(e, n);
        const std::size_t drop = std::max(e, n);
        auto joined = merge_loops(vertices, loops[keep], loops[drop]);
        if (!joined) continue;
        loops[keep] = std::move(*joined);
        loops[drop].clear();
        alive[drop] = false;
        area[keep] += area[drop];
        jitter[keep] = uniform();
        --count;
        merged = true;
        break;
      }
      if (merged) break;
    }
    if (!merged) {
      stuck = true;
      break;
    }
  }

  // Compact vertices and elements, carrying boundary tags over.
  std::vector<std::size_t> remap(vertices.size(), static_cast<std::size_t>(-1));
  std::vector<Point> new_vertices;
  std::vector<std::vector<std::size_t>> new_elements;
  for (std::size_t e = 0; e < loops.size(); ++e) {
    if (!alive[e]) continue;
    std::vector<std::size_t> loop;
    for (auto v : loops[e]) {
      if (remap[v] == static_cast<std::size_t>(-1)) {
        remap[v] = new_vertices.size();
        new_vertices.push_back(vertices[v]);
      }
      loop.push_back(remap[v]);
    }
    new_elements.push_back(std::move(loop));
  }
  BoundaryTags tags;
  for (const auto& [key, kind] : mesh.boundary_tags()) {
    if (remap[key.first] != static_cast<std::size_t>(-1) &&
        remap[key.second] != static_cast<std::size_t>(-1)) {
      tags[edge_key(remap[key.first], remap[key.second])] = kind;
    }
  }
  PolyMesh out(std::move(new_vertices), std::move(new_elements), tags);
  out.incomplete_agglomeration_ = stuck;
  return out;
}

PolyMesh classify_boundary(const PolyMesh& mesh,
                           const std::function<bool(Point)>& neumann) {
  BoundaryTags tags;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const auto& face = mesh.faces()[f];
    if (!face.is_boundary()) continue;
    tags[edge_key(face.vertices[0], face.vertices[1])] =
        neumann(mesh.face_midpoint(f)) ? FaceKind::Neumann : FaceKind::Dirichlet;
  }
  std::vector<Point> vertices(mesh.vertices().begin(), mesh.vertices().end());
  std::vector<std::vector<std::size_t>> elements(mesh.elements().begin(),
                                                 mesh.elements().end());
  return PolyMesh(std::move(vertices), std::move(elements), tags);
}

std::function<bool(Point)> neumann_predicate(const std::string& name,
                                             const Rectangle& domain) {
  const double tol = 1e-12 * std::max({1.0, std::abs(domain.upper.x),
                                       std::abs(domain.upper.y)});
  auto near = [tol](double a, double b) { return std::abs(a - b) <= tol; };
  if (name == "none") return [](Point) { return false; };
  if (name == "all") return [](Point) { return true; };
  if (name == "right") {
    return [=](Point p) { return near(p.x, domain.upper.x); };
  }
  if (name == "left") {
    return [=](Point p) { return near(p.x, domain.lower.x); };
  }
  if (name == "top") {
    return [=](Point p) { return near(p.y, domain.upper.y); };
  }
  if (name == "bottom") {
    return [=](Point p) { return near(p.y, domain.lower.y); };
  }
  if (name == "left-right") {
    return [=](Point p) {
      return near(p.x, domain.lower.x) || near(p.x, domain.upper.x);
    };
  }
  throw std::invalid_argument("unknown Neumann boundary selection '" + name + "'");
}

PolyMesh read_mesh(std::istream& in) {
  std::size_t nv = 0;
  std::size_t ne = 0;
  if (!(in >> nv >> ne)) throw std::invalid_argument("mesh file: bad header");
  std::vector<Point> vertices(nv);
  for (auto& v : vertices) {
    if (!(in >> v.x >> v.y)) throw std::invalid_argument("mesh file: bad vertex");
  }
  std::vector<std::vector<std::size_t>> elements(ne);
  for (auto& loop : elements) {
    std::size_t k = 0;
    if (!(in >> k)) throw std::invalid_argument("mesh file: bad element");
    loop.resize(k);
    for (auto& v : loop) {
      if (!(in >> v)) throw std::invalid_argument("mesh file: bad element");
    }
  }
  BoundaryTags tags;
  std::size_t a = 0;
  std::size_t b = 0;
  std::string kind;
  while (in >> a >> b >> kind) {
    if (kind == "N") {
      tags[edge_key(a, b)] = FaceKind::Neumann;
    } else if (kind == "D") {
      tags[edge_key(a, b)] = FaceKind::Dirichlet;
    } else {
      throw std::invalid_argument("mesh file: boundary tag must be D or N");
    }
  }
  if (!in.eof()) throw std::invalid_argument("mesh file: trailing garbage");
  PolyMesh mesh(std::move(vertices), std::move(elements), tags);
  const BoundaryTags boundary = mesh.boundary_tags();
  for (const auto& [key, kind] : tags) {
    if (!boundary.count(key)) {
      throw std::invalid_argument("mesh file: tag " + std::to_string(key.first) + " " +
                                  std::to_string(key.second) + " is not a boundary face");
    }
  }
  return mesh;
}

PolyMesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open mesh file " + path);
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const PolyMesh& mesh) {
  out << mesh.vertices().size() << ' ' << mesh.num_elements() << '\n';
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices()) out << v.x << ' ' << v.y << '\n';
  for (const auto& loop : mesh.elements()) {
    out << loop.size();
    for (auto v : loop) out << ' ' << v;
    out << '\n';
  }
  for (const auto& face : mesh.faces()) {
    if (!face.is_boundary()) continue;
    out << face.vertices[0] << ' ' << face.vertices[1] << ' '
        << (face.kind == FaceKind::Neumann ? 'N' : 'D') << '\n';
  }
}

}  // namespace psdg
