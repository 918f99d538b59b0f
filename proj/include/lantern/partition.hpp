#pragma once
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lantern/triangle.hpp"

namespace lantern {

// Simple polygon, counterclockwise, at least three vertices.
struct Polygon2 {
  std::vector<Point2> vertices;
};

inline double polygon_signed_area(const Polygon2& p) {
  double s = 0.0;
  const std::size_t n = p.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = p.vertices[i];
    const Point2 b = p.vertices[(i + 1) % n];
    s += perp_dot(a, b);
  }
  return 0.5 * s;
}

inline double polygon_area(const Polygon2& p) { return std::abs(polygon_signed_area(p)); }

inline Polygon2 rectangle(Point2 lo, Point2 hi) {
  return {{{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}}};
}

// Finite family of non-overlapping oriented triangles covering a polygon.
// mesh_norm is the maximum side length over all triangles.
struct Partition {
  std::vector<OrientedTriangle2> triangles;
  double mesh_norm = 0.0;
};

inline double compute_mesh_norm(const std::vector<OrientedTriangle2>& tris) {
  double m = 0.0;
  for (const auto& t : tris)
    m = std::max({m, norm(t.side(VertexId::A)), norm(t.side(VertexId::B)),
                  norm(t.side(VertexId::C))});
  return m;
}

namespace detail {

inline bool segments_properly_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const double d1 = perp_dot(p2 - p1, q1 - p1);
  const double d2 = perp_dot(p2 - p1, q2 - p1);
  const double d3 = perp_dot(q2 - q1, p1 - q1);
  const double d4 = perp_dot(q2 - q1, p2 - q1);
  // strictly opposite signs on both; touching endpoints do not count
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
         ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

inline bool point_in_triangle(Point2 p, Point2 a, Point2 b, Point2 c) {
  const double d1 = perp_dot(b - a, p - a);
  const double d2 = perp_dot(c - b, p - b);
  const double d3 = perp_dot(a - c, p - c);
  return (d1 >= 0 && d2 >= 0 && d3 >= 0) || (d1 <= 0 && d2 <= 0 && d3 <= 0);
}

}  // namespace detail

inline bool polygon_is_simple(const Polygon2& p) {
  const std::size_t n = p.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // skip adjacent edges (they share an endpoint)
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (detail::segments_properly_intersect(p.vertices[i], p.vertices[(i + 1) % n],
                                              p.vertices[j], p.vertices[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

inline void validate_polygon(const Polygon2& p) {
  if (p.vertices.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  if (polygon_signed_area(p) <= 0.0)
    throw std::invalid_argument("polygon must be counterclockwise with positive area");
  if (!polygon_is_simple(p)) throw std::invalid_argument("polygon is self-intersecting");
}

// Ear clipping, O(n^2). Every output triangle is counterclockwise
// (equi-oriented with I_2).
inline Partition triangulate(const Polygon2& polygon) {
  validate_polygon(polygon);
  std::vector<Point2> verts = polygon.vertices;
  Partition out;
  out.triangles.reserve(verts.size() - 2);
  std::size_t guard = 0;
  const std::size_t max_steps = verts.size() * verts.size() + 16;
  while (verts.size() > 3) {
    if (++guard > max_steps) throw std::invalid_argument("ear clipping failed to make progress");
    bool clipped = false;
    const std::size_t n = verts.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 prev = verts[(i + n - 1) % n];
      const Point2 cur = verts[i];
      const Point2 next = verts[(i + 1) % n];
      if (perp_dot(cur - prev, next - cur) <= 0.0) continue;  // reflex or flat corner
      bool ear = true;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || j == (i + n - 1) % n || j == (i + 1) % n) continue;
        if (detail::point_in_triangle(verts[j], prev, cur, next)) {
          ear = false;
          break;
        }
      }
      if (!ear) continue;
      out.triangles.push_back({prev, cur, next});
      verts.erase(verts.begin() + long(i));
      clipped = true;
      break;
    }
    if (!clipped) throw std::invalid_argument("no ear found; polygon is degenerate");
  }
  out.triangles.push_back({verts[0], verts[1], verts[2]});
  out.mesh_norm = compute_mesh_norm(out.triangles);
  return out;
}

// Four-way midpoint split. Children are similar to the parent (so the
// balanced-vertex geometry is preserved) and the mesh norm halves.
inline Partition refine_midpoint(const Partition& pi) {
  Partition out;
  out.triangles.reserve(pi.triangles.size() * 4);
  for (const auto& t : pi.triangles) {
    const Point2 ab = 0.5 * (t.a + t.b);
    const Point2 bc = 0.5 * (t.b + t.c);
    const Point2 ca = 0.5 * (t.c + t.a);
    out.triangles.push_back({t.a, ab, ca});
    out.triangles.push_back({ab, t.b, bc});
    out.triangles.push_back({ca, bc, t.c});
    out.triangles.push_back({ab, bc, ca});
  }
  out.mesh_norm = compute_mesh_norm(out.triangles);
  return out;
}

// The local Schwarz triangle family: a at the origin, b and c on the line
// x2 = 1/(2n) at x1 = +-pi/m, so <a;b;c> . I_2 = pi/(m n) and the mirror
// vertex of a is (0, 1/n).
inline OrientedTriangle2 schwarz_local_triangle(int m, int n) {
  if (m < 1 || n < 1) throw std::invalid_argument("schwarz_local_triangle: m, n >= 1");
  const double bx = M_PI / m;
  const double y = 1.0 / (2.0 * n);
  return {{0.0, 0.0}, {bx, y}, {-bx, y}};
}

// Lantern partition of [0, 2pi] x [0, height]: n rows of 2m congruent
// isosceles triangles (base 2pi/m, height height/n), apexes alternating
// up/down, consecutive rows offset by half a period. The construction
// closes up under the 2pi period of the angular coordinate: each row's
// seam triangle extends past 2pi by exactly the strip the row misses near
// 0, so the total area is exactly 2pi * height and the image polyhedron on
// a cylinder is the classical closed lantern.
inline Partition schwarz_lantern_partition(int m, int n, double height) {
  if (m < 3 || n < 1) throw std::invalid_argument("schwarz_lantern_partition: m >= 3, n >= 1");
  if (height <= 0.0) throw std::invalid_argument("schwarz_lantern_partition: height > 0");
  const double w = 2.0 * M_PI / m;
  const double dz = height / n;
  Partition out;
  out.triangles.reserve(std::size_t(2) * m * n);
  for (int j = 0; j < n; ++j) {
    const double z0 = j * dz;
    const double z1 = (j + 1) * dz;
    const double off = (j % 2 == 0) ? 0.0 : 0.5 * w;
    for (int i = 0; i < m; ++i) {
      const double b0 = off + i * w;        // bottom vertex i
      const double b1 = off + (i + 1) * w;  // bottom vertex i+1
      const double t0 = b0 + 0.5 * w;       // top vertex above the gap
      const double t1 = b1 + 0.5 * w;
      out.triangles.push_back({{b0, z0}, {b1, z0}, {t0, z1}});  // apex up
      out.triangles.push_back({{t0, z1}, {b1, z0}, {t1, z1}});  // apex down
    }
  }
  out.mesh_norm = compute_mesh_norm(out.triangles);
  return out;
}

// Exact inscribed-polyhedron area of the lantern on a cylinder of radius
// rho: all 2mn triangles are congruent, each with image area
// rho sin(pi/m) sqrt((h/n)^2 + rho^2 (1 - cos(pi/m))^2); with n growing
// faster than m^2 the sum diverges even though the mesh norm goes to zero.
inline double lantern_area_closed_form(double rho, int m, int n, double height) {
  const double per_triangle =
      rho * std::sin(M_PI / m) * std::hypot(height / n, rho * (1.0 - std::cos(M_PI / m)));
  return 2.0 * m * n * per_triangle;
}

struct ValidationReport {
  double area_sum = 0.0;
  double polygon_area = 0.0;
  double area_rel_err = 0.0;
  bool area_ok = false;
  int flipped = 0;       // triangles oriented against I_2
  int degenerate = 0;
  int unbalanced = 0;    // triangles whose diameter vertex fails the balance test
  int overlapping_pairs = 0;
  bool overlap_checked = false;  // pairwise test runs only for <= 10^4 triangles

  bool orientation_ok() const { return flipped == 0; }
  bool nondegenerate_ok() const { return degenerate == 0; }
  bool balanced_ok() const { return unbalanced == 0; }
  bool overlap_ok() const { return !overlap_checked || overlapping_pairs == 0; }
  bool ok() const {
    return area_ok && orientation_ok() && nondegenerate_ok() && balanced_ok() && overlap_ok();
  }
};

inline constexpr double kAreaAccountingTol = 1e-9;
inline constexpr std::size_t kPairwiseOverlapLimit = 10000;

// Checks the properties the area algorithm actually uses: area accounting
// against the polygon, uniform orientation, nondegeneracy, and existence of
// a balanced mirror vertex per triangle. Partitions need not be conforming
// triangulations. Overlap is detected by area accounting, plus a pairwise
// bounding-box and edge-crossing test for small partitions.
inline ValidationReport validate_partition(const Partition& pi, const Polygon2& polygon) {
  ValidationReport r;
  r.polygon_area = polygon_area(polygon);
  double sum = 0.0, comp = 0.0;
  for (const auto& t : pi.triangles) {
    const double a = t.area();
    const double y = a - comp;  // Kahan
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
    if (t.bivector_scalar() <= 0.0) ++r.flipped;
    if (t.degenerate()) {
      ++r.degenerate;
      continue;
    }
    if (!is_balanced(mirror_vertex(t, balanced_vertex_choice(t)))) ++r.unbalanced;
  }
  r.area_sum = sum;
  r.area_rel_err = std::abs(sum - r.polygon_area) / std::max(r.polygon_area, 1e-300);
  r.area_ok = r.area_rel_err <= kAreaAccountingTol;

  if (pi.triangles.size() <= kPairwiseOverlapLimit) {
    r.overlap_checked = true;
    struct Box {
      double x0, y0, x1, y1;
    };
    std::vector<Box> boxes;
    boxes.reserve(pi.triangles.size());
    for (const auto& t : pi.triangles) {
      boxes.push_back({std::min({t.a.x, t.b.x, t.c.x}), std::min({t.a.y, t.b.y, t.c.y}),
                       std::max({t.a.x, t.b.x, t.c.x}), std::max({t.a.y, t.b.y, t.c.y})});
    }
    for (std::size_t i = 0; i < pi.triangles.size(); ++i) {
      for (std::size_t j = i + 1; j < pi.triangles.size(); ++j) {
        if (boxes[i].x1 < boxes[j].x0 || boxes[j].x1 < boxes[i].x0 ||
            boxes[i].y1 < boxes[j].y0 || boxes[j].y1 < boxes[i].y0)
          continue;
        const Point2 ei[3][2] = {{pi.triangles[i].a, pi.triangles[i].b},
                                 {pi.triangles[i].b, pi.triangles[i].c},
                                 {pi.triangles[i].c, pi.triangles[i].a}};
        const Point2 ej[3][2] = {{pi.triangles[j].a, pi.triangles[j].b},
                                 {pi.triangles[j].b, pi.triangles[j].c},
                                 {pi.triangles[j].c, pi.triangles[j].a}};
        bool crossing = false;
        for (int u = 0; u < 3 && !crossing; ++u)
          for (int v = 0; v < 3 && !crossing; ++v)
            crossing = detail::segments_properly_intersect(ei[u][0], ei[u][1], ej[v][0], ej[v][1]);
        if (crossing) ++r.overlapping_pairs;
      }
    }
  }
  return r;
}

// CSV schema: tri_id, ax, ay, bx, by, cx, cy.
inline void write_partition_csv(const Partition& pi, std::ostream& out) {
  out << "tri_id,ax,ay,bx,by,cx,cy\r\n";
  char buf[256];
  for (std::size_t i = 0; i < pi.triangles.size(); ++i) {
    const auto& t = pi.triangles[i];
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\r\n", i, t.a.x,
                  t.a.y, t.b.x, t.b.y, t.c.x, t.c.y);
    out << buf;
  }
}

inline Partition read_partition_csv(std::istream& in) {
  Partition pi;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {  // header
      first = false;
      continue;
    }
    std::stringstream row(line);
    std::string field;
    std::vector<double> vals;
    while (std::getline(row, field, ',')) vals.push_back(std::stod(field));
    if (vals.size() != 7) throw std::invalid_argument("partition CSV row needs 7 fields");
    pi.triangles.push_back({{vals[1], vals[2]}, {vals[3], vals[4]}, {vals[5], vals[6]}});
  }
  pi.mesh_norm = compute_mesh_norm(pi.triangles);
  return pi;
}

}  // namespace lantern
