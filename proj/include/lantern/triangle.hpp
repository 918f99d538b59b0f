#pragma once
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lantern/multivector.hpp"

namespace lantern {

// Points of E_2, identified with grade-1 elements of G_2; x and y are the
// components along the fixed ordered orthonormal basis.
struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline Point2 operator-(Point2 a) { return {-a.x, -a.y}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
// (a ^ b) . I_2, the signed parallelogram area.
inline double perp_dot(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double norm_sq(Point2 a) { return a.x * a.x + a.y * a.y; }

inline ga::Multivector to_mv(Point2 p) { return ga::Multivector::vector({p.x, p.y}); }

// Mirror image of x across the line through the origin with direction v,
// v x v^{-1} = 2 (x.v / |v|^2) v - x. Works even when x is a multiple of v.
inline Point2 reflect(Point2 x, Point2 v) {
  const double v2 = norm_sq(v);
  if (v2 == 0.0) throw std::invalid_argument("reflect: zero direction");
  return (2.0 * dot(x, v) / v2) * v - x;
}

// Same reflection expressed in G_n on grade-1 elements.
inline ga::Multivector reflect(const ga::Multivector& x, const ga::Multivector& v) {
  if (!v.has_grade_only(1) || !x.has_grade_only(1))
    throw std::invalid_argument("reflect: grade-1 inputs required");
  const double v2 = ga::scalar_product(v, v);
  if (v2 == 0.0) throw std::invalid_argument("reflect: zero direction");
  return (2.0 * ga::scalar_product(x, v) / v2) * v - x;
}

// <a;b;c> = a^b + b^c + c^a for points of E_n given as grade-1 elements;
// equals (b-a)^(c-a) and flips sign under odd vertex permutations.
inline ga::Multivector triangle_bivector(const ga::Multivector& a, const ga::Multivector& b,
                                         const ga::Multivector& c) {
  return ga::outer_product(b - a, c - a);
}

inline double triangle_area(const ga::Multivector& a, const ga::Multivector& b,
                            const ga::Multivector& c) {
  return 0.5 * ga::norm(triangle_bivector(a, b, c));
}

// Area from side lengths alone: (1/2) sqrt(|l_a|^2 |l_b|^2 - (l_a.l_b)^2).
// Agrees with triangle_area; kept as an independent route for cross-checks.
inline double triangle_area_metric(const ga::Multivector& a, const ga::Multivector& b,
                                   const ga::Multivector& c) {
  const auto la = c - b;
  const auto lb = a - c;
  const double g = ga::scalar_product(la, la) * ga::scalar_product(lb, lb) -
                   ga::scalar_product(la, lb) * ga::scalar_product(la, lb);
  return 0.5 * std::sqrt(std::max(0.0, g));
}

enum class VertexId { A, B, C };

inline const char* name(VertexId v) {
  switch (v) {
    case VertexId::A: return "A";
    case VertexId::B: return "B";
    default: return "C";
  }
}

// Triangle degenerates when |<a;b;c>| <= eps_deg * diam^2 (scale invariant).
inline constexpr double kDegenerateEps = 1e-12;
// Slack on the tau parameter when classifying a foot as inside the side.
inline constexpr double kBalanceEps = 1e-12;

// Ordered vertex triple in E_2. Sides l_a = c-b, l_b = a-c, l_c = b-a
// always sum to zero.
struct OrientedTriangle2 {
  Point2 a, b, c;

  // Side opposite the given vertex.
  Point2 side(VertexId v) const {
    switch (v) {
      case VertexId::A: return c - b;
      case VertexId::B: return a - c;
      default: return b - a;
    }
  }

  Point2 vertex(VertexId v) const {
    switch (v) {
      case VertexId::A: return a;
      case VertexId::B: return b;
      default: return c;
    }
  }

  // <a;b;c> . I_2, twice the signed area; positive when equi-oriented
  // with I_2.
  double bivector_scalar() const { return perp_dot(b - a, c - a); }

  double area() const { return 0.5 * std::abs(bivector_scalar()); }

  double diameter() const {
    return std::max({norm(c - b), norm(a - c), norm(b - a)});
  }

  bool degenerate() const {
    const double d = diameter();
    return std::abs(bivector_scalar()) <= kDegenerateEps * d * d;
  }

  OrientedTriangle2 reversed() const { return {a, c, b}; }
};

// Mirror data for one vertex x of [x, x+, x-]: the reflection x' of x across
// the opposite side's line, the midpoint foot, the half-offset u_x, the
// along-side component v_x = x- − foot, and tau with v_x = tau * l_x.
struct MirrorData {
  VertexId vertex;
  Point2 x_prime;
  Point2 x_bar;
  Point2 u;
  Point2 v;
  double tau;
};

namespace detail {
// Cyclic relabeling so the chosen vertex plays the role of x in [x, x+, x-].
inline void roles(const OrientedTriangle2& t, VertexId which, Point2& x, Point2& xp, Point2& xm) {
  switch (which) {
    case VertexId::A: x = t.a; xp = t.b; xm = t.c; break;
    case VertexId::B: x = t.b; xp = t.c; xm = t.a; break;
    default: x = t.c; xp = t.a; xm = t.b; break;
  }
}
}  // namespace detail

// Expanded linear-combination form of x' = x- + l_x l_{x+} l_x^{-1};
// no Clifford division needed.
inline MirrorData mirror_vertex(const OrientedTriangle2& t, VertexId which) {
  if (t.degenerate()) throw std::invalid_argument("mirror_vertex: degenerate triangle");
  Point2 x, xp, xm;
  detail::roles(t, which, x, xp, xm);
  const Point2 lx = xm - xp;
  const Point2 lxp = x - xm;
  const Point2 lxm = xp - x;
  const double lx2 = norm_sq(lx);
  const Point2 x_prime =
      -(x + (2.0 * dot(lxp, lx) / lx2) * xp + (2.0 * dot(lxm, lx) / lx2) * xm);
  MirrorData md;
  md.vertex = which;
  md.x_prime = x_prime;
  md.x_bar = 0.5 * (x_prime + x);
  md.u = 0.5 * (x_prime - x);
  md.v = xm - md.x_bar;
  md.tau = dot(md.v, lx) / lx2;
  return md;
}

// The reflected triangle [x', x+, x-]; what must stay inside the surface
// domain for the balanced estimators.
inline OrientedTriangle2 reflected_triangle(const OrientedTriangle2& t, const MirrorData& md) {
  Point2 x, xp, xm;
  detail::roles(t, md.vertex, x, xp, xm);
  return {md.x_prime, xp, xm};
}

// Balanced <=> the foot lies within the opposite side, i.e. tau in [0, 1];
// equivalent to |l_x| = |l_x - v_x| + |v_x|.
inline bool is_balanced(const MirrorData& md, double eps = kBalanceEps) {
  return md.tau >= -eps && md.tau <= 1.0 + eps;
}

// Vertex opposite a longest side (a diameter); always balanced. Ties break
// in the order A < B < C.
inline VertexId balanced_vertex_choice(const OrientedTriangle2& t) {
  if (t.degenerate()) throw std::invalid_argument("balanced_vertex_choice: degenerate triangle");
  const double la = norm(t.side(VertexId::A));
  const double lb = norm(t.side(VertexId::B));
  const double lc = norm(t.side(VertexId::C));
  if (la >= lb && la >= lc) return VertexId::A;
  if (lb >= lc) return VertexId::B;
  return VertexId::C;
}

}  // namespace lantern
