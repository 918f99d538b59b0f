#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lantern/partition.hpp"
#include "lantern/triangle.hpp"

namespace lantern {

struct QuadratureError : std::runtime_error {
  double best_estimate;
  QuadratureError(const std::string& what, double best)
      : std::runtime_error(what), best_estimate(best) {}
};

namespace quad {

// 7-point Gauss-Legendre nodes and weights on [-1, 1].
inline constexpr std::array<double, 7> kNodes = {
    -0.94910791234275852, -0.74153118559939444, -0.40584515137739717, 0.0,
    0.40584515137739717,  0.74153118559939444,  0.94910791234275852};
inline constexpr std::array<double, 7> kWeights = {
    0.12948496616886969, 0.27970539148927664, 0.38183005050511894, 0.41795918367346939,
    0.38183005050511894, 0.27970539148927664, 0.12948496616886969};

// Tensor 7x7 rule mapped onto a triangle through the collapsed-square map
// p(u,v) = (1-u) a + u(1-v) b + u v c, whose Jacobian is u |<a;b;c>.I_2|.
inline double gl7x7_triangle(const std::function<double(Point2)>& f,
                             const OrientedTriangle2& t) {
  const double twice_area = std::abs(t.bivector_scalar());
  double sum = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double u = 0.5 * (kNodes[i] + 1.0);
    const double wu = 0.5 * kWeights[i];
    double inner = 0.0;
    for (int j = 0; j < 7; ++j) {
      const double v = 0.5 * (kNodes[j] + 1.0);
      const double wv = 0.5 * kWeights[j];
      const Point2 p = (1.0 - u) * t.a + (u * (1.0 - v)) * t.b + (u * v) * t.c;
      inner += wv * f(p);
    }
    sum += wu * u * inner;
  }
  return sum * twice_area;
}

// Split across the midpoint of the longest edge.
inline std::pair<OrientedTriangle2, OrientedTriangle2> bisect_longest_edge(
    const OrientedTriangle2& t) {
  const double la = norm(t.c - t.b);
  const double lb = norm(t.a - t.c);
  const double lc = norm(t.b - t.a);
  if (la >= lb && la >= lc) {
    const Point2 mid = 0.5 * (t.b + t.c);
    return {{t.a, t.b, mid}, {t.a, mid, t.c}};
  }
  if (lb >= lc) {
    const Point2 mid = 0.5 * (t.c + t.a);
    return {{t.a, t.b, mid}, {mid, t.b, t.c}};
  }
  const Point2 mid = 0.5 * (t.a + t.b);
  return {{t.a, mid, t.c}, {mid, t.b, t.c}};
}

inline constexpr std::size_t kMaxCells = 400000;

struct Cell {
  OrientedTriangle2 tri;
  double value = 0.0;   // four-grandchild refined estimate
  double error = 0.0;   // summed Richardson gaps of the last two levels
  std::size_t seq = 0;  // stable tie break for determinism
};

// A single refinement gap can understate the error when the integrand has a
// kink placed just so against the nodes; two consecutive gaps do not
// conspire together, so their sum is the estimate.
inline Cell make_cell(const std::function<double(Point2)>& f, const OrientedTriangle2& t,
                      std::size_t seq) {
  Cell c;
  c.tri = t;
  c.seq = seq;
  const double coarse = gl7x7_triangle(f, t);
  const auto [t1, t2] = bisect_longest_edge(t);
  const double fine1 = gl7x7_triangle(f, t1) + gl7x7_triangle(f, t2);
  double fine2 = 0.0;
  for (const auto& child : {t1, t2}) {
    const auto [g1, g2] = bisect_longest_edge(child);
    fine2 += gl7x7_triangle(f, g1) + gl7x7_triangle(f, g2);
  }
  c.value = fine2;
  c.error = std::abs(fine1 - coarse) + std::abs(fine2 - fine1);
  return c;
}

}  // namespace quad

// Adaptive integral of f over the polygon P: keep bisecting the cell with
// the largest error estimate until the summed estimate drops below
// rtol * |integral|. Single threaded with a stable ordering, so the result
// is deterministic. Throws QuadratureError carrying the best estimate if
// the cell budget runs out first.
inline double integrate_over_polygon(const std::function<double(Point2)>& f, const Polygon2& P,
                                     double rtol = 1e-8,
                                     std::size_t max_cells = quad::kMaxCells) {
  const Partition base = triangulate(P);
  std::vector<quad::Cell> cells;
  std::size_t seq = 0;
  for (const auto& t : base.triangles) cells.push_back(quad::make_cell(f, t, seq++));

  const auto worse = [](const quad::Cell& a, const quad::Cell& b) {
    return a.error != b.error ? a.error < b.error : a.seq > b.seq;  // max-heap by error
  };
  std::make_heap(cells.begin(), cells.end(), worse);

  const auto totals = [&cells]() {
    double value = 0.0, err = 0.0;
    for (const auto& c : cells) {
      value += c.value;
      err += c.error;
    }
    return std::pair{value, err};
  };

  auto [value_sum, err_sum] = totals();
  for (;;) {
    if (err_sum <= rtol * std::max(std::abs(value_sum), 1e-300)) {
      // running sums drift; confirm on exact totals before accepting
      std::tie(value_sum, err_sum) = totals();
      if (err_sum <= rtol * std::max(std::abs(value_sum), 1e-300)) return value_sum;
    }
    if (cells.size() >= max_cells)
      throw QuadratureError("quadrature cell budget exhausted (error estimate " +
                                std::to_string(err_sum) + ")",
                            value_sum);
    std::pop_heap(cells.begin(), cells.end(), worse);
    const quad::Cell hot = cells.back();
    cells.pop_back();
    value_sum -= hot.value;
    err_sum -= hot.error;
    const auto [t1, t2] = quad::bisect_longest_edge(hot.tri);
    for (const auto& child : {t1, t2}) {
      cells.push_back(quad::make_cell(f, child, seq++));
      value_sum += cells.back().value;
      err_sum += cells.back().error;
      std::push_heap(cells.begin(), cells.end(), worse);
    }
  }
}

}  // namespace lantern
