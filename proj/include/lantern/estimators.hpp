#pragma once
#include <cmath>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "lantern/multivector.hpp"
#include "lantern/partition.hpp"
#include "lantern/quadrature.hpp"
#include "lantern/surface.hpp"
#include "lantern/triangle.hpp"

namespace lantern {

struct EstimatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EstimatorOptions {
  // Accept an unbalanced vertex as long as max{|v|,|l-v|}/|l| stays below
  // kappa (the relaxed convergence hypothesis); off by default.
  bool relaxed = false;
  double kappa = 4.0;
  int threads = 1;
};

inline void require_nondegenerate(const OrientedTriangle2& t, const char* who) {
  if (t.degenerate()) throw EstimatorError(std::string(who) + ": degenerate triangle");
}

// Inscribed mean bivector <s(a);s(b);s(c)> / (<a;b;c> . I_2): the secant-
// plane estimator the lantern construction defeats. The quotient is
// orientation invariant, both factors flip sign together.
inline ga::Multivector mean_bivector_naive(const Surface& s, const OrientedTriangle2& t) {
  require_nondegenerate(t, "mean_bivector_naive");
  s.require_inside(t.a);
  s.require_inside(t.b);
  s.require_inside(t.c);
  const auto inscribed = triangle_bivector(s.eval(t.a), s.eval(t.b), s.eval(t.c));
  return inscribed / t.bivector_scalar();
}

struct BivectorEstimate {
  ga::Multivector value;
  OrientedTriangle2 triangle;
  MirrorData mirror;
  double plane_bivector_scalar = 0.0;  // 2 <a;b;c> . I_2, the denominator
};

namespace detail {

inline void check_vertex_usable(const MirrorData& md, const OrientedTriangle2& t,
                                const EstimatorOptions& opt, const char* who) {
  if (is_balanced(md)) return;
  if (opt.relaxed) {
    const Point2 l = t.side(md.vertex);
    const double ln = norm(l);
    const double measure = std::max(norm(md.v), norm(l - md.v)) / ln;
    if (measure <= opt.kappa) return;
    throw EstimatorError(std::string(who) + ": vertex " + name(md.vertex) +
                         " exceeds the relaxed bound (measure " + std::to_string(measure) +
                         " > kappa " + std::to_string(opt.kappa) + ")");
  }
  throw EstimatorError(std::string(who) + ": mirror vertex " + name(md.vertex) +
                       " is not balanced (tau = " + std::to_string(md.tau) + ")");
}

inline void check_reflected_inside(const Surface& s, const OrientedTriangle2& refl) {
  s.require_inside(refl.a);
  s.require_inside(refl.b);
  s.require_inside(refl.c);
}

}  // namespace detail

// Inscribed balanced mean bivector
//   [s(x') - s(x)] ^ [s(x-) - s(x+)] / (2 <a;b;c> . I_2)
// for the chosen vertex x with mirror x'. Converges to d1 s ^ d2 s for
// every shrinking family of nondegenerate triangles.
inline BivectorEstimate balanced_mean_bivector(const Surface& s, const OrientedTriangle2& t,
                                               VertexId which,
                                               const EstimatorOptions& opt = {}) {
  require_nondegenerate(t, "balanced_mean_bivector");
  const MirrorData md = mirror_vertex(t, which);
  detail::check_vertex_usable(md, t, opt, "balanced_mean_bivector");
  s.require_inside(t.a);
  s.require_inside(t.b);
  s.require_inside(t.c);
  detail::check_reflected_inside(s, reflected_triangle(t, md));

  Point2 x, xp, xm;
  detail::roles(t, which, x, xp, xm);
  const auto numerator =
      ga::outer_product(s.eval(md.x_prime) - s.eval(x), s.eval(xm) - s.eval(xp));
  BivectorEstimate est;
  est.plane_bivector_scalar = 2.0 * t.bivector_scalar();
  est.value = numerator / est.plane_bivector_scalar;
  est.triangle = t;
  est.mirror = md;
  return est;
}

// Jacobian-determinant estimate for a plane transformation,
//   {[f(x') - f(x)] ^ [f(x-) - f(x+)]} . I_2 / (2 <a;b;c> . I_2),
// exact for affine f on every nondegenerate triangle.
inline double jacobian_estimate(const PlaneTransform& f, const OrientedTriangle2& t,
                                VertexId which, const EstimatorOptions& opt = {}) {
  require_nondegenerate(t, "jacobian_estimate");
  const MirrorData md = mirror_vertex(t, which);
  detail::check_vertex_usable(md, t, opt, "jacobian_estimate");
  Point2 x, xp, xm;
  detail::roles(t, which, x, xp, xm);
  const double numerator = perp_dot(f.eval(md.x_prime) - f.eval(x), f.eval(xm) - f.eval(xp));
  return numerator / (2.0 * t.bivector_scalar());
}

struct GeneralizedEstimate {
  ga::Multivector value;
  double denominator = 0.0;       // [<a;b;c> - <d;b;c>] . I_2
  double relaxation_measure = 0.0;  // max{|v|, |l_a - v|} / |l_a| with v from the d-midpoint
  bool within_bound = false;
};

// Quotient with an arbitrary fourth point d in place of the mirror vertex:
//   [<s(a);s(b);s(c)> - <s(d);s(b);s(c)>] / ([<a;b;c> - <d;b;c>] . I_2).
// Reduces to the balanced mean bivector when d is the mirror vertex of a.
// Being bounded in the relaxation measure is the caller's responsibility;
// the measure is computed and reported.
inline GeneralizedEstimate generalized_balanced_bivector(const Surface& s,
                                                         const OrientedTriangle2& t, Point2 d,
                                                         const EstimatorOptions& opt = {}) {
  s.require_inside(t.a);
  s.require_inside(t.b);
  s.require_inside(t.c);
  s.require_inside(d);
  const OrientedTriangle2 dbc{d, t.b, t.c};
  GeneralizedEstimate est;
  est.denominator = t.bivector_scalar() - dbc.bivector_scalar();
  if (est.denominator == 0.0)
    throw EstimatorError("generalized_balanced_bivector: zero denominator");
  const auto numerator = ga::outer_product(s.eval(d) - s.eval(t.a), s.eval(t.c) - s.eval(t.b));
  est.value = numerator / est.denominator;
  const Point2 mid = 0.5 * (t.a + d);
  const Point2 v = t.c - mid;
  const Point2 la = t.side(VertexId::A);
  est.relaxation_measure = std::max(norm(v), norm(la - v)) / norm(la);
  est.within_bound = est.relaxation_measure <= opt.kappa;
  return est;
}

namespace detail {

// Per-triangle term of the area sum: |[s(x') - s(x)] ^ [s(x-) - s(x+)]| at
// the diameter-opposite vertex, which the geometry guarantees balanced.
inline double balanced_area_term(const Surface& s, const OrientedTriangle2& t,
                                 const EstimatorOptions& opt) {
  require_nondegenerate(t, "area_estimate_balanced");
  const VertexId which = balanced_vertex_choice(t);
  const MirrorData md = mirror_vertex(t, which);
  check_vertex_usable(md, t, opt, "area_estimate_balanced");
  s.require_inside(t.a);
  s.require_inside(t.b);
  s.require_inside(t.c);
  check_reflected_inside(s, reflected_triangle(t, md));
  Point2 x, xp, xm;
  roles(t, which, x, xp, xm);
  return ga::norm(ga::outer_product(s.eval(md.x_prime) - s.eval(x), s.eval(xm) - s.eval(xp)));
}

inline double naive_area_term(const Surface& s, const OrientedTriangle2& t) {
  s.require_inside(t.a);
  s.require_inside(t.b);
  s.require_inside(t.c);
  return ga::norm(triangle_bivector(s.eval(t.a), s.eval(t.b), s.eval(t.c)));
}

// Evaluate one term per triangle, possibly on several workers, then reduce
// in partition index order with compensated accumulation so the sum is
// bit-identical for every thread count.
inline double ordered_sum_of_terms(const std::function<double(std::size_t)>& term,
                                   std::size_t count, int threads) {
  std::vector<double> terms(count);
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) terms[i] = term(i);
  } else {
    const std::size_t workers = std::min<std::size_t>(std::size_t(threads), count);
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (std::size_t i = w; i < count; i += workers) terms[i] = term(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }
  double sum = 0.0, comp = 0.0;
  for (double v : terms) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace detail

// Area of s over the partition by the balanced rule,
//   (1/4) sum_i |[s(a_i') - s(a_i)] ^ [s(c_i) - s(b_i)]|,
// with each triangle relabeled so its diameter-opposite vertex plays a_i.
// Converges to the integral of |d1 s ^ d2 s| as the mesh norm goes to 0.
inline double area_estimate_balanced(const Surface& s, const Partition& pi,
                                     const EstimatorOptions& opt = {}) {
  const auto& tris = pi.triangles;
  return 0.25 * detail::ordered_sum_of_terms(
                    [&](std::size_t i) { return detail::balanced_area_term(s, tris[i], opt); },
                    tris.size(), opt.threads);
}

// Classical inscribed-polyhedron area, sum_i (1/2) |<s(a_i);s(b_i);s(c_i)>|;
// the baseline the lantern sequences break.
inline double area_estimate_naive(const Surface& s, const Partition& pi,
                                  const EstimatorOptions& opt = {}) {
  const auto& tris = pi.triangles;
  return 0.5 * detail::ordered_sum_of_terms(
                   [&](std::size_t i) { return detail::naive_area_term(s, tris[i]); },
                   tris.size(), opt.threads);
}

// Reference value for the area integral, independent of the estimators:
// adaptive quadrature of |d1 s ^ d2 s| over the polygon.
inline double area_integral_oracle(const Surface& s, const Polygon2& P, double rtol = 1e-8) {
  for (const auto& v : P.vertices) s.require_inside(v);
  return integrate_over_polygon([&](Point2 x) { return ga::norm(tangent_bivector(s, x)); }, P,
                                rtol);
}

// One convergence-study record: refinement parameter, estimate components,
// reference components, absolute and relative error.
struct EstimateRow {
  double parameter = 0.0;
  std::string label;
  std::vector<double> estimate;
  std::vector<double> reference;
  double abs_err = 0.0;
  double rel_err = 0.0;
};

struct EstimateTable {
  std::vector<EstimateRow> rows;
  double observed_order = 0.0;  // least-squares slope of log err vs log parameter
  bool exact = false;           // all errors at rounding level; the slope is meaningless
};

inline constexpr double kExactErrorFloor = 1e-12;

inline EstimateRow make_row(double parameter, std::vector<double> estimate,
                            std::vector<double> reference, std::string label = "") {
  EstimateRow r;
  r.parameter = parameter;
  r.label = std::move(label);
  r.estimate = std::move(estimate);
  r.reference = std::move(reference);
  double err2 = 0.0, ref2 = 0.0;
  for (std::size_t i = 0; i < r.estimate.size(); ++i) {
    const double d = r.estimate[i] - r.reference[i];
    err2 += d * d;
    ref2 += r.reference[i] * r.reference[i];
  }
  r.abs_err = std::sqrt(err2);
  r.rel_err = r.abs_err / std::max(std::sqrt(ref2), 1e-300);
  return r;
}

// Least-squares slope of log(err) against log(parameter); also reports the
// fit quality so order claims can be gated on R^2.
struct OrderFit {
  double slope = 0.0;
  double r_squared = 1.0;
  int points = 0;
};

inline OrderFit fit_order(const std::vector<double>& params, const std::vector<double>& errs) {
  OrderFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (errs[i] > 0.0 && params[i] > 0.0) {
      lx.push_back(std::log(params[i]));
      ly.push_back(std::log(errs[i]));
    }
  }
  fit.points = int(lx.size());
  if (fit.points < 2) return fit;
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < fit.points; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= fit.points;
  my /= fit.points;
  double sxx = 0.0, sxy = 0.0, ss_tot = 0.0;
  for (int i = 0; i < fit.points; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    ss_tot += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  double ss_res = 0.0;
  for (int i = 0; i < fit.points; ++i) {
    const double pred = my + fit.slope * (lx[i] - mx);
    ss_res += (ly[i] - pred) * (ly[i] - pred);
  }
  fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

// Run estimate_fn over the schedule against a fixed reference and fit the
// observed order from the error decay.
inline EstimateTable convergence_study(
    const std::function<std::vector<double>(double)>& estimate_fn,
    const std::vector<double>& schedule, const std::vector<double>& reference) {
  if (schedule.empty()) throw std::invalid_argument("convergence_study: empty schedule");
  EstimateTable table;
  std::vector<double> params, errs;
  for (double p : schedule) {
    table.rows.push_back(make_row(p, estimate_fn(p), reference));
    params.push_back(p);
    errs.push_back(table.rows.back().abs_err);
  }
  table.exact = true;
  for (double e : errs)
    if (e > kExactErrorFloor) table.exact = false;
  table.observed_order = table.exact ? 0.0 : fit_order(params, errs).slope;
  return table;
}

}  // namespace lantern
