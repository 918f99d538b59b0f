#pragma once
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lantern/expr.hpp"
#include "lantern/multivector.hpp"
#include "lantern/triangle.hpp"

namespace lantern {

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A scalar field with its gradient, the psi of graph surfaces.
struct ScalarField {
  std::function<double(Point2)> value;
  std::function<Point2(Point2)> gradient;  // may be null
};

// Map from an open subset of E_2 into E_n. eval returns a grade-1 element
// of G_n; partials, when present, returns the pair (d/dx1 s, d/dx2 s).
// All callables must be pure; a Surface is immutable once built.
struct Surface {
  int dim_out = 3;
  std::string name;
  std::function<bool(Point2)> domain;  // null: all of E_2
  std::function<ga::Multivector(Point2)> eval;
  std::function<std::pair<ga::Multivector, ga::Multivector>(Point2)> partials;  // may be null

  bool contains(Point2 p) const { return !domain || domain(p); }

  void require_inside(Point2 p) const {
    if (!contains(p))
      throw DomainError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                        ") outside the domain of surface '" + name + "'");
  }

  double component(int j, Point2 p) const { return eval(p).vec(j); }
};

// Plane transformation f: E_2 -> E_2 with components phi1, phi2.
struct PlaneTransform {
  std::string name;
  std::function<Point2(Point2)> eval;
  std::function<std::pair<Point2, Point2>(Point2)> gradients;  // (grad phi1, grad phi2), may be null

  double jacobian_det(Point2 p) const {
    if (!gradients) throw std::invalid_argument("transform '" + name + "' has no gradients");
    auto [g1, g2] = gradients(p);
    return perp_dot(g1, g2);
  }
};

// Circular right cylinder of radius rho:
// s(x) = rho cos(x1) h1 + rho sin(x1) h2 + x2 h3, with analytic partials
// d1 s = -rho sin(x1) h1 + rho cos(x1) h2 and d2 s = h3, so the tangent
// bivector is rho cos(x1) h2^h3 + rho sin(x1) h3^h1 with constant norm rho.
inline Surface make_cylinder(double rho) {
  if (rho <= 0.0) throw std::invalid_argument("cylinder radius must be positive");
  Surface s;
  s.dim_out = 3;
  s.name = "cylinder(rho=" + std::to_string(rho) + ")";
  s.eval = [rho](Point2 p) {
    return ga::Multivector::vector({rho * std::cos(p.x), rho * std::sin(p.x), p.y});
  };
  s.partials = [rho](Point2 p) {
    return std::make_pair(
        ga::Multivector::vector({-rho * std::sin(p.x), rho * std::cos(p.x), 0.0}),
        ga::Multivector::vector({0.0, 0.0, 1.0}));
  };
  return s;
}

// Graph surface s(x) = x + psi(x) h3. Its tangent bivector is
// h1^h2 - (grad psi)* and has norm sqrt(1 + |grad psi|^2).
inline Surface make_graph(const ScalarField& psi, std::string name = "graph") {
  Surface s;
  s.dim_out = 3;
  s.name = std::move(name);
  auto value = psi.value;
  s.eval = [value](Point2 p) { return ga::Multivector::vector({p.x, p.y, value(p)}); };
  if (psi.gradient) {
    auto grad = psi.gradient;
    s.partials = [grad](Point2 p) {
      const Point2 g = grad(p);
      return std::make_pair(ga::Multivector::vector({1.0, 0.0, g.x}),
                            ga::Multivector::vector({0.0, 1.0, g.y}));
    };
  }
  return s;
}

// The plane itself, embedded with zero third component.
inline Surface make_flat() {
  Surface s = make_graph({[](Point2) { return 0.0; }, [](Point2) { return Point2{0.0, 0.0}; }});
  s.name = "flat";
  return s;
}

// Surface from three component expressions over u, v.
inline Surface make_custom(const std::string& e1, const std::string& e2, const std::string& e3) {
  auto f1 = expr::parse(e1);
  auto f2 = expr::parse(e2);
  auto f3 = expr::parse(e3);
  // plain locals: clang does not capture structured bindings in lambdas
  const auto g1 = expr::gradient(f1);
  const auto g2 = expr::gradient(f2);
  const auto g3 = expr::gradient(f3);
  const auto d1u = g1.first, d1v = g1.second;
  const auto d2u = g2.first, d2v = g2.second;
  const auto d3u = g3.first, d3v = g3.second;
  Surface s;
  s.dim_out = 3;
  s.name = "custom(" + e1 + "," + e2 + "," + e3 + ")";
  s.eval = [f1, f2, f3](Point2 p) {
    return ga::Multivector::vector(
        {expr::eval(f1, p.x, p.y), expr::eval(f2, p.x, p.y), expr::eval(f3, p.x, p.y)});
  };
  s.partials = [d1u, d2u, d3u, d1v, d2v, d3v](Point2 p) {
    return std::make_pair(
        ga::Multivector::vector({expr::eval(d1u, p.x, p.y), expr::eval(d2u, p.x, p.y),
                                 expr::eval(d3u, p.x, p.y)}),
        ga::Multivector::vector({expr::eval(d1v, p.x, p.y), expr::eval(d2v, p.x, p.y),
                                 expr::eval(d3v, p.x, p.y)}));
  };
  return s;
}

inline Surface with_domain(Surface s, Point2 lo, Point2 hi) {
  s.domain = [lo, hi](Point2 p) {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  };
  return s;
}

// Central finite differences with step 1e-5 * max(1, |x|); used when no
// analytic partials are registered.
inline constexpr double kFdStep = 1e-5;

inline std::pair<ga::Multivector, ga::Multivector> numeric_partials(const Surface& s, Point2 x) {
  const double h = kFdStep * std::max(1.0, norm(x));
  const auto du = (s.eval({x.x + h, x.y}) - s.eval({x.x - h, x.y})) / (2.0 * h);
  const auto dv = (s.eval({x.x, x.y + h}) - s.eval({x.x, x.y - h})) / (2.0 * h);
  return {du, dv};
}

inline std::pair<ga::Multivector, ga::Multivector> surface_partials(const Surface& s, Point2 x) {
  return s.partials ? s.partials(x) : numeric_partials(s, x);
}

// d1 s(x) ^ d2 s(x), the oriented tangent-plane direction at s(x).
inline ga::Multivector tangent_bivector(const Surface& s, Point2 x) {
  s.require_inside(x);
  auto [du, dv] = surface_partials(s, x);
  return ga::outer_product(du, dv);
}

// Projection s_{j,k}(x) = sigma_j(x) e1 + sigma_k(x) e2, 1 <= j < k <= n.
inline PlaneTransform component_transform(const Surface& s, int j, int k) {
  if (j < 1 || k <= j || k > s.dim_out)
    throw std::invalid_argument("component_transform: need 1 <= j < k <= n");
  PlaneTransform t;
  t.name = s.name + "[" + std::to_string(j) + "," + std::to_string(k) + "]";
  t.eval = [s, j, k](Point2 p) {
    const auto v = s.eval(p);
    return Point2{v.vec(j), v.vec(k)};
  };
  t.gradients = [s, j, k](Point2 p) {
    auto [du, dv] = surface_partials(s, p);
    return std::make_pair(Point2{du.vec(j), dv.vec(j)}, Point2{du.vec(k), dv.vec(k)});
  };
  return t;
}

namespace detail {

// Split "name(arg1,arg2,...)" respecting nested parentheses.
inline bool split_call(const std::string& spec, std::string& fn, std::vector<std::string>& args) {
  const auto open = spec.find('(');
  if (open == std::string::npos || spec.back() != ')') return false;
  fn = spec.substr(0, open);
  args.clear();
  int depth = 0;
  std::string cur;
  for (std::size_t i = open + 1; i + 1 < spec.size(); ++i) {
    const char c = spec[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      args.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  args.push_back(cur);
  return true;
}

inline std::string strip(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace detail

// Registry grammar: cylinder(rho=<float>) | flat | graph(<expr>) |
// custom(<expr>,<expr>,<expr>) with <expr> over u, v.
inline Surface parse_surface(const std::string& spec_in) {
  const std::string spec = detail::strip(spec_in);
  if (spec == "flat") return make_flat();
  std::string fn;
  std::vector<std::string> args;
  if (!detail::split_call(spec, fn, args))
    throw std::invalid_argument("unrecognized surface '" + spec + "'");
  if (fn == "cylinder") {
    if (args.size() != 1) throw std::invalid_argument("cylinder takes one argument, rho=<float>");
    const std::string a = detail::strip(args[0]);
    if (a.rfind("rho=", 0) != 0)
      throw std::invalid_argument("cylinder argument must be rho=<float>, got '" + a + "'");
    std::size_t used = 0;
    const double rho = std::stod(a.substr(4), &used);
    if (used != a.size() - 4) throw std::invalid_argument("bad cylinder radius '" + a + "'");
    return make_cylinder(rho);
  }
  if (fn == "graph") {
    if (args.size() != 1) throw std::invalid_argument("graph takes one expression");
    auto psi = expr::parse(detail::strip(args[0]));
    const auto grads = expr::gradient(psi);
    const auto gu = grads.first, gv = grads.second;
    ScalarField field{
        [psi](Point2 p) { return expr::eval(psi, p.x, p.y); },
        [gu, gv](Point2 p) { return Point2{expr::eval(gu, p.x, p.y), expr::eval(gv, p.x, p.y)}; }};
    return make_graph(field, "graph(" + detail::strip(args[0]) + ")");
  }
  if (fn == "custom") {
    if (args.size() != 3) throw std::invalid_argument("custom takes three expressions");
    return make_custom(detail::strip(args[0]), detail::strip(args[1]), detail::strip(args[2]));
  }
  throw std::invalid_argument("unrecognized surface '" + spec + "'");
}

// Transform registry: identity | custom(<expr>,<expr>).
inline PlaneTransform parse_transform(const std::string& spec_in) {
  const std::string spec = detail::strip(spec_in);
  if (spec == "identity") {
    PlaneTransform t;
    t.name = "identity";
    t.eval = [](Point2 p) { return p; };
    t.gradients = [](Point2) { return std::make_pair(Point2{1, 0}, Point2{0, 1}); };
    return t;
  }
  std::string fn;
  std::vector<std::string> args;
  if (detail::split_call(spec, fn, args) && fn == "custom" && args.size() == 2) {
    auto f1 = expr::parse(detail::strip(args[0]));
    auto f2 = expr::parse(detail::strip(args[1]));
    const auto g1 = expr::gradient(f1);
    const auto g2 = expr::gradient(f2);
    const auto d1u = g1.first, d1v = g1.second;
    const auto d2u = g2.first, d2v = g2.second;
    PlaneTransform t;
    t.name = "custom(" + detail::strip(args[0]) + "," + detail::strip(args[1]) + ")";
    t.eval = [f1, f2](Point2 p) {
      return Point2{expr::eval(f1, p.x, p.y), expr::eval(f2, p.x, p.y)};
    };
    t.gradients = [d1u, d1v, d2u, d2v](Point2 p) {
      return std::make_pair(Point2{expr::eval(d1u, p.x, p.y), expr::eval(d1v, p.x, p.y)},
                            Point2{expr::eval(d2u, p.x, p.y), expr::eval(d2v, p.x, p.y)});
    };
    return t;
  }
  throw std::invalid_argument("unrecognized transform '" + spec + "'");
}

}  // namespace lantern
