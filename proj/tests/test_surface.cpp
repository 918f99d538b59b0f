#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lantern/surface.hpp"

using namespace lantern;
using ga::Multivector;

namespace {

std::mt19937 g_rng(37);

Point2 random_point(double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  return {d(g_rng), d(g_rng)};
}

const ScalarField kPsiSquares{
    [](Point2 p) { return p.x * p.x + p.y * p.y; },
    [](Point2 p) { return Point2{2.0 * p.x, 2.0 * p.y}; }};

}  // namespace

TEST_CASE("cylinder") {
  const Surface cyl = make_cylinder(1.0);
  CHECK(cyl.dim_out == 3);
  CHECK(ga::approx_equal(cyl.eval({0.0, 0.0}), Multivector::vector({1.0, 0.0, 0.0})));

  SUBCASE("tangent bivector at the origin is rho h2^h3") {
    for (double rho : {1.0, 2.5}) {
      const Surface s = make_cylinder(rho);
      const auto biv = tangent_bivector(s, {0.0, 0.0});
      CHECK(ga::approx_equal(biv, Multivector::blade(3, 0b110, rho), 1e-14, 1e-14));
    }
  }

  SUBCASE("tangent bivector norm is rho everywhere") {
    const Surface s = make_cylinder(0.7);
    for (int i = 0; i < 100; ++i)
      CHECK(ga::norm(tangent_bivector(s, random_point(-8.0, 8.0))) ==
            doctest::Approx(0.7).epsilon(1e-13));
  }

  SUBCASE("tangent bivector matches rho cos h2^h3 + rho sin h3^h1") {
    const double rho = 1.3;
    const Surface s = make_cylinder(rho);
    for (int i = 0; i < 100; ++i) {
      const Point2 p = random_point(-8.0, 8.0);
      auto expected = Multivector::zero(3);
      expected[0b110] = rho * std::cos(p.x);   // h2^h3
      expected[0b101] = -rho * std::sin(p.x);  // h3^h1 = -e13
      CHECK(ga::approx_equal(tangent_bivector(s, p), expected, 1e-13, 1e-13));
    }
  }

  SUBCASE("quarter turn lands on h3^h1") {
    const auto biv = tangent_bivector(make_cylinder(1.0), {M_PI / 2.0, 0.3});
    auto expected = Multivector::zero(3);
    expected[0b101] = -1.0;
    CHECK(ga::approx_equal(biv, expected, 1e-13, 1e-13));
  }

  CHECK_THROWS_AS(make_cylinder(0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_cylinder(-1.0), std::invalid_argument);
}

TEST_CASE("graph surfaces") {
  SUBCASE("flat graph has the constant tangent bivector e12") {
    const Surface s = make_flat();
    for (int i = 0; i < 20; ++i)
      CHECK(ga::approx_equal(tangent_bivector(s, random_point()),
                             Multivector::blade(3, 0b011), 1e-14, 1e-14));
  }

  SUBCASE("psi = u gives norm sqrt(2)") {
    const Surface s = make_graph(
        {[](Point2 p) { return p.x; }, [](Point2) { return Point2{1.0, 0.0}; }});
    CHECK(ga::norm(tangent_bivector(s, random_point())) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  }

  SUBCASE("psi = u^2+v^2 at (1,0) gives norm sqrt(5)") {
    const Surface s = make_graph(kPsiSquares);
    CHECK(ga::norm(tangent_bivector(s, {1.0, 0.0})) ==
          doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  }

  SUBCASE("graph psi = u*v has tangent bivector e12 at the origin") {
    const Surface s = make_graph(
        {[](Point2 p) { return p.x * p.y; }, [](Point2 p) { return Point2{p.y, p.x}; }});
    CHECK(ga::approx_equal(tangent_bivector(s, {0.0, 0.0}), Multivector::blade(3, 0b011),
                           1e-14, 1e-14));
  }

  SUBCASE("|d1 s ^ d2 s| = sqrt(1 + |grad psi|^2)") {
    const char* fields[] = {"0", "u", "u^2+v^2", "sin(u)*cos(v)"};
    for (const char* psi : fields) {
      const Surface s = parse_surface(std::string("graph(") + psi + ")");
      const auto e = expr::parse(psi);
      auto [gu, gv] = expr::gradient(e);
      for (int i = 0; i < 100; ++i) {
        const Point2 p = random_point();
        const double gx = expr::eval(gu, p.x, p.y);
        const double gy = expr::eval(gv, p.x, p.y);
        const double expected = std::sqrt(1.0 + gx * gx + gy * gy);
        CHECK(ga::norm(tangent_bivector(s, p)) ==
              doctest::Approx(expected).epsilon(1e-9));
      }
    }
  }

  SUBCASE("tangent bivector equals e12 - dual of the gradient") {
    const Surface s = make_graph(kPsiSquares);
    for (int i = 0; i < 50; ++i) {
      const Point2 p = random_point();
      const auto grad3 = Multivector::vector({2.0 * p.x, 2.0 * p.y, 0.0});
      const auto expected = Multivector::blade(3, 0b011) - ga::dual3(grad3);
      CHECK(ga::approx_equal(tangent_bivector(s, p), expected, 1e-13, 1e-13));
    }
  }
}

TEST_CASE("analytic partials agree with central differences") {
  const Surface surfaces[] = {make_cylinder(1.0), make_cylinder(2.0), make_flat(),
                              make_graph(kPsiSquares),
                              make_custom("u*v", "sin(u)", "cos(v)+u")};
  for (const auto& s : surfaces) {
    CAPTURE(s.name);
    REQUIRE(bool(s.partials));
    for (int i = 0; i < 100; ++i) {
      const Point2 p = random_point();
      const auto [au, av] = s.partials(p);
      const auto [nu, nv] = numeric_partials(s, p);
      CHECK(ga::norm(au - nu) <= 1e-6);
      CHECK(ga::norm(av - nv) <= 1e-6);
    }
  }
}

TEST_CASE("bivector decomposition over component pairs") {
  // d1 s ^ d2 s = sum_{j<k} det2(grad sigma_j, grad sigma_k) h_j ^ h_k
  const Surface surfaces[] = {make_cylinder(1.5), make_graph(kPsiSquares),
                              make_custom("u+v", "u*v", "v^2")};
  for (const auto& s : surfaces) {
    CAPTURE(s.name);
    for (int i = 0; i < 50; ++i) {
      const Point2 p = random_point();
      auto assembled = Multivector::zero(3);
      for (int j = 1; j <= 3; ++j) {
        for (int k = j + 1; k <= 3; ++k) {
          const auto t = component_transform(s, j, k);
          const auto [g1, g2] = t.gradients(p);
          const unsigned mask = (1u << (j - 1)) | (1u << (k - 1));
          assembled[mask] = perp_dot(g1, g2);
        }
      }
      const auto direct = tangent_bivector(s, p);
      CHECK(ga::norm(direct - assembled) <= 1e-10 * (1.0 + ga::norm(direct)));
    }
  }
}

TEST_CASE("component transforms") {
  SUBCASE("cylinder (2,3) is (rho sin u, v)") {
    const double rho = 2.0;
    const auto t = component_transform(make_cylinder(rho), 2, 3);
    const Point2 p{0.6, -0.4};
    const Point2 q = t.eval(p);
    CHECK(q.x == doctest::Approx(rho * std::sin(0.6)).epsilon(1e-15));
    CHECK(q.y == doctest::Approx(-0.4).epsilon(1e-15));
  }

  SUBCASE("flat (1,2) is the identity") {
    const auto t = component_transform(make_flat(), 1, 2);
    const Point2 p{0.3, 0.8};
    const Point2 q = t.eval(p);
    CHECK(q.x == p.x);
    CHECK(q.y == p.y);
    CHECK(t.jacobian_det(p) == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("graph (1,3) is (u, psi)") {
    const auto t = component_transform(make_graph(kPsiSquares), 1, 3);
    const Point2 q = t.eval({2.0, 1.0});
    CHECK(q.x == 2.0);
    CHECK(q.y == doctest::Approx(5.0).epsilon(1e-15));
  }

  CHECK_THROWS_AS(component_transform(make_flat(), 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(component_transform(make_flat(), 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(component_transform(make_flat(), 1, 4), std::invalid_argument);
}

TEST_CASE("registry grammar") {
  CHECK(parse_surface("flat").name == "flat");
  CHECK(parse_surface("cylinder(rho=2.5)").dim_out == 3);
  CHECK(ga::norm(tangent_bivector(parse_surface("cylinder(rho=2.5)"), {0.1, 0.2})) ==
        doctest::Approx(2.5).epsilon(1e-13));
  CHECK(parse_surface("graph(u^2+v^2)").eval({1.0, 1.0}).vec(3) ==
        doctest::Approx(2.0).epsilon(1e-15));
  const Surface c = parse_surface("custom(u, v, u*v)");
  CHECK(c.eval({2.0, 3.0}).vec(3) == doctest::Approx(6.0).epsilon(1e-15));

  CHECK_THROWS_AS(parse_surface("sphere(r=1)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_surface("cylinder(1.0)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_surface("cylinder(rho=abc)"), std::exception);
  CHECK_THROWS_AS(parse_surface("graph()"), std::exception);
  CHECK_THROWS_AS(parse_surface("custom(u,v)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_surface("graph(u+)"), expr::ParseError);

  SUBCASE("transforms") {
    const auto f = parse_transform("custom(u*u, v)");
    CHECK(f.jacobian_det({1.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-14));
    const auto id = parse_transform("identity");
    CHECK(id.jacobian_det({5.0, 5.0}) == 1.0);
    CHECK_THROWS_AS(parse_transform("custom(u)"), std::invalid_argument);
    CHECK_THROWS_AS(parse_transform("rotate(3)"), std::invalid_argument);
  }
}

TEST_CASE("domains") {
  const Surface s = with_domain(make_flat(), {0.0, 0.0}, {1.0, 1.0});
  CHECK(s.contains({0.5, 0.5}));
  CHECK_FALSE(s.contains({1.5, 0.5}));
  CHECK_THROWS_AS(tangent_bivector(s, {2.0, 0.0}), DomainError);
  CHECK_NOTHROW(tangent_bivector(s, {0.5, 0.5}));

  SUBCASE("built-ins default to all of the plane") {
    CHECK(make_cylinder(1.0).contains({1e6, -1e6}));
  }
}

TEST_CASE("finite-difference fallback when no analytic partials exist") {
  Surface s = make_cylinder(1.0);
  s.partials = nullptr;
  const auto biv = tangent_bivector(s, {0.4, 0.0});
  auto expected = Multivector::zero(3);
  expected[0b110] = std::cos(0.4);
  expected[0b101] = -std::sin(0.4);
  CHECK(ga::norm(biv - expected) <= 1e-8);
}
