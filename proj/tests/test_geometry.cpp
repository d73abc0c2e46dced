#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "plasmo/geometry.hpp"

using namespace plasmo;

namespace {
const double pi = pi_v<double>;
}

TEST_CASE("contains: ball center and just outside") {
  CHECK(contains(Shape::ball(), Vec3(0, 0, 0)));
  CHECK_FALSE(contains(Shape::ball(), Vec3(0, 0, 1.0001)));
}

TEST_CASE("contains: ellipsoid semi-axis test") {
  CHECK_FALSE(contains(Shape::ellipsoid(1, 0.5, 0.5), Vec3(0, 0.6, 0)));
  CHECK(contains(Shape::ellipsoid(1, 0.5, 0.5), Vec3(0.9, 0, 0)));
}

TEST_CASE("contains: ball agrees with the unit-axes ellipsoid") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  const Shape ball = Shape::ball();
  const Shape ell = Shape::ellipsoid(1, 1, 1);
  for (int k = 0; k < 2000; ++k) {
    const Vec3 x(u(rng), u(rng), u(rng));
    CHECK(contains(ball, x) == contains(ell, x));
  }
}

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(Shape::ellipsoid(1, 0.5, 0), InvalidArgument);
  CHECK_THROWS_AS(Shape::ellipsoid(1, 0.5, 1e-7), InvalidArgument);
  CHECK_THROWS_AS(Shape::ellipsoid(0.9, 0.5, 0.5), InvalidArgument);
  CHECK_THROWS_AS(Shape::ellipsoid(1, -0.5, 0.5), InvalidArgument);
  CHECK(Shape::ellipsoid(1, 1, 1).is_spherical());
  CHECK_FALSE(Shape::ellipsoid(1, 1, 1).is_ball());
}

TEST_CASE("particle diameter is 2 a max semi-axis") {
  Particle p;
  p.shape = Shape::ellipsoid(0.5, 1, 0.3);
  p.scale = 0.02;
  CHECK(p.diameter() == doctest::Approx(0.04));
  p.scale = -1;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("volume quadrature: unit ball volume") {
  const double v = volume_quadrature(Shape::ball(), [](const Vec3&) { return 1.0; });
  CHECK(std::abs(v - 4 * pi / 3) < 1e-8);
}

TEST_CASE("volume quadrature: oblate ellipsoid volume") {
  const double v = volume_quadrature(Shape::ellipsoid(1, 1, 0.5), [](const Vec3&) { return 1.0; });
  CHECK(std::abs(v - 2 * pi / 3) < 1e-8);
}

TEST_CASE("volume quadrature: Newtonian kernel at the origin") {
  const double v = volume_quadrature(Shape::ball(), [](const Vec3& y) { return 1 / (4 * pi * y.norm()); });
  CHECK(std::abs(v - 0.5) < 1e-6);
}

TEST_CASE("volume quadrature: second moments of an ellipsoid") {
  // ∫ x_j² over the ellipsoid = (4π/15) r1 r2 r3 r_j².
  const Shape s = Shape::ellipsoid(0.4, 1, 0.7);
  const Vec3 r = s.semi_axes();
  for (int j = 0; j < 3; ++j) {
    const double v = volume_quadrature(s, [j](const Vec3& y) { return y[j] * y[j]; });
    CHECK(std::abs(v - 4 * pi / 15 * r.prod() * r[j] * r[j]) < 1e-12);
  }
}

TEST_CASE("volume quadrature: permutation of semi-axes and arguments") {
  auto f = [](const Vec3& y) { return std::exp(y[0]) * (1 + y[1] * y[1]) + y[2] * y[2] * y[2] * y[2]; };
  const double v1 = volume_quadrature(Shape::ellipsoid(1, 0.6, 0.3), f);
  const double v2 = volume_quadrature(Shape::ellipsoid(0.6, 0.3, 1),
                                      [&](const Vec3& y) { return f(Vec3(y[2], y[0], y[1])); });
  CHECK(std::abs(v1 - v2) < 1e-12 * std::abs(v1));
}

TEST_CASE("volume quadrature: vector-valued integrand") {
  const Vec3 v = volume_quadrature(Shape::ball(), [](const Vec3& y) -> Vec3 { return Vec3(1.0, y[0], y[1] * y[1]); });
  CHECK(std::abs(v[0] - 4 * pi / 3) < 1e-10);
  CHECK(std::abs(v[1]) < 1e-14);
  CHECK(std::abs(v[2] - 4 * pi / 15) < 1e-12);
}

TEST_CASE("volume quadrature: errors") {
  CHECK_THROWS_AS(volume_quadrature(Shape::ball(), [](const Vec3&) { return 1.0; }, 0), InvalidArgument);
  CHECK_THROWS_AS(volume_quadrature(Shape::ball(), [](const Vec3&) { return std::numeric_limits<double>::quiet_NaN(); }),
                  NumericalError);
}

TEST_CASE("volume quadrature: long double instantiation") {
  using LShape = ShapeT<long double>;
  const long double v = volume_quadrature(LShape::ball(), [](const Vector3<long double>&) { return 1.0L; }, 16);
  CHECK(std::abs(static_cast<double>(v - 4 * pi_v<long double> / 3)) < 1e-15);
}

TEST_CASE("volume quadrature about an interior point: singular kernel") {
  // ∫_B dy / (4π|x - y|) = (3 - |x|²)/6 for x in the unit ball.
  const Vec3 x(0.3, -0.2, 0.4);
  const double v = volume_quadrature_about(Shape::ball(), x, [&](const Vec3& y) { return 1 / (4 * pi * (y - x).norm()); },
                                           48, 2);
  CHECK(std::abs(v - (3 - x.squaredNorm()) / 6) < 1e-10);
}

TEST_CASE("sphere surface quadrature: area") {
  for (double t : {0.1, 1.0, 3.5}) {
    const double a = sphere_surface_quadrature(Vec3(1, 2, 3), t, [](const Vec3&) { return 1.0; });
    CHECK(std::abs(a - 4 * pi * t * t) < 1e-10 * std::max(1.0, t * t));
  }
}

TEST_CASE("sphere surface quadrature: odd symmetry") {
  const double v = sphere_surface_quadrature(Vec3::Zero().eval(), 1.0, [](const Vec3& y) { return y[2]; });
  CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("sphere surface quadrature: second moment") {
  const double v = sphere_surface_quadrature(Vec3::Zero().eval(), 1.0, [](const Vec3& y) { return y[2] * y[2]; });
  CHECK(std::abs(v - 4 * pi / 3) < 1e-8);
}

TEST_CASE("sphere surface quadrature: radius must be positive") {
  CHECK_THROWS_AS(sphere_surface_quadrature(Vec3::Zero().eval(), 0.0, [](const Vec3&) { return 1.0; }), InvalidArgument);
  CHECK_THROWS_AS(sphere_surface_quadrature(Vec3::Zero().eval(), -1.0, [](const Vec3&) { return 1.0; }), InvalidArgument);
}

TEST_CASE("sphere cap quadrature: lens area") {
  // Area of ∂B(x, t) inside the unit ball for x on its boundary: 2π t² (1 - t/2).
  const Vec3 x(0, 0, 1);
  for (double t : {0.2, 0.9, 1.7}) {
    const double a = sphere_cap_quadrature(x, t, Vec3::Zero().eval(), 1.0, [](const Vec3&) { return 1.0; });
    CHECK(std::abs(a - 2 * pi * t * t * (1 - t / 2)) < 1e-12);
  }
  CHECK(sphere_cap_quadrature(x, 2.5, Vec3::Zero().eval(), 1.0, [](const Vec3&) { return 1.0; }) == 0.0);
}

TEST_CASE("coarea: spherical sections of the domain rebuild its volume") {
  // ∫_0^2 |∂B(x, t) ∩ Ω| dt = |Ω| for x on ∂Ω.
  const Vec3 x(0.6, 0.8, 0);
  const auto& gl = gauss_legendre<double>(40);
  const double v = gl.integrate(0.0, 2.0, [&](double t) {
    return sphere_cap_quadrature(x, t, Vec3::Zero().eval(), 1.0, [](const Vec3&) { return 1.0; });
  });
  CHECK(std::abs(v - 4 * pi / 3) < 1e-4 * 4 * pi / 3);
}

TEST_CASE("ray exit from the ellipsoid") {
  const Shape s = Shape::ellipsoid(1, 0.5, 0.25);
  CHECK(ray_exit(s, Vec3::Zero().eval(), Vec3::UnitY().eval()) == doctest::Approx(0.5));
  CHECK(ray_exit(s, Vec3::Zero().eval(), Vec3::UnitZ().eval()) == doctest::Approx(0.25));
}

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
  const auto& gl = gauss_legendre<double>(10);
  const double v = gl.integrate(-1.0, 2.0, [](double x) { return std::pow(x, 19); });
  CHECK(v == doctest::Approx((std::pow(2.0, 20) - 1) / 20).epsilon(1e-13));
  CHECK_THROWS_AS(gauss_legendre<double>(0), InvalidArgument);
}
