#include "scalim/errors.hpp"
#include "scalim/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace scalim;
using std::numbers::pi;

TEST_CASE("Gauss-Legendre is exact for polynomials of degree 2n-1") {
  const Rule1D r = gauss_legendre(5, 0.0, 2.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    acc += r.weights[i] * std::pow(r.nodes[i], 9);
  CHECK(acc == doctest::Approx(std::pow(2.0, 10) / 10.0).epsilon(1e-13));
}

TEST_CASE("Gaussian reference integrals") {
  const QuadratureScheme q3 = quad_build(3, 1e-6);
  const double g3 = q3.integrate([](const Vec3 &p) { return std::exp(-p.squaredNorm()); });
  CHECK(std::abs(g3 / std::pow(pi, 1.5) - 1.0) <= 1e-6);

  const QuadratureScheme q2 = quad_build(2, 1e-6);
  const double g2 = q2.integrate([](const Vec3 &p) { return std::exp(-p.squaredNorm()); });
  CHECK(std::abs(g2 / pi - 1.0) <= 1e-6);
}

TEST_CASE("exponential reference integral") {
  const QuadratureScheme q = quad_build(3, 1e-8);
  const double v = q.integrate([](const Vec3 &p) { return std::exp(-2.0 * p.norm()); });
  CHECK(std::abs(v / pi - 1.0) <= 1e-8);
  CHECK(quad_self_test_error(q) <= 1e-8);
}

TEST_CASE("tolerance outside (0, 1e-2] is rejected") {
  CHECK_THROWS_AS(quad_build(3, 0.0), InvalidArgument);
  CHECK_THROWS_AS(quad_build(3, 0.5), InvalidArgument);
  CHECK_THROWS_AS(quad_build(3, -1e-6), InvalidArgument);
}

TEST_CASE("weights are positive and nodes respect the dimension") {
  const QuadratureScheme q = quad_build(2, 1e-8);
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(q.weights[i] > 0.0);
    CHECK(q.nodes[i][2] == 0.0);
  }
}

TEST_CASE("rescaled scheme integrates narrow Gaussians") {
  const QuadratureScheme q = quad_build(3, 1e-8);
  for (double l : {1e-3, 0.1, 30.0}) {
    const QuadratureScheme ql = rescaled(q, l);
    const double v = ql.integrate(
        [l](const Vec3 &p) { return std::exp(-p.squaredNorm() / (l * l)); });
    CHECK(std::abs(v / (l * l * l * std::pow(pi, 1.5)) - 1.0) <= 1e-8);
  }
}

TEST_CASE("log-radial rule covers several decades") {
  const QuadratureScheme q = log_radial_product(3, 1e-7, 400, 400, 16, 1e-10);
  for (double w : {0.05, 1.0, 20.0}) {
    const double v = q.integrate(
        [w](const Vec3 &p) { return std::exp(-w * w * p.squaredNorm()); });
    CHECK(std::abs(v * std::pow(w, 3) / std::pow(pi, 1.5) - 1.0) <= 1e-9);
  }
}

TEST_CASE("shell grouping matches node radii") {
  const QuadratureScheme q = radial_product(3, 10.0, 20, 6, 1e-6);
  REQUIRE(q.shell_offset.size() == q.shell_radius.size() + 1);
  for (std::size_t k = 0; k < q.shell_radius.size(); ++k)
    for (std::size_t i = q.shell_offset[k]; i < q.shell_offset[k + 1]; ++i)
      CHECK(q.nodes[i].norm() == doctest::Approx(q.shell_radius[k]));
}

TEST_CASE("angular rule integrates low-degree harmonics") {
  const QuadratureScheme q = radial_product(3, 1.0, 8, 8, 1e-6, false);
  // int_{|p|<=1} p_x^2 p_y^2 = 4 pi / 105
  const double v = q.integrate([](const Vec3 &p) {
    return p[0] * p[0] * p[1] * p[1];
  });
  CHECK(v == doctest::Approx(4.0 * pi / 105.0).epsilon(1e-12));
}

TEST_CASE("unit sphere areas") {
  CHECK(unit_sphere_area(2) == doctest::Approx(2.0 * pi));
  CHECK(unit_sphere_area(3) == doctest::Approx(4.0 * pi));
}
