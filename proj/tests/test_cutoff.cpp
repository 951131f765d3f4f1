#include "scalim/cutoff.hpp"
#include "scalim/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace scalim;
using std::numbers::pi;

TEST_CASE("profiles equal 1 near the origin and vanish beyond 2") {
  for (const auto &h : {CutoffFunction::smoothstep5(), CutoffFunction::smooth_bump()}) {
    CHECK(h(0.0) == 1.0);
    CHECK(h(1.0) == 1.0);
    CHECK(h(2.0) == 0.0);
    CHECK(h(5.0) == 0.0);
    double prev = 1.0;
    for (double t = 1.0; t <= 2.0; t += 0.01) {
      CHECK(h(t) <= prev + 1e-15);
      prev = h(t);
    }
    CHECK(h(1.5) == doctest::Approx(0.5));
  }
}

TEST_CASE("Lambda functions") {
  CHECK(bessel_lambda(0.5, 0.0) == doctest::Approx(1.0 / (std::sqrt(2.0) * std::tgamma(1.5))));
  for (double t : {0.5, 2.9, 3.1, 10.0, 40.0}) {
    const double expect = std::sqrt(2.0 / pi) * std::sin(t) / t;
    CHECK(std::abs(bessel_lambda(0.5, t) - expect) <= 1e-14);
  }
  // Lambda_0 = J_0.
  for (double t : {0.0, 1.0, 2.99, 3.01, 7.0})
    CHECK(std::abs(bessel_lambda(0.0, t) - std::cyl_bessel_j(0.0, t)) <= 1e-14);
}

TEST_CASE("cutoff transform against a position-space cubature") {
  const CutoffFunction h = CutoffFunction::smoothstep5();
  const double r = 0.4;
  const CutoffTransform ht(h, 3, r);
  const double norm = std::pow(2.0 * pi, -1.5);
  for (const SpatialIndex &nu : {SpatialIndex{0, 0, 0}, SpatialIndex{1, 0, 0},
                                 SpatialIndex{0, 2, 0}, SpatialIndex{1, 0, 1},
                                 SpatialIndex{2, 1, 0}}) {
    for (const Vec3 &p : {Vec3(0.0, 0.0, 0.0), Vec3(1.0, -2.0, 0.5), Vec3(4.0, 3.0, -6.0)}) {
      const double c = cutoff_moment(h, r, nu, 3, [&](const Vec3 &x) {
        return std::cos(p.dot(x));
      });
      const double s = cutoff_moment(h, r, nu, 3, [&](const Vec3 &x) {
        return std::sin(p.dot(x));
      });
      const cplx expect = norm * cplx(c, -s);
      CHECK(std::abs(ht.value(nu, p) - expect) <= 1e-11);
    }
  }
}

TEST_CASE("sampling agrees with pointwise evaluation") {
  const CutoffTransform ht(CutoffFunction::smooth_bump(), 3, 0.3);
  const QuadratureScheme q = radial_product(3, 20.0, 10, 4, 1e-6);
  const SpatialIndex nu{0, 1, 1};
  const std::vector<cplx> v = ht.sample(nu, q);
  REQUIRE(v.size() == q.size());
  for (std::size_t i = 0; i < q.size(); i += 7)
    CHECK(std::abs(v[i] - ht.value(nu, q.nodes[i])) <= 1e-14);
}

TEST_CASE("two-dimensional transform") {
  const CutoffFunction h = CutoffFunction::smoothstep5();
  const CutoffTransform ht(h, 2, 0.5);
  const Vec3 p(1.5, -0.5, 0.0);
  const double c = cutoff_moment(h, 0.5, {1, 0, 0}, 2, [&](const Vec3 &x) {
    return std::cos(p.dot(x));
  });
  const double s = cutoff_moment(h, 0.5, {1, 0, 0}, 2, [&](const Vec3 &x) {
    return std::sin(p.dot(x));
  });
  CHECK(std::abs(ht.value({1, 0, 0}, p) - cplx(c, -s) / (2.0 * pi)) <= 1e-11);
}

TEST_CASE("cutoff moments") {
  const CutoffFunction h = CutoffFunction::smoothstep5();
  // A Gaussian of width 0.1 sits well inside h = 1: int x_1^2 e^{-x^2/2w^2}
  // = w^5 (2 pi)^{3/2}.
  const double w = 0.1;
  const double v = cutoff_moment(h, 1.0, {2, 0, 0}, 3, [w](const Vec3 &x) {
    return std::exp(-x.squaredNorm() / (2 * w * w));
  });
  CHECK(v == doctest::Approx(std::pow(w, 5) * std::pow(2.0 * pi, 1.5)).epsilon(1e-10));
  // Odd moments of even functions vanish.
  CHECK(std::abs(cutoff_moment(h, 1.0, {1, 0, 0}, 3, [](const Vec3 &) { return 1.0; })) <
        1e-14);
}

TEST_CASE("invalid cutoff transforms") {
  CHECK_THROWS_AS(CutoffTransform(CutoffFunction::smoothstep5(), 3, 0.0), InvalidArgument);
  CHECK_THROWS_AS(CutoffTransform(CutoffFunction::smoothstep5(), 4, 1.0), InvalidArgument);
}
