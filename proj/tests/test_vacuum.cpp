#include "scalim/errors.hpp"
#include "scalim/vacuum.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace scalim;
using std::numbers::pi;

namespace {

const QuadratureScheme &rule() {
  static const QuadratureScheme q = quad_build(3, 1e-10);
  return q;
}

MomentumFunction shifted(double w, double a, double b, const Vec3 &c) {
  GaussTerm re, im;
  re.width = im.width = w;
  re.amplitude = a;
  im.amplitude = b;
  re.center = im.center = c;
  return gauss_poly(3, {re}, {im});
}

} // namespace

TEST_CASE("Weyl expectation") {
  const Mass m0(0.0);
  CHECK(std::abs(weyl_expectation({MomentumFunction::zero(3), m0}, rule()) - 1.0) == 0.0);
  const cplx v = weyl_expectation({gaussian(3, 1.0, 1.0, 0.0), m0}, rule());
  CHECK(std::abs(v - std::exp(-pi / 2.0)) <= 1e-10);
  const cplx w = weyl_expectation({shifted(0.7, 1.0, 0.4, Vec3(1, 0, 0)), Mass(1.0)}, rule());
  CHECK(w.real() > 0.0);
  CHECK(w.real() <= 1.0);
  CHECK(w.imag() == 0.0);
}

TEST_CASE("Weyl relation in products") {
  const Mass m(1.0);
  const MomentumFunction f = shifted(0.8, 1.0, 0.3, Vec3(0.2, 0, 0));
  const MomentumFunction g = shifted(1.1, -0.5, 0.6, Vec3(0, -0.4, 0.1));
  CHECK(std::abs(weyl_product_expectation({{f, m}}, rule()) -
                 weyl_expectation({f, m}, rule())) < 1e-15);
  CHECK(std::abs(weyl_product_expectation({{f, m}, {-f, m}}, rule()) - 1.0) < 1e-14);
  const cplx expect = std::polar(std::exp(-0.5 * mass_norm_sq(f + g, m, rule())),
                                 -0.5 * symplectic_form(f, g, rule()));
  CHECK(std::abs(weyl_product_expectation({{f, m}, {g, m}}, rule()) - expect) < 1e-14);
  CHECK_THROWS_AS(weyl_product_expectation({}, rule()), InvalidArgument);
  CHECK_THROWS_AS(weyl_product_expectation({{f, m}, {g, Mass(0.0)}}, rule()),
                  InvalidArgument);
}

TEST_CASE("coherent overlaps") {
  const Mass m(0.5);
  const MomentumFunction g = shifted(0.8, 1.0, 0.3, Vec3(0.2, 0, 0));
  const MomentumFunction h = shifted(1.1, -0.5, 0.6, Vec3(0, -0.4, 0.1));
  CHECK(std::abs(coherent_overlap({g, m}, {g, m}, rule()) - 1.0) < 1e-14);
  const cplx o = coherent_overlap({g, m}, {h, m}, rule());
  CHECK(std::abs(o) <= 1.0);
  // <W(g) Omega, W(h) Omega> = e^{i sigma(g, h)/2} e^{-||h - g||^2 / 2}
  const cplx expect = std::polar(std::exp(-0.5 * mass_norm_sq(h - g, m, rule())),
                                 0.5 * symplectic_form(g, h, rule()));
  CHECK(std::abs(o - expect) < 1e-14);
}

TEST_CASE("coherent Gram matrices are positive semidefinite") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Mass m(1.0);
  std::vector<MomentumFunction> fs;
  for (int k = 0; k < 5; ++k)
    fs.push_back(shifted(0.6 + 0.3 * k, u(rng), u(rng), Vec3(u(rng), u(rng), u(rng))));
  Eigen::MatrixXcd gram(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      gram(i, j) = coherent_overlap({fs[i], m}, {fs[j], m}, rule());
  CHECK((gram - gram.adjoint()).norm() < 1e-13);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
}

TEST_CASE("Poincare invariance of product expectations") {
  const Mass m(1.0);
  const MomentumFunction f = shifted(0.8, 1.0, 0.3, Vec3(0.2, 0, 0));
  const MomentumFunction g = shifted(1.1, -0.5, 0.6, Vec3(0, -0.4, 0.1));
  const SpacetimeShift a{0.7, Vec3(0.2, -0.5, 0.3)};
  const LorentzBoost l = LorentzBoost::pure_boost(3, Vec3(0, 0, 1), 0.4);
  const cplx before = weyl_product_expectation({{f, m}, {g, m}}, rule());
  const cplx after = weyl_product_expectation(
      {{poincare(f, a, l, m), m}, {poincare(g, a, l, m), m}}, rule());
  CHECK(std::abs(after - before) <= 1e-6);
}

TEST_CASE("scaling-limit gap") {
  const MomentumFunction f = gaussian(3, 1.0, 1.0, 0.5);
  CHECK(scaling_limit_gap(MomentumFunction::zero(3), Mass(1.0), DilationParam(0.1),
                          rule()) == 0.0);
  CHECK(scaling_limit_gap(f, Mass(0.0), DilationParam(0.1), rule()) <= 1e-12);
  double prev = 1e300;
  std::vector<double> gaps;
  for (int k = 0; k <= 3; ++k) {
    const double g = scaling_limit_gap(f, Mass(1.0), DilationParam(std::pow(10.0, -k)),
                                       rule());
    CHECK(g < prev);
    gaps.push_back(g);
    prev = g;
  }
  CHECK(gaps.back() < gaps.front() / 10.0);
  CHECK_NOTHROW(scaling_limit_gap(f, Mass(1.0), DilationParam(0.37), rule()));
}

TEST_CASE("averaged matrix elements") {
  const QuadratureScheme q = quad_build(3, 1e-8);
  const Mass m0(0.0);
  const MomentumFunction f = gaussian(3, 1.0, 0.6, 0.3);
  const WeylLabel g{gaussian(3, 0.9, 0.5, -0.2), m0};
  const AveragingKernel k = make_averaging_kernel(3, 0.2, 0.2, 6, 3);
  const cplx a1 = averaged_matrix_element(g, f, k, DilationParam(1.0), m0, q);
  const cplx a2 = averaged_matrix_element(g, f, k, DilationParam(0.01), m0, q);
  CHECK(std::abs(a1 - a2) <= 1e-14);

  // The massive average approaches the massless one as lambda shrinks.
  double prev = 1e300;
  for (double l : {1.0, 0.1, 0.01}) {
    const double d =
        std::abs(averaged_matrix_element(g, f, k, DilationParam(l), Mass(1.0), q) - a1);
    CHECK(d < prev);
    prev = d;
  }

  // Narrowing kernels converge to the plain overlap.
  const cplx target = coherent_overlap(g, {f, m0}, q);
  double prev_err = 1e300;
  for (double w : {0.3, 0.1, 0.03}) {
    const AveragingKernel kw = make_averaging_kernel(3, w, w, 6, 3);
    const double err =
        std::abs(averaged_matrix_element(g, f, kw, DilationParam(1.0), m0, q) - target);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 1e-2);

  CHECK_THROWS_AS(make_averaging_kernel(3, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(averaged_matrix_element({g.f, Mass(1.0)}, f, k, DilationParam(1.0),
                                          m0, q),
                  InvalidArgument);
}
