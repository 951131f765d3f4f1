#include "scalim/bounds.hpp"
#include "scalim/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace scalim;
using std::numbers::pi;

namespace {

const QuadratureScheme &rule() {
  static const QuadratureScheme q = quad_build(3, 1e-10);
  return q;
}

// int_0^inf 4 pi k^{2 + 2a} |h~_r(k)|^2 dk for the radial profile, with
// h~_r(k) = sqrt(2/pi) int rho^2 h(rho/r) sin(k rho)/(k rho) drho.
double radial_factor_oracle(const CutoffFunction &h, double r, double a) {
  const Rule1D rho_in = gauss_legendre(800, 0.0, r);
  const Rule1D rho_out = gauss_legendre(800, r, 2.0 * r);
  auto ht = [&](double k) {
    double acc = 0.0;
    for (const Rule1D *g : {&rho_in, &rho_out})
      for (std::size_t i = 0; i < g->size(); ++i) {
        const double x = g->nodes[i];
        const double sinc = k * x < 1e-8 ? 1.0 : std::sin(k * x) / (k * x);
        acc += g->weights[i] * x * x * h(x / r) * sinc;
      }
    return std::sqrt(2.0 / pi) * acc;
  };
  double total = 0.0;
  const double kmax = 2000.0 / r;
  const int panels = 4000;
  for (int j = 0; j < panels; ++j) {
    // Panels uniform in sqrt(k) to resolve the small-k region.
    const double u0 = std::sqrt(kmax) * j / panels, u1 = std::sqrt(kmax) * (j + 1) / panels;
    const Rule1D g = gauss_legendre(8, u0, u1);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double k = g.nodes[i] * g.nodes[i];
      const double v = ht(k);
      total += g.weights[i] * 2.0 * g.nodes[i] * 4.0 * pi * std::pow(k, 2.0 + 2.0 * a) * v * v;
    }
  }
  return std::sqrt(total);
}

BoundPanel small_panel(const std::vector<double> &betas, const std::vector<double> &rs,
                       const std::vector<double> &es) {
  BoundPanel p;
  for (int n = 0; n <= 2; ++n)
    for (const auto &nu : enumerate_multi_indices(n, 3, 1))
      for (double b : betas)
        p.chi.push_back({nu, b});
  for (const auto &leg : enumerate_field_indices(3, 1)) {
    for (double r : rs)
      p.sigma.push_back({leg, r});
    for (double e : es)
      p.energy.push_back({leg, e});
  }
  return p;
}

} // namespace

TEST_CASE("sigma factor scales homogeneously at m = 0") {
  const CutoffFunction h = CutoffFunction::smoothstep5();
  for (const auto &leg : enumerate_field_indices(3, 2)) {
    const double a = single_particle_sigma_factor(leg, 0.25, Mass(0.0), h, rule());
    const double b = single_particle_sigma_factor(leg, 0.5, Mass(0.0), h, rule());
    const double expect = std::pow(2.0, leg.order() + 1.0);
    CHECK(std::abs(b / a / expect - 1.0) <= 1e-6);
  }
}

TEST_CASE("sigma factor against a radial oracle") {
  const CutoffFunction h = CutoffFunction::smoothstep5();
  const double r = 0.5;
  const double f0 = single_particle_sigma_factor(FieldIndex{0, {0, 0, 0}}, r, Mass(0.0), h,
                                                 rule());
  const double f1 = single_particle_sigma_factor(FieldIndex{1, {0, 0, 0}}, r, Mass(0.0), h,
                                                 rule());
  CHECK(std::abs(f0 / radial_factor_oracle(h, r, 0.5) - 1.0) <= 1e-6);
  CHECK(std::abs(f1 / radial_factor_oracle(h, r, -0.5) - 1.0) <= 1e-6);
}

TEST_CASE("massive sigma factors are ordered against the homogeneous massless ones") {
  const CutoffFunction h = CutoffFunction::smoothstep5();
  for (const auto &leg : enumerate_field_indices(3, 2)) {
    const double expo = leg.order() + 1.0;
    const double c0 =
        single_particle_sigma_factor(leg, 1.0, Mass(0.0), h, rule()) / std::pow(3.0, expo);
    for (double r : {0.1, 1.0 / 3.0, 1.0}) {
      const double v = single_particle_sigma_factor(leg, r, Mass(1.0), h, rule());
      const double massless = c0 * std::pow(3.0 * r, expo);
      if (leg.time == 1)
        CHECK(v <= massless * (1.0 + 1e-8));
      else
        CHECK(v >= massless * (1.0 - 1e-8));
    }
  }
  CHECK_THROWS_AS(single_particle_sigma_factor(FieldIndex{}, 2.0, Mass(1.0), h, rule()),
                  PreconditionViolated);
}

TEST_CASE("energy factor") {
  // m = 0: ||omega^{-1} chi_E||^2 = 4 pi E and ||chi_E||^2 = 4 pi E^3 / 3.
  for (double e : {1.0, 3.0}) {
    CHECK(energy_factor(FieldIndex{}, e, Mass(0.0), 3) ==
          doctest::Approx(std::sqrt(4.0 * pi * e)).epsilon(1e-10));
    CHECK(energy_factor(FieldIndex{1, {0, 0, 0}}, e, Mass(0.0), 3) ==
          doctest::Approx(std::sqrt(4.0 * pi * e * e * e / 3.0)).epsilon(1e-10));
  }
  CHECK(energy_factor(FieldIndex{}, 0.5, Mass(1.0), 3) == 0.0);
}

TEST_CASE("energy bound") {
  const Mass m(1.0);
  const FieldIndex zero{};
  // The massless constant sqrt(4 pi) bounds every massive factor.
  const double c2 = energy_factor(zero, 1.0, Mass(0.0), 3);
  for (double e : {1.0, 2.0, 4.0, 8.0}) {
    const BoundReport r = energy_bound_check(zero, e, m, 3, c2);
    CHECK(r.lhs / std::sqrt(e) <= c2 * (1.0 + 1e-9));
    CHECK(r.pass);
  }
  for (const auto &leg : enumerate_field_indices(3, 2)) {
    const double a = energy_factor(leg, 2.0, Mass(0.0), 3);
    const double b = energy_factor(leg, 8.0, Mass(0.0), 3);
    const double slope = std::log(b / a) / std::log(4.0);
    const double expect = leg.order() + 0.5;
    CHECK(std::abs(slope / expect - 1.0) <= 0.05);
  }
  CHECK_THROWS_AS(energy_bound_check(zero, 2.0, m, 2, c2), PreconditionViolated);
  CHECK_THROWS_AS(energy_bound_check(zero, 0.5, m, 3, c2), PreconditionViolated);
}

TEST_CASE("fitting the constant") {
  const Mass m(1.0);
  const CutoffFunction h = CutoffFunction::smoothstep5();
  BoundPanel trivial;
  trivial.chi.push_back({MultiIndex{}, 1.0});
  CHECK(fit_constant_c(3, m, 1.0, trivial, h, rule()).c == 1.0);
  CHECK_THROWS_AS(fit_constant_c(3, m, 1.0, BoundPanel{}, h, rule()), InvalidArgument);

  const BoundPanel small = small_panel({1.0}, {0.5}, {2.0});
  const BoundPanel large = small_panel({0.5, 1.0, 4.0}, {0.1, 0.5, 1.0}, {1.0, 2.0, 8.0});
  const ConstantFit a = fit_constant_c(3, m, 1.0, small, h, rule());
  const ConstantFit b = fit_constant_c(3, m, 1.0, large, h, rule());
  CHECK(b.c >= a.c);
  CHECK(b.c_chi >= a.c_chi);
  CHECK(b.c_sigma >= a.c_sigma);
  CHECK(b.c_energy >= a.c_energy);
  CHECK(a.panel_hash == small.hash());
  CHECK(a.panel_hash != b.panel_hash);

  for (const auto &r : check_bounds(3, m, 1.0, small, b.c, h, rule()))
    CHECK(r.pass);
  for (const auto &r : check_bounds(3, m, 1.0, small, a.c, h, rule()))
    CHECK(r.pass);
}

TEST_CASE("nuclearity sums") {
  const Mass m(1.0);
  const double c = 2.0;
  const NuclearityReport rep = nuclearity_partial_sum(1.0 / 30.0, 2.0, 3, 4, 2, m, c, rule());
  REQUIRE(rep.sums.size() == 5);
  CHECK(rep.sums[0] == 1.0);
  CHECK(rep.q_closed == doctest::Approx(2.0 * c * c * 0.1 / std::pow(0.9, 3)));
  for (std::size_t n = 0; n + 1 < rep.sums.size(); ++n)
    CHECK(rep.sums[n + 1] / rep.sums[n] <= rep.q_closed);

  const NuclearityReport wide = nuclearity_partial_sum(1.0 / 30.0, 4.0, 3, 4, 2, m, c, rule());
  for (std::size_t n = 1; n < rep.sums.size(); ++n)
    CHECK(wide.sums[n] < rep.sums[n]);

  CHECK_THROWS_AS(nuclearity_partial_sum(1.0, 6.0, 3, 2, 1, m, c, rule()),
                  PreconditionViolated);
  CHECK_THROWS_AS(nuclearity_partial_sum(0.1, 2.0, 2, 2, 1, m, c, quad_build(2, 1e-8)),
                  PreconditionViolated);
}

TEST_CASE("expansion residual") {
  const Mass m(1.0);
  const MomentumFunction f = gaussian(3, 0.15, 1.0, 0.7);
  const FockVector vac = FockVector::vacuum(3, m);
  CHECK(theta_expansion_residual(f, 4.0, m, {vac}, 0, 0, rule()) <= 1e-14);
  const MomentumFunction zero = MomentumFunction::zero(3).with_position_form(
      [](const Vec3 &) { return 0.0; }, [](const Vec3 &) { return 0.0; }, 1.0);
  const SingleParticleVector flat(3, m, [](const Vec3 &) { return cplx(1.0); });
  const FockVector one = FockVector::product({flat});
  CHECK(theta_expansion_residual(zero, 4.0, m, {one}, 0, 0, rule()) <= 1e-14);

  double prev = 1e300;
  for (const auto &[n, cap] : {std::pair{1, 0}, std::pair{2, 1}, std::pair{3, 1},
                               std::pair{3, 2}}) {
    const double r = theta_expansion_residual(f, 4.0, m, {one}, n, cap, rule());
    CHECK(r <= prev);
    prev = r;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("scale cutoff and scans") {
  CHECK(scale_cutoff(0.25) == 1.0);
  CHECK(scale_cutoff(0.5) == 1.0);
  CHECK(scale_cutoff(1.0) == 0.0);
  CHECK(scale_cutoff(3.0) == 0.0);

  const QuadratureScheme q = quad_build(3, 1e-8);
  const MomentumFunction f = gaussian(3, 0.15, 1.0, 0.7);
  const ScaleScan cut = uniform_scale_scan(f, 4.0, Mass(1.0), {2.0}, 1, 1, q);
  for (const auto &row : cut.rows) {
    CHECK(row.coefficient == 0.0);
    CHECK(row.vector_norm == 0.0);
  }

  const ScaleScan massless =
      uniform_scale_scan(f, 4.0, Mass(0.0), {0.125, 0.25, 0.5}, 2, 1, q);
  const std::size_t per = massless.rows.size() / 3;
  for (std::size_t i = 0; i < per; ++i) {
    const auto &a = massless.rows[i];
    for (int k = 1; k < 3; ++k) {
      const auto &b = massless.rows[i + k * per];
      CHECK(b.coefficient == doctest::Approx(a.coefficient).epsilon(1e-6));
      CHECK(b.vector_norm == doctest::Approx(a.vector_norm).epsilon(1e-6));
    }
  }

  const ScaleScan massive =
      uniform_scale_scan(f, 4.0, Mass(1.0), {0.125, 0.25, 0.5}, 2, 1, q);
  const ScaleScan ref = uniform_scale_scan(f, 4.0, Mass(0.0), {0.125}, 2, 1, q);
  CHECK(std::isfinite(massive.sup_coefficient));
  CHECK(massive.sup_coefficient <= 2.0 * ref.sup_coefficient);
  CHECK(massive.sup_vector_norm <= 2.0 * ref.sup_vector_norm);
}
