// Acceptance suite: one PASS/FAIL line per criterion.

#include "oracles.hpp"

#include "scalim/bounds.hpp"
#include "scalim/dirint.hpp"
#include "scalim/errors.hpp"
#include "scalim/experiments.hpp"
#include "scalim/vacuum.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace scalim;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

char buf[512];

template <class... A> std::string fmt(const char *f, A... a) {
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

const QuadratureScheme &wide() {
  static const QuadratureScheme q = log_radial_product(3, 1e-7, 400, 400, 16, 1e-10);
  return q;
}

MomentumFunction panel_function() {
  GaussTerm re;
  re.width = 0.9;
  re.center = Vec3(0.3, -0.2, 0.1);
  GaussTerm re2;
  re2.amplitude = 0.4;
  re2.width = 0.6;
  re2.power = {0, 1, 0};
  GaussTerm im;
  im.amplitude = 0.5;
  im.width = 1.1;
  im.power = {1, 0, 0};
  return gauss_poly(3, {re, re2}, {im});
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Verdict vacuum_invariance() {
  const MomentumFunction f = panel_function();
  const Vec3 tilt = Vec3(1, 1, 1).normalized();
  const std::vector<std::function<MomentumFunction(Mass)>> gens = {
      [&](Mass) { return translate_space(f, Vec3(0.7, 0, 0)); },
      [&](Mass) { return translate_space(f, Vec3(-0.4, 0.3, 0.5)); },
      [&](Mass m) { return translate_time(f, 0.8, m); },
      [&](Mass m) { return translate_time(f, -1.7, m); },
      [&](Mass m) { return boost(f, LorentzBoost::rotation(3, Vec3(0, 0, 1), 0.9), m); },
      [&](Mass m) { return boost(f, LorentzBoost::rotation(3, tilt, 2.1), m); },
      [&](Mass m) { return boost(f, LorentzBoost::pure_boost(3, Vec3(1, 0, 0), 0.4), m); },
      [&](Mass m) {
        return boost(f, LorentzBoost::pure_boost(3, Vec3(1, -1, 1).normalized(), 0.9), m);
      },
      [&](Mass m) {
        return poincare(f, {0.5, Vec3(0.2, 0, -0.3)},
                        LorentzBoost::pure_boost(3, Vec3(0, 1, 0), 0.3), m);
      },
      [&](Mass m) {
        return poincare(f, {-0.9, Vec3(0.1, 0.4, 0)},
                        LorentzBoost::rotation(3, tilt, 0.7) *
                            LorentzBoost::pure_boost(3, Vec3(1, 0, 0), 0.6),
                        m);
      },
  };
  double worst = 0.0;
  int cases = 0;
  for (const auto &g : gens)
    for (double mv : {0.0, 1.0}) {
      const Mass m(mv);
      worst = std::max(worst, rel(mass_norm_sq(g(m), m, wide()), mass_norm_sq(f, m, wide())));
      ++cases;
    }
  return {worst <= 1e-6, fmt("%d cases, max relative change %.2e (tol 1e-6)", cases, worst)};
}

Verdict dilation_invariance() {
  const MomentumFunction f = panel_function();
  const double n0 = mass_norm_sq(f, Mass(0.0), wide());
  double worst = 0.0;
  for (double l : {0.1, 0.5, 2.0, 10.0})
    worst = std::max(worst, rel(mass_norm_sq(dilate(f, DilationParam(l)), Mass(0.0), wide()), n0));
  return {worst <= 1e-7, fmt("max relative change %.2e (tol 1e-7)", worst)};
}

Verdict scaling_gap() {
  const QuadratureScheme q = quad_build(3, 1e-8);
  const MomentumFunction f = gaussian(3, 1.0, 1.0, 0.5);
  const Mass m(1.0);
  std::vector<double> gaps;
  double route = 0.0;
  for (double l : {1.0, 0.1, 0.01, 0.001}) {
    const DilationParam d(l);
    const double direct = std::exp(-0.5 * mass_norm_sq(dilate(f, d), m, rescaled(q, 1.0 / l)));
    const double through = std::exp(-0.5 * mass_norm_sq(f, Mass(l), q));
    route = std::max(route, std::abs(direct - through));
    gaps.push_back(scaling_limit_gap(f, m, d, q));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < gaps.size(); ++i)
    decreasing = decreasing && gaps[i] < gaps[i - 1];
  const bool ok = decreasing && gaps.back() < gaps.front() / 10.0 && route <= 1e-7;
  return {ok, fmt("gaps %.3e %.3e %.3e %.3e, route difference %.2e (tol 1e-7)", gaps[0],
                  gaps[1], gaps[2], gaps[3], route)};
}

Verdict sigma_cross_check() {
  const Mass m(1.0);
  const QuadratureScheme q = quad_build(3, 1e-10);
  const QuadratureScheme oracle_rule = log_radial_product(3, 1e-7, 60, 400, 16, 1e-10);
  const CutoffFunction h = CutoffFunction::smoothstep5();
  std::vector<MomentumFunction> panel;
  for (double w : {0.5, 1.0}) {
    GaussTerm re, im;
    re.width = w;
    re.center = Vec3(0.2, -0.1, 0.15);
    im.width = 0.8 * w;
    im.amplitude = 0.6;
    im.center = Vec3(-0.1, 0.05, 0.2);
    panel.push_back(gauss_poly(3, {re}, {im}));
  }
  double route = 0.0, profile = 0.0;
  int count = 0;
  for (const auto &f : panel) {
    const SigmaCoefficients a(f, m, h, q, 2);
    const SigmaCoefficients b(f, m, CutoffFunction::smooth_bump(), q, 2);
    oracle::NestedCommutatorSigma nested(f, m, a.radius(), h, oracle_rule);
    for (int n = 0; n <= 2; ++n)
      for (const auto &nu : enumerate_multi_indices(n, 3, 2)) {
        const cplx closed = a(nu);
        route = std::max(route, std::abs(closed - nested(nu)));
        profile = std::max(profile, std::abs(closed - b(nu)));
        ++count;
      }
  }
  return {route <= 1e-6 && profile <= 1e-8,
          fmt("%d coefficients, closed vs nested %.2e (tol 1e-6), profiles %.2e (tol 1e-8)",
              count, route, profile)};
}

Verdict expansion() {
  const Mass m(1.0);
  const QuadratureScheme q = quad_build(3, 1e-8);
  const MomentumFunction f = gaussian(3, 0.15, 1.0, 0.7);
  const double beta = 4.0;
  const FockVector vac = FockVector::vacuum(3, m);
  const SingleParticleVector flat(3, m, [](const Vec3 &) { return cplx(1.0); });
  const FockVector one = FockVector::product({flat});
  const double vac_res = theta_expansion_residual(f, beta, m, {vac}, 0, 0, q);
  std::vector<double> res;
  for (int cap = 0; cap <= 2; ++cap)
    res.push_back(theta_expansion_residual(f, beta, m, {one}, 3, cap, q));
  const bool ok = vac_res <= 1e-14 && res[1] < res[0] && res[2] < res[1] && res[2] < 1e-4;
  return {ok, fmt("vacuum probe %.1e; one-particle residuals %.2e %.2e %.2e (tol 1e-4)",
                  vac_res, res[0], res[1], res[2])};
}

const std::vector<double> fit_beta{0.5, 4.0}, fit_r{0.1, 1.0}, fit_e{1.0, 8.0};
const std::vector<double> hold_beta{1.0, 2.0}, hold_r{0.3, 0.6}, hold_e{2.0, 4.0};

bool disjoint(const std::vector<double> &a, const std::vector<double> &b) {
  for (double x : a)
    if (std::find(b.begin(), b.end(), x) != b.end())
      return false;
  return true;
}

BoundPanel make_panel(const std::vector<double> &betas, const std::vector<double> &rs,
                      const std::vector<double> &es) {
  BoundPanel p;
  for (int n = 0; n <= 3; ++n)
    for (const auto &nu : enumerate_multi_indices(n, 3, 2))
      for (double b : betas)
        p.chi.push_back({nu, b});
  for (const auto &leg : enumerate_field_indices(3, 2)) {
    for (double r : rs)
      p.sigma.push_back({leg, r});
    for (double e : es)
      p.energy.push_back({leg, e});
  }
  return p;
}

double fitted_c() {
  static const double c = [] {
    const BoundPanel fit = make_panel(fit_beta, fit_r, fit_e);
    return fit_constant_c(3, Mass(1.0), 1.0, fit, CutoffFunction::smoothstep5(),
                          quad_build(3, 1e-8))
        .c;
  }();
  return c;
}

Verdict norm_bounds() {
  const QuadratureScheme q = quad_build(3, 1e-8);
  const double c = fitted_c();
  const BoundPanel hold = make_panel(hold_beta, hold_r, hold_e);
  const bool apart =
      disjoint(fit_beta, hold_beta) && disjoint(fit_r, hold_r) && disjoint(fit_e, hold_e);
  int violations = 0;
  double worst = 0.0;
  const auto reports =
      check_bounds(3, Mass(1.0), 1.0, hold, c, CutoffFunction::smoothstep5(), q);
  for (const auto &r : reports) {
    violations += !r.pass;
    worst = std::max(worst, r.lhs / r.rhs);
  }
  return {apart && violations == 0 && !reports.empty(),
          fmt("c = %.4f, panels %s, %zu hold-out points, %d violations, max lhs/rhs %.3f", c,
              apart ? "disjoint" : "OVERLAP", reports.size(), violations, worst)};
}

Verdict nuclearity() {
  const QuadratureScheme q = quad_build(3, 1e-8);
  const double beta = 2.0, r = 0.1 * beta / 6.0;
  const NuclearityReport rep =
      nuclearity_partial_sum(r, beta, 3, 4, 2, Mass(1.0), fitted_c(), q);
  double worst = 0.0;
  for (int n = 0; n <= 3; ++n)
    worst = std::max(worst, rep.sums[n + 1] / rep.sums[n]);
  return {worst <= rep.q_closed,
          fmt("max S_{n+1}/S_n %.3e over n = 0..3, closed-form q %.3f", worst, rep.q_closed)};
}

Matrix random_matrix(int r, int c, std::mt19937_64 &rng) {
  std::normal_distribution<double> nd;
  Matrix a(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j)
      a(i, j) = cplx(nd(rng), nd(rng));
  return a;
}

Verdict commutant() {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> npts(1, 4), ndim(1, 3), kind(0, 2);
  int agree = 0, decomposable = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> dims(npts(rng));
    for (auto &d : dims)
      d = ndim(rng);
    const FiberFamily ff(dims);
    Matrix b = random_matrix(ff.total(), ff.total(), rng);
    const int k = kind(rng);
    if (k != 0)
      for (int z = 0; z < ff.size(); ++z)
        for (int y = 0; y < ff.size(); ++y)
          if (y != z)
            b.block(ff.offset(z), ff.offset(y), ff.dim[z], ff.dim[y]).setZero();
    if (k == 2 && ff.size() > 1)
      b(ff.offset(1), 0) += 1e-3;
    const bool a = commutes_with_diagonal(b, ff), c = is_block_diagonal(b, ff);
    agree += a == c;
    decomposable += c;
  }
  return {agree == 100, fmt("%d/100 agreements (%d decomposable)", agree, decomposable)};
}

Verdict decomposition() {
  const ResultTable t = run_dirint(ExperimentConfig{});
  double state = 0.0, iso = 0.0, inter = 0.0;
  int cases = 0;
  for (const auto &r : t.rows) {
    if (r.experiment == "decomposition_state") {
      state = std::max(state, r.value);
      ++cases;
    }
    if (r.experiment == "decomposition_isometry")
      iso = std::max(iso, r.value);
    if (r.experiment == "decomposition_intertwining")
      inter = std::max(inter, r.value);
  }
  return {cases > 0 && state <= 1e-10 && iso <= 1e-10 && inter <= 1e-10,
          fmt("%d algebras, state %.1e, |W*W - 1| %.1e, intertwining %.1e (tol 1e-10)",
              cases, state, iso, inter)};
}

Verdict cocycles() {
  bool ok = true;
  std::string detail;
  for (int k = 2; k <= 5; ++k) {
    const ToyDilationSystem sys = cyclic_toy_system(k, 2, 20240601 + k);
    const bool laws = cocycle_check(sys).all_pass();
    ToyDilationSystem bad = sys;
    const int g0 = 1 % k, z0 = k - 1;
    bad.u[g0][z0] *= std::polar(1.0, 0.7);
    auto observed = cocycle_check(bad).composition_failures;
    auto predicted = predicted_perturbation_failures(bad, g0, z0);
    std::sort(observed.begin(), observed.end());
    std::sort(predicted.begin(), predicted.end());
    const bool exact = !predicted.empty() && observed == predicted;
    ok = ok && laws && exact;
    detail += fmt("order %d: laws %s, %zu/%zu failures as predicted; ", k,
                  laws ? "ok" : "broken", observed.size(), predicted.size());
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"vacuum invariance", vacuum_invariance},
      {"dilation invariance", dilation_invariance},
      {"scaling-limit gap", scaling_gap},
      {"sigma cross-check", sigma_cross_check},
      {"expansion convergence", expansion},
      {"norm-bound hold-out", norm_bounds},
      {"nuclearity decay", nuclearity},
      {"direct-integral commutant", commutant},
      {"decomposition round trip", decomposition},
      {"cocycle laws", cocycles},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception &e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !v.pass;
    std::printf("%s  %2zu %-26s %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
