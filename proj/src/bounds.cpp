#include "scalim/bounds.hpp"

#include "scalim/errors.hpp"
#include "scalim/symm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace scalim {

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

std::string leg_string(const FieldIndex &l) { return MultiIndex({l}).to_string(); }

} // namespace

double single_particle_sigma_factor(const FieldIndex &nu_j, double r, Mass m,
                                    const CutoffFunction &h,
                                    const QuadratureScheme &q, double r0) {
  if (!(r > 0.0))
    throw InvalidArgument("cutoff radius must be positive");
  if (r > r0 * (1.0 + 1e-12))
    throw PreconditionViolated("r = " + std::to_string(r) + " exceeds r0");
  const CutoffTransform t(h, q.s, r);
  // Rescaled rule for momenta of order 1/r, then a log-spaced tail out to
  // k r = 100.
  const QuadratureScheme qr = rescaled(q, 1.0 / r);
  const double k_edge = *std::max_element(qr.shell_radius.begin(), qr.shell_radius.end());
  const double a = 0.5 - nu_j.time;
  double acc = 0.0;
  auto add = [&](const QuadratureScheme &rule) {
    const std::vector<cplx> v = t.sample(nu_j.space, rule);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double w = dispersion(m, rule.nodes[i]);
      acc += rule.weights[i] * std::pow(w, 2.0 * a) * std::norm(v[i]);
    }
  };
  add(qr);
  if (k_edge * r < 100.0)
    add(log_radial_product(q.s, k_edge, 100.0 / r, 48, 12, q.rel_tol));
  if (!std::isfinite(acc))
    throw NonFiniteIntegral("sigma factor integrand is not finite");
  return std::sqrt(acc);
}

double energy_factor(const FieldIndex &nu_j, double e, Mass m, int s) {
  if (e <= m.value)
    return 0.0;
  const double pmax = std::sqrt(e * e - m.value * m.value);
  const QuadratureScheme ball = radial_product(s, pmax, 64, 12, 0.0);
  const double v = ball.integrate([&](const Vec3 &p) {
    const double w = dispersion(m, p);
    double mono = std::pow(w, 2.0 * nu_j.time - 2.0);
    for (int k = 0; k < s; ++k)
      mono *= std::pow(p[k], 2 * nu_j.space[k]);
    return mono;
  });
  return std::sqrt(v);
}

BoundReport energy_bound_check(const FieldIndex &nu_j, double e, Mass m, int s,
                               double c2) {
  if (s < 3)
    throw PreconditionViolated("energy bounds need s >= 3");
  if (e < 1.0)
    throw PreconditionViolated("energy bounds need E >= 1");
  BoundReport r;
  r.kind = "energy";
  r.n = 1;
  r.nu = leg_string(nu_j);
  r.param = e;
  r.lhs = energy_factor(nu_j, e, m, s);
  r.rhs = c2 * std::pow(e, nu_j.order() + 0.5 * (s - 2));
  r.c_used = c2;
  r.pass = r.lhs <= r.rhs * (1.0 + 1e-9);
  return r;
}

std::string BoundPanel::hash() const {
  std::ostringstream os;
  os.precision(17);
  for (const auto &p : chi)
    os << "chi" << p.nu.to_string() << "@" << p.beta << ";";
  for (const auto &p : sigma)
    os << "sigma" << leg_string(p.nu) << "@" << p.r << ";";
  for (const auto &p : energy)
    os << "energy" << leg_string(p.nu) << "@" << p.e << ";";
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// Value the bound allows per unit constant, i.e. rhs = c^k * scale.
struct Demand {
  double lhs;
  double scale;
  int power;
};

Demand chi_demand(int s, Mass m, const ChiPoint &p, const QuadratureScheme &q) {
  const int n = p.nu.n();
  const double lhs = chi_norm(p.nu, p.beta, m, s, q);
  const double scale = std::sqrt(factorial(n)) * p.nu.factorial() *
                       std::pow(0.5 * p.beta, -p.nu.order() - 0.5 * n * (s - 1));
  return {lhs, scale, n};
}

Demand sigma_demand(int s, Mass m, double r0, const SigmaPoint &p,
                    const CutoffFunction &h, const QuadratureScheme &q) {
  const double f = single_particle_sigma_factor(p.nu, p.r, m, h, q, r0);
  return {4.0 * f, std::pow(3.0 * p.r, p.nu.order() + 0.5 * (s - 1)), 1};
}

Demand energy_demand(int s, Mass m, const EnergyPoint &p) {
  if (s < 3)
    throw PreconditionViolated("energy bounds need s >= 3");
  if (p.e < 1.0)
    throw PreconditionViolated("energy bounds need E >= 1");
  const double g = energy_factor(p.nu, p.e, m, s);
  return {2.0 * g, std::pow(p.e, p.nu.order() + 0.5 * (s - 2)), 1};
}

double required(const Demand &d) {
  if (d.power == 0)
    return 0.0;
  return std::pow(d.lhs / d.scale, 1.0 / d.power);
}

BoundReport report(const std::string &kind, int n, const std::string &nu,
                   double param, const Demand &d, double c) {
  BoundReport r;
  r.kind = kind;
  r.n = n;
  r.nu = nu;
  r.param = param;
  r.lhs = d.lhs;
  r.rhs = std::pow(c, d.power) * d.scale;
  r.c_used = c;
  r.pass = r.lhs <= r.rhs * (1.0 + 1e-9);
  return r;
}

} // namespace

ConstantFit fit_constant_c(int s, Mass m, double r0, const BoundPanel &panel,
                           const CutoffFunction &h, const QuadratureScheme &q) {
  if (panel.empty())
    throw InvalidArgument("fit_constant_c: empty panel");
  ConstantFit fit;
  for (const auto &p : panel.chi)
    fit.c_chi = std::max(fit.c_chi, required(chi_demand(s, m, p, q)));
  for (const auto &p : panel.sigma)
    fit.c_sigma = std::max(fit.c_sigma, required(sigma_demand(s, m, r0, p, h, q)));
  for (const auto &p : panel.energy)
    fit.c_energy = std::max(fit.c_energy, required(energy_demand(s, m, p)));
  fit.c = std::max({1.0, fit.c_chi, fit.c_sigma, fit.c_energy});
  fit.panel_hash = panel.hash();
  return fit;
}

std::vector<BoundReport> check_bounds(int s, Mass m, double r0,
                                      const BoundPanel &panel, double c,
                                      const CutoffFunction &h,
                                      const QuadratureScheme &q) {
  std::vector<BoundReport> out;
  for (const auto &p : panel.chi)
    out.push_back(report("chi", p.nu.n(), p.nu.to_string(), p.beta,
                         chi_demand(s, m, p, q), c));
  for (const auto &p : panel.sigma)
    out.push_back(report("sigma", 1, leg_string(p.nu), p.r,
                         sigma_demand(s, m, r0, p, h, q), c));
  for (const auto &p : panel.energy)
    out.push_back(
        report("energy", 1, leg_string(p.nu), p.e, energy_demand(s, m, p), c));
  return out;
}

NuclearityReport nuclearity_partial_sum(double r, double beta, int s,
                                        int n_max, int nu_cap, Mass m,
                                        double c, const QuadratureScheme &q) {
  if (s < 3)
    throw PreconditionViolated("nuclearity estimate needs s >= 3");
  if (!(r > 0.0) || !(beta > 0.0))
    throw InvalidArgument("r and beta must be positive");
  const double x = 6.0 * r / beta;
  if (x >= 1.0)
    throw PreconditionViolated("6r/beta = " + std::to_string(x) + " >= 1");
  NuclearityReport rep;
  rep.q_closed = 2.0 * c * c * std::pow(x, 0.5 * (s - 1)) / std::pow(1.0 - x, s);
  for (int n = 0; n <= n_max; ++n) {
    double sum = 0.0;
    for (const auto &nu : enumerate_multi_indices(n, s, nu_cap)) {
      const double chi = chi_norm(nu, beta, m, s, q);
      const double bound = std::pow(c, n) /
                           (std::sqrt(factorial(n)) * nu.factorial()) *
                           std::pow(3.0 * r, nu.order() + 0.5 * n * (s - 1));
      sum += chi * bound;
    }
    rep.sums.push_back(sum);
  }
  return rep;
}

double theta_expansion_residual(const MomentumFunction &f, double beta, Mass m,
                                const std::vector<FockVector> &probes,
                                int n_max, int nu_cap,
                                const QuadratureScheme &q,
                                std::uint64_t budget) {
  double worst = 0.0;
  for (const auto &probe : probes) {
    // <probe, e^{-beta H} X> = <e^{-beta H} probe, X>.
    const FockVector damped = apply_energy_damping(probe, beta, m);
    const FockVector vac = FockVector::vacuum(f.dim(), m);
    const cplx ref = weyl_matrix_element(damped, f, vac, q);
    const cplx series =
        expansion_partial_sum(f, damped, vac, m, n_max, nu_cap, q,
                              CutoffFunction::smoothstep5(), budget);
    worst = std::max(worst, std::abs(ref - series));
  }
  return worst;
}

double scale_cutoff(double lambda) {
  return CutoffFunction::smoothstep5()(2.0 * lambda);
}

ScaleScan uniform_scale_scan(const MomentumFunction &f, double beta, Mass m,
                             const std::vector<double> &lambdas, int n_max,
                             int nu_cap, const QuadratureScheme &q) {
  const int s = f.dim();
  ScaleScan scan;
  for (double lambda : lambdas) {
    const double cut = scale_cutoff(lambda);
    std::vector<MultiIndex> indices;
    for (int n = 0; n <= n_max; ++n)
      for (auto &nu : enumerate_multi_indices(n, s, nu_cap))
        indices.push_back(std::move(nu));
    if (cut == 0.0) {
      for (const auto &nu : indices)
        scan.rows.push_back({lambda, nu, 0.0, 0.0, 0.0});
      continue;
    }
    const DilationParam l(lambda);
    const MomentumFunction fl = dilate(f, l);
    const SigmaCoefficients sigma(fl, m, CutoffFunction::smoothstep5(),
                                  rescaled(q, 1.0 / lambda), nu_cap);
    for (const auto &nu : indices) {
      const double expo = nu.order() + 0.5 * nu.n() * (s - 1);
      ScaleRow row{lambda, nu, cut, 0.0, 0.0};
      row.coefficient = cut * std::pow(lambda, -expo) * std::abs(sigma(nu));
      row.vector_norm =
          cut * std::pow(lambda, expo) * chi_norm(nu, lambda * beta, m, s, q);
      scan.sup_coefficient = std::max(scan.sup_coefficient, row.coefficient);
      scan.sup_vector_norm = std::max(scan.sup_vector_norm, row.vector_norm);
      scan.rows.push_back(std::move(row));
    }
  }
  if (!std::isfinite(scan.sup_coefficient) || !std::isfinite(scan.sup_vector_norm))
    throw NonFiniteIntegral("scale scan produced a non-finite supremum");
  return scan;
}

} // namespace scalim
