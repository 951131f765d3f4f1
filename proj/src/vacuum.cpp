#include "scalim/vacuum.hpp"

#include "scalim/errors.hpp"

#include <cmath>

namespace scalim {

namespace {

double bump(double u) {
  if (std::abs(u) >= 1.0)
    return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

void check_common_mass(const WeylLabel &a, const WeylLabel &b) {
  if (a.m.value != b.m.value)
    throw InvalidArgument("Weyl labels must share the representation mass");
}

} // namespace

AveragingKernel make_averaging_kernel(int s, double log_width, double x_width,
                                      int n_mu, int n_x) {
  if (!(log_width > 0.0) || !(x_width > 0.0) || n_mu < 1 || n_x < 1)
    throw InvalidArgument("averaging kernel needs positive widths and nodes");
  const Rule1D u = gauss_legendre(n_mu);
  const Rule1D v = gauss_legendre(n_x);

  // Unit mass under the discrete rules.
  auto bump_mass = [](const Rule1D &g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      acc += g.weights[i] * bump(g.nodes[i]);
    return acc;
  };

  AveragingKernel k;
  const double nd = 1.0 / (bump_mass(u) * log_width);
  k.hD = [nd, log_width](double mu) {
    return mu > 0.0 ? nd * bump(std::log(mu) / log_width) : 0.0;
  };
  const double nt = std::pow(bump_mass(v) * x_width, -(s + 1));
  k.hT = [nt, x_width, s](const SpacetimeShift &x) {
    double v = nt * bump(x.t / x_width);
    for (int j = 0; j < s; ++j)
      v *= bump(x.x[j] / x_width);
    return v;
  };

  for (std::size_t i = 0; i < u.size(); ++i) {
    const double mu = std::exp(log_width * u.nodes[i]);
    k.mu_nodes.push_back(mu);
    k.mu_weights.push_back(u.weights[i] * log_width * mu);
  }

  std::vector<int> idx(s + 1, 0);
  while (true) {
    SpacetimeShift x;
    double w = 1.0;
    x.t = x_width * v.nodes[idx[0]];
    w *= x_width * v.weights[idx[0]];
    for (int j = 0; j < s; ++j) {
      x.x[j] = x_width * v.nodes[idx[j + 1]];
      w *= x_width * v.weights[idx[j + 1]];
    }
    k.x_nodes.push_back(x);
    k.x_weights.push_back(w);
    int d = 0;
    while (d <= s && ++idx[d] == static_cast<int>(v.size()))
      idx[d++] = 0;
    if (d > s)
      break;
  }
  return k;
}

cplx weyl_expectation(const WeylLabel &w, const QuadratureScheme &q) {
  return std::exp(-0.5 * mass_norm_sq(w.f, w.m, q));
}

cplx weyl_product_expectation(const std::vector<WeylLabel> &ws,
                              const QuadratureScheme &q) {
  if (ws.empty())
    throw InvalidArgument("weyl_product_expectation needs at least one label");
  MomentumFunction acc = ws.front().f;
  double phase = 0.0;
  for (std::size_t i = 1; i < ws.size(); ++i) {
    check_common_mass(ws.front(), ws[i]);
    phase -= 0.5 * symplectic_form(acc, ws[i].f, q);
    acc = acc + ws[i].f;
  }
  const double gauss = std::exp(-0.5 * mass_norm_sq(acc, ws.front().m, q));
  return std::polar(gauss, phase);
}

cplx coherent_overlap(const WeylLabel &g, const WeylLabel &h,
                      const QuadratureScheme &q) {
  check_common_mass(g, h);
  return weyl_product_expectation({{-g.f, g.m}, h}, q);
}

double scaling_limit_gap(const MomentumFunction &f, Mass m, DilationParam l,
                         const QuadratureScheme &q) {
  if (f.is_zero())
    return 0.0;
  // delta_l f lives at momenta of order 1/l.
  const QuadratureScheme ql = rescaled(q, 1.0 / l.value);
  const double direct = std::exp(-0.5 * mass_norm_sq(dilate(f, l), m, ql));
  const double intertwined =
      std::exp(-0.5 * mass_norm_sq(f, Mass(l.value * m.value), q));
  if (std::abs(direct - intertwined) > 10.0 * q.rel_tol)
    throw RouteMismatch("direct " + std::to_string(direct) +
                        " vs intertwined " + std::to_string(intertwined));
  const double massless = std::exp(-0.5 * mass_norm_sq(f, Mass(0.0), q));
  return std::abs(direct - massless);
}

cplx averaged_matrix_element(const WeylLabel &g, const MomentumFunction &f,
                             const AveragingKernel &k, DilationParam l, Mass m,
                             const QuadratureScheme &q) {
  if (g.m.value != 0.0)
    throw InvalidArgument("averaged matrix elements live in the massless vacuum");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < k.mu_nodes.size(); ++i) {
    const double mu = k.mu_nodes[i];
    const double wd = k.mu_weights[i] * k.hD(mu) / mu;
    if (wd == 0.0)
      continue;
    const Mass inner(mu * l.value * m.value);
    for (std::size_t j = 0; j < k.x_nodes.size(); ++j) {
      const double wt = k.x_weights[j] * k.hT(k.x_nodes[j]);
      if (wt == 0.0)
        continue;
      const MomentumFunction moved =
          dilate(poincare(f, k.x_nodes[j], LorentzBoost::identity(f.dim()),
                          inner),
                 DilationParam(mu));
      acc += wd * wt * coherent_overlap(g, {moved, g.m}, q);
    }
  }
  return acc;
}

} // namespace scalim
