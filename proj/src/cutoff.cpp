#include "scalim/cutoff.hpp"

#include "scalim/errors.hpp"

#include <cmath>

namespace scalim {

CutoffFunction::CutoffFunction(std::string name,
                               std::function<double(double)> profile)
    : name_(std::move(name)), profile_(std::move(profile)) {}

CutoffFunction CutoffFunction::smoothstep5() {
  return CutoffFunction("smoothstep5", [](double t) {
    const double u = t - 1.0;
    if (u <= 0.0)
      return 1.0;
    if (u >= 1.0)
      return 0.0;
    return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
  });
}

CutoffFunction CutoffFunction::smooth_bump() {
  return CutoffFunction("smooth_bump", [](double t) {
    const double u = t - 1.0;
    if (u <= 0.0)
      return 1.0;
    if (u >= 1.0)
      return 0.0;
    const double a = std::exp(-1.0 / u);
    const double b = std::exp(-1.0 / (1.0 - u));
    return b / (a + b);
  });
}

double CutoffFunction::operator()(double t) const { return profile_(t); }

double bessel_lambda(double mu, double t) {
  t = std::abs(t);
  if (t < 3.0) {
    // Power series; terms decay fast for t < 3.
    const double q = -0.25 * t * t;
    double term = 1.0 / (std::pow(2.0, mu) * std::tgamma(mu + 1.0));
    double sum = term;
    for (int k = 1; k < 60; ++k) {
      term *= q / (k * (mu + k));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum))
        break;
    }
    return sum;
  }
  return std::cyl_bessel_j(mu, t) / std::pow(t, mu);
}

CutoffTransform::CutoffTransform(const CutoffFunction &h, int s, double r,
                                 int n_rho)
    : s_(s), r_(r) {
  if (!(r > 0.0))
    throw InvalidArgument("cutoff radius must be positive");
  if (s != 2 && s != 3)
    throw InvalidArgument("cutoff transforms need s = 2 or s = 3");
  for (const auto &[a, b] : {std::pair{0.0, r}, std::pair{r, 2.0 * r}}) {
    const Rule1D g = gauss_legendre(n_rho, a, b);
    for (std::size_t i = 0; i < g.size(); ++i) {
      rho_.push_back(g.nodes[i]);
      weight_.push_back(g.weights[i] * h(g.nodes[i] / r));
    }
  }
}

double CutoffTransform::radial(int j, double k) const {
  const double mu = 0.5 * s_ - 1.0 + j;
  double acc = 0.0;
  for (std::size_t i = 0; i < rho_.size(); ++i) {
    const double rho = rho_[i];
    acc += weight_[i] * std::pow(rho, s_ - 1 + 2 * j) *
           bessel_lambda(mu, k * rho);
  }
  return (j % 2 == 0) ? acc : -acc;
}

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

} // namespace

cplx CutoffTransform::assemble(const SpatialIndex &nu, const Vec3 &p,
                               const std::vector<double> &g) const {
  const int order = nu[0] + nu[1] + nu[2];
  // Sum over i_k <= nu_k / 2 of prod_k nu_k!/(2^i i!(nu_k-2i)!) p_k^{nu_k-2i}
  // times G^(order - sum i).
  double acc = 0.0;
  for (int i0 = 0; 2 * i0 <= nu[0]; ++i0)
    for (int i1 = 0; 2 * i1 <= nu[1]; ++i1)
      for (int i2 = 0; 2 * i2 <= nu[2]; ++i2) {
        const int is[3] = {i0, i1, i2};
        double c = 1.0;
        for (int k = 0; k < 3; ++k) {
          c *= factorial(nu[k]) /
               (std::pow(2.0, is[k]) * factorial(is[k]) *
                factorial(nu[k] - 2 * is[k]));
          c *= std::pow(p[k], nu[k] - 2 * is[k]);
        }
        acc += c * g[order - (i0 + i1 + i2)];
      }
  static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return ipow[order % 4] * acc;
}

cplx CutoffTransform::value(const SpatialIndex &nu, const Vec3 &p) const {
  const int order = nu[0] + nu[1] + nu[2];
  std::vector<double> g(order + 1);
  const double k = p.norm();
  for (int j = 0; j <= order; ++j)
    g[j] = radial(j, k);
  return assemble(nu, p, g);
}

std::vector<cplx> CutoffTransform::sample(const SpatialIndex &nu,
                                          const QuadratureScheme &q) const {
  const int order = nu[0] + nu[1] + nu[2];
  std::vector<cplx> out(q.size());
  std::vector<double> g(order + 1);
  for (std::size_t sh = 0; sh + 1 < q.shell_offset.size(); ++sh) {
    for (int j = 0; j <= order; ++j)
      g[j] = radial(j, q.shell_radius[sh]);
    for (std::size_t i = q.shell_offset[sh]; i < q.shell_offset[sh + 1]; ++i)
      out[i] = assemble(nu, q.nodes[i], g);
  }
  return out;
}

double cutoff_moment(const CutoffFunction &h, double r, const SpatialIndex &nu,
                     int s, const PositionEval &u, int n_rad,
                     int angular_order) {
  Rule1D radial;
  for (const auto &[a, b] : {std::pair{0.0, r}, std::pair{r, 2.0 * r}}) {
    const Rule1D g = gauss_legendre(n_rad, a, b);
    radial.nodes.insert(radial.nodes.end(), g.nodes.begin(), g.nodes.end());
    radial.weights.insert(radial.weights.end(), g.weights.begin(),
                          g.weights.end());
  }
  const QuadratureScheme ball = shell_product(s, radial, angular_order, 0.0);
  return ball.integrate([&](const Vec3 &x) {
    double mono = 1.0;
    for (int k = 0; k < s; ++k)
      mono *= std::pow(x[k], nu[k]);
    return mono * h(x.norm() / r) * u(x);
  });
}

} // namespace scalim
