#include "scalim/quadrature.hpp"

#include "scalim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace scalim {

Rule1D gauss_legendre(int n, double a, double b) {
  if (n < 1)
    throw InvalidArgument("gauss_legendre needs at least one node");
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  if (n == 1) {
    rule.nodes[0] = mid;
    rule.weights[0] = 2.0 * half;
    return rule;
  }
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

double unit_sphere_area(int s) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * s) / std::tgamma(0.5 * s);
}

namespace {

struct AngularRule {
  std::vector<Vec3> dirs;
  std::vector<double> weights;
};

AngularRule angular_rule(int s, int order) {
  AngularRule ang;
  const double pi = std::numbers::pi;
  if (s == 2) {
    const int nphi = 2 * order;
    for (int j = 0; j < nphi; ++j) {
      const double phi = 2.0 * pi * (j + 0.5) / nphi;
      ang.dirs.emplace_back(std::cos(phi), std::sin(phi), 0.0);
      ang.weights.push_back(2.0 * pi / nphi);
    }
  } else if (s == 3) {
    const Rule1D ct = gauss_legendre(order);
    const int nphi = 2 * order;
    for (std::size_t i = 0; i < ct.size(); ++i) {
      const double c = ct.nodes[i];
      const double sn = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int j = 0; j < nphi; ++j) {
        const double phi = 2.0 * pi * (j + 0.5) / nphi;
        ang.dirs.emplace_back(sn * std::cos(phi), sn * std::sin(phi), c);
        ang.weights.push_back(ct.weights[i] * 2.0 * pi / nphi);
      }
    }
  } else {
    throw InvalidArgument("only s = 2 and s = 3 are supported, got s = " +
                          std::to_string(s));
  }
  return ang;
}

} // namespace

QuadratureScheme shell_product(int s, const Rule1D &radial, int angular_order,
                               double rel_tol) {
  if (angular_order < 1)
    throw InvalidArgument("shell_product: angular order must be positive");
  const AngularRule ang = angular_rule(s, angular_order);
  QuadratureScheme q;
  q.s = s;
  q.rel_tol = rel_tol;
  q.nodes.reserve(radial.size() * ang.dirs.size());
  q.weights.reserve(radial.size() * ang.dirs.size());
  for (std::size_t i = 0; i < radial.size(); ++i) {
    const double r = radial.nodes[i];
    const double radial_w = radial.weights[i] * std::pow(r, s - 1);
    q.shell_radius.push_back(r);
    q.shell_offset.push_back(q.nodes.size());
    for (std::size_t a = 0; a < ang.dirs.size(); ++a) {
      q.nodes.push_back(r * ang.dirs[a]);
      q.weights.push_back(radial_w * ang.weights[a]);
    }
  }
  q.shell_offset.push_back(q.nodes.size());
  return q;
}

QuadratureScheme radial_product(int s, double r_max, int n_radial,
                                int angular_order, double rel_tol,
                                bool clustered) {
  if (!(r_max > 0.0) || n_radial < 1 || angular_order < 1)
    throw InvalidArgument("radial_product: bad parameters");
  const Rule1D u = gauss_legendre(n_radial, 0.0, 1.0);
  Rule1D radial;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (clustered) {
      radial.nodes.push_back(r_max * u.nodes[i] * u.nodes[i]);
      radial.weights.push_back(2.0 * r_max * u.nodes[i] * u.weights[i]);
    } else {
      radial.nodes.push_back(r_max * u.nodes[i]);
      radial.weights.push_back(r_max * u.weights[i]);
    }
  }
  return shell_product(s, radial, angular_order, rel_tol);
}

QuadratureScheme log_radial_product(int s, double r_min, double r_max,
                                    int n_radial, int angular_order,
                                    double rel_tol) {
  if (!(r_min > 0.0) || !(r_max > r_min) || n_radial < 1 || angular_order < 1)
    throw InvalidArgument("log_radial_product: bad parameters");
  const Rule1D t = gauss_legendre(n_radial, std::log(r_min), std::log(r_max));
  Rule1D radial;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = std::exp(t.nodes[i]);
    radial.nodes.push_back(r);
    radial.weights.push_back(r * t.weights[i]);
  }
  return shell_product(s, radial, angular_order, rel_tol);
}

QuadratureScheme rescaled(const QuadratureScheme &q, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw InvalidArgument("rescaled: factor must be positive");
  QuadratureScheme out = q;
  const double jac = std::pow(factor, q.s);
  for (auto &x : out.nodes)
    x *= factor;
  for (auto &w : out.weights)
    w *= jac;
  for (auto &r : out.shell_radius)
    r *= factor;
  return out;
}

double quad_self_test_error(const QuadratureScheme &q) {
  const int s = q.s;
  const double pi = std::numbers::pi;
  const double area = unit_sphere_area(s);
  Vec3 shift(0.6, -0.4, s == 3 ? 0.3 : 0.0);

  struct Ref {
    double value;
    double exact;
  };
  const Ref refs[] = {
      {q.integrate([](const Vec3 &p) { return std::exp(-p.squaredNorm()); }),
       std::pow(pi, 0.5 * s)},
      {q.integrate([](const Vec3 &p) {
         return std::exp(-p.squaredNorm()) / p.norm();
       }),
       area * std::tgamma(0.5 * (s - 1)) / 2.0},
      {q.integrate([&](const Vec3 &p) {
         return std::exp(-(p - shift).squaredNorm());
       }),
       std::pow(pi, 0.5 * s)},
      {q.integrate([&](const Vec3 &p) {
         return std::exp(-0.25 * (p - shift).squaredNorm());
       }),
       std::pow(4.0 * pi, 0.5 * s)},
      {q.integrate([](const Vec3 &p) { return std::exp(-2.0 * p.norm()); }),
       area * std::tgamma(static_cast<double>(s)) / std::pow(2.0, s)},
  };
  double worst = 0.0;
  for (const auto &r : refs)
    worst = std::max(worst, std::abs(r.value - r.exact) / std::abs(r.exact));
  return worst;
}

QuadratureScheme quad_build(int s, double rel_tol) {
  if (!(rel_tol > 0.0) || rel_tol > 1e-2)
    throw InvalidArgument("quad_build: rel_tol must lie in (0, 1e-2]");
  if (s != 2 && s != 3)
    throw InvalidArgument("quad_build: only s = 2 and s = 3 are supported");
  // Radius where e^{-2r} r^{s-1} drops well below the target.
  const double r_max = 4.0 + 0.5 * -std::log(rel_tol * 1e-3);
  // Margin of 100 over the references.
  const double target = std::max(1e-2 * rel_tol, 2e-14);
  const int radial[] = {24, 32, 48, 64, 96, 128, 192, 256};
  const int angular[] = {4, 6, 8, 12, 16, 24};
  for (int nr : radial) {
    for (int na : angular) {
      QuadratureScheme q = radial_product(s, r_max, nr, na, rel_tol);
      if (quad_self_test_error(q) <= target)
        return q;
    }
  }
  throw ToleranceUnreachable("no scheme within the node budget reaches " +
                             std::to_string(rel_tol));
}

} // namespace scalim
