#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstddef>
#include <type_traits>
#include <vector>

namespace scalim {

using cplx = std::complex<double>;

/// Point of R^s stored in three components; components beyond s are zero.
using Vec3 = Eigen::Vector3d;

/// One-dimensional rule on an interval.
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule with n nodes on [a, b].
Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Nodes and positive weights in R^s with a declared target tolerance.
///
/// Nodes are grouped in spherical shells: nodes in
/// [shell_offset[i], shell_offset[i+1]) share the radius shell_radius[i].
/// Integrands that depend on |p| only through a few radial profiles use this
/// grouping to evaluate the profiles once per shell.
struct QuadratureScheme {
  int s = 3;
  double rel_tol = 1e-8;
  std::vector<Vec3> nodes;
  std::vector<double> weights;
  std::vector<double> shell_radius;
  std::vector<std::size_t> shell_offset;

  std::size_t size() const { return nodes.size(); }

  template <class F> auto integrate(F &&f) const {
    using R = std::decay_t<decltype(f(nodes.front()))>;
    R acc{};
    for (std::size_t i = 0; i < nodes.size(); ++i)
      acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// Product of an arbitrary radial rule (weights for dr, without r^{s-1}) with
/// the angular rule of the given order.
QuadratureScheme shell_product(int s, const Rule1D &radial, int angular_order,
                               double rel_tol);

/// Radial x angular product rule on the ball |p| <= r_max.
///
/// The radial variable is mapped as r = r_max u^2 (when clustered) so that
/// integrands with r^{-1} or r^{1/2} behaviour at the origin stay smooth in u.
/// The angular rule integrates spherical harmonics up to degree
/// 2 * angular_order - 1 exactly (s = 3), or trigonometric polynomials of that
/// degree (s = 2).
QuadratureScheme radial_product(int s, double r_max, int n_radial,
                                int angular_order, double rel_tol,
                                bool clustered = true);

/// Radial rule uniform in log r on [r_min, r_max]. Suited to integrands
/// spread over several decades of momentum, such as dilated test functions.
QuadratureScheme log_radial_product(int s, double r_min, double r_max,
                                    int n_radial, int angular_order,
                                    double rel_tol);

/// Builds a scheme whose Gaussian and exponential self-tests pass rel_tol.
/// Throws InvalidArgument unless rel_tol is in (0, 1e-2], and
/// ToleranceUnreachable if the node budget is exhausted.
QuadratureScheme quad_build(int s, double rel_tol);

/// The same scheme after the substitution p -> factor * p: nodes are scaled by
/// factor and weights by factor^s. Useful when an integrand lives at a
/// momentum scale far from 1.
QuadratureScheme rescaled(const QuadratureScheme &q, double factor);

/// Largest relative error of the scheme on its reference integrands.
double quad_self_test_error(const QuadratureScheme &q);

/// Surface area of the unit sphere S^{s-1}.
double unit_sphere_area(int s);

} // namespace scalim
