#pragma once

#include "scalim/testfn.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace scalim {

/// Spatial part (nu_1, ..., nu_s) of a derivative label.
using SpatialIndex = std::array<int, 3>;

/// Radial cutoff profile on [0, inf): equal to 1 on [0, 1], 0 on [2, inf).
class CutoffFunction {
public:
  CutoffFunction(std::string name, std::function<double(double)> profile);

  /// 1 - S(t - 1) with the quintic smoothstep S(u) = 6u^5 - 15u^4 + 10u^3.
  static CutoffFunction smoothstep5();
  /// 1 - psi(t - 1) with psi(u) = e^{-1/u} / (e^{-1/u} + e^{-1/(1-u)}).
  static CutoffFunction smooth_bump();

  double operator()(double t) const;
  const std::string &name() const { return name_; }

private:
  std::string name_;
  std::function<double(double)> profile_;
};

/// Fourier transform of x^nu h(|x| / r) in s dimensions.
///
/// With G^(j)(k) = (-1)^j int_0^{2r} rho^{s-1+2j} h(rho/r) Lambda_{s/2-1+j}(k rho)
/// d rho and Lambda_mu(t) = t^{-mu} J_mu(t), the transform of the monomial
/// times the radial profile is i^{|nu|} times a finite combination of
/// p^{nu - 2i} G^(|nu| - |i|)(|p|).
class CutoffTransform {
public:
  CutoffTransform(const CutoffFunction &h, int s, double r, int n_rho = 96);

  int dim() const { return s_; }
  double radius() const { return r_; }

  /// G^(j) at momentum modulus k.
  double radial(int j, double k) const;
  cplx value(const SpatialIndex &nu, const Vec3 &p) const;
  /// Values at every node of q, evaluating the radial profiles once per shell.
  std::vector<cplx> sample(const SpatialIndex &nu,
                           const QuadratureScheme &q) const;

private:
  cplx assemble(const SpatialIndex &nu, const Vec3 &p,
                const std::vector<double> &g) const;

  int s_;
  double r_;
  std::vector<double> rho_, weight_; // includes h(rho / r)
};

/// Lambda_mu(t) = t^{-mu} J_mu(t), with the value 1 / (2^mu Gamma(mu + 1)) at 0.
double bessel_lambda(double mu, double t);

/// int d^s x x^nu h(|x| / r) u(x) over the ball |x| <= 2r, by radial
/// Gauss-Legendre on [0, r] and [r, 2r] times an angular product rule.
double cutoff_moment(const CutoffFunction &h, double r, const SpatialIndex &nu,
                     int s, const PositionEval &u, int n_rad = 64,
                     int angular_order = 16);

} // namespace scalim
