#pragma once

#include "scalim/quadrature.hpp"

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace scalim {

/// Number of spatial dimensions, s >= 2.
struct SpatialDim {
  int value;
  explicit SpatialDim(int s);
  operator int() const { return value; }
};

/// Particle mass m >= 0 in inverse-length units.
struct Mass {
  double value;
  explicit Mass(double m);
  operator double() const { return value; }
};

using MomentumEval = std::function<cplx(const Vec3 &)>;
using PositionEval = std::function<double(const Vec3 &)>;

/// Momentum-space representation (f~_R, f~_I) of a test function
/// f = Re f + i Im f, where f~_R and f~_I are the Fourier transforms
/// (2 pi)^{-s/2} int dx e^{-ipx} of the real functions Re f and Im f.
///
/// Both parts are closed-form evaluators, so symmetry actions compose exactly.
/// Functions built from the Gaussian family also carry their position-space
/// form, which the short-distance coefficients need.
class MomentumFunction {
public:
  MomentumFunction(int s, MomentumEval fr, MomentumEval fi);

  static MomentumFunction zero(int s);

  int dim() const { return s_; }
  cplx fr(const Vec3 &p) const { return fr_(p); }
  cplx fi(const Vec3 &p) const { return fi_(p); }
  /// f~(p) = f~_R(p) + i f~_I(p).
  cplx value(const Vec3 &p) const { return fr_(p) + cplx(0, 1) * fi_(p); }

  bool is_zero() const { return zero_; }

  bool has_position_form() const { return static_cast<bool>(pos_re_); }
  double real_at(const Vec3 &x) const;
  double imag_at(const Vec3 &x) const;
  /// Radius outside which the position form is negligible (< 1e-16 relative).
  double support_radius() const { return support_radius_; }

  MomentumFunction with_position_form(PositionEval re, PositionEval im,
                                      double support_radius) const;

  MomentumFunction operator+(const MomentumFunction &o) const;
  MomentumFunction operator-(const MomentumFunction &o) const;
  MomentumFunction operator-() const { return scaled(-1.0); }
  MomentumFunction scaled(double a) const;

private:
  int s_;
  MomentumEval fr_, fi_;
  PositionEval pos_re_, pos_im_;
  double support_radius_ = 0.0;
  bool zero_ = false;
};

/// Real position-space term
///   amplitude * (x - center)^power * exp(-|x - center|^2 / (2 width^2)).
struct GaussTerm {
  double amplitude = 1.0;
  double width = 1.0;
  Vec3 center = Vec3::Zero();
  std::array<int, 3> power{0, 0, 0};
};

/// Test function whose real and imaginary parts are sums of Gaussian terms.
MomentumFunction gauss_poly(int s, const std::vector<GaussTerm> &real_part,
                            const std::vector<GaussTerm> &imag_part);

/// Shorthand: Re f = a_re G, Im f = a_im G with G a centered Gaussian of the
/// given width, so f~_R(p) = a_re width^s exp(-width^2 |p|^2 / 2).
MomentumFunction gaussian(int s, double width = 1.0, double amp_re = 1.0,
                          double amp_im = 0.0);

/// omega_m(p) = sqrt(m^2 + |p|^2).
double dispersion(Mass m, const Vec3 &p);

/// One-particle vector xi_f(p) = 2^{-1/2}(omega^{-1/2} f~_R + i omega^{1/2} f~_I).
/// Its L^2 norm squared is ||f||_m^2.
cplx one_particle(const MomentumFunction &f, Mass m, const Vec3 &p);

/// ||f||_m^2 = (1/2) int dp |omega^{-1/2} f~_R + i omega^{1/2} f~_I|^2.
/// Throws NonFiniteIntegral when the quadrature accumulates non-finite values.
double mass_norm_sq(const MomentumFunction &f, Mass m,
                    const QuadratureScheme &q);

/// sigma(f, g) = Im int dp conj(f~(p)) g~(p).
double symplectic_form(const MomentumFunction &f, const MomentumFunction &g,
                       const QuadratureScheme &q);

/// Largest |f~_X(-p) - conj(f~_X(p))| over the given momenta, X in {R, I}.
double conjugate_symmetry_defect(const MomentumFunction &f,
                                 std::span<const Vec3> points);

} // namespace scalim
