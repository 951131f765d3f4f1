#include "scalim/symm.hpp"

#include "scalim/errors.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace scalim {

namespace {

Eigen::Matrix4d minkowski(int s) {
  Eigen::Matrix4d eta = Eigen::Matrix4d::Identity();
  for (int k = 1; k <= s; ++k)
    eta(k, k) = -1.0;
  return eta;
}

// Below this momentum the boost's omega^{-1} factor at m = 0 is evaluated on
// the sphere of this radius in the same direction.
constexpr double kInfraredRadius = 1e-8;

Vec3 infrared_regularize(const Vec3 &p, Mass m) {
  if (m.value > 0.0)
    return p;
  const double n = p.norm();
  if (n >= kInfraredRadius)
    return p;
  if (n == 0.0)
    return Vec3(0.0, 0.0, kInfraredRadius);
  return p * (kInfraredRadius / n);
}

} // namespace

LorentzBoost::LorentzBoost(int s, const Eigen::Matrix4d &matrix)
    : s_(s), m_(matrix) {
  if (s != 2 && s != 3)
    throw InvalidArgument("Lorentz transformations need s = 2 or s = 3");
  if (s == 2) {
    for (int k = 0; k < 4; ++k)
      if (std::abs(m_(3, k) - (k == 3)) > 1e-12 ||
          std::abs(m_(k, 3) - (k == 3)) > 1e-12)
        throw InvalidArgument("s = 2 boost must act trivially on axis 3");
  }
  const Eigen::Matrix4d eta = minkowski(s);
  const Eigen::Matrix4d defect = m_.transpose() * eta * m_ - eta;
  if (defect.cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidArgument("matrix does not preserve the Minkowski form");
  if (m_(0, 0) < 1.0 - 1e-12)
    throw InvalidArgument("Lorentz transformation is not orthochronous");
}

LorentzBoost LorentzBoost::identity(int s) {
  return LorentzBoost(s, Eigen::Matrix4d::Identity());
}

LorentzBoost LorentzBoost::rotation(int s, const Vec3 &axis, double angle) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  if (s == 2) {
    m(1, 1) = std::cos(angle);
    m(1, 2) = -std::sin(angle);
    m(2, 1) = std::sin(angle);
    m(2, 2) = std::cos(angle);
  } else {
    m.block<3, 3>(1, 1) =
        Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  }
  return LorentzBoost(s, m);
}

LorentzBoost LorentzBoost::pure_boost(int s, const Vec3 &direction,
                                      double rapidity) {
  Vec3 n = direction;
  if (s == 2)
    n[2] = 0.0;
  n.normalize();
  const double ch = std::cosh(rapidity), sh = std::sinh(rapidity);
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(0, 0) = ch;
  for (int k = 0; k < 3; ++k) {
    m(0, k + 1) = sh * n[k];
    m(k + 1, 0) = sh * n[k];
    for (int l = 0; l < 3; ++l)
      m(k + 1, l + 1) += (ch - 1.0) * n[k] * n[l];
  }
  return LorentzBoost(s, m);
}

LorentzBoost LorentzBoost::operator*(const LorentzBoost &o) const {
  if (o.s_ != s_)
    throw InvalidArgument("dimension mismatch in Lorentz product");
  return LorentzBoost(s_, m_ * o.m_);
}

LorentzBoost LorentzBoost::inverse() const {
  const Eigen::Matrix4d eta = minkowski(s_);
  return LorentzBoost(s_, eta * m_.transpose() * eta);
}

DilationParam::DilationParam(double lambda) : value(lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("dilation parameter must be positive");
}

MomentumFunction translate_space(const MomentumFunction &f, const Vec3 &x) {
  if (f.is_zero())
    return f;
  auto phase = [x](const Vec3 &p) {
    const double a = -p.dot(x);
    return cplx(std::cos(a), std::sin(a));
  };
  MomentumFunction g(
      f.dim(), [f, phase](const Vec3 &p) { return phase(p) * f.fr(p); },
      [f, phase](const Vec3 &p) { return phase(p) * f.fi(p); });
  if (f.has_position_form()) {
    g = g.with_position_form(
        [f, x](const Vec3 &y) { return f.real_at(y - x); },
        [f, x](const Vec3 &y) { return f.imag_at(y - x); },
        f.support_radius() + x.norm());
  }
  return g;
}

MomentumFunction translate_time(const MomentumFunction &f, double t, Mass m) {
  if (f.is_zero() || t == 0.0)
    return f;
  // sin(t w) / w, continued by its series at small w.
  auto sinc_t = [t](double w) {
    const double x = t * w;
    if (std::abs(w) < kInfraredRadius)
      return t * (1.0 - x * x / 6.0);
    return std::sin(x) / w;
  };
  auto fr = [f, t, m](const Vec3 &p) {
    const double w = dispersion(m, p);
    return std::cos(t * w) * f.fr(p) - w * std::sin(t * w) * f.fi(p);
  };
  auto fi = [f, t, m, sinc_t](const Vec3 &p) {
    const double w = dispersion(m, p);
    return std::cos(t * w) * f.fi(p) + sinc_t(w) * f.fr(p);
  };
  return MomentumFunction(f.dim(), fr, fi);
}

MomentumFunction boost(const MomentumFunction &f, const LorentzBoost &lambda,
                       Mass m) {
  if (f.dim() != lambda.dim())
    throw InvalidArgument("dimension mismatch between function and boost");
  if (f.is_zero())
    return f;
  const Eigen::Matrix4d eta = minkowski(f.dim());
  const Eigen::Matrix4d inv = eta * lambda.matrix().transpose() * eta;
  const Eigen::Matrix4d tr = lambda.matrix().transpose();

  // Evaluates (phi, psi) of the transported momenta at the on-shell point.
  auto phi_psi = [f, inv, tr, m](const Vec3 &p0) {
    const Vec3 p = infrared_regularize(p0, m);
    const double w = dispersion(m, p);
    const Eigen::Vector4d on_shell(w, p[0], p[1], p[2]);
    const Eigen::Vector4d a = inv * on_shell;
    const Eigen::Vector4d b = tr * on_shell;
    const Vec3 pa = a.tail<3>(), pb = b.tail<3>();
    const cplx ra = f.fr(pa), rb = f.fr(pb);
    const cplx ia = f.fi(pa), ib = f.fi(pb);
    const cplx half_i_inv(0.0, -0.5); // 1/(2i)
    const cplx phi = 0.5 * (ra + rb) + half_i_inv * (a[0] * ia - b[0] * ib);
    const cplx psi = -half_i_inv * (ra - rb) + 0.5 * (a[0] * ia + b[0] * ib);
    return std::pair<cplx, cplx>(phi, psi / w);
  };
  return MomentumFunction(
      f.dim(), [phi_psi](const Vec3 &p) { return phi_psi(p).first; },
      [phi_psi](const Vec3 &p) { return phi_psi(p).second; });
}

MomentumFunction dilate(const MomentumFunction &f, DilationParam lambda) {
  const double l = lambda.value;
  if (f.is_zero() || l == 1.0)
    return f;
  const int s = f.dim();
  const double cr = std::pow(l, 0.5 * (s - 1));
  const double ci = std::pow(l, 0.5 * (s + 1));
  MomentumFunction g(
      s, [f, l, cr](const Vec3 &p) { return cr * f.fr(l * p); },
      [f, l, ci](const Vec3 &p) { return ci * f.fi(l * p); });
  if (f.has_position_form()) {
    // (delta_l f)(x) = l^{-(s+1)/2} Re f(x/l) + i l^{-(s-1)/2} Im f(x/l).
    const double pr = std::pow(l, -0.5 * (s + 1));
    const double pi = std::pow(l, -0.5 * (s - 1));
    g = g.with_position_form(
        [f, l, pr](const Vec3 &x) { return pr * f.real_at(x / l); },
        [f, l, pi](const Vec3 &x) { return pi * f.imag_at(x / l); },
        l * f.support_radius());
  }
  return g;
}

MomentumFunction poincare(const MomentumFunction &f, const SpacetimeShift &a,
                          const LorentzBoost &lambda, Mass m) {
  MomentumFunction g = f;
  if (!lambda.matrix().isIdentity(0.0))
    g = boost(g, lambda, m);
  if (a.x.squaredNorm() > 0.0)
    g = translate_space(g, a.x);
  if (a.t != 0.0)
    g = translate_time(g, a.t, m);
  return g;
}

double mass_rescaling_check(const MomentumFunction &f, const SpacetimeShift &a,
                            const LorentzBoost &lambda, DilationParam l,
                            Mass m, const QuadratureScheme &q) {
  const Mass scaled_mass(l.value * m.value);
  const MomentumFunction lhs = dilate(poincare(f, a, lambda, scaled_mass), l);
  const SpacetimeShift la{l.value * a.t, l.value * a.x};
  const MomentumFunction rhs = poincare(dilate(f, l), la, lambda, m);
  return std::sqrt(mass_norm_sq(lhs - rhs, Mass(0.0), q));
}

double mass_zero_gap(const MomentumFunction &f, const SpacetimeShift &a,
                     const LorentzBoost &lambda, Mass m,
                     const QuadratureScheme &q) {
  if (m.value == 0.0)
    return 0.0;
  const MomentumFunction diff =
      poincare(f, a, lambda, m) - poincare(f, a, lambda, Mass(0.0));
  return std::sqrt(mass_norm_sq(diff, Mass(0.0), q));
}

} // namespace scalim
