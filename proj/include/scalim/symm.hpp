#pragma once

#include "scalim/testfn.hpp"

#include <Eigen/Core>

namespace scalim {

/// Orthochronous Lorentz transformation on R^{1+s}, stored as a 4x4 matrix.
/// For s = 2 the last row and column are those of the identity.
class LorentzBoost {
public:
  /// Validates Lambda^T eta Lambda = eta (1e-12 entrywise) and Lambda_00 >= 1.
  LorentzBoost(int s, const Eigen::Matrix4d &matrix);

  static LorentzBoost identity(int s);
  /// Rotation by angle about the unit axis (for s = 2 the axis is ignored and
  /// the rotation acts in the 1-2 plane).
  static LorentzBoost rotation(int s, const Vec3 &axis, double angle);
  /// Pure boost with the given rapidity along direction.
  static LorentzBoost pure_boost(int s, const Vec3 &direction, double rapidity);

  LorentzBoost operator*(const LorentzBoost &o) const;
  LorentzBoost inverse() const;

  int dim() const { return s_; }
  const Eigen::Matrix4d &matrix() const { return m_; }

private:
  int s_;
  Eigen::Matrix4d m_;
};

/// Dilation parameter lambda > 0.
struct DilationParam {
  double value;
  explicit DilationParam(double lambda);
  operator double() const { return value; }
};

/// Space-time translation (t, x).
struct SpacetimeShift {
  double t = 0.0;
  Vec3 x = Vec3::Zero();
};

/// p -> e^{-i p.x} f~_{R,I}(p).
MomentumFunction translate_space(const MomentumFunction &f, const Vec3 &x);

/// Mass-m time translation acting on (f~_R, f~_I).
MomentumFunction translate_time(const MomentumFunction &f, double t, Mass m);

/// Mass-m Lorentz action built from the reflected/transported on-shell momenta
/// Lambda^{-1} p and Lambda^T p.
MomentumFunction boost(const MomentumFunction &f, const LorentzBoost &lambda,
                       Mass m);

/// f~_R -> lambda^{(s-1)/2} f~_R(lambda p), f~_I -> lambda^{(s+1)/2} f~_I(lambda p).
MomentumFunction dilate(const MomentumFunction &f, DilationParam lambda);

/// tau^{(m)}_{a,Lambda} f: Lorentz part first, then the space-time shift.
MomentumFunction poincare(const MomentumFunction &f, const SpacetimeShift &a,
                          const LorentzBoost &lambda, Mass m);

/// || delta_l tau^{(l m)}_{a,L} f - tau^{(m)}_{l a,L} delta_l f ||_0.
double mass_rescaling_check(const MomentumFunction &f, const SpacetimeShift &a,
                            const LorentzBoost &lambda, DilationParam l,
                            Mass m, const QuadratureScheme &q);

/// || tau^{(m)}_{a,L} f - tau^{(0)}_{a,L} f ||_0.
double mass_zero_gap(const MomentumFunction &f, const SpacetimeShift &a,
                     const LorentzBoost &lambda, Mass m,
                     const QuadratureScheme &q);

} // namespace scalim
