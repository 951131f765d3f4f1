#include "scalim/testfn.hpp"

#include "scalim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace scalim {

SpatialDim::SpatialDim(int s) : value(s) {
  if (s < 2)
    throw InvalidArgument("spatial dimension must be >= 2");
}

Mass::Mass(double m) : value(m) {
  if (!(m >= 0.0) || !std::isfinite(m))
    throw InvalidArgument("mass must be finite and >= 0");
}

MomentumFunction::MomentumFunction(int s, MomentumEval fr, MomentumEval fi)
    : s_(s), fr_(std::move(fr)), fi_(std::move(fi)) {
  if (s < 2)
    throw InvalidArgument("spatial dimension must be >= 2");
}

MomentumFunction MomentumFunction::zero(int s) {
  auto z = [](const Vec3 &) { return cplx(0.0); };
  MomentumFunction f(s, z, z);
  f.zero_ = true;
  auto pz = [](const Vec3 &) { return 0.0; };
  f.pos_re_ = pz;
  f.pos_im_ = pz;
  return f;
}

double MomentumFunction::real_at(const Vec3 &x) const {
  if (!pos_re_)
    throw InvalidArgument("test function has no position-space form");
  return pos_re_(x);
}

double MomentumFunction::imag_at(const Vec3 &x) const {
  if (!pos_im_)
    throw InvalidArgument("test function has no position-space form");
  return pos_im_(x);
}

MomentumFunction
MomentumFunction::with_position_form(PositionEval re, PositionEval im,
                                     double support_radius) const {
  MomentumFunction f = *this;
  f.pos_re_ = std::move(re);
  f.pos_im_ = std::move(im);
  f.support_radius_ = support_radius;
  return f;
}

MomentumFunction MomentumFunction::operator+(const MomentumFunction &o) const {
  if (o.s_ != s_)
    throw InvalidArgument("dimension mismatch in test-function sum");
  if (zero_)
    return o;
  if (o.zero_)
    return *this;
  auto a = *this;
  auto b = o;
  MomentumFunction f(
      s_, [a, b](const Vec3 &p) { return a.fr(p) + b.fr(p); },
      [a, b](const Vec3 &p) { return a.fi(p) + b.fi(p); });
  if (has_position_form() && o.has_position_form()) {
    f.pos_re_ = [a, b](const Vec3 &x) { return a.real_at(x) + b.real_at(x); };
    f.pos_im_ = [a, b](const Vec3 &x) { return a.imag_at(x) + b.imag_at(x); };
    f.support_radius_ = std::max(support_radius_, o.support_radius_);
  }
  return f;
}

MomentumFunction MomentumFunction::operator-(const MomentumFunction &o) const {
  return *this + o.scaled(-1.0);
}

MomentumFunction MomentumFunction::scaled(double c) const {
  if (zero_ || c == 0.0)
    return zero(s_);
  auto a = *this;
  MomentumFunction f(
      s_, [a, c](const Vec3 &p) { return c * a.fr(p); },
      [a, c](const Vec3 &p) { return c * a.fi(p); });
  if (has_position_form()) {
    f.pos_re_ = [a, c](const Vec3 &x) { return c * a.real_at(x); };
    f.pos_im_ = [a, c](const Vec3 &x) { return c * a.imag_at(x); };
    f.support_radius_ = support_radius_;
  }
  return f;
}

namespace {

double hermite_he(int n, double x) {
  double h0 = 1.0, h1 = x;
  if (n == 0)
    return h0;
  for (int k = 1; k < n; ++k) {
    const double h2 = x * h1 - k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

cplx term_momentum(int s, const GaussTerm &t, const Vec3 &p) {
  // FT of x^a e^{-x^2/(2w^2)} per axis: (i d/dp)^a [w e^{-w^2 p^2/2}]
  //   = w (-i w)^a He_a(w p) e^{-w^2 p^2/2}.
  const double w = t.width;
  cplx poly = 1.0;
  for (int k = 0; k < s; ++k) {
    const int a = t.power[k];
    if (a == 0)
      continue;
    poly *= std::pow(cplx(0.0, -w), a) * hermite_he(a, w * p[k]);
  }
  const double phase = -p.dot(t.center);
  return t.amplitude * std::pow(w, s) * std::exp(-0.5 * w * w * p.squaredNorm()) *
         poly * cplx(std::cos(phase), std::sin(phase));
}

double term_position(int s, const GaussTerm &t, const Vec3 &x) {
  const Vec3 d = x - t.center;
  double poly = 1.0;
  for (int k = 0; k < s; ++k)
    if (t.power[k] != 0)
      poly *= std::pow(d[k], t.power[k]);
  return t.amplitude * poly *
         std::exp(-0.5 * d.squaredNorm() / (t.width * t.width));
}

double term_support(const GaussTerm &t) {
  const int order = t.power[0] + t.power[1] + t.power[2];
  return t.center.norm() + t.width * (9.0 + order);
}

} // namespace

MomentumFunction gauss_poly(int s, const std::vector<GaussTerm> &real_part,
                            const std::vector<GaussTerm> &imag_part) {
  for (const auto *part : {&real_part, &imag_part})
    for (const auto &t : *part) {
      if (!(t.width > 0.0))
        throw InvalidArgument("Gaussian width must be positive");
      if (s == 2 && (t.power[2] != 0 || t.center[2] != 0.0))
        throw InvalidArgument("third component used with s = 2");
    }
  auto re = std::make_shared<const std::vector<GaussTerm>>(real_part);
  auto im = std::make_shared<const std::vector<GaussTerm>>(imag_part);
  auto mom = [s](std::shared_ptr<const std::vector<GaussTerm>> terms) {
    return [s, terms](const Vec3 &p) {
      cplx acc = 0.0;
      for (const auto &t : *terms)
        acc += term_momentum(s, t, p);
      return acc;
    };
  };
  auto pos = [s](std::shared_ptr<const std::vector<GaussTerm>> terms) {
    return [s, terms](const Vec3 &x) {
      double acc = 0.0;
      for (const auto &t : *terms)
        acc += term_position(s, t, x);
      return acc;
    };
  };
  double radius = 0.0;
  for (const auto *part : {&real_part, &imag_part})
    for (const auto &t : *part)
      radius = std::max(radius, term_support(t));
  if (real_part.empty() && imag_part.empty())
    return MomentumFunction::zero(s);
  return MomentumFunction(s, mom(re), mom(im))
      .with_position_form(pos(re), pos(im), radius);
}

MomentumFunction gaussian(int s, double width, double amp_re, double amp_im) {
  std::vector<GaussTerm> re, im;
  if (amp_re != 0.0)
    re.push_back({amp_re, width, Vec3::Zero(), {0, 0, 0}});
  if (amp_im != 0.0)
    im.push_back({amp_im, width, Vec3::Zero(), {0, 0, 0}});
  return gauss_poly(s, re, im);
}

double dispersion(Mass m, const Vec3 &p) {
  return std::sqrt(m.value * m.value + p.squaredNorm());
}

cplx one_particle(const MomentumFunction &f, Mass m, const Vec3 &p) {
  const double w = dispersion(m, p);
  const double sw = std::sqrt(w);
  return (f.fr(p) / sw + cplx(0.0, 1.0) * sw * f.fi(p)) / std::sqrt(2.0);
}

double mass_norm_sq(const MomentumFunction &f, Mass m,
                    const QuadratureScheme &q) {
  if (f.is_zero())
    return 0.0;
  const double v =
      q.integrate([&](const Vec3 &p) { return std::norm(one_particle(f, m, p)); });
  if (!std::isfinite(v))
    throw NonFiniteIntegral("mass norm integrand is not finite");
  return v;
}

double symplectic_form(const MomentumFunction &f, const MomentumFunction &g,
                       const QuadratureScheme &q) {
  if (f.is_zero() || g.is_zero())
    return 0.0;
  const cplx v = q.integrate(
      [&](const Vec3 &p) { return std::conj(f.value(p)) * g.value(p); });
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw NonFiniteIntegral("symplectic integrand is not finite");
  return v.imag();
}

double conjugate_symmetry_defect(const MomentumFunction &f,
                                 std::span<const Vec3> points) {
  double worst = 0.0;
  for (const auto &p : points) {
    worst = std::max(worst, std::abs(f.fr(-p) - std::conj(f.fr(p))));
    worst = std::max(worst, std::abs(f.fi(-p) - std::conj(f.fi(p))));
  }
  return worst;
}

} // namespace scalim
