#pragma once

#include "scalim/symm.hpp"

#include <functional>
#include <vector>

namespace scalim {

/// Label of the Weyl operator W(f) in the mass-m vacuum representation.
struct WeylLabel {
  MomentumFunction f;
  Mass m;
};

/// Dilation x space-time translation averaging kernel.
///
/// The dilation part is integrated against dmu/mu, the translation part
/// against dt d^s x. Quadrature weights refer to dmu and dt d^s x; the kernel
/// values multiply them.
struct AveragingKernel {
  std::function<double(double)> hD;
  std::function<double(const SpacetimeShift &)> hT;
  std::vector<double> mu_nodes, mu_weights;
  std::vector<SpacetimeShift> x_nodes;
  std::vector<double> x_weights;
};

/// Normalized smooth bump kernels: hD is a bump in log(mu) of half-width
/// log_width (must be < log a for support in (1/a, a)), hT a product bump of
/// half-width x_width in every space-time direction. Gauss-Legendre with
/// n_mu nodes in log(mu) and n_x nodes per space-time axis.
AveragingKernel make_averaging_kernel(int s, double log_width, double x_width,
                                      int n_mu = 8, int n_x = 4);

/// omega^(m)(W(f)) = exp(-||f||_m^2 / 2).
cplx weyl_expectation(const WeylLabel &w, const QuadratureScheme &q);

/// Expectation of W(f_1) ... W(f_k), folding the Weyl relation left to right.
cplx weyl_product_expectation(const std::vector<WeylLabel> &ws,
                              const QuadratureScheme &q);

/// <W(g) Omega, W(h) Omega>.
cplx coherent_overlap(const WeylLabel &g, const WeylLabel &h,
                      const QuadratureScheme &q);

/// |omega^(m)(W(delta_l f)) - omega^(0)(W(f))|. The first term is evaluated
/// directly on a quadrature rescaled to the dilated function and through
/// omega^(m)(W(delta_l f)) = omega^(l m)(W(f)); the routes must agree to
/// 10 rel_tol or RouteMismatch is thrown.
double scaling_limit_gap(const MomentumFunction &f, Mass m, DilationParam l,
                         const QuadratureScheme &q);

/// Kernel quadrature of <W(g) Omega, W(delta_mu tau^(mu l m)_x f) Omega> in the
/// massless vacuum, weighted by hD(mu) hT(x) dmu/mu dx.
cplx averaged_matrix_element(const WeylLabel &g, const MomentumFunction &f,
                             const AveragingKernel &k, DilationParam l, Mass m,
                             const QuadratureScheme &q);

} // namespace scalim
