#pragma once

#include "scalim/cutoff.hpp"
#include "scalim/fock.hpp"

#include <string>
#include <vector>

namespace scalim {

/// One checked inequality lhs <= rhs.
struct BoundReport {
  std::string kind; // "chi", "sigma" or "energy"
  int n = 0;
  std::string nu;
  double param = 0.0; // beta, r or E
  double lhs = 0.0;
  double rhs = 0.0;
  double c_used = 0.0;
  bool pass = false;
};

/// ||omega^{1/2 - nu_0} h~_{r,nu}||, the one-particle factor in the bound on
/// sigma_{n,nu} restricted to a ball of radius r. Requires r <= r0.
double single_particle_sigma_factor(const FieldIndex &nu_j, double r, Mass m,
                                    const CutoffFunction &h,
                                    const QuadratureScheme &q, double r0 = 1.0);

/// ||omega^{-1} p^{nu_j} chi_E|| with p_0 = omega and chi_E the indicator of
/// omega <= E.
double energy_factor(const FieldIndex &nu_j, double e, Mass m, int s);

/// Checks energy_factor <= c2 E^{|nu_j| + (s-2)/2}. Needs s >= 3 and E >= 1.
BoundReport energy_bound_check(const FieldIndex &nu_j, double e, Mass m, int s,
                               double c2);

struct ChiPoint {
  MultiIndex nu;
  double beta;
};
struct SigmaPoint {
  FieldIndex nu;
  double r;
};
struct EnergyPoint {
  FieldIndex nu;
  double e;
};

/// Points at which the chi, sigma and energy bounds are evaluated.
struct BoundPanel {
  std::vector<ChiPoint> chi;
  std::vector<SigmaPoint> sigma;
  std::vector<EnergyPoint> energy;

  bool empty() const { return chi.empty() && sigma.empty() && energy.empty(); }
  /// Stable 64-bit FNV-1a hash of the panel, as hex.
  std::string hash() const;
};

struct ConstantFit {
  double c = 1.0;
  /// Least constant demanded by each bound alone.
  double c_chi = 0.0, c_sigma = 0.0, c_energy = 0.0;
  std::string panel_hash;
};

/// Least c >= 1 such that on the panel
///   chi_norm <= c^n sqrt(n!) nu! (beta/2)^{-|nu| - n(s-1)/2},
///   4 F_j <= c (3r)^{|nu_j| + (s-1)/2}       (F_j the sigma factor),
///   2 G_j <= c E^{|nu_j| + (s-2)/2}          (G_j the energy factor, s >= 3).
ConstantFit fit_constant_c(int s, Mass m, double r0, const BoundPanel &panel,
                           const CutoffFunction &h, const QuadratureScheme &q);

/// Evaluates every point of the panel against a given c.
std::vector<BoundReport> check_bounds(int s, Mass m, double r0,
                                      const BoundPanel &panel, double c,
                                      const CutoffFunction &h,
                                      const QuadratureScheme &q);

struct NuclearityReport {
  std::vector<double> sums; // S_0, ..., S_{n_max}
  double q_closed;          // 2 c^2 (6r/beta)^{(s-1)/2} / (1 - 6r/beta)^s
};

/// S_n = sum_{|nu| <= nu_cap} chi_norm(n, nu, beta) c^n (sqrt(n!) nu!)^{-1}
/// (3r)^{|nu| + n(s-1)/2}. Throws PreconditionViolated unless 6r/beta < 1.
NuclearityReport nuclearity_partial_sum(double r, double beta, int s,
                                        int n_max, int nu_cap, Mass m,
                                        double c, const QuadratureScheme &q);

/// Largest |<probe, e^{-beta H} W(f) Omega> - series| over the probes, the
/// series being the expansion cut at (n_max, nu_cap).
double theta_expansion_residual(const MomentumFunction &f, double beta, Mass m,
                                const std::vector<FockVector> &probes,
                                int n_max, int nu_cap,
                                const QuadratureScheme &q,
                                std::uint64_t budget = 1'000'000);

struct ScaleRow {
  double lambda;
  MultiIndex nu;
  double cutoff;      // C^<(lambda)
  double coefficient; // C^< lambda^{-|nu|-n(s-1)/2} |sigma_{n,nu}(W(delta_l f))|
  double vector_norm; // C^< lambda^{|nu|+n(s-1)/2} ||e^{-lambda beta H} phi Omega||
};

struct ScaleScan {
  std::vector<ScaleRow> rows;
  double sup_coefficient = 0.0;
  double sup_vector_norm = 0.0;
};

/// Scale cutoff in lambda: 1 for lambda <= 1/2, 0 for lambda >= 1.
double scale_cutoff(double lambda);

/// Rescaled coefficients and vector norms over a grid of scales.
ScaleScan uniform_scale_scan(const MomentumFunction &f, double beta, Mass m,
                             const std::vector<double> &lambdas, int n_max,
                             int nu_cap, const QuadratureScheme &q);

} // namespace scalim
