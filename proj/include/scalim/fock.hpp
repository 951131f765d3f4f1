#pragma once

#include "scalim/cutoff.hpp"
#include "scalim/testfn.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace scalim {

/// One-particle wave function in momentum space. Copies share the evaluator,
/// which also serves as the key for sampling caches.
class SingleParticleVector {
public:
  SingleParticleVector(int s, Mass m, MomentumEval eval);

  int dim() const { return s_; }
  Mass mass() const { return m_; }
  cplx operator()(const Vec3 &p) const { return (*eval_)(p); }
  const void *key() const { return eval_.get(); }

private:
  int s_;
  Mass m_;
  std::shared_ptr<const MomentumEval> eval_;
};

/// xi_f as a one-particle vector.
SingleParticleVector one_particle_vector(const MomentumFunction &f, Mass m);

/// <a, b> = int conj(a) b.
cplx single_inner(const SingleParticleVector &a, const SingleParticleVector &b,
                  const QuadratureScheme &q);

/// Finite linear combination of vectors a*(e_1) ... a*(e_k) Omega.
class FockVector {
public:
  struct Term {
    cplx coef;
    std::vector<SingleParticleVector> modes;
  };

  FockVector(int s, Mass m) : s_(s), m_(m) {}
  static FockVector vacuum(int s, Mass m);
  /// a*(e_1) ... a*(e_k) Omega.
  static FockVector product(const std::vector<SingleParticleVector> &modes);

  int dim() const { return s_; }
  Mass mass() const { return m_; }
  const std::vector<Term> &terms() const { return terms_; }
  std::size_t max_particles() const;

  void add_term(cplx coef, std::vector<SingleParticleVector> modes);
  FockVector operator+(const FockVector &o) const;
  FockVector scaled(cplx c) const;
  /// a*(e) applied to this vector.
  FockVector create(const SingleParticleVector &e) const;

private:
  int s_;
  Mass m_;
  std::vector<Term> terms_;
};

/// Permanent by Ryser's formula.
cplx permanent(const Eigen::MatrixXcd &a);

cplx inner_product(const FockVector &a, const FockVector &b,
                   const QuadratureScheme &q);

/// a(e) applied to v.
FockVector annihilate(const FockVector &v, const SingleParticleVector &e,
                      const QuadratureScheme &q);

/// e^{-beta H} v, acting mode-wise; beta = 0 returns v.
FockVector apply_energy_damping(const FockVector &v, double beta, Mass m);

struct TruncatedCoherent {
  FockVector vector;
  /// Squared norm of the discarded part, e^{-x} sum_{n > N} x^n / n!.
  double tail_norm_sq;
};

/// e^{-||f||_m^2/2} sum_{n <= N} i^n / n! a*(xi_f)^n Omega, i.e. W(f) Omega
/// cut at N particles.
TruncatedCoherent coherent_truncated(const MomentumFunction &f, Mass m,
                                     int n_max, const QuadratureScheme &q);

/// <bra, W(f) ket> from W = e^{-x/2} e^{i a*(xi)} e^{i a(xi)}; exact for
/// finite particle numbers.
cplx weyl_matrix_element(const FockVector &bra, const MomentumFunction &f,
                         const FockVector &ket, const QuadratureScheme &q);

/// Derivative label of one field leg: time bit nu_0 in {0, 1} and spatial
/// orders.
struct FieldIndex {
  int time = 0;
  SpatialIndex space{0, 0, 0};

  int order() const { return time + space[0] + space[1] + space[2]; }
  /// nu_j! = prod_k nu_jk!.
  double factorial() const;
  bool operator<(const FieldIndex &o) const;
  bool operator==(const FieldIndex &o) const = default;
};

class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<FieldIndex> entries);

  int n() const { return static_cast<int>(entries_.size()); }
  const std::vector<FieldIndex> &entries() const { return entries_; }
  /// |nu| = sum_j |nu_j|.
  int order() const;
  double factorial() const;
  int time_bits() const;
  std::string to_string() const;

private:
  std::vector<FieldIndex> entries_;
};

/// phi_{n,nu} = :prod_j d^{nu_j} phi(0):.
struct WickField {
  int n;
  MultiIndex nu;
  WickField(int n, MultiIndex nu);
};

/// All ordered tuples of n field indices in s dimensions with total order
/// <= cap.
std::vector<MultiIndex> enumerate_multi_indices(int n, int s, int cap);

/// Field labels of a single leg with order <= cap.
std::vector<FieldIndex> enumerate_field_indices(int s, int cap);

/// K_nu for d^nu phi(0) = a*(K_nu) + a(K_nu).
SingleParticleVector point_kernel(const FieldIndex &nu, int s, Mass m);

/// <bra, phi_{n,nu} ket> by enumeration of the Wick contractions of the n legs
/// with bra modes (creation part) and ket modes (annihilation part); leftover
/// modes pair through permanents. Throws ContractionOverflow when more than
/// budget contraction patterns would be visited.
cplx phi_matrix_element(const WickField &w, const FockVector &bra,
                        const FockVector &ket, Mass m,
                        const QuadratureScheme &q,
                        std::uint64_t budget = 1'000'000);

/// Closed-form coefficients sigma_{n,nu}(W(f)).
///
/// Each leg contributes a position-space moment of f against x^nu h(|x|/r),
/// with r >= the support radius of f. The moments are computed for the given
/// profile and for a second one; a disagreement above 1e-8 raises
/// CutoffDependence.
class SigmaCoefficients {
public:
  SigmaCoefficients(const MomentumFunction &f, Mass m,
                    const CutoffFunction &h, const QuadratureScheme &q,
                    int max_order);

  cplx operator()(const MultiIndex &nu) const;
  /// Contribution a_j of one leg: moment of Re f (nu_0 = 0) or minus the
  /// moment of Im f (nu_0 = 1), divided by nu_j!.
  double leg_factor(const FieldIndex &nu) const;
  double radius() const { return r_; }
  double vacuum_factor() const { return gauss_; }

private:
  int s_;
  double r_;
  double gauss_;
  std::map<FieldIndex, double> legs_;
};

/// The profile used to cross-check h: smooth_bump for smoothstep5 and
/// smoothstep5 otherwise.
CutoffFunction alternate_profile(const CutoffFunction &h);

cplx sigma_coefficient(int n, const MultiIndex &nu, const MomentumFunction &f,
                       Mass m, const CutoffFunction &h,
                       const QuadratureScheme &q);

/// sum_{n <= n_max} sum_{|nu| <= nu_cap} sigma_{n,nu}(W(f)) <bra, phi_{n,nu} ket>.
/// A ContractionOverflow names the offending (n, nu).
cplx expansion_partial_sum(const MomentumFunction &f, const FockVector &bra,
                           const FockVector &ket, Mass m, int n_max,
                           int nu_cap, const QuadratureScheme &q,
                           const CutoffFunction &h =
                               CutoffFunction::smoothstep5(),
                           std::uint64_t budget = 1'000'000);

/// ||e^{-beta H} phi_{n,nu} Omega|| = permanent(G)^{1/2}.
double chi_norm(const MultiIndex &nu, double beta, Mass m, int s,
                const QuadratureScheme &q);

/// Spectral profile d(E) together with its inverse Fourier transform
/// g(t) = (1/2pi) int d(E) e^{-itE} dE, so that d(H) = int g(t) e^{itH} dt.
struct DampingProfile {
  std::function<double(double)> value;
  std::function<double(double)> fourier;
  bool identity = false;

  static DampingProfile constant_one();
  /// d(E) = e^{-E^2}.
  static DampingProfile gaussian();
};

/// |<W(g)Omega, d(H) W(f)Omega>_N - int dt g(t) <W(g)Omega, W(tau_t f)Omega>|.
///
/// The first term acts spectrally on the N-particle truncations through the
/// energy density of conj(xi_g) xi_f and its convolution powers; the second
/// integrates Gaussian overlaps over the time rule t_quad.
double smoothing_identity_check(const MomentumFunction &f,
                                const MomentumFunction &g,
                                const DampingProfile &damp, Mass m,
                                const Rule1D &t_quad,
                                const QuadratureScheme &q, int n_max = 8);

} // namespace scalim
