#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace scalim {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Finitely many points z = 0, ..., k-1 with positive weights w(z).
struct FinitePointMeasure {
  std::vector<double> weight;

  explicit FinitePointMeasure(std::vector<double> w);
  int size() const { return static_cast<int>(weight.size()); }
  double total() const;
};

/// Fiber dimensions dim H_z.
struct FiberFamily {
  std::vector<int> dim;

  explicit FiberFamily(std::vector<int> d);
  int size() const { return static_cast<int>(dim.size()); }
  int total() const;
  int offset(int z) const;
};

/// chi(z) in H_z for every point.
struct VectorField {
  std::vector<Vector> at;
};

struct FundamentalFamilySpan {
  std::vector<VectorField> generators;
};

/// B(z) on H_z for every point.
struct OperatorField {
  std::vector<Matrix> at;
};

/// Per point, an orthonormal basis (as columns) of span{gamma(z)}.
std::vector<Matrix> integrable_closure(const FundamentalFamilySpan &gamma,
                                       const FinitePointMeasure &sp,
                                       const FiberFamily &ff);

/// sum_z w(z) <a(z), b(z)>.
std::complex<double> di_inner(const VectorField &a, const VectorField &b,
                              const FinitePointMeasure &sp);

/// The isometric embedding chi -> (sqrt(w(z)) chi(z))_z into the direct sum.
Vector embed(const VectorField &a, const FinitePointMeasure &sp);

/// Block-diagonal matrix of an operator field.
Matrix assemble(const OperatorField &b);

/// Multiplication by the indicator of point z.
Matrix point_indicator(const FiberFamily &ff, int z);

/// B commutes with every point indicator (to tol in max norm).
bool commutes_with_diagonal(const Matrix &b, const FiberFamily &ff,
                            double tol = 1e-12);
/// Every off-diagonal block of B vanishes (to tol in max norm).
bool is_block_diagonal(const Matrix &b, const FiberFamily &ff,
                       double tol = 1e-12);

/// Runs both tests; they must agree (a disagreement is an internal error).
bool is_decomposable(const Matrix &b, const FiberFamily &ff, double tol = 1e-12);

/// Per-point blocks of a decomposable B. Throws NotDecomposable.
OperatorField decompose_operator(const Matrix &b, const FiberFamily &ff,
                                 double tol = 1e-12);

/// *-algebra generated by finitely many square matrices, with a basis that is
/// orthonormal for the Frobenius inner product and contains the span of 1.
class FiniteCStarAlgebra {
public:
  explicit FiniteCStarAlgebra(std::vector<Matrix> generators);

  int matrix_size() const { return n_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<Matrix> &basis() const { return basis_; }
  const std::vector<Matrix> &center() const { return center_; }

  /// Coefficients of a in the basis (a is assumed to lie in the algebra).
  Vector coords(const Matrix &a) const;
  Matrix element(const Vector &x) const;
  /// Distance of a from the algebra in Frobenius norm.
  double distance(const Matrix &a) const;
  bool is_central(const Matrix &a, double tol = 1e-10) const;

  /// Minimal central projections, from the spectral decomposition of a
  /// generic central self-adjoint element.
  std::vector<Matrix> minimal_central_projections(std::uint64_t seed = 7) const;

private:
  int n_;
  std::vector<Matrix> basis_;
  std::vector<Matrix> center_;
};

/// A linear functional given by its values on the algebra basis.
struct State {
  Vector values;

  std::complex<double> operator()(const FiniteCStarAlgebra &alg,
                                  const Matrix &a) const;
};

/// a -> tr(rho a).
State state_from_density(const FiniteCStarAlgebra &alg, const Matrix &rho);

struct GNS {
  int dim = 0;
  std::vector<Matrix> pi; // pi(b_k) for every basis element
  Vector omega;           // cyclic vector
  Matrix t;               // coordinates of a -> pi(a) Omega
  Matrix t_pinv;

  Matrix represent(const FiniteCStarAlgebra &alg, const Matrix &a) const;
};

/// GNS representation from the Gram matrix omega(b_k^* b_l). Throws NotAState
/// if the Gram matrix has an eigenvalue below -1e-12 (relative) or omega(1) != 1.
GNS gns_construct(const FiniteCStarAlgebra &alg, const State &omega);

/// Conditional expectation onto the center as a matrix on basis coordinates.
struct ConditionalExpectation {
  Matrix map;

  Matrix apply(const FiniteCStarAlgebra &alg, const Matrix &a) const;
};

/// E(a) = sum_k omega(p_k a p_k)/omega(p_k) p_k over minimal central
/// projections (normalized traces where omega(p_k) = 0), so omega o E = omega.
ConditionalExpectation state_preserving_expectation(const FiniteCStarAlgebra &alg,
                                                    const State &omega);

/// Checks range in the center, E(1) = 1, E o E = E, E(z a) = z E(a) and
/// positivity on the basis. Throws NotConditionalExpectation.
void check_conditional_expectation(const FiniteCStarAlgebra &alg,
                                   const ConditionalExpectation &e);

struct StateComponent {
  double weight;
  State state;
  Matrix projection;
};

/// Components (w(z), omega_z) with omega_z the character of z composed with E.
/// Zero-weight points are dropped.
std::vector<StateComponent> decompose_state(const FiniteCStarAlgebra &alg,
                                            const State &omega0,
                                            const ConditionalExpectation &e);

/// W = S T_0^+ with S x = (sqrt(w_z) T_z x)_z; W pi_0(a) Omega_0 =
/// (pi_z(a) Omega_z)_z. Throws NotIsometric unless W is unitary and
/// S = W T_0 (to 1e-10).
Matrix build_decomposition_unitary(const GNS &gns0,
                                   const std::vector<GNS> &parts,
                                   const std::vector<StateComponent> &comps);

/// Fiber dimensions of the decomposed space.
FiberFamily fibers_of(const std::vector<GNS> &parts);

/// Blocks of W U0 W^*. Throws NotDecomposable if off-diagonal blocks remain.
OperatorField decompose_symmetry(const Matrix &u0, const Matrix &w,
                                 const FiberFamily &ff, double tol = 1e-10);

/// Cyclic group Z_k acting on points, with fiber unitaries
/// U(g, z): H_z -> H_{g.z}.
struct ToyDilationSystem {
  int order = 1;
  FinitePointMeasure measure{{1.0}};
  std::vector<int> fiber_dim{1};
  std::vector<std::vector<int>> act;    // act[g][z] = g.z
  std::vector<std::vector<Matrix>> u;   // u[g][z]

  int compose(int g2, int g1) const { return (g2 + g1) % order; }
  int inverse(int g) const { return (order - g) % order; }
};

/// Z_k acting on k equal-weight points by cyclic shifts, with fiber maps
/// U(g, z) = V_{g.z} V_z^* built from seeded random unitaries V_z.
ToyDilationSystem cyclic_toy_system(int k, int fiber_dim, std::uint64_t seed,
                                    bool identity_maps = false);

/// One point, trivial group element action, identity maps.
ToyDilationSystem trivial_toy_system(int k);

struct CocycleReport {
  bool measure_invariant = true;
  bool identity_law = true;
  bool adjoint_law = true;
  bool composition_law = true;
  bool unitary = true;
  bool total_unitary = true;
  bool total_homomorphism = true;
  std::vector<std::array<int, 3>> composition_failures; // (g', g, z)

  bool all_pass() const {
    return measure_invariant && identity_law && adjoint_law &&
           composition_law && unitary && total_unitary && total_homomorphism;
  }
};

CocycleReport cocycle_check(const ToyDilationSystem &sys, double tol = 1e-10);

/// Operator (U(g) chi)(z) = U(g, g^{-1}.z) chi(g^{-1}.z) on the direct sum.
Matrix total_operator(const ToyDilationSystem &sys, int g);

/// Triples (g', g, z) at which the composition law must fail after U(g0, z0)
/// is multiplied by a phase with phase^2 != 1.
std::vector<std::array<int, 3>>
predicted_perturbation_failures(const ToyDilationSystem &sys, int g0, int z0);

/// Seeded random unitary of size n.
Matrix random_unitary(int n, std::uint64_t seed);

} // namespace scalim
