#include "scalim/dirint.hpp"

#include "scalim/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace scalim {

using cplx = std::complex<double>;

FinitePointMeasure::FinitePointMeasure(std::vector<double> w)
    : weight(std::move(w)) {
  if (weight.empty())
    throw InvalidArgument("point measure needs at least one point");
  for (double x : weight)
    if (!(x > 0.0) || !std::isfinite(x))
      throw InvalidArgument("point weights must be positive");
}

double FinitePointMeasure::total() const {
  return std::accumulate(weight.begin(), weight.end(), 0.0);
}

FiberFamily::FiberFamily(std::vector<int> d) : dim(std::move(d)) {
  for (int x : dim)
    if (x < 1)
      throw InvalidArgument("fiber dimensions must be >= 1");
}

int FiberFamily::total() const { return std::accumulate(dim.begin(), dim.end(), 0); }

int FiberFamily::offset(int z) const {
  return std::accumulate(dim.begin(), dim.begin() + z, 0);
}

std::vector<Matrix> integrable_closure(const FundamentalFamilySpan &gamma,
                                       const FinitePointMeasure &sp,
                                       const FiberFamily &ff) {
  if (sp.size() != ff.size())
    throw InvalidArgument("measure and fiber family differ in size");
  std::vector<Matrix> out;
  for (int z = 0; z < ff.size(); ++z) {
    Matrix cols(ff.dim[z], gamma.generators.size());
    for (std::size_t g = 0; g < gamma.generators.size(); ++g) {
      const auto &v = gamma.generators[g].at.at(z);
      if (v.size() != ff.dim[z])
        throw InvalidArgument("generator has the wrong fiber dimension");
      cols.col(g) = v;
    }
    if (cols.cols() == 0) {
      out.emplace_back(ff.dim[z], 0);
      continue;
    }
    Eigen::JacobiSVD<Matrix> svd(cols, Eigen::ComputeThinU);
    const auto &sv = svd.singularValues();
    int rank = 0;
    const double tol = 1e-12 * std::max(1.0, sv.size() ? sv(0) : 0.0);
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > tol)
        ++rank;
    out.push_back(svd.matrixU().leftCols(rank));
  }
  return out;
}

cplx di_inner(const VectorField &a, const VectorField &b,
              const FinitePointMeasure &sp) {
  if (a.at.size() != b.at.size() || static_cast<int>(a.at.size()) != sp.size())
    throw InvalidArgument("vector fields live on different point sets");
  cplx acc = 0.0;
  for (int z = 0; z < sp.size(); ++z) {
    if (a.at[z].size() != b.at[z].size())
      throw InvalidArgument("fiber dimensions differ");
    acc += sp.weight[z] * a.at[z].dot(b.at[z]);
  }
  return acc;
}

Vector embed(const VectorField &a, const FinitePointMeasure &sp) {
  Eigen::Index total = 0;
  for (const auto &v : a.at)
    total += v.size();
  Vector out(total);
  Eigen::Index off = 0;
  for (int z = 0; z < sp.size(); ++z) {
    out.segment(off, a.at[z].size()) = std::sqrt(sp.weight[z]) * a.at[z];
    off += a.at[z].size();
  }
  return out;
}

Matrix assemble(const OperatorField &b) {
  Eigen::Index total = 0;
  for (const auto &m : b.at)
    total += m.rows();
  Matrix out = Matrix::Zero(total, total);
  Eigen::Index off = 0;
  for (const auto &m : b.at) {
    out.block(off, off, m.rows(), m.cols()) = m;
    off += m.rows();
  }
  return out;
}

Matrix point_indicator(const FiberFamily &ff, int z) {
  Matrix p = Matrix::Zero(ff.total(), ff.total());
  const int off = ff.offset(z);
  for (int i = 0; i < ff.dim[z]; ++i)
    p(off + i, off + i) = 1.0;
  return p;
}

namespace {

void check_square(const Matrix &b, const FiberFamily &ff) {
  if (b.rows() != ff.total() || b.cols() != ff.total())
    throw InvalidArgument("operator does not act on the direct sum");
}

double max_abs(const Matrix &m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

} // namespace

bool commutes_with_diagonal(const Matrix &b, const FiberFamily &ff, double tol) {
  check_square(b, ff);
  for (int z = 0; z < ff.size(); ++z) {
    const Matrix p = point_indicator(ff, z);
    if (max_abs(b * p - p * b) > tol)
      return false;
  }
  return true;
}

bool is_block_diagonal(const Matrix &b, const FiberFamily &ff, double tol) {
  check_square(b, ff);
  for (int z = 0; z < ff.size(); ++z)
    for (int y = 0; y < ff.size(); ++y) {
      if (y == z)
        continue;
      if (max_abs(b.block(ff.offset(z), ff.offset(y), ff.dim[z], ff.dim[y])) >
          tol)
        return false;
    }
  return true;
}

bool is_decomposable(const Matrix &b, const FiberFamily &ff, double tol) {
  const bool c = commutes_with_diagonal(b, ff, tol);
  const bool d = is_block_diagonal(b, ff, tol);
  if (c != d)
    throw Error("commutation and block tests disagree");
  return c;
}

OperatorField decompose_operator(const Matrix &b, const FiberFamily &ff,
                                 double tol) {
  if (!is_decomposable(b, ff, tol))
    throw NotDecomposable("operator has off-diagonal blocks");
  OperatorField out;
  for (int z = 0; z < ff.size(); ++z)
    out.at.push_back(b.block(ff.offset(z), ff.offset(z), ff.dim[z], ff.dim[z]));
  return out;
}

namespace {

Vector vec(const Matrix &m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

// Adds m to an orthonormal family if it is independent; returns true if added.
bool add_orthonormal(std::vector<Matrix> &basis, Matrix m, double tol) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto &b : basis)
      m -= (vec(b).dot(vec(m))) * b;
  const double nrm = m.norm();
  if (nrm <= tol)
    return false;
  basis.push_back(m / nrm);
  return true;
}

} // namespace

FiniteCStarAlgebra::FiniteCStarAlgebra(std::vector<Matrix> generators) {
  if (generators.empty())
    throw InvalidArgument("algebra needs at least one generator");
  n_ = static_cast<int>(generators.front().rows());
  for (const auto &g : generators)
    if (g.rows() != n_ || g.cols() != n_)
      throw InvalidArgument("generators must be square of a common size");
  const double tol = 1e-10;
  add_orthonormal(basis_, Matrix::Identity(n_, n_), tol);
  for (const auto &g : generators) {
    add_orthonormal(basis_, g, tol * std::max(1.0, g.norm()));
    add_orthonormal(basis_, g.adjoint(), tol * std::max(1.0, g.norm()));
  }
  // Close under products until nothing new appears.
  bool grew = true;
  while (grew) {
    grew = false;
    const std::size_t k = basis_.size();
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        if (add_orthonormal(basis_, basis_[i] * basis_[j], tol))
          grew = true;
    for (std::size_t i = 0; i < k; ++i)
      if (add_orthonormal(basis_, basis_[i].adjoint(), tol))
        grew = true;
  }

  // Center: x with sum_l x_l [b_l, b_k] = 0 for all k.
  const int d = dim();
  Matrix m(static_cast<Eigen::Index>(d) * n_ * n_, d);
  for (int l = 0; l < d; ++l)
    for (int k = 0; k < d; ++k)
      m.block(static_cast<Eigen::Index>(k) * n_ * n_, l, n_ * n_, 1) =
          vec(basis_[l] * basis_[k] - basis_[k] * basis_[l]);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto &sv = svd.singularValues();
  const double stol = 1e-9 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  for (int i = 0; i < d; ++i) {
    const double s = i < sv.size() ? sv(i) : 0.0;
    if (s <= stol)
      add_orthonormal(center_, element(svd.matrixV().col(i)), 1e-10);
  }
}

Vector FiniteCStarAlgebra::coords(const Matrix &a) const {
  Vector x(dim());
  for (int k = 0; k < dim(); ++k)
    x(k) = vec(basis_[k]).dot(vec(a));
  return x;
}

Matrix FiniteCStarAlgebra::element(const Vector &x) const {
  Matrix a = Matrix::Zero(n_, n_);
  for (int k = 0; k < dim(); ++k)
    a += x(k) * basis_[k];
  return a;
}

double FiniteCStarAlgebra::distance(const Matrix &a) const {
  return (a - element(coords(a))).norm();
}

bool FiniteCStarAlgebra::is_central(const Matrix &a, double tol) const {
  if (distance(a) > tol * std::max(1.0, a.norm()))
    return false;
  for (const auto &b : basis_)
    if ((a * b - b * a).norm() > tol * std::max(1.0, a.norm()))
      return false;
  return true;
}

std::vector<Matrix>
FiniteCStarAlgebra::minimal_central_projections(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const int want = static_cast<int>(center_.size());
  for (int attempt = 0; attempt < 8; ++attempt) {
    Matrix c = Matrix::Zero(n_, n_);
    for (const auto &z : center_)
      c += cplx(nd(rng), nd(rng)) * z;
    c = 0.5 * (c + c.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(c);
    const auto &ev = es.eigenvalues();
    const auto &vecs = es.eigenvectors();
    std::vector<Matrix> proj;
    int i = 0;
    const double gap = 1e-7 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    while (i < n_) {
      int j = i + 1;
      while (j < n_ && ev(j) - ev(j - 1) < gap)
        ++j;
      const Matrix v = vecs.middleCols(i, j - i);
      proj.push_back(v * v.adjoint());
      i = j;
    }
    if (static_cast<int>(proj.size()) == want)
      return proj;
  }
  throw Error("could not separate the minimal central projections");
}

cplx State::operator()(const FiniteCStarAlgebra &alg, const Matrix &a) const {
  return values.cwiseProduct(alg.coords(a)).sum();
}

State state_from_density(const FiniteCStarAlgebra &alg, const Matrix &rho) {
  State s;
  s.values.resize(alg.dim());
  for (int k = 0; k < alg.dim(); ++k)
    s.values(k) = (rho * alg.basis()[k]).trace();
  return s;
}

Matrix GNS::represent(const FiniteCStarAlgebra &alg, const Matrix &a) const {
  const Vector x = alg.coords(a);
  Matrix out = Matrix::Zero(dim, dim);
  for (int k = 0; k < alg.dim(); ++k)
    out += x(k) * pi[k];
  return out;
}

GNS gns_construct(const FiniteCStarAlgebra &alg, const State &omega) {
  const int d = alg.dim();
  if (omega.values.size() != d)
    throw InvalidArgument("state has the wrong number of basis values");
  const cplx one = omega(alg, Matrix::Identity(alg.matrix_size(), alg.matrix_size()));
  if (std::abs(one - 1.0) > 1e-10)
    throw NotAState("omega(1) = " + std::to_string(one.real()));
  Matrix g(d, d);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l)
      g(k, l) = omega(alg, alg.basis()[k].adjoint() * alg.basis()[l]);
  if ((g - g.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw NotAState("Gram matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (g + g.adjoint()));
  const auto &ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -1e-12 * scale)
    throw NotAState("Gram matrix has eigenvalue " + std::to_string(ev.minCoeff()));
  std::vector<int> keep;
  for (int i = 0; i < d; ++i)
    if (ev(i) > 1e-10 * scale)
      keep.push_back(i);
  GNS out;
  out.dim = static_cast<int>(keep.size());
  out.t.resize(out.dim, d);
  out.t_pinv.resize(d, out.dim);
  for (int r = 0; r < out.dim; ++r) {
    const double lam = ev(keep[r]);
    out.t.row(r) = std::sqrt(lam) * es.eigenvectors().col(keep[r]).adjoint();
    out.t_pinv.col(r) = es.eigenvectors().col(keep[r]) / std::sqrt(lam);
  }
  for (int k = 0; k < d; ++k) {
    Matrix left(d, d);
    for (int l = 0; l < d; ++l)
      left.col(l) = alg.coords(alg.basis()[k] * alg.basis()[l]);
    out.pi.push_back(out.t * left * out.t_pinv);
  }
  out.omega = out.t * alg.coords(Matrix::Identity(alg.matrix_size(),
                                                  alg.matrix_size()));
  return out;
}

Matrix ConditionalExpectation::apply(const FiniteCStarAlgebra &alg,
                                     const Matrix &a) const {
  return alg.element(map * alg.coords(a));
}

ConditionalExpectation state_preserving_expectation(const FiniteCStarAlgebra &alg,
                                                    const State &omega) {
  const auto proj = alg.minimal_central_projections();
  const int d = alg.dim();
  ConditionalExpectation e;
  e.map = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const Matrix &a = alg.basis()[k];
    Matrix out = Matrix::Zero(alg.matrix_size(), alg.matrix_size());
    for (const auto &p : proj) {
      const cplx wp = omega(alg, p);
      cplx c;
      if (std::abs(wp) > 1e-14)
        c = omega(alg, p * a * p) / wp;
      else
        c = (p * a).trace() / p.trace();
      out += c * p;
    }
    e.map.col(k) = alg.coords(out);
  }
  return e;
}

void check_conditional_expectation(const FiniteCStarAlgebra &alg,
                                   const ConditionalExpectation &e) {
  const int n = alg.matrix_size();
  const double tol = 1e-10;
  const Matrix id = Matrix::Identity(n, n);
  if ((e.apply(alg, id) - id).norm() > tol)
    throw NotConditionalExpectation("E(1) != 1");
  if ((e.map * e.map - e.map).norm() > tol * std::max(1.0, e.map.norm()))
    throw NotConditionalExpectation("E o E != E");
  for (const auto &b : alg.basis()) {
    const Matrix eb = e.apply(alg, b);
    if (!alg.is_central(eb, 1e-9))
      throw NotConditionalExpectation("E(b) is not central");
    const Matrix pos = e.apply(alg, b.adjoint() * b);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (pos + pos.adjoint()));
    if (es.eigenvalues().minCoeff() < -1e-10)
      throw NotConditionalExpectation("E(b* b) is not positive");
    for (const auto &z : alg.center())
      if ((e.apply(alg, z * b) - z * eb).norm() > 1e-9)
        throw NotConditionalExpectation("E is not a center-module map");
  }
}

std::vector<StateComponent> decompose_state(const FiniteCStarAlgebra &alg,
                                            const State &omega0,
                                            const ConditionalExpectation &e) {
  check_conditional_expectation(alg, e);
  const auto proj = alg.minimal_central_projections();
  std::vector<StateComponent> out;
  for (const auto &p : proj) {
    const double w = omega0(alg, p).real();
    if (w <= 1e-14)
      continue;
    StateComponent c;
    c.weight = w;
    c.projection = p;
    c.state.values.resize(alg.dim());
    const double tp = p.trace().real();
    for (int k = 0; k < alg.dim(); ++k) {
      // Character of the point: E(a) p = chi(E(a)) p.
      const Matrix ea = e.apply(alg, alg.basis()[k]);
      c.state.values(k) = (ea * p).trace() / tp;
    }
    out.push_back(std::move(c));
  }
  return out;
}

FiberFamily fibers_of(const std::vector<GNS> &parts) {
  std::vector<int> d;
  for (const auto &g : parts)
    d.push_back(g.dim);
  return FiberFamily(d);
}

Matrix build_decomposition_unitary(const GNS &gns0,
                                   const std::vector<GNS> &parts,
                                   const std::vector<StateComponent> &comps) {
  if (parts.size() != comps.size())
    throw InvalidArgument("one GNS representation per component is needed");
  const Eigen::Index k = gns0.t.cols();
  Eigen::Index total = 0;
  for (const auto &g : parts) {
    if (g.t.cols() != k)
      throw InvalidArgument("component GNS built on a different algebra");
    total += g.dim;
  }
  Matrix s(total, k);
  Eigen::Index off = 0;
  for (std::size_t z = 0; z < parts.size(); ++z) {
    s.middleRows(off, parts[z].dim) = std::sqrt(comps[z].weight) * parts[z].t;
    off += parts[z].dim;
  }
  const Matrix w = s * gns0.t_pinv;
  const double tol = 1e-10;
  if (w.rows() != w.cols())
    throw NotIsometric("decomposed space has dimension " +
                       std::to_string(w.rows()) + " instead of " +
                       std::to_string(w.cols()));
  const Matrix id = Matrix::Identity(w.rows(), w.cols());
  const double iso = (w.adjoint() * w - id).cwiseAbs().maxCoeff();
  const double co = (w * w.adjoint() - id).cwiseAbs().maxCoeff();
  const double fit = (w * gns0.t - s).cwiseAbs().maxCoeff();
  if (iso > tol || co > tol || fit > tol * std::max(1.0, s.norm()))
    throw NotIsometric("defect " + std::to_string(std::max({iso, co, fit})));
  return w;
}

OperatorField decompose_symmetry(const Matrix &u0, const Matrix &w,
                                 const FiberFamily &ff, double tol) {
  const Matrix conj = w * u0 * w.adjoint();
  if (!is_block_diagonal(conj, ff, tol))
    throw NotDecomposable("symmetry mixes fibers");
  return decompose_operator(conj, ff, tol);
}

Matrix random_unitary(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a(i, j) = cplx(nd(rng), nd(rng));
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    const cplx d = r(i, i);
    if (std::abs(d) > 0.0)
      q.col(i) *= d / std::abs(d);
  }
  return q;
}

ToyDilationSystem cyclic_toy_system(int k, int fiber_dim, std::uint64_t seed,
                                    bool identity_maps) {
  if (k < 1 || fiber_dim < 1)
    throw InvalidArgument("toy system needs k >= 1 and fiber_dim >= 1");
  ToyDilationSystem sys;
  sys.order = k;
  sys.measure = FinitePointMeasure(std::vector<double>(k, 1.0 / k));
  sys.fiber_dim.assign(k, fiber_dim);
  std::vector<Matrix> v;
  for (int z = 0; z < k; ++z)
    v.push_back(identity_maps ? Matrix(Matrix::Identity(fiber_dim, fiber_dim))
                              : random_unitary(fiber_dim, seed * 1000 + z));
  sys.act.assign(k, std::vector<int>(k));
  sys.u.assign(k, std::vector<Matrix>(k));
  for (int g = 0; g < k; ++g)
    for (int z = 0; z < k; ++z) {
      const int gz = (z + g) % k;
      sys.act[g][z] = gz;
      sys.u[g][z] = v[gz] * v[z].adjoint();
    }
  return sys;
}

ToyDilationSystem trivial_toy_system(int k) {
  ToyDilationSystem sys;
  sys.order = k;
  sys.measure = FinitePointMeasure({1.0});
  sys.fiber_dim = {1};
  sys.act.assign(k, std::vector<int>{0});
  sys.u.assign(k, std::vector<Matrix>{Matrix::Identity(1, 1)});
  return sys;
}

Matrix total_operator(const ToyDilationSystem &sys, int g) {
  const FiberFamily ff(sys.fiber_dim);
  Matrix out = Matrix::Zero(ff.total(), ff.total());
  const int gi = sys.inverse(g);
  for (int z = 0; z < ff.size(); ++z) {
    const int y = sys.act[gi][z]; // g^{-1}.z
    out.block(ff.offset(z), ff.offset(y), ff.dim[z], ff.dim[y]) = sys.u[g][y];
  }
  return out;
}

CocycleReport cocycle_check(const ToyDilationSystem &sys, double tol) {
  CocycleReport rep;
  const int k = sys.order;
  const int npts = sys.measure.size();
  auto close = [tol](const Matrix &a, const Matrix &b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           (a - b).cwiseAbs().maxCoeff() <= tol;
  };
  for (int g = 0; g < k; ++g)
    for (int z = 0; z < npts; ++z) {
      const int gz = sys.act[g][z];
      if (std::abs(sys.measure.weight[gz] - sys.measure.weight[z]) > tol)
        rep.measure_invariant = false;
      const Matrix &u = sys.u[g][z];
      const Matrix id_z = Matrix::Identity(sys.fiber_dim[z], sys.fiber_dim[z]);
      if (!close(u.adjoint() * u, id_z) ||
          !close(u * u.adjoint(),
                 Matrix::Identity(sys.fiber_dim[gz], sys.fiber_dim[gz])))
        rep.unitary = false;
      if (g == 0 && !close(u, id_z))
        rep.identity_law = false;
      if (!close(u.adjoint(), sys.u[sys.inverse(g)][gz]))
        rep.adjoint_law = false;
      for (int g2 = 0; g2 < k; ++g2)
        if (!close(sys.u[g2][gz] * u, sys.u[sys.compose(g2, g)][z])) {
          rep.composition_law = false;
          rep.composition_failures.push_back({g2, g, z});
        }
    }
  std::vector<Matrix> tot;
  for (int g = 0; g < k; ++g)
    tot.push_back(total_operator(sys, g));
  for (int g = 0; g < k; ++g) {
    const Matrix id = Matrix::Identity(tot[g].rows(), tot[g].cols());
    if (!close(tot[g].adjoint() * tot[g], id))
      rep.total_unitary = false;
    for (int g2 = 0; g2 < k; ++g2)
      if (!close(tot[g2] * tot[g], tot[sys.compose(g2, g)]))
        rep.total_homomorphism = false;
  }
  return rep;
}

std::vector<std::array<int, 3>>
predicted_perturbation_failures(const ToyDilationSystem &sys, int g0, int z0) {
  std::vector<std::array<int, 3>> out;
  const int npts = sys.measure.size();
  for (int g = 0; g < sys.order; ++g)
    for (int z = 0; z < npts; ++z)
      for (int g2 = 0; g2 < sys.order; ++g2) {
        const int left = (g2 == g0 && sys.act[g][z] == z0) + (g == g0 && z == z0);
        const int right = (sys.compose(g2, g) == g0 && z == z0);
        if (left != right)
          out.push_back({g2, g, z});
      }
  return out;
}

} // namespace scalim
