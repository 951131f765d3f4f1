#include "scalim/fock.hpp"

#include "scalim/conventions.hpp"
#include "scalim/errors.hpp"
#include "scalim/symm.hpp"
#include "scalim/vacuum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace scalim {

SingleParticleVector::SingleParticleVector(int s, Mass m, MomentumEval eval)
    : s_(s), m_(m), eval_(std::make_shared<const MomentumEval>(std::move(eval))) {}

SingleParticleVector one_particle_vector(const MomentumFunction &f, Mass m) {
  return SingleParticleVector(
      f.dim(), m, [f, m](const Vec3 &p) { return one_particle(f, m, p); });
}

namespace {

// Samples modes on a quadrature once and memoizes pairings. Call-local.
class Sampler {
public:
  explicit Sampler(const QuadratureScheme &q) : q_(q) {}

  const std::vector<cplx> &values(const SingleParticleVector &e) {
    auto it = cache_.find(e.key());
    if (it != cache_.end())
      return it->second.second;
    std::vector<cplx> v(q_.size());
    for (std::size_t i = 0; i < q_.size(); ++i)
      v[i] = e(q_.nodes[i]);
    return cache_.emplace(e.key(), std::make_pair(e, std::move(v)))
        .first->second.second;
  }

  cplx pair(const SingleParticleVector &a, const SingleParticleVector &b) {
    const auto key = std::make_pair(a.key(), b.key());
    auto it = pairs_.find(key);
    if (it != pairs_.end())
      return it->second;
    const auto &va = values(a);
    const auto &vb = values(b);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < q_.size(); ++i)
      acc += q_.weights[i] * std::conj(va[i]) * vb[i];
    if (!std::isfinite(acc.real()) || !std::isfinite(acc.imag()))
      throw NonFiniteIntegral("one-particle pairing is not finite");
    pairs_.emplace(key, acc);
    return acc;
  }

private:
  const QuadratureScheme &q_;
  std::map<const void *, std::pair<SingleParticleVector, std::vector<cplx>>>
      cache_;
  std::map<std::pair<const void *, const void *>, cplx> pairs_;
};

cplx inner_impl(const FockVector &a, const FockVector &b, Sampler &smp) {
  cplx acc = 0.0;
  for (const auto &ta : a.terms())
    for (const auto &tb : b.terms()) {
      const std::size_t k = ta.modes.size();
      if (tb.modes.size() != k)
        continue;
      if (k == 0) {
        acc += std::conj(ta.coef) * tb.coef;
        continue;
      }
      Eigen::MatrixXcd g(k, k);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
          g(i, j) = smp.pair(ta.modes[i], tb.modes[j]);
      acc += std::conj(ta.coef) * tb.coef * permanent(g);
    }
  return acc;
}

FockVector annihilate_impl(const FockVector &v, const SingleParticleVector &e,
                           Sampler &smp) {
  FockVector out(v.dim(), v.mass());
  for (const auto &t : v.terms())
    for (std::size_t i = 0; i < t.modes.size(); ++i) {
      const cplx c = smp.pair(e, t.modes[i]);
      if (c == 0.0)
        continue;
      std::vector<SingleParticleVector> rest;
      for (std::size_t j = 0; j < t.modes.size(); ++j)
        if (j != i)
          rest.push_back(t.modes[j]);
      out.add_term(t.coef * c, std::move(rest));
    }
  return out;
}

void check_mass(const FockVector &a, const FockVector &b) {
  if (a.mass().value != b.mass().value)
    throw InvalidArgument("Fock vectors must share the mass");
  if (a.dim() != b.dim())
    throw InvalidArgument("Fock vectors must share the dimension");
}

double factorial(int n) { return std::tgamma(n + 1.0); }

} // namespace

cplx single_inner(const SingleParticleVector &a, const SingleParticleVector &b,
                  const QuadratureScheme &q) {
  Sampler smp(q);
  return smp.pair(a, b);
}

FockVector FockVector::vacuum(int s, Mass m) {
  FockVector v(s, m);
  v.add_term(1.0, {});
  return v;
}

FockVector FockVector::product(const std::vector<SingleParticleVector> &modes) {
  if (modes.empty())
    throw InvalidArgument("FockVector::product needs at least one mode");
  FockVector v(modes.front().dim(), modes.front().mass());
  v.add_term(1.0, modes);
  return v;
}

std::size_t FockVector::max_particles() const {
  std::size_t n = 0;
  for (const auto &t : terms_)
    n = std::max(n, t.modes.size());
  return n;
}

void FockVector::add_term(cplx coef, std::vector<SingleParticleVector> modes) {
  for (const auto &e : modes)
    if (e.mass().value != m_.value || e.dim() != s_)
      throw InvalidArgument("mode does not match the Fock vector's mass");
  terms_.push_back({coef, std::move(modes)});
}

FockVector FockVector::operator+(const FockVector &o) const {
  check_mass(*this, o);
  FockVector v = *this;
  v.terms_.insert(v.terms_.end(), o.terms_.begin(), o.terms_.end());
  return v;
}

FockVector FockVector::scaled(cplx c) const {
  FockVector v = *this;
  for (auto &t : v.terms_)
    t.coef *= c;
  return v;
}

FockVector FockVector::create(const SingleParticleVector &e) const {
  FockVector v = *this;
  for (auto &t : v.terms_)
    t.modes.push_back(e);
  return v;
}

cplx permanent(const Eigen::MatrixXcd &a) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n)
    throw InvalidArgument("permanent needs a square matrix");
  if (n == 0)
    return 1.0;
  if (n > 24)
    throw ContractionOverflow("permanent of order " + std::to_string(n));
  // Ryser: perm A = (-1)^n sum_S (-1)^{|S|} prod_i sum_{j in S} a_ij.
  cplx total = 0.0;
  std::vector<cplx> row(n, 0.0);
  const std::uint64_t count = std::uint64_t{1} << n;
  std::uint64_t prev_gray = 0;
  for (std::uint64_t k = 1; k < count; ++k) {
    const std::uint64_t gray = k ^ (k >> 1);
    const std::uint64_t diff = gray ^ prev_gray;
    const int j = std::countr_zero(diff);
    const double sign = (gray & diff) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i)
      row[i] += sign * a(i, j);
    prev_gray = gray;
    cplx prod = 1.0;
    for (int i = 0; i < n; ++i)
      prod *= row[i];
    const int size = std::popcount(gray);
    total += ((size % 2) ? -1.0 : 1.0) * prod;
  }
  return (n % 2 ? -1.0 : 1.0) * total;
}

cplx inner_product(const FockVector &a, const FockVector &b,
                   const QuadratureScheme &q) {
  check_mass(a, b);
  Sampler smp(q);
  return inner_impl(a, b, smp);
}

FockVector annihilate(const FockVector &v, const SingleParticleVector &e,
                      const QuadratureScheme &q) {
  Sampler smp(q);
  return annihilate_impl(v, e, smp);
}

FockVector apply_energy_damping(const FockVector &v, double beta, Mass m) {
  if (!(beta >= 0.0))
    throw InvalidArgument("damping parameter must be >= 0");
  if (beta == 0.0)
    return v;
  FockVector out(v.dim(), v.mass());
  std::map<const void *, SingleParticleVector> damped;
  for (const auto &t : v.terms()) {
    std::vector<SingleParticleVector> modes;
    for (const auto &e : t.modes) {
      auto it = damped.find(e.key());
      if (it == damped.end()) {
        SingleParticleVector d(e.dim(), e.mass(), [e, beta, m](const Vec3 &p) {
          return std::exp(-beta * dispersion(m, p)) * e(p);
        });
        it = damped.emplace(e.key(), d).first;
      }
      modes.push_back(it->second);
    }
    out.add_term(t.coef, std::move(modes));
  }
  return out;
}

TruncatedCoherent coherent_truncated(const MomentumFunction &f, Mass m,
                                     int n_max, const QuadratureScheme &q) {
  if (n_max < 0)
    throw InvalidArgument("coherent_truncated: N_max must be >= 0");
  const int s = f.dim();
  if (f.is_zero())
    return {FockVector::vacuum(s, m), 0.0};
  const double x = mass_norm_sq(f, m, q);
  const SingleParticleVector xi = one_particle_vector(f, m);
  FockVector v(s, m);
  std::vector<SingleParticleVector> modes;
  cplx coef = std::exp(-0.5 * x);
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) {
      coef *= cplx(0.0, 1.0) / static_cast<double>(n);
      modes.push_back(xi);
    }
    v.add_term(coef, modes);
  }
  // Tail e^{-x} sum_{n > N} x^n / n!, summed until negligible.
  double term = std::exp(-x);
  for (int n = 1; n <= n_max; ++n)
    term *= x / n;
  double tail = 0.0;
  for (int n = n_max + 1; n < n_max + 500; ++n) {
    term *= x / n;
    tail += term;
    if (term < 1e-300 || term < 1e-18 * tail)
      break;
  }
  return {v, tail};
}

cplx weyl_matrix_element(const FockVector &bra, const MomentumFunction &f,
                         const FockVector &ket, const QuadratureScheme &q) {
  check_mass(bra, ket);
  if (f.is_zero())
    return inner_product(bra, ket, q);
  Sampler smp(q);
  const SingleParticleVector xi = one_particle_vector(f, bra.mass());
  const double x = smp.pair(xi, xi).real();

  // e^{c a(xi)} v as a terminating series.
  auto exp_annihilate = [&](const FockVector &v, cplx c) {
    FockVector acc = v;
    FockVector cur = v;
    for (std::size_t k = 1; k <= v.max_particles(); ++k) {
      cur = annihilate_impl(cur, xi, smp).scaled(c / static_cast<double>(k));
      acc = acc + cur;
    }
    return acc;
  };
  const FockVector left = exp_annihilate(bra, cplx(0.0, -1.0));
  const FockVector right = exp_annihilate(ket, cplx(0.0, 1.0));
  return std::exp(-0.5 * x) * inner_impl(left, right, smp);
}

double FieldIndex::factorial() const {
  return scalim::factorial(space[0]) * scalim::factorial(space[1]) *
         scalim::factorial(space[2]);
}

bool FieldIndex::operator<(const FieldIndex &o) const {
  if (time != o.time)
    return time < o.time;
  return space < o.space;
}

MultiIndex::MultiIndex(std::vector<FieldIndex> entries)
    : entries_(std::move(entries)) {
  for (const auto &e : entries_) {
    if (e.time != 0 && e.time != 1)
      throw InvalidArgument("time derivative bit must be 0 or 1");
    for (int k : e.space)
      if (k < 0)
        throw InvalidArgument("spatial derivative orders must be >= 0");
  }
}

int MultiIndex::order() const {
  int o = 0;
  for (const auto &e : entries_)
    o += e.order();
  return o;
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (const auto &e : entries_)
    f *= e.factorial();
  return f;
}

int MultiIndex::time_bits() const {
  int t = 0;
  for (const auto &e : entries_)
    t += e.time;
  return t;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t j = 0; j < entries_.size(); ++j) {
    const auto &e = entries_[j];
    os << (j ? "," : "") << "(" << e.time << ";" << e.space[0] << ","
       << e.space[1] << "," << e.space[2] << ")";
  }
  os << "]";
  return os.str();
}

WickField::WickField(int n_, MultiIndex nu_) : n(n_), nu(std::move(nu_)) {
  if (nu.n() != n)
    throw InvalidArgument("WickField: multi-index length must equal n");
}

std::vector<FieldIndex> enumerate_field_indices(int s, int cap) {
  std::vector<FieldIndex> out;
  const int c2 = s == 3 ? cap : 0;
  for (int t = 0; t <= std::min(1, cap); ++t)
    for (int a = 0; a <= cap; ++a)
      for (int b = 0; b <= cap; ++b)
        for (int c = 0; c <= c2; ++c)
          if (t + a + b + c <= cap)
            out.push_back({t, {a, b, c}});
  std::sort(out.begin(), out.end(), [](const FieldIndex &x, const FieldIndex &y) {
    if (x.order() != y.order())
      return x.order() < y.order();
    return x < y;
  });
  return out;
}

std::vector<MultiIndex> enumerate_multi_indices(int n, int s, int cap) {
  if (n < 0 || cap < 0)
    throw InvalidArgument("enumerate_multi_indices: negative argument");
  const auto legs = enumerate_field_indices(s, cap);
  std::vector<MultiIndex> out;
  std::vector<FieldIndex> cur;
  std::function<void(int)> rec = [&](int budget) {
    if (static_cast<int>(cur.size()) == n) {
      out.emplace_back(cur);
      return;
    }
    for (const auto &l : legs)
      if (l.order() <= budget) {
        cur.push_back(l);
        rec(budget - l.order());
        cur.pop_back();
      }
  };
  rec(cap);
  return out;
}

SingleParticleVector point_kernel(const FieldIndex &nu, int s, Mass m) {
  const double norm = conventions::fourier_norm(s);
  return SingleParticleVector(s, m, [nu, s, m, norm](const Vec3 &p) {
    const double w = dispersion(m, p);
    cplx v = norm / std::sqrt(2.0 * w);
    if (nu.time)
      v *= cplx(0.0, -w);
    for (int k = 0; k < s; ++k)
      for (int a = 0; a < nu.space[k]; ++a)
        v *= cplx(0.0, -p[k]);
    return v;
  });
}

namespace {

cplx phi_impl(const std::vector<SingleParticleVector> &legs,
              const FockVector &bra, const FockVector &ket, Sampler &smp,
              std::uint64_t budget, std::uint64_t &visited) {
  const int n = static_cast<int>(legs.size());
  cplx total = 0.0;
  for (const auto &tb : bra.terms())
    for (const auto &tk : ket.terms()) {
      const int nb = static_cast<int>(tb.modes.size());
      const int nk = static_cast<int>(tk.modes.size());
      // Creation legs S contract with bra modes: nb - S = nk - (n - S).
      if ((nb - nk + n) % 2 != 0)
        continue;
      const int sc = (nb - nk + n) / 2;
      if (sc < 0 || sc > n || sc > nb || n - sc > nk)
        continue;
      if (nb > 62 || nk > 62)
        throw ContractionOverflow("too many modes in one term");

      std::map<std::pair<std::uint64_t, std::uint64_t>, cplx> perm_cache;
      auto rest_perm = [&](std::uint64_t ub, std::uint64_t uk) {
        auto key = std::make_pair(ub, uk);
        auto it = perm_cache.find(key);
        if (it != perm_cache.end())
          return it->second;
        std::vector<int> rb, rk;
        for (int i = 0; i < nb; ++i)
          if (!(ub >> i & 1))
            rb.push_back(i);
        for (int i = 0; i < nk; ++i)
          if (!(uk >> i & 1))
            rk.push_back(i);
        Eigen::MatrixXcd g(rb.size(), rk.size());
        for (std::size_t i = 0; i < rb.size(); ++i)
          for (std::size_t j = 0; j < rk.size(); ++j)
            g(i, j) = smp.pair(tb.modes[rb[i]], tk.modes[rk[j]]);
        const cplx v = permanent(g);
        perm_cache.emplace(key, v);
        return v;
      };

      std::function<cplx(int, std::uint64_t, std::uint64_t, int)> rec =
          [&](int j, std::uint64_t ub, std::uint64_t uk, int created) -> cplx {
        if (++visited > budget)
          throw ContractionOverflow("more than " + std::to_string(budget) +
                                    " contraction patterns");
        if (j == n)
          return created == sc ? rest_perm(ub, uk) : cplx(0.0);
        cplx acc = 0.0;
        if (created < sc)
          for (int i = 0; i < nb; ++i)
            if (!(ub >> i & 1))
              acc += smp.pair(tb.modes[i], legs[j]) *
                     rec(j + 1, ub | (std::uint64_t{1} << i), uk, created + 1);
        if ((j - created) < n - sc)
          for (int i = 0; i < nk; ++i)
            if (!(uk >> i & 1))
              acc += smp.pair(legs[j], tk.modes[i]) *
                     rec(j + 1, ub, uk | (std::uint64_t{1} << i), created);
        return acc;
      };
      total += std::conj(tb.coef) * tk.coef * rec(0, 0, 0, 0);
    }
  return total;
}

} // namespace

cplx phi_matrix_element(const WickField &w, const FockVector &bra,
                        const FockVector &ket, Mass m,
                        const QuadratureScheme &q, std::uint64_t budget) {
  check_mass(bra, ket);
  if (bra.mass().value != m.value)
    throw InvalidArgument("field mass differs from the vectors' mass");
  std::vector<SingleParticleVector> legs;
  for (const auto &e : w.nu.entries())
    legs.push_back(point_kernel(e, bra.dim(), m));
  Sampler smp(q);
  std::uint64_t visited = 0;
  return phi_impl(legs, bra, ket, smp, budget, visited);
}

CutoffFunction alternate_profile(const CutoffFunction &h) {
  if (h.name() == "smoothstep5")
    return CutoffFunction::smooth_bump();
  return CutoffFunction::smoothstep5();
}

SigmaCoefficients::SigmaCoefficients(const MomentumFunction &f, Mass m,
                                     const CutoffFunction &h,
                                     const QuadratureScheme &q, int max_order)
    : s_(f.dim()) {
  if (f.is_zero()) {
    r_ = 1.0;
    gauss_ = 1.0;
    for (const auto &l : enumerate_field_indices(s_, max_order))
      legs_[l] = 0.0;
    return;
  }
  if (!f.has_position_form())
    throw InvalidArgument("sigma coefficients need the position-space form of f");
  r_ = std::max(f.support_radius(), 1e-6);
  gauss_ = std::exp(-0.5 * mass_norm_sq(f, m, q));
  const CutoffFunction alt = alternate_profile(h);
  PositionEval re = [f](const Vec3 &x) { return f.real_at(x); };
  PositionEval im = [f](const Vec3 &x) { return f.imag_at(x); };
  for (const auto &l : enumerate_field_indices(s_, max_order)) {
    const PositionEval &u = l.time ? im : re;
    const double sign = l.time ? -1.0 : 1.0;
    const double a = sign * cutoff_moment(h, r_, l.space, s_, u) / l.factorial();
    const double b =
        sign * cutoff_moment(alt, r_, l.space, s_, u) / l.factorial();
    if (std::abs(a - b) > 1e-8)
      throw CutoffDependence("profiles " + h.name() + " and " + alt.name() +
                             " differ by " + std::to_string(std::abs(a - b)));
    legs_[l] = a;
  }
}

double SigmaCoefficients::leg_factor(const FieldIndex &nu) const {
  auto it = legs_.find(nu);
  if (it == legs_.end())
    throw InvalidArgument("leg order exceeds the precomputed range");
  return it->second;
}

cplx SigmaCoefficients::operator()(const MultiIndex &nu) const {
  static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  cplx v = gauss_ * ipow[nu.n() % 4] / factorial(nu.n());
  for (const auto &e : nu.entries())
    v *= leg_factor(e);
  return v;
}

cplx sigma_coefficient(int n, const MultiIndex &nu, const MomentumFunction &f,
                       Mass m, const CutoffFunction &h,
                       const QuadratureScheme &q) {
  if (nu.n() != n)
    throw InvalidArgument("sigma_coefficient: n must equal the index length");
  int max_order = 0;
  for (const auto &e : nu.entries())
    max_order = std::max(max_order, e.order());
  return SigmaCoefficients(f, m, h, q, max_order)(nu);
}

cplx expansion_partial_sum(const MomentumFunction &f, const FockVector &bra,
                           const FockVector &ket, Mass m, int n_max,
                           int nu_cap, const QuadratureScheme &q,
                           const CutoffFunction &h, std::uint64_t budget) {
  check_mass(bra, ket);
  if (n_max < 0 || nu_cap < 0)
    throw InvalidArgument("expansion caps must be >= 0");
  const int s = f.dim();
  const SigmaCoefficients sigma(f, m, h, q, nu_cap);
  Sampler smp(q);
  std::map<FieldIndex, SingleParticleVector> kernels;
  for (const auto &l : enumerate_field_indices(s, nu_cap))
    kernels.emplace(l, point_kernel(l, s, m));

  cplx acc = 0.0;
  for (int n = 0; n <= n_max; ++n)
    for (const auto &nu : enumerate_multi_indices(n, s, nu_cap)) {
      const cplx c = sigma(nu);
      if (c == 0.0)
        continue;
      std::vector<SingleParticleVector> legs;
      for (const auto &e : nu.entries())
        legs.push_back(kernels.at(e));
      std::uint64_t visited = 0;
      try {
        acc += c * phi_impl(legs, bra, ket, smp, budget, visited);
      } catch (const ContractionOverflow &e) {
        throw ContractionOverflow("at n = " + std::to_string(n) +
                                  ", nu = " + nu.to_string() + ": " + e.what());
      }
    }
  return acc;
}

double chi_norm(const MultiIndex &nu, double beta, Mass m, int s,
                const QuadratureScheme &q) {
  if (!(beta > 0.0))
    throw InvalidArgument("chi_norm: beta must be positive");
  if (q.s != s)
    throw InvalidArgument("chi_norm: quadrature dimension differs from s");
  if (nu.n() == 0)
    return 1.0;
  // e^{-2 beta omega} sets the momentum scale 1/beta.
  const QuadratureScheme qb = rescaled(q, 1.0 / beta);
  Sampler smp(qb);
  std::vector<SingleParticleVector> modes;
  for (const auto &e : nu.entries()) {
    const SingleParticleVector k = point_kernel(e, s, m);
    modes.emplace_back(s, m, [k, beta, m](const Vec3 &p) {
      return std::exp(-beta * dispersion(m, p)) * k(p);
    });
  }
  const int n = nu.n();
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g(i, j) = smp.pair(modes[i], modes[j]);
  return std::sqrt(std::max(0.0, permanent(g).real()));
}

DampingProfile DampingProfile::constant_one() {
  DampingProfile d;
  d.value = [](double) { return 1.0; };
  d.fourier = [](double) { return 0.0; };
  d.identity = true;
  return d;
}

DampingProfile DampingProfile::gaussian() {
  DampingProfile d;
  d.value = [](double e) { return std::exp(-e * e); };
  d.fourier = [](double t) {
    return std::sqrt(std::numbers::pi) / (2.0 * std::numbers::pi) *
           std::exp(-0.25 * t * t);
  };
  return d;
}

namespace {

// sum_{n <= N} (1/n!) int d(E) rho^{*n}(E) dE on a uniform grid of spacing h.
cplx spectral_series(const std::vector<cplx> &rho, const std::vector<double> &damp,
                     double h, double damp0, int n_max) {
  const std::size_t len = rho.size();
  auto trapz = [&](const std::vector<cplx> &c) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < len; ++k)
      acc += (k == 0 || k + 1 == len ? 0.5 : 1.0) * damp[k] * c[k];
    return h * acc;
  };
  cplx total = damp0;
  std::vector<cplx> conv = rho;
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) {
      std::vector<cplx> next(len, 0.0);
      for (std::size_t k = 1; k < len; ++k) {
        cplx acc = 0.5 * (conv[0] * rho[k] + conv[k] * rho[0]);
        for (std::size_t j = 1; j < k; ++j)
          acc += conv[j] * rho[k - j];
        next[k] = h * acc;
      }
      conv = std::move(next);
    }
    total += trapz(conv) / factorial(n);
  }
  return total;
}

} // namespace

double smoothing_identity_check(const MomentumFunction &f,
                                const MomentumFunction &g,
                                const DampingProfile &damp, Mass m,
                                const Rule1D &t_quad,
                                const QuadratureScheme &q, int n_max) {
  if (f.dim() != g.dim())
    throw InvalidArgument("smoothing check: dimension mismatch");
  const int s = f.dim();
  const double xf = mass_norm_sq(f, m, q);
  const double xg = mass_norm_sq(g, m, q);
  const double pref = std::exp(-0.5 * (xf + xg));
  auto density = [&](const Vec3 &p) {
    return std::conj(one_particle(g, m, p)) * one_particle(f, m, p);
  };

  cplx spectral;
  if (damp.identity) {
    const cplx z = q.integrate(density);
    cplx term = 1.0, acc = 1.0;
    for (int n = 1; n <= n_max; ++n) {
      term *= z / static_cast<double>(n);
      acc += term;
    }
    spectral = pref * acc;
  } else {
    // Energy density rho(E) = int delta(E - omega) conj(xi_g) xi_f dp.
    const QuadratureScheme sphere =
        shell_product(s, Rule1D{{1.0}, {1.0}}, 24, q.rel_tol);
    double e_max = dispersion(m, Vec3(q.shell_radius.back(), 0.0, 0.0));
    // Energies where the profile is negligible cannot contribute.
    {
      double peak = 0.0;
      const int probes = 4000;
      for (int k = 0; k <= probes; ++k)
        peak = std::max(peak, std::abs(damp.value(e_max * k / probes)));
      int last = probes;
      while (last > 1 && std::abs(damp.value(e_max * last / probes)) < 1e-18 * peak)
        --last;
      e_max = e_max * std::min(probes, last + 1) / probes;
    }
    // The threshold E = m sits on an even grid node, where rho jumps (s = 2)
    // or has a square-root edge (s = 3); the node carries the mean of the
    // one-sided limits.
    std::size_t len = 8001;
    double h = e_max / (len - 1);
    std::size_t k_m = 0;
    if (m.value > 0.0) {
      k_m = 2 * std::max<std::size_t>(
                    1, static_cast<std::size_t>(std::llround(0.5 * m.value / h)));
      h = m.value / k_m;
      len = static_cast<std::size_t>(std::ceil(e_max / h)) + 1;
      len += (len % 2 == 0);
    }
    std::vector<cplx> rho(len, 0.0);
    std::vector<double> dv(len);
    for (std::size_t k = 0; k < len; ++k) {
      const double e = k * h;
      dv[k] = damp.value(e);
      if (m.value > 0.0 && k < k_m)
        continue;
      const double e_eval = std::max(e, 1e-9 * h);
      const double pk =
          k == k_m ? 0.0 : std::sqrt(std::max(0.0, e_eval * e_eval - m.value * m.value));
      const double pk_eval = std::max(pk, 1e-12);
      const cplx ang = sphere.integrate(
          [&](const Vec3 &dir) { return density(pk_eval * dir); });
      rho[k] = std::pow(pk_eval, s - 2) * e_eval * ang;
      if (m.value > 0.0 && k == k_m)
        rho[k] *= 0.5;
    }
    // Richardson extrapolation between spacings h and 2h.
    std::vector<cplx> rho2;
    std::vector<double> dv2;
    for (std::size_t k = 0; k < len; k += 2) {
      rho2.push_back(rho[k]);
      dv2.push_back(dv[k]);
    }
    const cplx fine = spectral_series(rho, dv, h, damp.value(0.0), n_max);
    const cplx coarse =
        spectral_series(rho2, dv2, 2.0 * h, damp.value(0.0), n_max);
    spectral = pref * (4.0 * fine - coarse) / 3.0;
  }

  const WeylLabel wg{g, m};
  cplx temporal = 0.0;
  if (damp.identity) {
    temporal = coherent_overlap(wg, {f, m}, q);
  } else {
    for (std::size_t i = 0; i < t_quad.size(); ++i) {
      const double t = t_quad.nodes[i];
      temporal += t_quad.weights[i] * damp.fourier(t) *
                  coherent_overlap(wg, {translate_time(f, t, m), m}, q);
    }
  }
  return std::abs(spectral - temporal);
}

} // namespace scalim
