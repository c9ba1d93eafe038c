#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "phg/affine.hpp"
#include "phg/chart.hpp"
#include "phg/dual.hpp"
#include "phg/errors.hpp"
#include "phg/expr.hpp"
#include "phg/lie.hpp"
#include "phg/linalg.hpp"
#include "phg/tensor.hpp"

namespace phg {

/// Riemannian pair (g, Gamma): a metric together with a symmetric affine
/// object that need not be its Levi-Civita connection.
class MetricPair {
 public:
  MetricPair() = default;
  MetricPair(int dim, std::vector<std::vector<ScalarExpr>> metric, AffineObject gamma, Box domain)
      : n_(dim), g_(std::move(metric)), gamma_(std::move(gamma)), domain_(std::move(domain)) {}

  int dim() const { return n_; }
  const Box& domain() const { return domain_; }
  const AffineObject& affine() const { return gamma_; }

  template <class T>
  SqMat<T> metric(const std::vector<T>& pt) const {
    SqMat<T> m(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) m(i, j) = g_[i][j].eval(pt);
    return m;
  }

  SqMat<double> metric_checked(const Point& x) const {
    domain_.require(x);
    SqMat<double> m = metric(x);
    if (smallest_eigenvalue_sym(m) <= 1e-10) throw DegenerateMetric("metric not positive definite");
    return m;
  }

  /// d_r g_{jk} for all r.
  template <class T>
  std::vector<SqMat<T>> dmetric(const std::vector<T>& pt) const {
    using D = Dual<T>;
    std::vector<SqMat<T>> dg(n_, SqMat<T>(n_));
    for (int r = 0; r < n_; ++r) {
      std::vector<D> dp(n_);
      for (int i = 0; i < n_; ++i) dp[i] = D(pt[i]);
      dp[r].d = scalar_traits<T>::constant(1.0);
      SqMat<D> md = metric(dp);
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) dg[r](i, j) = md(i, j).d;
    }
    return dg;
  }

  /// Christoffel symbols of g:
  ///   0.5 g^{ka} (d_r g_{ja} - d_a g_{rj} + d_j g_{ar}), symmetric in (r, j).
  template <class T>
  BlockT<T> christoffel(const std::vector<T>& pt) const {
    SqMat<T> ginv = inverse(metric(pt));
    std::vector<SqMat<T>> dg = dmetric(pt);
    BlockT<T> c(n_, {Variance::Upper, Variance::Lower, Variance::Lower}, {{1, 2, false}});
    for (int k = 0; k < n_; ++k)
      for (int r = 0; r < n_; ++r)
        for (int j = 0; j < n_; ++j) {
          T s{};
          for (int a = 0; a < n_; ++a)
            s += ginv(k, a) * (dg[r](j, a) - dg[a](r, j) + dg[j](a, r)) * 0.5;
          c.at({k, r, j}) = s;
        }
    return c;
  }

  BlockT<double> christoffel_at(const Point& x) const {
    metric_checked(x);
    return christoffel(x);
  }

  /// Metric covariant derivative with the pair's own Gamma:
  ///   nabla_r g_{jk} = d_r g_{jk} - g_{ja} Gamma^a_{rk} - g_{ka} Gamma^a_{rj}.
  /// Sign convention fixed by the Levi-Civita vanishing requirement.
  template <class T>
  BlockT<T> nabla_g(const std::vector<T>& pt) const {
    SqMat<T> g = metric(pt);
    std::vector<SqMat<T>> dg = dmetric(pt);
    BlockT<T> gam = gamma_.gamma(pt);
    BlockT<T> out(n_, {Variance::Lower, Variance::Lower, Variance::Lower}, {{1, 2, false}});
    for (int r = 0; r < n_; ++r)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) {
          T s = dg[r](j, k);
          for (int a = 0; a < n_; ++a)
            s -= g(j, a) * gam.at({a, r, k}) + g(k, a) * gam.at({a, r, j});
          out.at({r, j, k}) = s;
        }
    return out;
  }

  BlockT<double> nabla_g_at(const Point& x) const {
    domain_.require(x);
    return nabla_g(x);
  }

  /// First integrability component: I1^k_{rj} = [g^{ak} nabla_r g_{ja}]_{[rj]}.
  template <class T>
  BlockT<T> I1(const std::vector<T>& pt) const {
    SqMat<T> ginv = inverse(metric(pt));
    BlockT<T> ng = nabla_g(pt);
    BlockT<T> out(n_, {Variance::Upper, Variance::Lower, Variance::Lower}, {{1, 2, true}});
    for (int k = 0; k < n_; ++k)
      for (int r = 0; r < n_; ++r)
        for (int j = 0; j < n_; ++j) {
          T s{};
          for (int a = 0; a < n_; ++a)
            s += ginv(a, k) * (ng.at({r, j, a}) - ng.at({j, r, a}));
          out.at({k, r, j}) = s;
        }
    return out;
  }

  BlockT<double> I1_at(const Point& x) const {
    metric_checked(x);
    return I1(x);
  }

  /// Second component; identical formula to the affine integrability object.
  template <class T>
  BlockT<T> I2(const std::vector<T>& pt) const {
    return gamma_.integrability(pt);
  }

  BlockT<double> I2_at(const Point& x) const {
    domain_.require(x);
    return I2(x);
  }

  template <class T>
  std::pair<BlockT<T>, BlockT<T>> full_I(const std::vector<T>& pt) const {
    return {I1(pt), I2(pt)};
  }

  std::pair<BlockT<double>, BlockT<double>> full_I_at(const Point& x) const {
    metric_checked(x);
    return full_I(x);
  }

  /// Residual of the metric-arrow condition f1^T g(y) f1 = g(x).
  double metric_arrow_residual(const OneArrow& arrow) const {
    SqMat<double> gx = metric(arrow.source);
    SqMat<double> gy = metric(arrow.target);
    double worst = 0;
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) {
        double s = -gx(j, k);
        for (int a = 0; a < n_; ++a)
          for (int b = 0; b < n_; ++b) s += arrow.f1(a, j) * arrow.f1(b, k) * gy(a, b);
        worst = std::max(worst, std::fabs(s));
      }
    return worst;
  }

  TwoArrow eps_lift_arrow(const OneArrow& arrow, bool enforce_metric = true) const {
    if (enforce_metric && metric_arrow_residual(arrow) > 1e-9)
      throw NotMetricArrow("arrow violates the metric condition beyond 1e-9");
    return gamma_.eps_lift_arrow(arrow);
  }

  /// Arrow satisfying the metric condition by construction:
  /// f1 = C(y)^{-T} Q C(x)^T with g = C C^T and Q orthogonal from the seed.
  OneArrow metric_arrow_sampler(const Point& x, const Point& y, std::uint64_t seed) const {
    SqMat<double> cx = cholesky(metric_checked(x));
    SqMat<double> cy = cholesky(metric_checked(y));
    SqMat<double> q = random_orthogonal(n_, seed);
    SqMat<double> cyT(n_), cxT(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        cyT(i, j) = cy(j, i);
        cxT(i, j) = cx(j, i);
      }
    return OneArrow(x, y, inverse(cyT) * q * cxT);
  }

  /// R(x, y, f1) = full_I(y) - push (by the lifted 2-arrow) of full_I(x).
  std::pair<BlockT<double>, BlockT<double>> riemann_curvature_pair(const Point& x, const Point& y,
                                                                  const SqMat<double>& f1) const {
    OneArrow arrow(x, y, f1);
    TwoArrow lifted = eps_lift_arrow(arrow, true);
    auto [rho, sigma] = full_I_at(x);
    auto pushed = pushforward_jet2form(lifted.f1, lifted.f2, rho, sigma);
    auto [rho_y, sigma_y] = full_I_at(y);
    return {rho_y - pushed.first, sigma_y - pushed.second};
  }

  /// Residual of the linearized metric condition
  ///   d_a g_{jk} xi^a + g_{ka} xi^a_j + g_{ja} xi^a_k = 0.
  double metric_jet_residual(const JetVector& xi, const Point& x) const {
    SqMat<double> g = metric(x);
    std::vector<SqMat<double>> dg = dmetric(x);
    double worst = 0;
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) {
        double s = 0;
        for (int a = 0; a < n_; ++a)
          s += dg[a](j, k) * xi.xi0[a] + g(k, a) * xi.xi1(a, j) + g(j, a) * xi.xi1(a, k);
        worst = std::max(worst, std::fabs(s));
      }
    return worst;
  }

  /// Seeded order-1 jet satisfying the linearized metric condition exactly:
  /// solve g xi1 + (g xi1)^T = B with B_{jk} = -d_a g_{jk} xi^a, plus a free
  /// antisymmetric part.
  JetVector metric_jet_sampler(const Point& x, std::uint64_t seed) const {
    SqMat<double> g = metric_checked(x);
    std::vector<SqMat<double>> dg = dmetric(x);
    std::uint64_t st = seed * 0x2545f4914f6cdd1dULL + 7;
    std::vector<double> xi0(n_);
    for (int i = 0; i < n_; ++i) xi0[i] = 2.0 * uniform01(st) - 1.0;
    SqMat<double> s(n_);
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) {
        double b = 0;
        for (int a = 0; a < n_; ++a) b -= dg[a](j, k) * xi0[a];
        s(j, k) = 0.5 * b;
      }
    for (int j = 0; j < n_; ++j)
      for (int k = j + 1; k < n_; ++k) {
        double a = 2.0 * uniform01(st) - 1.0;
        s(j, k) += a;
        s(k, j) -= a;
      }
    SqMat<double> xi1 = inverse(g) * s;
    return JetVector::order1(std::move(xi0), std::move(xi1));
  }

  /// Formal Lie derivative of full_I with the order-2 extension of xi.
  std::pair<BlockT<double>, BlockT<double>> linear_curvature(const JetVector& xi,
                                                             const Point& x) const {
    if (metric_jet_residual(xi, x) > 1e-9)
      throw NotMetricJet("jet violates the linearized metric condition beyond 1e-9");
    JetVector lifted = gamma_.eps_lift_jet(xi, x);
    auto field = [this](const auto& pt) { return this->full_I(pt); };
    return formal_lie_derivative_jet2form(lifted, field, x);
  }

  double one_flat_residual(const Point& x) const {
    BlockT<double> diff = gamma_.gamma_at(x) - christoffel_at(x);
    return diff.frobenius_norm();
  }

  template <class Sampler>
  std::pair<bool, double> is_one_flat(int samples, double tol, Sampler&& sample_point) const {
    double worst = 0;
    for (int s = 0; s < samples; ++s)
      worst = std::max(worst, one_flat_residual(sample_point(s)));
    return {worst <= tol, worst};
  }

  /// Index-lowered I2: R_{kj,lm} = g_{li} I2^i_{kj,m}.
  BlockT<double> lowered_I2(const Point& x) const {
    SqMat<double> g = metric_checked(x);
    BlockT<double> i2 = I2_at(x);
    BlockT<double> out(n_,
                       {Variance::Lower, Variance::Lower, Variance::Lower, Variance::Lower},
                       {{0, 1, true}});
    for (int k = 0; k < n_; ++k)
      for (int j = 0; j < n_; ++j)
        for (int l = 0; l < n_; ++l)
          for (int m = 0; m < n_; ++m) {
            double s = 0;
            for (int i = 0; i < n_; ++i) s += g(l, i) * i2.at({i, k, j, m});
            out.at({k, j, l, m}) = s;
          }
    return out;
  }

  struct CurvatureFit {
    double c;
    double relative_residual;
  };

  /// Least-squares fit of R_{kj,lm} against the constant-curvature reference
  /// Rbar_{kj,lm} = g_{lk} g_{jm} - g_{lj} g_{km} at one point.
  CurvatureFit constant_curvature_fit(const Point& x) const {
    SqMat<double> g = metric_checked(x);
    BlockT<double> R = lowered_I2(x);
    double num = 0, den = 0;
    BlockT<double> ref(n_,
                       {Variance::Lower, Variance::Lower, Variance::Lower, Variance::Lower});
    for (int k = 0; k < n_; ++k)
      for (int j = 0; j < n_; ++j)
        for (int l = 0; l < n_; ++l)
          for (int m = 0; m < n_; ++m) {
            double rb = g(l, k) * g(j, m) - g(l, j) * g(k, m);
            ref.at({k, j, l, m}) = rb;
            num += R.at({k, j, l, m}) * rb;
            den += rb * rb;
          }
    if (den < 1e-12) throw ZeroReference("constant-curvature reference vanishes");
    double c = num / den;
    double resid = 0;
    for (std::size_t i = 0; i < R.data.size(); ++i) {
      double d = R.data[i] - c * ref.data[i];
      resid += d * d;
    }
    return {c, std::sqrt(resid) / std::sqrt(den)};
  }

 private:
  int n_ = 0;
  std::vector<std::vector<ScalarExpr>> g_;
  AffineObject gamma_;
  Box domain_;
};

/// Residuals of the three curvature identities for a valence-4 block:
/// antisymmetry in (k,j), antisymmetry in (l,m), cyclic sum.
struct IdentityResiduals {
  double antisym_first;
  double antisym_second;
  double cyclic;
};

inline IdentityResiduals curvature_identities_check(const BlockT<double>& R) {
  const int n = R.n;
  IdentityResiduals out{0, 0, 0};
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) {
          out.antisym_first =
              std::max(out.antisym_first, std::fabs(R.at({k, j, l, m}) + R.at({j, k, l, m})));
          out.antisym_second =
              std::max(out.antisym_second, std::fabs(R.at({k, j, l, m}) + R.at({k, j, m, l})));
          out.cyclic = std::max(
              out.cyclic,
              std::fabs(R.at({k, j, l, m}) + R.at({l, k, j, m}) + R.at({j, l, k, m})));
        }
  return out;
}

enum class RiemannClass { FlatPHG, OneFlatNonconstant, NotOneFlat };

inline const char* to_string(RiemannClass c) {
  switch (c) {
    case RiemannClass::FlatPHG: return "FlatPHG";
    case RiemannClass::OneFlatNonconstant: return "OneFlatNonconstant";
    case RiemannClass::NotOneFlat: return "NotOneFlat";
  }
  return "?";
}

struct ClassifyResult {
  RiemannClass verdict;
  double one_flat_residual;
  double max_fit_residual;
  double c_spread;
  double c_mean;
};

/// Three-way classification: 1-flat iff Gamma matches the Christoffel symbols
/// of g; flat additionally needs the curvature to fit the constant-curvature
/// reference with a single coefficient across the whole sample. The spread
/// threshold is separate from the flatness tolerance because the per-point
/// fit can be exact (always so for n = 2) while the coefficient still varies.
template <class Sampler>
ClassifyResult classify(const MetricPair& M, int samples, double tol, Sampler&& sample_point,
                        double spread_tol = 1e-4) {
  ClassifyResult r{RiemannClass::NotOneFlat, 0, 0, 0, 0};
  double cmin = 0, cmax = 0, csum = 0;
  bool first = true;
  for (int s = 0; s < samples; ++s) {
    Point x = sample_point(s);
    r.one_flat_residual = std::max(r.one_flat_residual, M.one_flat_residual(x));
    auto fit = M.constant_curvature_fit(x);
    r.max_fit_residual = std::max(r.max_fit_residual, fit.relative_residual);
    csum += fit.c;
    if (first) {
      cmin = cmax = fit.c;
      first = false;
    } else {
      cmin = std::min(cmin, fit.c);
      cmax = std::max(cmax, fit.c);
    }
  }
  r.c_spread = cmax - cmin;
  r.c_mean = samples > 0 ? csum / samples : 0;
  if (r.one_flat_residual > tol)
    r.verdict = RiemannClass::NotOneFlat;
  else if (r.max_fit_residual <= std::max(tol, 1e-7) && r.c_spread <= spread_tol)
    r.verdict = RiemannClass::FlatPHG;
  else
    r.verdict = RiemannClass::OneFlatNonconstant;
  return r;
}

}  // namespace phg
