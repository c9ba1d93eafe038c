#pragma once

#include <cmath>
#include <vector>

#include "phg/chart.hpp"
#include "phg/dual.hpp"
#include "phg/errors.hpp"
#include "phg/expr.hpp"
#include "phg/lie.hpp"
#include "phg/tensor.hpp"

namespace phg {

/// Affine structure object: Gamma^i_{jk}(x), symmetric in the lower pair.
class AffineObject {
 public:
  AffineObject() = default;
  AffineObject(int dim, std::vector<std::vector<std::vector<ScalarExpr>>> components, Box domain)
      : n_(dim), gamma_(std::move(components)), domain_(std::move(domain)) {}

  int dim() const { return n_; }
  const Box& domain() const { return domain_; }

  template <class T>
  BlockT<T> gamma(const std::vector<T>& pt) const {
    BlockT<T> g(n_, {Variance::Upper, Variance::Lower, Variance::Lower}, {{1, 2, false}});
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) g.at({i, j, k}) = gamma_[i][j][k].eval(pt);
    return g;
  }

  BlockT<double> gamma_at(const Point& x) const {
    domain_.require(x);
    return gamma(x);
  }

  /// d_a Gamma^i_{jk} for all a, via one dual layer.
  template <class T>
  std::vector<BlockT<T>> dgamma(const std::vector<T>& pt) const {
    using D = Dual<T>;
    std::vector<BlockT<T>> dg(n_);
    for (int a = 0; a < n_; ++a) {
      std::vector<D> dp(n_);
      for (int i = 0; i < n_; ++i) dp[i] = D(pt[i]);
      dp[a].d = scalar_traits<T>::constant(1.0);
      BlockT<D> gd = gamma(dp);
      dg[a] = BlockT<T>(n_, gd.slots, gd.syms);
      for (std::size_t m = 0; m < gd.data.size(); ++m) dg[a].data[m] = gd.data[m].d;
    }
    return dg;
  }

  /// Lift of a 1-arrow to the unique 2-arrow preserving Gamma:
  ///   f2^i_{jk} = Gamma^i_{ab}(y) f1^a_j f1^b_k - Gamma^a_{jk}(x) f1^i_a
  TwoArrow eps_lift_arrow(const OneArrow& arrow) const {
    domain_.require(arrow.source);
    domain_.require(arrow.target);
    BlockT<double> gx = gamma(arrow.source);
    BlockT<double> gy = gamma(arrow.target);
    BlockT<double> f2(n_, {Variance::Upper, Variance::Lower, Variance::Lower}, {{1, 2, false}});
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) {
          double s = 0;
          for (int a = 0; a < n_; ++a) {
            for (int b = 0; b < n_; ++b) s += gy.at({i, a, b}) * arrow.f1(a, j) * arrow.f1(b, k);
            s -= gx.at({a, j, k}) * arrow.f1(i, a);
          }
          f2.at({i, j, k}) = s;
        }
    return TwoArrow(arrow.source, arrow.target, arrow.f1, std::move(f2));
  }

  /// I(Gamma)^i_{rj,k} = [d_r Gamma^i_{jk} + Gamma^i_{ra} Gamma^a_{jk}]_{[rj]}.
  /// Slots (i; r, j; k), antisymmetric in (r, j); the quadratic attachment is
  /// fixed so the lowered object satisfies the pair-antisymmetry and cyclic
  /// identities for torsion-free metric connections (checked on bump2).
  template <class T>
  BlockT<T> integrability(const std::vector<T>& pt) const {
    BlockT<T> g = gamma(pt);
    std::vector<BlockT<T>> dg = dgamma(pt);
    BlockT<T> out(n_,
                  {Variance::Upper, Variance::Lower, Variance::Lower, Variance::Lower},
                  {{1, 2, true}});
    for (int i = 0; i < n_; ++i)
      for (int r = 0; r < n_; ++r)
        for (int j = 0; j < n_; ++j)
          for (int k = 0; k < n_; ++k) {
            T plus = dg[r].at({i, j, k});
            T minus = dg[j].at({i, r, k});
            for (int a = 0; a < n_; ++a) {
              plus += g.at({i, r, a}) * g.at({a, j, k});
              minus += g.at({i, j, a}) * g.at({a, r, k});
            }
            out.at({i, r, j, k}) = plus - minus;
          }
    return out;
  }

  BlockT<double> integrability_at(const Point& x) const {
    domain_.require(x);
    return integrability(x);
  }

  /// R(x, y, f1) = I(Gamma; y) - push_{f1} I(Gamma; x); f1 free here.
  BlockT<double> nonlinear_curvature(const Point& x, const Point& y,
                                     const SqMat<double>& f1) const {
    domain_.require(x);
    domain_.require(y);
    if (std::fabs(det(f1)) <= 1e-12) throw SingularArrow("free f1 not invertible");
    return integrability(y) - pushforward_tensor(f1, integrability(x));
  }

  /// Splitting on jets: xi^i_{jk} = d_a Gamma^i_{jk} xi^a + Gamma^i_{ka} xi^a_j
  ///                               + Gamma^i_{ja} xi^a_k - xi^i_a Gamma^a_{jk}.
  JetVector eps_lift_jet(const JetVector& xi, const Point& x) const {
    if (xi.order < 1) throw OrderError("eps_lift_jet needs an order-1 jet");
    domain_.require(x);
    BlockT<double> g = gamma(x);
    std::vector<BlockT<double>> dg = dgamma(x);
    BlockT<double> xi2(n_, {Variance::Upper, Variance::Lower, Variance::Lower}, {{1, 2, false}});
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) {
          double s = 0;
          for (int a = 0; a < n_; ++a) {
            s += dg[a].at({i, j, k}) * xi.xi0[a];
            s += g.at({i, k, a}) * xi.xi1(a, j);
            s += g.at({i, j, a}) * xi.xi1(a, k);
            s -= xi.xi1(i, a) * g.at({a, j, k});
          }
          xi2.at({i, j, k}) = s;
        }
    return JetVector::order2(xi.xi0, xi.xi1, std::move(xi2));
  }

  /// Linear curvature through the Lie-derivative identity:
  /// r(xi1) = L_{eps-lift(xi1)} I(Gamma), evaluated operationally.
  BlockT<double> linear_curvature(const JetVector& xi, const Point& x) const {
    JetVector lifted = eps_lift_jet(xi, x);
    auto field = [this](const auto& pt) { return this->integrability(pt); };
    return formal_lie_derivative(lifted, field, x);
  }

  /// Samples ||I(Gamma)|| at quasi-random points; Flat iff the max <= tol.
  struct FlatVerdict {
    bool flat;
    double max_residual;
  };
  template <class Sampler>
  FlatVerdict is_flat(int samples, double tol, Sampler&& sample_point) const {
    double worst = 0;
    for (int s = 0; s < samples; ++s) {
      Point x = sample_point(s);
      worst = std::max(worst, integrability_at(x).frobenius_norm());
    }
    return {worst <= tol, worst};
  }

 private:
  int n_ = 0;
  std::vector<std::vector<std::vector<ScalarExpr>>> gamma_;
  Box domain_;
};

/// Residual of the membership condition
/// Gamma^i_{ab}(y) f1^a_j f1^b_k = Gamma^a_{jk}(x) f1^i_a + f2^i_{jk}.
inline double affine_membership_residual(const AffineObject& A, const TwoArrow& arrow) {
  const int n = A.dim();
  BlockT<double> gx = A.gamma_at(arrow.source);
  BlockT<double> gy = A.gamma_at(arrow.target);
  double worst = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double lhs = 0, rhs = arrow.f2.at({i, j, k});
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) lhs += gy.at({i, a, b}) * arrow.f1(a, j) * arrow.f1(b, k);
          rhs += gx.at({a, j, k}) * arrow.f1(i, a);
        }
        worst = std::max(worst, std::fabs(lhs - rhs));
      }
  return worst;
}

}  // namespace phg
