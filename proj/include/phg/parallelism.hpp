#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "phg/chart.hpp"
#include "phg/dual.hpp"
#include "phg/errors.hpp"
#include "phg/expr.hpp"
#include "phg/lie.hpp"
#include "phg/linalg.hpp"
#include "phg/tensor.hpp"

namespace phg {

/// Absolute parallelism: an invertible frame-valued field w^i_j(x) on a box.
/// All derived objects (gamma, integrability object, curvatures) evaluate
/// over any scalar so they can be differentiated through with duals.
class StructureObjectW {
 public:
  StructureObjectW() = default;
  StructureObjectW(int dim, std::vector<std::vector<ScalarExpr>> components, Box domain)
      : n_(dim), w_(std::move(components)), domain_(std::move(domain)) {}

  int dim() const { return n_; }
  const Box& domain() const { return domain_; }

  template <class T>
  SqMat<T> frame(const std::vector<T>& pt) const {
    SqMat<T> m(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) m(i, j) = w_[i][j].eval(pt);
    return m;
  }

  SqMat<double> frame_checked(const Point& x) const {
    domain_.require(x);
    SqMat<double> m = frame(x);
    if (std::fabs(det(m)) <= 1e-12) throw SingularFrame("frame w not invertible");
    return m;
  }

  /// The unique arrow of the invariance groupoid over (x, y): f1 = w(y) w(x)^{-1}.
  OneArrow epsilon_arrow(const Point& x, const Point& y) const {
    SqMat<double> wx = frame_checked(x);
    SqMat<double> wy = frame_checked(y);
    return OneArrow(x, y, wy * inverse(wx));
  }

  /// Gamma^i_{jk} = d_j w^i_a (w^{-1})^a_k. First lower slot is the
  /// derivative index.
  template <class T>
  BlockT<T> gamma(const std::vector<T>& pt) const {
    SqMat<T> winv = inverse(frame(pt));
    BlockT<T> g(n_, {Variance::Upper, Variance::Lower, Variance::Lower});
    for (int i = 0; i < n_; ++i)
      for (int a = 0; a < n_; ++a) {
        std::vector<T> dw = expr_gradient(w_[i][a], pt);
        for (int j = 0; j < n_; ++j)
          for (int k = 0; k < n_; ++k) g.at({i, j, k}) += dw[j] * winv(a, k);
      }
    return g;
  }

  BlockT<double> gamma_at(const Point& x) const {
    domain_.require(x);
    return gamma(x);
  }

  /// I(w)^i_{jk} = Gamma^i_{jk} - Gamma^i_{kj}.
  template <class T>
  BlockT<T> integrability(const std::vector<T>& pt) const {
    BlockT<T> g = gamma(pt);
    BlockT<T> out(n_, {Variance::Upper, Variance::Lower, Variance::Lower}, {{1, 2, true}});
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) out.at({i, j, k}) = g.at({i, j, k}) - g.at({i, k, j});
    return out;
  }

  BlockT<double> integrability_at(const Point& x) const {
    domain_.require(x);
    return integrability(x);
  }

  /// R(x, y) = I(w; y) - push_{epsilon(x,y)} I(w; x).
  BlockT<double> nonlinear_curvature(const Point& x, const Point& y) const {
    OneArrow eps = epsilon_arrow(x, y);
    return integrability_at(y) - pushforward_tensor(eps.f1, integrability_at(x));
  }

  /// Linear curvature r^i_{kj,a} = [d_k Gamma^i_{aj} + Gamma^i_{bj} Gamma^b_{ak}]_{[kj]}.
  /// Slots (i; k, j; a), antisymmetric in the (k, j) pair.
  template <class T>
  BlockT<T> linear_curvature(const std::vector<T>& pt) const {
    using D = Dual<T>;
    BlockT<T> g = gamma(pt);
    // d_k of gamma via one extra dual layer per direction.
    std::vector<BlockT<T>> dg(n_);
    for (int k = 0; k < n_; ++k) {
      std::vector<D> dp(n_);
      for (int i = 0; i < n_; ++i) dp[i] = D(pt[i]);
      dp[k].d = scalar_traits<T>::constant(1.0);
      BlockT<D> gd = gamma(dp);
      dg[k] = BlockT<T>(n_, gd.slots);
      for (std::size_t m = 0; m < gd.data.size(); ++m) dg[k].data[m] = gd.data[m].d;
    }
    BlockT<T> r(n_,
                {Variance::Upper, Variance::Lower, Variance::Lower, Variance::Lower},
                {{1, 2, true}});
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k)
        for (int j = 0; j < n_; ++j)
          for (int a = 0; a < n_; ++a) {
            T plus = dg[k].at({i, a, j});
            T minus = dg[j].at({i, a, k});
            for (int b = 0; b < n_; ++b) {
              plus += g.at({i, b, j}) * g.at({b, a, k});
              minus += g.at({i, b, k}) * g.at({b, a, j});
            }
            r.at({i, k, j, a}) = plus - minus;
          }
    return r;
  }

  BlockT<double> linear_curvature_at(const Point& x) const {
    domain_.require(x);
    return linear_curvature(x);
  }

  /// epsilon-lift of a tangent vector: (xi^i, Gamma^i_{aj} xi^a).
  JetVector eps_lift_vector(const std::vector<double>& xi0, const Point& x) const {
    BlockT<double> g = gamma_at(x);
    SqMat<double> xi1(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int a = 0; a < n_; ++a) xi1(i, j) += g.at({i, a, j}) * xi0[a];
    return JetVector::order1(xi0, xi1);
  }

  /// || R(x, x + step xi0)/step - r(x) . xi0 ||; should shrink linearly in
  /// step when the linear curvature is the correct first-order model.
  double check_linearization(const Point& x, const std::vector<double>& xi0, double step) const {
    Point y = x;
    for (int i = 0; i < n_; ++i) y[i] += step * xi0[i];
    domain_.require(y);
    BlockT<double> R = nonlinear_curvature(x, y);
    BlockT<double> r = linear_curvature_at(x);
    double resid = 0;
    for (int i = 0; i < n_; ++i)
      for (int p = 0; p < n_; ++p)
        for (int q = 0; q < n_; ++q) {
          double lin = 0;
          for (int a = 0; a < n_; ++a) lin += r.at({i, p, q, a}) * xi0[a];
          double d = R.at({i, p, q}) / step - lin;
          resid += d * d;
        }
    return std::sqrt(resid);
  }

 private:
  int n_;
  std::vector<std::vector<ScalarExpr>> w_;
  Box domain_;
};

/// Spencer operator: d_j xi^i - xi^i_j, where the xi^0 component is a field
/// evaluable at dual points and xi1 is its jet value at x.
template <class VecField>
BlockT<double> spencer_D(VecField&& xi0_field, const SqMat<double>& xi1_at_x, const Point& x) {
  using D = Dual<double>;
  const int n = static_cast<int>(x.size());
  BlockT<double> out(n, {Variance::Upper, Variance::Lower});
  for (int j = 0; j < n; ++j) {
    std::vector<D> dp(n);
    for (int i = 0; i < n; ++i) dp[i] = D(x[i]);
    dp[j].d = 1.0;
    std::vector<D> v = xi0_field(dp);
    for (int i = 0; i < n; ++i) out.at({i, j}) = v[i].d - xi1_at_x(i, j);
  }
  return out;
}

}  // namespace phg
