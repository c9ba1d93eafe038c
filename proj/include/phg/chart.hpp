#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "phg/dual.hpp"
#include "phg/errors.hpp"
#include "phg/expr.hpp"
#include "phg/linalg.hpp"
#include "phg/tensor.hpp"

namespace phg {

using Point = std::vector<double>;

/// Axis-aligned open box; the single chart everything lives on.
struct Box {
  std::vector<std::pair<double, double>> axes;

  int dim() const { return static_cast<int>(axes.size()); }

  // Points within `margin` of the boundary are rejected so FD stencils and
  // transport steps cannot silently escape.
  bool contains(const Point& p, double margin = 1e-9) const {
    if (p.size() != axes.size()) return false;
    for (std::size_t i = 0; i < axes.size(); ++i)
      if (p[i] < axes[i].first + margin || p[i] > axes[i].second - margin) return false;
    return true;
  }

  void require(const Point& p, double margin = 1e-9) const {
    if (!contains(p, margin)) throw DomainError("point outside chart domain");
  }
};

/// 1-jet of a point map between two chart points.
struct OneArrow {
  Point source, target;
  SqMat<double> f1;

  OneArrow(Point src, Point dst, SqMat<double> jac)
      : source(std::move(src)), target(std::move(dst)), f1(std::move(jac)) {
    if (std::fabs(det(f1)) <= 1e-12) throw SingularArrow("1-arrow has |det f1| <= 1e-12");
  }
};

/// 2-jet of a point map; f2 symmetric in its lower pair.
struct TwoArrow {
  Point source, target;
  SqMat<double> f1;
  BlockT<double> f2;  // slots (upper i, lower j, lower k), symmetric (1,2)

  TwoArrow(Point src, Point dst, SqMat<double> jac, BlockT<double> hess)
      : source(std::move(src)), target(std::move(dst)), f1(std::move(jac)), f2(std::move(hess)) {
    if (std::fabs(det(f1)) <= 1e-12) throw SingularArrow("2-arrow has |det f1| <= 1e-12");
  }
};

/// Vector-field jet up to order 2.
struct JetVector {
  int order = 0;
  std::vector<double> xi0;
  SqMat<double> xi1;       // order >= 1
  BlockT<double> xi2;      // order == 2; slots (U,L,L), symmetric lower pair

  static JetVector order0(std::vector<double> v) {
    JetVector j;
    j.order = 0;
    j.xi0 = std::move(v);
    return j;
  }
  static JetVector order1(std::vector<double> v, SqMat<double> m) {
    JetVector j;
    j.order = 1;
    j.xi0 = std::move(v);
    j.xi1 = std::move(m);
    return j;
  }
  static JetVector order2(std::vector<double> v, SqMat<double> m, BlockT<double> q) {
    JetVector j;
    j.order = 2;
    j.xi0 = std::move(v);
    j.xi1 = std::move(m);
    j.xi2 = std::move(q);
    return j;
  }

  static JetVector zero(int n, int order) {
    JetVector j;
    j.order = order;
    j.xi0.assign(n, 0.0);
    if (order >= 1) j.xi1 = SqMat<double>(n);
    if (order >= 2) j.xi2 = BlockT<double>(n, {Variance::Upper, Variance::Lower, Variance::Lower},
                                           {{1, 2, false}});
    return j;
  }
};

struct JetResult {
  double value = 0;
  std::vector<double> gradient;  // order >= 1
  SqMat<double> hessian;         // order == 2
};

/// Gradient of an expression at a point over any scalar type, via one more
/// dual layer. This is what lets curvature formulas differentiate through.
template <class T>
std::vector<T> expr_gradient(const ScalarExpr& e, const std::vector<T>& pt) {
  const int n = static_cast<int>(pt.size());
  std::vector<T> g(n);
  std::vector<Dual<T>> dp(n);
  for (int i = 0; i < n; ++i) dp[i] = Dual<T>(pt[i]);
  for (int j = 0; j < n; ++j) {
    dp[j].d = scalar_traits<T>::constant(1.0);
    g[j] = e.eval(dp).d;
    dp[j].d = T{};
  }
  return g;
}

/// Exact jets via nested forward-mode duals (depth 2 for the Hessian).
inline JetResult eval_jet(const ScalarExpr& expr, const Point& x, int order) {
  if (order < 0 || order > 2) throw OrderError("eval_jet supports orders 0..2");
  const int n = static_cast<int>(x.size());
  JetResult r;
  r.value = expr.eval(x);
  if (order >= 1) {
    r.gradient.resize(n);
    std::vector<Dual<double>> dp(n);
    for (int i = 0; i < n; ++i) dp[i] = Dual<double>(x[i]);
    for (int j = 0; j < n; ++j) {
      dp[j].d = 1.0;
      r.gradient[j] = expr.eval(dp).d;
      dp[j].d = 0.0;
    }
  }
  if (order == 2) {
    r.hessian = SqMat<double>(n);
    using DD = Dual<Dual<double>>;
    std::vector<DD> dp(n);
    for (int i = 0; i < n; ++i) dp[i] = DD(Dual<double>(x[i]));
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        dp[j].v.d = 1.0;
        dp[k].d.v += 1.0;
        DD out = expr.eval(dp);
        r.hessian(j, k) = r.hessian(k, j) = out.d.d;
        dp[j].v.d = 0.0;
        dp[k].d.v = 0.0;
      }
    }
  }
  return r;
}

/// Central-difference oracle, error O(step^2). Independent of the dual path.
inline JetResult fd_jet(const ScalarExpr& expr, const Point& x, int order, double step,
                        const Box* domain = nullptr) {
  if (order < 0 || order > 2) throw OrderError("fd_jet supports orders 0..2");
  if (step <= 0) throw DomainError("fd_jet requires a positive step");
  const int n = static_cast<int>(x.size());
  auto at = [&](const Point& p) {
    if (domain && !domain->contains(p)) throw DomainError("FD stencil escapes chart domain");
    return expr.eval(p);
  };
  JetResult r;
  r.value = at(x);
  if (order >= 1) {
    r.gradient.resize(n);
    for (int j = 0; j < n; ++j) {
      Point p = x, m = x;
      p[j] += step;
      m[j] -= step;
      r.gradient[j] = (at(p) - at(m)) / (2 * step);
    }
  }
  if (order == 2) {
    r.hessian = SqMat<double>(n);
    for (int j = 0; j < n; ++j) {
      Point p = x, m = x;
      p[j] += step;
      m[j] -= step;
      r.hessian(j, j) = (at(p) - 2 * r.value + at(m)) / (step * step);
    }
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        Point pp = x, pm = x, mp = x, mm = x;
        pp[j] += step; pp[k] += step;
        pm[j] += step; pm[k] -= step;
        mp[j] -= step; mp[k] += step;
        mm[j] -= step; mm[k] -= step;
        r.hessian(j, k) = r.hessian(k, j) =
            (at(pp) - at(pm) - at(mp) + at(mm)) / (4 * step * step);
      }
  }
  return r;
}

/// Transport of a jet-valued 2-form (rho, sigma) by a 2-arrow. The 2-form
/// slots go with f1^{-1}; the J1T value transforms through (f1, f2):
///   rho'^i   = f1^i_a rho^a
///   sigma'^i_k = (f2^i_{ab} rho^a + f1^i_a sigma^a_b) (f1^{-1})^b_k
template <class T>
std::pair<BlockT<T>, BlockT<T>> pushforward_jet2form(const SqMat<T>& f1, const BlockT<T>& f2,
                                                     const BlockT<T>& rho,
                                                     const BlockT<T>& sigma) {
  const int n = f1.n;
  SqMat<T> g1 = inverse(f1);
  BlockT<T> rho_out = pushforward_tensor(f1, rho);
  BlockT<T> sigma_out = pushforward_tensor(f1, sigma);
  // f2 correction: sigma'^i_{rj,k} += f2^i_{ab} rho^a_{r'j'} g^{r'}_r g^{j'}_j g^b_k
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < n; ++r)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          T s{};
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              for (int r2 = 0; r2 < n; ++r2)
                for (int j2 = 0; j2 < n; ++j2)
                  s += f2.at({i, a, b}) * rho.at({a, r2, j2}) * g1(r2, r) * g1(j2, j) * g1(b, k);
          sigma_out.at({i, r, j, k}) += s;
        }
  return {rho_out, sigma_out};
}

}  // namespace phg
