#pragma once

#include <utility>
#include <vector>

#include "phg/chart.hpp"
#include "phg/dual.hpp"
#include "phg/errors.hpp"
#include "phg/tensor.hpp"

namespace phg {

namespace detail {

template <class T>
std::vector<Dual<T>> dual_point(const Point& x, const std::vector<double>& dir) {
  std::vector<Dual<T>> p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    p[i] = Dual<T>(scalar_traits<T>::constant(x[i]), scalar_traits<T>::constant(dir[i]));
  return p;
}

inline BlockT<double> deriv_part(const BlockT<Dual<double>>& b) {
  BlockT<double> r(b.n, b.slots, b.syms);
  for (std::size_t i = 0; i < b.data.size(); ++i) r.data[i] = b.data[i].d;
  return r;
}

}  // namespace detail

/// Formal Lie derivative of a tensor field, operational form: derivative at
/// t = 0 of field(x + t xi0) - push_{I + t xi1} field(x), taken with a dual
/// number in t. Works for any valence; linear in the jet.
template <class Field>
BlockT<double> formal_lie_derivative(const JetVector& jet, Field&& field, const Point& x) {
  if (jet.order < 1) throw OrderError("tensor argument needs a jet of order >= 1");
  using D = Dual<double>;
  const int n = static_cast<int>(x.size());

  auto xt = detail::dual_point<double>(x, jet.xi0);
  BlockT<D> moved = field(xt);

  std::vector<double> zero(n, 0.0);
  BlockT<D> base = field(detail::dual_point<double>(x, zero));
  SqMat<D> f1(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f1(i, j) = D(i == j ? 1.0 : 0.0, jet.xi1(i, j));
  BlockT<D> pushed = pushforward_tensor(f1, base);

  return detail::deriv_part(moved - pushed);
}

/// Same operational definition for a jet-valued 2-form field (rho, sigma);
/// needs an order-2 jet because the transport is by a 2-arrow with f2 = t xi2.
template <class Field>
std::pair<BlockT<double>, BlockT<double>> formal_lie_derivative_jet2form(const JetVector& jet,
                                                                         Field&& field,
                                                                         const Point& x) {
  if (jet.order < 2) throw OrderError("jet-valued 2-form argument needs a jet of order 2");
  using D = Dual<double>;
  const int n = static_cast<int>(x.size());

  auto xt = detail::dual_point<double>(x, jet.xi0);
  std::pair<BlockT<D>, BlockT<D>> moved = field(xt);

  std::vector<double> zero(n, 0.0);
  std::pair<BlockT<D>, BlockT<D>> base = field(detail::dual_point<double>(x, zero));
  SqMat<D> f1(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f1(i, j) = D(i == j ? 1.0 : 0.0, jet.xi1(i, j));
  BlockT<D> f2(n, {Variance::Upper, Variance::Lower, Variance::Lower}, {{1, 2, false}});
  for (std::size_t i = 0; i < f2.data.size(); ++i) f2.data[i] = D(0.0, jet.xi2.data[i]);

  auto pushed = pushforward_jet2form(f1, f2, base.first, base.second);
  return {detail::deriv_part(moved.first - pushed.first),
          detail::deriv_part(moved.second - pushed.second)};
}

/// Closed form for a (1,1) field:
///   d_a alpha^i_j xi^a - alpha^a_j xi^i_a + alpha^i_a xi^a_j
template <class Field>
BlockT<double> lie_derivative_11_closed(const JetVector& jet, Field&& alpha, const Point& x) {
  if (jet.order < 1) throw OrderError("closed form needs a jet of order >= 1");
  using D = Dual<double>;
  const int n = static_cast<int>(x.size());

  std::vector<double> zero(n, 0.0);
  BlockT<D> a0 = alpha(detail::dual_point<double>(x, zero));
  // directional derivative of alpha along xi0, one dual pass
  BlockT<D> adir = alpha(detail::dual_point<double>(x, jet.xi0));

  BlockT<double> r(n, {Variance::Upper, Variance::Lower});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = adir.at({i, j}).d;  // d_a alpha^i_j xi^a
      for (int a = 0; a < n; ++a)
        s += -a0.at({a, j}).v * jet.xi1(i, a) + a0.at({i, a}).v * jet.xi1(a, j);
      r.at({i, j}) = s;
    }
  return r;
}

}  // namespace phg
