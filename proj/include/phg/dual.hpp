#pragma once

#include <cmath>
#include <type_traits>

#include "phg/errors.hpp"

namespace phg {

/// Forward-mode dual number. Nesting Dual<Dual<double>> gives exact second
/// derivatives; everything in the library is templated on the scalar so the
/// whole pipeline (expressions, tensors, curvature) differentiates through.
template <class T>
struct Dual {
  T v{};  // value
  T d{};  // derivative

  Dual() = default;
  Dual(T value) : v(value) {}
  Dual(T value, T deriv) : v(value), d(deriv) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    d += o.d;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    d -= o.d;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    d = d * o.v + v * o.d;
    v = v * o.v;
    return *this;
  }
};

template <class T>
Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <class T>
Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <class T>
Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <class T>
Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T iv = T(1) / b.v;
  return {a.v * iv, (a.d - a.v * iv * b.d) * iv};
}

template <class T>
Dual<T> operator+(Dual<T> a, double s) { return a + Dual<T>(T(s)); }
template <class T>
Dual<T> operator+(double s, Dual<T> a) { return Dual<T>(T(s)) + a; }
template <class T>
Dual<T> operator-(Dual<T> a, double s) { return a - Dual<T>(T(s)); }
template <class T>
Dual<T> operator-(double s, Dual<T> a) { return Dual<T>(T(s)) - a; }
template <class T>
Dual<T> operator*(Dual<T> a, double s) { return a * Dual<T>(T(s)); }
template <class T>
Dual<T> operator*(double s, Dual<T> a) { return Dual<T>(T(s)) * a; }
template <class T>
Dual<T> operator/(Dual<T> a, double s) { return a / Dual<T>(T(s)); }
template <class T>
Dual<T> operator/(double s, Dual<T> a) { return Dual<T>(T(s)) / a; }

using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;
using std::tanh;

template <class T>
Dual<T> sin(const Dual<T>& a) { return {sin(a.v), cos(a.v) * a.d}; }
template <class T>
Dual<T> cos(const Dual<T>& a) { return {cos(a.v), -sin(a.v) * a.d}; }
template <class T>
Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.v);
  return {e, e * a.d};
}
template <class T>
Dual<T> log(const Dual<T>& a) { return {log(a.v), a.d / a.v}; }
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  T r = sqrt(a.v);
  return {r, a.d / (T(2) * r)};
}
template <class T>
Dual<T> tanh(const Dual<T>& a) {
  T t = tanh(a.v);
  return {t, (T(1) - t * t) * a.d};
}

/// Plain double carried by the innermost value slot.
inline double scalar_value(double x) { return x; }
template <class T>
double scalar_value(const Dual<T>& x) { return scalar_value(x.v); }

template <class T>
struct scalar_traits {
  static T constant(double c) { return T(c); }
};
template <class U>
struct scalar_traits<Dual<U>> {
  static Dual<U> constant(double c) { return Dual<U>(scalar_traits<U>::constant(c)); }
};

}  // namespace phg
