#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "phg/dual.hpp"
#include "phg/errors.hpp"

namespace phg {

/// Dense n-by-n matrix over any scalar (double or nested duals). Row-major.
template <class T>
struct SqMat {
  int n = 0;
  std::vector<T> a;

  SqMat() = default;
  explicit SqMat(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim, T{}) {}

  static SqMat identity(int dim) {
    SqMat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = scalar_traits<T>::constant(1.0);
    return m;
  }

  T& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

template <class T>
SqMat<T> operator*(const SqMat<T>& x, const SqMat<T>& y) {
  SqMat<T> r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k) {
      const T& xik = x(i, k);
      for (int j = 0; j < x.n; ++j) r(i, j) += xik * y(k, j);
    }
  return r;
}

template <class T>
std::vector<T> operator*(const SqMat<T>& m, const std::vector<T>& v) {
  std::vector<T> r(m.n, T{});
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) r[i] += m(i, j) * v[j];
  return r;
}

template <class T>
T det(SqMat<T> m) {
  T d = scalar_traits<T>::constant(1.0);
  for (int c = 0; c < m.n; ++c) {
    int piv = c;
    for (int r = c + 1; r < m.n; ++r)
      if (std::fabs(scalar_value(m(r, c))) > std::fabs(scalar_value(m(piv, c)))) piv = r;
    if (scalar_value(m(piv, c)) == 0.0) return T{};
    if (piv != c) {
      for (int j = 0; j < m.n; ++j) std::swap(m(c, j), m(piv, j));
      d = -d;
    }
    d = d * m(c, c);
    for (int r = c + 1; r < m.n; ++r) {
      T f = m(r, c) / m(c, c);
      for (int j = c; j < m.n; ++j) m(r, j) -= f * m(c, j);
    }
  }
  return d;
}

/// Gauss-Jordan inverse with partial pivoting on the value part.
template <class T>
SqMat<T> inverse(SqMat<T> m) {
  const int n = m.n;
  SqMat<T> inv = SqMat<T>::identity(n);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(scalar_value(m(r, c))) > std::fabs(scalar_value(m(piv, c)))) piv = r;
    if (std::fabs(scalar_value(m(piv, c))) < 1e-300)
      throw SingularArrow("matrix not invertible");
    if (piv != c)
      for (int j = 0; j < n; ++j) {
        std::swap(m(c, j), m(piv, j));
        std::swap(inv(c, j), inv(piv, j));
      }
    T ip = scalar_traits<T>::constant(1.0) / m(c, c);
    for (int j = 0; j < n; ++j) {
      m(c, j) = m(c, j) * ip;
      inv(c, j) = inv(c, j) * ip;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      T f = m(r, c);
      for (int j = 0; j < n; ++j) {
        m(r, j) -= f * m(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

/// Lower-triangular Cholesky factor, g = L L^T.
inline SqMat<double> cholesky(const SqMat<double>& g) {
  const int n = g.n;
  SqMat<double> L(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = g(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      if (i == j) {
        if (s <= 1e-10) throw DegenerateMetric("metric not positive definite");
        L(i, j) = std::sqrt(s);
      } else {
        L(i, j) = s / L(j, j);
      }
    }
  }
  return L;
}

inline double smallest_eigenvalue_sym(const SqMat<double>& g) {
  // Power iteration on (cI - g); fine for the n <= 3 matrices we meet.
  const int n = g.n;
  double c = 0;
  for (int i = 0; i < n; ++i) {
    double row = 0;
    for (int j = 0; j < n; ++j) row += std::fabs(g(i, j));
    c = std::max(c, row);
  }
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double lam = 0;
  for (int it = 0; it < 500; ++it) {
    std::vector<double> w(n, 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) w[i] += (i == j ? c : 0.0) * v[j] - g(i, j) * v[j];
    }
    double norm = 0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0) break;
    for (int i = 0; i < n; ++i) v[i] = w[i] / norm;
    lam = norm;
  }
  return c - lam;
}

// splitmix64; used wherever a cheap deterministic stream is enough.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

inline double gaussian(std::uint64_t& state) {
  double u1 = uniform01(state), u2 = uniform01(state);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

/// Orthogonal matrix from QR of a seeded Gaussian matrix (Haar-ish).
inline SqMat<double> random_orthogonal(int n, std::uint64_t seed) {
  std::uint64_t st = seed * 0x9e3779b97f4a7c15ULL + 1;
  SqMat<double> m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = gaussian(st);
  // Gram-Schmidt on columns, sign-fixed by the R diagonal.
  SqMat<double> q(n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> col(n);
    for (int i = 0; i < n; ++i) col[i] = m(i, j);
    for (int k = 0; k < j; ++k) {
      double dot = 0;
      for (int i = 0; i < n; ++i) dot += q(i, k) * col[i];
      for (int i = 0; i < n; ++i) col[i] -= dot * q(i, k);
    }
    double norm = 0;
    for (double x : col) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-12) return SqMat<double>::identity(n);
    for (int i = 0; i < n; ++i) q(i, j) = col[i] / norm;
  }
  return q;
}

}  // namespace phg
