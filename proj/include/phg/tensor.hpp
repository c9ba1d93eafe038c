#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "phg/dual.hpp"
#include "phg/errors.hpp"
#include "phg/linalg.hpp"

namespace phg {

enum class Variance { Upper, Lower };

/// Declared (anti)symmetry of a pair of index slots.
struct SymPair {
  int a, b;
  bool antisym;
};

/// Dense component block with an explicit variance signature.
template <class T>
struct BlockT {
  int n = 0;
  std::vector<Variance> slots;
  std::vector<T> data;
  std::vector<SymPair> syms;

  BlockT() = default;
  BlockT(int dim, std::vector<Variance> sig, std::vector<SymPair> symmetry = {})
      : n(dim), slots(std::move(sig)), syms(std::move(symmetry)) {
    std::size_t sz = 1;
    for (std::size_t k = 0; k < slots.size(); ++k) sz *= static_cast<std::size_t>(n);
    data.assign(sz, T{});
  }

  int rank() const { return static_cast<int>(slots.size()); }

  std::size_t offset(const std::vector<int>& idx) const {
    std::size_t o = 0;
    for (std::size_t k = 0; k < slots.size(); ++k) o = o * n + idx[k];
    return o;
  }
  T& at(const std::vector<int>& idx) { return data[offset(idx)]; }
  const T& at(const std::vector<int>& idx) const { return data[offset(idx)]; }

  T& at(std::initializer_list<int> idx) { return at(std::vector<int>(idx)); }
  const T& at(std::initializer_list<int> idx) const { return at(std::vector<int>(idx)); }

  double frobenius_norm() const {
    double s = 0;
    for (const T& x : data) {
      double v = scalar_value(x);
      s += v * v;
    }
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0;
    for (const T& x : data) m = std::max(m, std::fabs(scalar_value(x)));
    return m;
  }
};

using TensorBlock = BlockT<double>;

template <class T>
BlockT<T> operator-(const BlockT<T>& x, const BlockT<T>& y) {
  BlockT<T> r = x;
  for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] -= y.data[i];
  return r;
}

template <class T>
BlockT<T> operator+(const BlockT<T>& x, const BlockT<T>& y) {
  BlockT<T> r = x;
  for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] += y.data[i];
  return r;
}

template <class T>
BlockT<T> operator*(double s, const BlockT<T>& x) {
  BlockT<T> r = x;
  for (auto& v : r.data) v = v * s;
  return r;
}

/// Iterate all multi-indices of a block.
template <class T, class F>
void for_each_index(const BlockT<T>& b, F&& fn) {
  std::vector<int> idx(b.rank(), 0);
  const int r = b.rank();
  if (r == 0) {
    fn(idx);
    return;
  }
  for (;;) {
    fn(idx);
    int k = r - 1;
    while (k >= 0 && ++idx[k] == b.n) idx[k--] = 0;
    if (k < 0) break;
  }
}

/// Transport a tensor block along a 1-arrow: each upper slot contracts with
/// f1, each lower slot with f1^{-1}. Symmetry flags carry over.
template <class T>
BlockT<T> pushforward_tensor(const SqMat<T>& f1, const BlockT<T>& t) {
  if (t.rank() == 0) return t;
  SqMat<T> g1 = inverse(f1);
  BlockT<T> cur = t;
  for (int slot = 0; slot < t.rank(); ++slot) {
    const SqMat<T>& m = t.slots[slot] == Variance::Upper ? f1 : g1;
    BlockT<T> next(t.n, t.slots, t.syms);
    for_each_index(next, [&](const std::vector<int>& idx) {
      T s{};
      std::vector<int> src = idx;
      for (int a = 0; a < t.n; ++a) {
        src[slot] = a;
        if (t.slots[slot] == Variance::Upper)
          s += m(idx[slot], a) * cur.at(src);
        else
          s += cur.at(src) * m(a, idx[slot]);
      }
      next.at(idx) = s;
    });
    cur = next;
  }
  return cur;
}

/// Contract an upper/lower slot pair, dropping both slots.
template <class T>
BlockT<T> contract(const BlockT<T>& t, int slot_up, int slot_lo) {
  std::vector<Variance> sig;
  for (int k = 0; k < t.rank(); ++k)
    if (k != slot_up && k != slot_lo) sig.push_back(t.slots[k]);
  BlockT<T> r(t.n, sig);
  for_each_index(r, [&](const std::vector<int>& idx) {
    T s{};
    std::vector<int> src(t.rank());
    for (int a = 0; a < t.n; ++a) {
      int p = 0;
      for (int k = 0; k < t.rank(); ++k) {
        if (k == slot_up || k == slot_lo)
          src[k] = a;
        else
          src[k] = idx[p++];
      }
      s += t.at(src);
    }
    r.at(idx) = s;
  });
  return r;
}

/// Residual of the declared symmetry flags (0 when they hold exactly).
template <class T>
double symmetry_residual(const BlockT<T>& t) {
  double worst = 0;
  for (const SymPair& sp : t.syms) {
    for_each_index(t, [&](const std::vector<int>& idx) {
      std::vector<int> sw = idx;
      std::swap(sw[sp.a], sw[sp.b]);
      double lhs = scalar_value(t.at(idx));
      double rhs = scalar_value(t.at(sw));
      double resid = sp.antisym ? std::fabs(lhs + rhs) : std::fabs(lhs - rhs);
      worst = std::max(worst, resid);
    });
  }
  return worst;
}

}  // namespace phg
