#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "phg/affine.hpp"
#include "phg/chart.hpp"
#include "phg/errors.hpp"
#include "phg/parallelism.hpp"
#include "phg/riemannian.hpp"

namespace phg {

/// Polyline path, arc-uniform over t in [0,1]. Rectangle loops are built as
/// closed 5-vertex polylines in a coordinate plane.
struct PathSpec {
  std::vector<Point> vertices;

  static PathSpec segment(Point a, Point b) { return {{std::move(a), std::move(b)}}; }

  static PathSpec polyline(std::vector<Point> verts) { return {std::move(verts)}; }

  /// Axis-aligned rectangle loop: corner -> +h1 e_j -> +h2 e_k -> back.
  /// Axes j, k are 1-based.
  static PathSpec rectangle_loop(const Point& corner, double h1, double h2, int axis_j,
                                 int axis_k) {
    Point a = corner, b = corner, c = corner, d = corner;
    b[axis_j - 1] += h1;
    c[axis_j - 1] += h1;
    c[axis_k - 1] += h2;
    d[axis_k - 1] += h2;
    return {{a, b, c, d, a}};
  }

  double length() const {
    double len = 0;
    for (std::size_t s = 0; s + 1 < vertices.size(); ++s) {
      double seg = 0;
      for (std::size_t i = 0; i < vertices[s].size(); ++i) {
        double d = vertices[s + 1][i] - vertices[s][i];
        seg += d * d;
      }
      len += std::sqrt(seg);
    }
    return len;
  }
};

struct HolonomyReport {
  std::vector<double> sizes;         // h, h/2, h/4
  std::vector<double> defect_norms;  // transported-state defect at each size
  double extrapolated_per_area = 0;  // Richardson limit of defect/h^2
  double curvature_slice_norm = 0;   // matched closed-form contraction
  double relative_mismatch = 0;      // between the two, after calibration
  int matched_sign = 0;
};

namespace detail {

inline std::vector<double> axpy(const std::vector<double>& x, double a,
                                const std::vector<double>& y) {
  std::vector<double> r = x;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += a * y[i];
  return r;
}

inline std::vector<double> combine_rk4(const std::vector<double>& x, double dt,
                                       const std::vector<double>& k1,
                                       const std::vector<double>& k2,
                                       const std::vector<double>& k3,
                                       const std::vector<double>& k4) {
  std::vector<double> r = x;
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] += dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return r;
}

// Classical fixed-step RK4 over each polyline segment; the step count is
// proportional to arc length so convergence-order tests stay clean.
template <class State, class Rhs>
State rk4_over_path(const PathSpec& path, State state, Rhs&& rhs, int steps_per_unit = 512,
                    int min_steps = 32) {
  for (std::size_t s = 0; s + 1 < path.vertices.size(); ++s) {
    const Point& a = path.vertices[s];
    const Point& b = path.vertices[s + 1];
    const int n = static_cast<int>(a.size());
    std::vector<double> vel(n);
    double seg_len = 0;
    for (int i = 0; i < n; ++i) {
      vel[i] = b[i] - a[i];
      seg_len += vel[i] * vel[i];
    }
    seg_len = std::sqrt(seg_len);
    if (seg_len == 0) continue;
    int steps = std::max(min_steps, static_cast<int>(std::ceil(steps_per_unit * seg_len)));
    double dt = 1.0 / steps;
    auto x_at = [&](double t) {
      Point p(n);
      for (int i = 0; i < n; ++i) p[i] = a[i] + t * (b[i] - a[i]);
      return p;
    };
    for (int step = 0; step < steps; ++step) {
      double t = step * dt;
      State k1 = rhs(x_at(t), vel, state);
      State k2 = rhs(x_at(t + dt / 2), vel, axpy(state, dt / 2, k1));
      State k3 = rhs(x_at(t + dt / 2), vel, axpy(state, dt / 2, k2));
      State k4 = rhs(x_at(t + dt), vel, axpy(state, dt, k3));
      state = combine_rk4(state, dt, k1, k2, k3, k4);
    }
  }
  return state;
}

}  // namespace detail

/// State of the affine first-order system: a point image and a frame.
struct AffineState {
  Point f0;
  SqMat<double> f1;
};

/// Integrates dy/dt = eps(x(t), y) xdot; flat frames give path independence.
inline Point transport_parallelism(const StructureObjectW& W, const PathSpec& path, Point y0) {
  const Box& box = W.domain();
  for (const Point& v : path.vertices) box.require(v);
  box.require(y0);
  auto rhs = [&](const Point& x, const std::vector<double>& vel, const std::vector<double>& y) {
    if (!box.contains(y)) throw DomainEscape("parallelism transport left the chart");
    SqMat<double> eps = W.frame(y) * inverse(W.frame(x));
    return eps * vel;
  };
  return detail::rk4_over_path(path, std::move(y0), rhs);
}

/// Integrates d xi^i/dt = Gamma^i_{aj}(x(t)) xi^a xdot^j.
inline std::vector<double> transport_linear(const StructureObjectW& W, const PathSpec& path,
                                            std::vector<double> xi0) {
  const Box& box = W.domain();
  for (const Point& v : path.vertices) box.require(v);
  auto rhs = [&](const Point& x, const std::vector<double>& vel, const std::vector<double>& xi) {
    BlockT<double> g = W.gamma(x);
    const int n = W.dim();
    std::vector<double> d(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a)
        for (int j = 0; j < n; ++j) d[i] += g.at({i, a, j}) * xi[a] * vel[j];
    return d;
  };
  return detail::rk4_over_path(path, std::move(xi0), rhs);
}

/// Integrates the closed affine system
///   d f0^i/dt = f1^i_j xdot^j
///   d f1^i_j/dt = [Gamma^a_{jk}(x) f1^i_a - Gamma^i_{ab}(f0) f1^a_j f1^b_k] xdot^k,
/// the prolongation equation for maps intertwining the two connection fields
/// (Christoffel sign convention).
inline AffineState transport_affine(const AffineObject& A, const PathSpec& path,
                                    AffineState state0) {
  const Box& box = A.domain();
  for (const Point& v : path.vertices) box.require(v);
  const int n = A.dim();
  if (std::fabs(det(state0.f1)) <= 1e-12) throw SingularArrow("initial f1 not invertible");

  auto pack = [n](const AffineState& s) {
    std::vector<double> v(n + n * n);
    for (int i = 0; i < n; ++i) v[i] = s.f0[i];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v[n + i * n + j] = s.f1(i, j);
    return v;
  };
  auto unpack = [n](const std::vector<double>& v) {
    AffineState s{Point(n), SqMat<double>(n)};
    for (int i = 0; i < n; ++i) s.f0[i] = v[i];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s.f1(i, j) = v[n + i * n + j];
    return s;
  };

  auto rhs = [&](const Point& x, const std::vector<double>& vel, const std::vector<double>& sv) {
    AffineState s = unpack(sv);
    if (!box.contains(s.f0)) throw DomainEscape("affine transport image left the chart");
    BlockT<double> gx = A.gamma(x);
    BlockT<double> gf = A.gamma(s.f0);
    std::vector<double> d(sv.size(), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i] += s.f1(i, j) * vel[j];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0;
        for (int k = 0; k < n; ++k) {
          double term = 0;
          for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) term -= gf.at({i, a, b}) * s.f1(a, j) * s.f1(b, k);
            term += gx.at({a, j, k}) * s.f1(i, a);
          }
          acc += term * vel[k];
        }
        d[n + i * n + j] = acc;
      }
    return d;
  };

  AffineState out = unpack(detail::rk4_over_path(path, pack(state0), rhs));
  if (std::fabs(det(out.f1)) <= 1e-12) throw SingularArrow("transported f1 degenerated");
  return out;
}

/// Affine transport plus the running residual of the metric constraint
/// g_{ab}(f0) f1^a_j f1^b_k = g_{jk}(x).
inline std::pair<AffineState, double> transport_riemann(const MetricPair& M, const PathSpec& path,
                                                        AffineState state0) {
  {
    OneArrow initial(path.vertices.front(), state0.f0, state0.f1);
    if (M.metric_arrow_residual(initial) > 1e-9)
      throw NotMetricArrow("initial state violates the metric condition");
  }
  double drift = 0;
  // track drift on a modest number of checkpoints along each segment
  const int n = M.dim();
  AffineState cur = state0;
  const int checkpoints = 64;
  for (std::size_t s = 0; s + 1 < path.vertices.size(); ++s) {
    const Point& a = path.vertices[s];
    const Point& b = path.vertices[s + 1];
    for (int c = 0; c < checkpoints; ++c) {
      Point p0(n), p1(n);
      for (int i = 0; i < n; ++i) {
        p0[i] = a[i] + (b[i] - a[i]) * c / checkpoints;
        p1[i] = a[i] + (b[i] - a[i]) * (c + 1) / checkpoints;
      }
      cur = transport_affine(M.affine(), PathSpec::segment(p0, p1), cur);
      OneArrow arrow(p1, cur.f0, cur.f1);
      drift = std::max(drift, M.metric_arrow_residual(arrow));
    }
  }
  return {cur, drift};
}

enum class TransportKind { Parallelism, Linear, Affine };

/// Rectangle-loop holonomy at sizes h, h/2, h/4. For the linear kind the
/// extrapolated (M - I)/h^2 is matched against the corresponding slice of the
/// closed-form linear curvature; the sign of the match is calibrated on the
/// slice, not assumed.
inline HolonomyReport loop_defect(TransportKind kind, const StructureObjectW* W,
                                  const AffineObject* A, const Point& base, int axis_j,
                                  int axis_k, double h) {
  HolonomyReport rep;
  const int n = W ? W->dim() : A->dim();
  SqMat<double> extrap[3];
  for (int level = 0; level < 3; ++level) {
    double hh = h / (1 << level);
    rep.sizes.push_back(hh);
    PathSpec loop = PathSpec::rectangle_loop(base, hh, hh, axis_j, axis_k);
    double defect = 0;
    if (kind == TransportKind::Parallelism) {
      Point y = transport_parallelism(*W, loop, base);
      for (int i = 0; i < n; ++i) defect += (y[i] - base[i]) * (y[i] - base[i]);
      defect = std::sqrt(defect);
    } else if (kind == TransportKind::Linear) {
      SqMat<double> M(n);
      for (int c = 0; c < n; ++c) {
        std::vector<double> e(n, 0.0);
        e[c] = 1.0;
        std::vector<double> out = transport_linear(*W, loop, e);
        for (int i = 0; i < n; ++i) M(i, c) = out[i];
      }
      SqMat<double>& D = extrap[level];
      D = SqMat<double>(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double d = M(i, j) - (i == j ? 1.0 : 0.0);
          defect += d * d;
          D(i, j) = d / (hh * hh);
        }
      defect = std::sqrt(defect);
    } else {
      // A generic (deterministic) frame: the identity jet is a solution jet of
      // every affine structure, so it would hide curvature from the loop.
      SqMat<double> f1 = SqMat<double>::identity(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f1(i, j) += 0.2 / (1.0 + i + 2 * j);
      AffineState s0{base, f1};
      AffineState out = transport_affine(*A, loop, s0);
      for (int i = 0; i < n; ++i) defect += (out.f0[i] - base[i]) * (out.f0[i] - base[i]);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double d = out.f1(i, j) - f1(i, j);
          defect += d * d;
        }
      defect = std::sqrt(defect);
    }
    rep.defect_norms.push_back(defect);
  }

  if (kind == TransportKind::Linear) {
    // two Richardson stages: kill the O(h) then the O(h^2) error in defect/h^2
    SqMat<double> r1(n), r2(n), lim(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double d1 = 2 * extrap[1](i, j) - extrap[0](i, j);
        double d2 = 2 * extrap[2](i, j) - extrap[1](i, j);
        lim(i, j) = (4 * d2 - d1) / 3;
      }
    double lim_norm = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) lim_norm += lim(i, j) * lim(i, j);
    rep.extrapolated_per_area = std::sqrt(lim_norm);

    BlockT<double> r = W->linear_curvature_at(base);
    SqMat<double> slice(n);
    double slice_norm = 0;
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a) {
        slice(i, a) = r.at({i, axis_k - 1, axis_j - 1, a});
        slice_norm += slice(i, a) * slice(i, a);
      }
    rep.curvature_slice_norm = std::sqrt(slice_norm);
    if (rep.curvature_slice_norm < 1e-14) {
      rep.relative_mismatch = rep.extrapolated_per_area;
      rep.matched_sign = 0;
    } else {
      double best = -1;
      for (int sgn : {+1, -1}) {
        double diff = 0;
        for (int i = 0; i < n; ++i)
          for (int a = 0; a < n; ++a) {
            double d = lim(i, a) - sgn * slice(i, a);
            diff += d * d;
          }
        diff = std::sqrt(diff) / rep.curvature_slice_norm;
        if (best < 0 || diff < best) {
          best = diff;
          rep.matched_sign = sgn;
        }
      }
      rep.relative_mismatch = best;
    }
  }
  return rep;
}

}  // namespace phg
