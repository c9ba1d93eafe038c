#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "phg/catalog.hpp"
#include "phg/sampling.hpp"
#include "phg/transport.hpp"

using namespace phg;

TEST_CASE("the identity frame transports points rigidly") {
  StructureObjectW W = find_geometry("trans2").parallelism();
  PathSpec path = PathSpec::polyline({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}});
  Point y = transport_parallelism(W, path, {-0.3, -0.6});
  // dy/dt = xdot: y inherits the displacement of the path endpoints.
  CHECK_THAT(y[0], Catch::Matchers::WithinAbs(-0.3 + 1.0, 1e-10));
  CHECK_THAT(y[1], Catch::Matchers::WithinAbs(-0.6 + 1.0, 1e-10));
}

TEST_CASE("scaling-frame transport matches the frozen closed forms") {
  StructureObjectW W = find_geometry("axb").parallelism();
  // dy1/dt = (y1/x1) xdot1 along x1: 1 -> 2 doubles y1 and keeps y2.
  PathSpec path = PathSpec::segment({1.0, 0.0}, {2.0, 0.0});
  Point y = transport_parallelism(W, path, {1.2, 0.4});
  CHECK_THAT(y[0], Catch::Matchers::WithinAbs(2.4, 1e-9));
  CHECK_THAT(y[1], Catch::Matchers::WithinAbs(0.4, 1e-9));

  // linear transport d xi^1/dt = xi^1/x1: xi^1 proportional to x1.
  std::vector<double> xi = transport_linear(W, path, {1.0, 0.0});
  CHECK_THAT(xi[0], Catch::Matchers::WithinAbs(2.0, 1e-9));
  CHECK_THAT(xi[1], Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("zero-connection affine transport is the affine map it should be") {
  AffineObject A = find_geometry("affine-zero").affine();
  SqMat<double> f1 = SqMat<double>::identity(2);
  f1(0, 1) = 0.25;
  f1(1, 1) = 1.5;
  PathSpec path = PathSpec::polyline({{-0.5, -0.4}, {0.3, -0.4}, {0.3, 0.2}});
  AffineState out = transport_affine(A, path, {{-0.2, -0.5}, f1});
  // f1 is constant; f0 moves by f1 * (total displacement).
  double dx0 = 0.8, dx1 = 0.6;
  CHECK_THAT(out.f0[0], Catch::Matchers::WithinAbs(-0.2 + f1(0, 0) * dx0 + f1(0, 1) * dx1, 1e-10));
  CHECK_THAT(out.f0[1], Catch::Matchers::WithinAbs(-0.5 + f1(1, 1) * dx1, 1e-10));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK_THAT(out.f1(i, j), Catch::Matchers::WithinAbs(f1(i, j), 1e-10));
}

TEST_CASE("transport composes over concatenated paths") {
  StructureObjectW W = find_geometry("pert2").parallelism();
  Point a{-0.6, -0.2}, b{0.4, 0.1}, c{0.2, 0.6};
  Point y0{-0.4, -0.6};
  Point direct = transport_parallelism(W, PathSpec::polyline({a, b, c}), y0);
  Point two_leg = transport_parallelism(W, PathSpec::segment(b, c),
                                        transport_parallelism(W, PathSpec::segment(a, b), y0));
  CHECK_THAT(direct[0], Catch::Matchers::WithinAbs(two_leg[0], 1e-9));
  CHECK_THAT(direct[1], Catch::Matchers::WithinAbs(two_leg[1], 1e-9));
}

TEST_CASE("the integrator converges at fourth order") {
  StructureObjectW W = find_geometry("pert2").parallelism();
  PathSpec path = PathSpec::segment({-0.8, 0.0}, {0.8, 0.3});
  auto rhs = [&](const Point& x, const std::vector<double>& vel, const std::vector<double>& y) {
    SqMat<double> eps = W.frame(y) * inverse(W.frame(x));
    return eps * vel;
  };
  Point y0{-0.5, -0.5};
  Point ref = detail::rk4_over_path(path, y0, rhs, 4096, 4096);
  auto err = [&](int steps) {
    Point y = detail::rk4_over_path(path, y0, rhs, steps, steps);
    double e = 0;
    for (int i = 0; i < 2; ++i) e += (y[i] - ref[i]) * (y[i] - ref[i]);
    return std::sqrt(e);
  };
  double e1 = err(16), e2 = err(32);
  REQUIRE(e1 > 0);
  double ratio = e1 / e2;
  REQUIRE(ratio > 10.0);
  REQUIRE(ratio < 22.0);
}

TEST_CASE("flat frames give path-independent transport") {
  for (const char* name : {"axb", "heis3"}) {
    StructureObjectW W = find_geometry(name).parallelism();
    Box box = W.domain();
    int n = W.dim();
    Point a(n), b(n), mid1(n), mid2(n), y0(n);
    for (int i = 0; i < n; ++i) {
      double lo = box.axes[i].first, hi = box.axes[i].second;
      a[i] = lo + 0.25 * (hi - lo);
      b[i] = lo + 0.75 * (hi - lo);
      mid1[i] = (i % 2 == 0) ? a[i] : b[i];
      mid2[i] = (i % 2 == 0) ? b[i] : a[i];
      y0[i] = a[i];  // keeps multiplicative transports inside the box
    }
    Point via1 = transport_parallelism(W, PathSpec::polyline({a, mid1, b}), y0);
    Point via2 = transport_parallelism(W, PathSpec::polyline({a, mid2, b}), y0);
    for (int i = 0; i < n; ++i) REQUIRE_THAT(via1[i], Catch::Matchers::WithinAbs(via2[i], 1e-7));
  }
}

TEST_CASE("loop defects scale quadratically and match the closed-form slice") {
  StructureObjectW W = find_geometry("pert2").parallelism();
  HolonomyReport rep =
      loop_defect(TransportKind::Linear, &W, nullptr, {0.5, 0.5}, 1, 2, 0.1);
  REQUIRE(rep.defect_norms[0] > 1e-8);
  double ratio = rep.defect_norms[0] / rep.defect_norms[1];
  REQUIRE(ratio > 3.0);
  REQUIRE(ratio < 5.0);
  REQUIRE(rep.relative_mismatch < 0.05);
}

TEST_CASE("loop defects on flat structures vanish at roundoff level") {
  StructureObjectW W = find_geometry("heis3").parallelism();
  for (auto [j, k] : {std::pair{1, 2}, {1, 3}, {2, 3}}) {
    HolonomyReport rep =
        loop_defect(TransportKind::Parallelism, &W, nullptr, {-0.3, 0.2, 0.0}, j, k, 0.1);
    REQUIRE(rep.defect_norms[0] < 1e-10);
  }
  AffineObject A = find_geometry("affine-pullback-flat").affine();
  HolonomyReport arep = loop_defect(TransportKind::Affine, nullptr, &A, {0.1, -0.2}, 1, 2, 0.1);
  REQUIRE(arep.defect_norms[0] < 1e-10);
}

TEST_CASE("the affine loop defect detects curvature of the sphere structure") {
  AffineObject A = find_geometry("affine-sphere").affine();
  HolonomyReport rep = loop_defect(TransportKind::Affine, nullptr, &A, {0.05, -0.1}, 1, 2, 0.1);
  REQUIRE(rep.defect_norms[0] > 1e-5);
  double ratio = rep.defect_norms[0] / rep.defect_norms[1];
  REQUIRE(ratio > 3.0);
  REQUIRE(ratio < 5.0);
}

TEST_CASE("metric transport preserves the metric condition exactly when flat") {
  MetricPair M = find_geometry("sphere2").riemannian();
  Point x{-0.3, 0.1}, y{0.2, 0.25};
  OneArrow arrow = M.metric_arrow_sampler(x, y, 31);
  PathSpec path = PathSpec::polyline({x, {0.3, 0.1}, {0.3, -0.2}});
  auto [state, drift] = transport_riemann(M, path, {arrow.target, arrow.f1});
  REQUIRE(drift < 1e-8);

  MetricPair bad = find_geometry("mismatch2").riemannian();
  OneArrow barrow = bad.metric_arrow_sampler({-0.3, 0.1}, {0.2, 0.25}, 31);
  auto [bstate, bdrift] = transport_riemann(bad, path, {barrow.target, barrow.f1});
  REQUIRE(bdrift > 1e-3);
}

TEST_CASE("transport that leaves the chart raises a domain escape") {
  StructureObjectW W = find_geometry("axb").parallelism();
  // dy1/dt = (y1/x1) xdot1: starting y above x scales y1 out of [0.5, 3].
  PathSpec path = PathSpec::segment({1.0, 0.0}, {2.5, 0.0});
  CHECK_THROWS_AS(transport_parallelism(W, path, {2.0, 0.0}), DomainEscape);
  // paths through points outside the box are rejected up front
  CHECK_THROWS_AS(transport_parallelism(W, PathSpec::segment({1.0, 0.0}, {4.0, 0.0}), {1.0, 0.0}),
                  DomainError);
}
