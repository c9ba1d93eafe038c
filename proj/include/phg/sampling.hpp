#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "phg/chart.hpp"
#include "phg/linalg.hpp"

namespace phg {

/// Deterministic low-discrepancy sampler over a box: Halton points with a
/// seeded Cranley-Patterson rotation, shrunk slightly toward the box center so
/// samples never sit on the boundary.
class BoxSampler {
 public:
  BoxSampler(Box box, std::uint64_t seed) : box_(std::move(box)), seed_(seed) {
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
    std::uint64_t s = seed_;
    for (std::size_t i = 0; i < box_.axes.size(); ++i) {
      bases_.push_back(primes[i % 10]);
      shifts_.push_back(uniform01(s));
    }
  }

  Point point(int index) const {
    const double margin = 0.02;
    Point p(box_.axes.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      double u = halton(index + 1, bases_[i]) + shifts_[i];
      u -= std::floor(u);
      u = margin + (1 - 2 * margin) * u;
      p[i] = box_.axes[i].first + u * (box_.axes[i].second - box_.axes[i].first);
    }
    return p;
  }

  std::vector<Point> points(int count) const {
    std::vector<Point> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(point(i));
    return out;
  }

  /// A direction vector with entries in [-1, 1], deterministic in (seed, index).
  std::vector<double> direction(int index) const {
    std::uint64_t s = seed_ ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    std::vector<double> v(box_.axes.size());
    for (double& c : v) c = 2 * uniform01(s) - 1;
    return v;
  }

  const Box& box() const { return box_; }
  std::uint64_t seed() const { return seed_; }

 private:
  static double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
      f /= base;
      r += f * (index % base);
      index /= base;
    }
    return r;
  }

  Box box_;
  std::uint64_t seed_;
  std::vector<int> bases_;
  std::vector<double> shifts_;
};

}  // namespace phg
