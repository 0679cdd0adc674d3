#pragma once

#include "stringtop/harness.hpp"

#include <doctest.h>

#include <initializer_list>

namespace st = stringtop;

inline st::RVec rv(std::initializer_list<long> xs) {
  st::RVec v;
  for (long x : xs)
    v.emplace_back(x);
  return v;
}

inline st::Rational q(long p, long den = 1) { return st::Rational(p, den); }

/// Straight torus loop of the given class starting at base.
inline st::PLLoop torus_line(const st::IVec &cls, const st::RVec &base,
                             int pieces = 3) {
  return st::straight_loop(cls, base, pieces);
}

inline st::PLLoop chart_polygon(std::vector<st::RVec> verts) {
  return st::PLLoop(st::Space::chart(2), std::move(verts), {0, 0});
}

inline st::Matrix diag2(st::Complex a, st::Complex b) {
  st::Matrix m = st::Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

inline double close_rel(const st::GradedCoefficient &a,
                        const st::GradedCoefficient &b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}
