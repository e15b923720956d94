#pragma once

#include <cmath>
#include <random>

#include "hohmesh/condition_space.hpp"
#include "hohmesh/omesh_init.hpp"
#include "hohmesh/passage_domain.hpp"

namespace testing {

using namespace hohmesh;

/// A cambered turbine-like blade that meshes cleanly with mid-range parameters.
inline PassageCondition reference_condition() {
  PassageCondition c;
  auto& b = c.bsp;
  b.stagger = deg2rad(-30.0);
  b.theta_le = deg2rad(20.0);
  b.theta_te = deg2rad(-60.0);
  b.t_upper = {0.05, 0.06, 0.06, 0.05, 0.04, 0.03};
  b.t_lower = {0.03, 0.03, 0.03, 0.02, 0.02, 0.01};
  c.pitch = 0.8;
  c.x_in = 0.5;
  c.x_out = 0.5;
  c.n_o = 20000;
  c.dn1 = 1e-4;
  return c;
}

inline MeshingParams reference_params() {
  MeshingParams p;
  p.n_t = 200;
  return p;
}

/// ni x nj block of spacing (dx, dy) starting at origin; no wrap.
inline StructuredBlock uniform_block(std::size_t ni, std::size_t nj, double dx = 0.5, double dy = 0.5,
                                     Vec2 origin = {}) {
  StructuredBlock b(ni, nj);
  for (std::size_t j = 0; j < nj; ++j)
    for (std::size_t i = 0; i < ni; ++i)
      b(i, j) = origin + Vec2{dx * static_cast<double>(i), dy * static_cast<double>(j)};
  return b;
}

/// Closed polar block: uniform angle clockwise in i, geometric radii outward in j.
inline StructuredBlock polar_block(std::size_t ni, std::size_t nj, double r0, double ratio, double dr0) {
  StructuredBlock b(ni, nj);
  b.wrap = true;
  double r = r0, dr = dr0;
  for (std::size_t j = 0; j < nj; ++j) {
    for (std::size_t i = 0; i < ni; ++i) {
      const double th = -2.0 * kPi * static_cast<double>(i) / static_cast<double>(ni);
      b(i, j) = r * unit_from_angle(th);
    }
    r += dr;
    dr *= ratio;
  }
  return b;
}

inline StructuredBlock transformed(StructuredBlock b, double scale, double angle, Vec2 shift) {
  const double c = std::cos(angle), s = std::sin(angle);
  for (auto& p : b.coords.values()) {
    const Vec2 q = scale * p;
    p = Vec2{c * q.x - s * q.y, s * q.x + c * q.y} + shift;
  }
  return b;
}

}  // namespace testing
