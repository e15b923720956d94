#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hohmesh/blade_geometry.hpp"
#include "hohmesh/core.hpp"
#include "hohmesh/polyline.hpp"

namespace hohmesh {

/// Geometry and resolution of one blade passage (the condition vector).
struct PassageCondition {
  BladeShapeParams bsp;
  double pitch = 0.7;
  double x_in = 0.5;
  double x_out = 0.5;
  std::int64_t n_o = 30000;  // O-block node budget
  double dn1 = 1.1e-4;       // first cell height

  void validate() const {
    bsp.validate();
    HOHMESH_REQUIRE(pitch > 0.0, ErrorKind::ConfigError, "pitch must be positive");
    HOHMESH_REQUIRE(x_in >= 0.0 && x_out >= 0.0, ErrorKind::ConfigError, "x_in/x_out must be non-negative");
    HOHMESH_REQUIRE(n_o > 0, ErrorKind::ConfigError, "N_o must be positive");
    HOHMESH_REQUIRE(dn1 > 0.0, ErrorKind::ConfigError, "dn1 must be positive");
  }

  friend bool operator==(const PassageCondition&, const PassageCondition&) = default;
};

/// The decision vector: free parameters of the mesh generator.
struct MeshingParams {
  double y_in = 0.0;
  double y_out = 0.0;
  double alpha_camber = 0.5;
  double beta_in = 0.5;
  double beta_out = 0.5;
  std::int64_t n_t = 200;
  double gamma_le = 1.0;
  double gamma_te = 1.0;

  friend bool operator==(const MeshingParams&, const MeshingParams&) = default;
};

struct PassageBoundary {
  SampledCurve lower;
  SampledCurve upper;  // lower shifted by +pitch, sample for sample
  double pitch = 0.0;
  double x_le = 0.0, y_le = 0.0;
  double x_te = 0.0, y_te = 0.0;
  double x_start = 0.0;  // x_le - x_in
  double x_end = 0.0;    // x_te + x_out
  double x_if_in = 0.0;
  double x_if_out = 0.0;
  double inlet_level = 0.0;   // flat lower-boundary height on the inlet side
  double outlet_level = 0.0;  // flat lower-boundary height on the outlet side

  double lower_y(double x) const {
    if (x < x_le) return inlet_level;
    if (x >= x_te) return outlet_level;
    return lower.y_at(x);
  }
};

/// Vertically rescaled camber line y_c(x): maps the leading edge to
/// y_le + y_in - pitch/2 and the trailing edge to y_te + y_out - pitch/2 by an
/// affine map of y. When y_le and y_te coincide the affine map is singular and
/// the endpoint offsets are blended linearly in x instead.
inline SampledCurve scaled_camber(const SampledCurve& camber, double pitch, double y_in, double y_out,
                                  double chord) {
  const Vec2 le = camber.points.front();
  const Vec2 te = camber.points.back();
  std::vector<Vec2> pts(camber.points.size());
  const double dy = le.y - te.y;
  if (std::abs(dy) >= 1e-9 * chord) {
    const double scale = (le.y + y_in - te.y - y_out) / dy;
    const double offset = (le.y * y_out - te.y * y_in) / dy;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const Vec2 p = camber.points[k];
      pts[k] = {p.x, scale * p.y + offset - 0.5 * pitch};
    }
  } else {
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const Vec2 p = camber.points[k];
      const double w = (p.x - le.x) / (te.x - le.x);
      pts[k] = {p.x, p.y + (1.0 - w) * y_in + w * y_out - 0.5 * pitch};
    }
  }
  // Endpoints are pinned to their exact values so the branch joins are continuous.
  pts.front().y = le.y + y_in - 0.5 * pitch;
  pts.back().y = te.y + y_out - 0.5 * pitch;
  return SampledCurve::from_points(std::move(pts));
}

/// Builds the periodic lower/upper boundaries: flat inlet level, blend of the
/// scaled camber and a straight line between the leading and trailing edges,
/// flat outlet level. The upper boundary is the lower one shifted by pitch.
inline PassageBoundary build_boundary(const PassageCondition& cond, const MeshingParams& params,
                                      const SampledCurve& camber) {
  HOHMESH_REQUIRE(camber.size() >= 2, ErrorKind::InvalidShape, "camber is empty");
  const double chord = cond.bsp.chord;
  const Vec2 le = camber.points.front();
  const Vec2 te = camber.points.back();

  PassageBoundary b;
  b.pitch = cond.pitch;
  b.x_le = le.x;
  b.y_le = le.y;
  b.x_te = te.x;
  b.y_te = te.y;
  b.x_start = le.x - cond.x_in;
  b.x_end = te.x + cond.x_out;
  b.x_if_in = le.x - params.beta_in * cond.x_in;
  b.x_if_out = te.x + params.beta_out * cond.x_out;
  b.inlet_level = le.y + params.y_in - 0.5 * cond.pitch;
  b.outlet_level = te.y + params.y_out - 0.5 * cond.pitch;

  const SampledCurve yc = scaled_camber(camber, cond.pitch, params.y_in, params.y_out, chord);
  const double alpha = params.alpha_camber;
  const auto mid_y = [&](double x) {
    const double w = (x - le.x) / (te.x - le.x);
    const double straight = (1.0 - w) * b.inlet_level + w * b.outlet_level;
    return alpha * yc.y_at(x) + (1.0 - alpha) * straight;
  };

  // 4*N_t samples split across the three segments in proportion to their widths.
  const double total_width = b.x_end - b.x_start;
  const auto total = static_cast<double>(std::max<std::int64_t>(4 * params.n_t, 16));
  const auto count = [&](double width) -> std::size_t {
    if (width <= 0.0) return 0;
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(total * width / total_width)));
  };
  const std::size_t n_in = count(cond.x_in);
  const std::size_t n_mid = count(te.x - le.x);
  const std::size_t n_out = count(cond.x_out);

  std::vector<Vec2> lower;
  lower.reserve(n_in + n_mid + n_out + 1);
  for (std::size_t k = 0; k < n_in; ++k) {
    const double x = b.x_start + cond.x_in * static_cast<double>(k) / static_cast<double>(n_in);
    lower.push_back({x, b.inlet_level});
  }
  for (std::size_t k = 0; k < n_mid; ++k) {
    const double x = le.x + (te.x - le.x) * static_cast<double>(k) / static_cast<double>(n_mid);
    lower.push_back({x, k == 0 ? alpha * yc.points.front().y + (1.0 - alpha) * b.inlet_level : mid_y(x)});
  }
  for (std::size_t k = 0; k <= n_out; ++k) {
    const double x = n_out == 0 ? te.x : te.x + cond.x_out * static_cast<double>(k) / static_cast<double>(n_out);
    lower.push_back({x, b.outlet_level});
  }

  std::vector<Vec2> upper(lower.size());
  for (std::size_t k = 0; k < lower.size(); ++k) upper[k] = {lower[k].x, lower[k].y + cond.pitch};
  b.lower = SampledCurve::from_points(std::move(lower));
  b.upper = SampledCurve::from_points(std::move(upper));
  return b;
}

/// Throws BoundaryIntersectsBlade when either periodic boundary crosses the blade.
inline void check_clearance(const PassageBoundary& boundary, const BladeProfile& profile) {
  const double tol = 1e-12 * profile.chord;
  HOHMESH_REQUIRE(!polylines_intersect(boundary.lower.points, profile.surface.points, tol),
                  ErrorKind::BoundaryIntersectsBlade, "lower periodic boundary crosses the blade");
  HOHMESH_REQUIRE(!polylines_intersect(boundary.upper.points, profile.surface.points, tol),
                  ErrorKind::BoundaryIntersectsBlade, "upper periodic boundary crosses the blade");
}

inline PassageBoundary build_boundary(const PassageCondition& cond, const MeshingParams& params,
                                      const BladeProfile& profile) {
  PassageBoundary b = build_boundary(cond, params, profile.camber);
  check_clearance(b, profile);
  return b;
}

}  // namespace hohmesh
