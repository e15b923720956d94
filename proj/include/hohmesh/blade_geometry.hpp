#pragma once

// Blade profile construction from the 20-component shape vector.
//
// The camber line is a cubic Bezier curve: P0 = leading edge, P3 = P0 + C*(cos psi, sin psi),
// P1 = P0 + d_le*C*(cos theta_le, sin theta_le), P2 = P3 - d_te*C*(cos theta_te, sin theta_te).
// Angles are measured from +x, counterclockwise positive.
//
// Each side's half-thickness, as a function of normalized camber arclength u, is
//
//   h(u) = sqrt(u (1 - u)) * M(u)
//
// where M is a degree-7 Bernstein polynomial with control values
// [sqrt(2 rho_le S), 2 t_1, ..., 2 t_6, sqrt(2 rho_te S)] and S is the camber length.
// Near u = 0 this gives h^2 = 2 rho_le s + O(s^2), i.e. a rounded nose whose
// osculating radius in the camber frame is rho_le; likewise at the trailing edge.

#include <array>
#include <cmath>
#include <vector>

#include "hohmesh/core.hpp"
#include "hohmesh/polyline.hpp"

namespace hohmesh {

inline constexpr std::size_t kThicknessCoefficients = 6;

struct BladeShapeParams {
  double x_le = 0.0;
  double y_le = 0.0;
  double chord = 1.0;
  double stagger = 0.0;   // radians
  double theta_le = 0.0;  // radians
  double theta_te = 0.0;  // radians
  double d_le = 0.3;
  double d_te = 0.3;
  double rho_le = 0.01;
  double rho_te = 0.005;
  std::array<double, kThicknessCoefficients> t_upper{};
  std::array<double, kThicknessCoefficients> t_lower{};

  void validate() const {
    HOHMESH_REQUIRE(std::isfinite(chord) && chord > 0.0, ErrorKind::InvalidShape, "chord must be positive");
    HOHMESH_REQUIRE(rho_le > 0.0 && rho_te > 0.0, ErrorKind::InvalidShape, "edge radii must be positive");
    HOHMESH_REQUIRE(d_le > 0.0 && d_le < 1.0 && d_te > 0.0 && d_te < 1.0, ErrorKind::InvalidShape,
                    "tangent proportions must lie in (0, 1)");
    for (std::size_t k = 0; k < kThicknessCoefficients; ++k) {
      HOHMESH_REQUIRE(t_upper[k] >= 0.0 && t_lower[k] >= 0.0, ErrorKind::InvalidShape,
                      "thickness coefficients must be non-negative");
    }
    for (double a : {stagger, theta_le, theta_te, x_le, y_le})
      HOHMESH_REQUIRE(std::isfinite(a), ErrorKind::InvalidShape, "non-finite shape parameter");
  }

  Vec2 leading_edge() const { return {x_le, y_le}; }
  Vec2 trailing_edge() const { return leading_edge() + chord * unit_from_angle(stagger); }

  friend bool operator==(const BladeShapeParams&, const BladeShapeParams&) = default;
};

/// Cubic Bezier camber line, evaluated in a frame local to the leading edge so
/// that translating (x_le, y_le) adds an exact offset and nothing else.
class CamberCurve {
 public:
  explicit CamberCurve(const BladeShapeParams& bsp) : origin_(bsp.leading_edge()) {
    const double c = bsp.chord;
    q_[0] = {0.0, 0.0};
    q_[3] = c * unit_from_angle(bsp.stagger);
    q_[1] = q_[0] + bsp.d_le * c * unit_from_angle(bsp.theta_le);
    q_[2] = q_[3] - bsp.d_te * c * unit_from_angle(bsp.theta_te);
    build_table();
  }

  Vec2 local_point(double t) const {
    const double s = 1.0 - t;
    return (s * s * s) * q_[0] + (3.0 * s * s * t) * q_[1] + (3.0 * s * t * t) * q_[2] + (t * t * t) * q_[3];
  }
  Vec2 point(double t) const { return origin_ + local_point(t); }

  Vec2 derivative(double t) const {
    const double s = 1.0 - t;
    return (3.0 * s * s) * (q_[1] - q_[0]) + (6.0 * s * t) * (q_[2] - q_[1]) + (3.0 * t * t) * (q_[3] - q_[2]);
  }

  Vec2 second_derivative(double t) const {
    return (6.0 * (1.0 - t)) * (q_[2] - 2.0 * q_[1] + q_[0]) + (6.0 * t) * (q_[3] - 2.0 * q_[2] + q_[1]);
  }

  double length() const { return table_s_.back(); }

  /// Arclength from t = 0 to t.
  double arclength(double t) const {
    t = std::clamp(t, 0.0, 1.0);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(t * kTable), kTable - 1);
    const double t0 = static_cast<double>(k) / kTable;
    return table_s_[k] + integrate_speed(t0, t);
  }

  /// Bezier parameter at normalized arclength u in [0, 1].
  double parameter_at(double u) const {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double target = u * length();
    const auto it = std::upper_bound(table_s_.begin(), table_s_.end(), target);
    const std::size_t k = static_cast<std::size_t>(it - table_s_.begin()) - 1;
    const double w = (target - table_s_[k]) / (table_s_[k + 1] - table_s_[k]);
    double t = (static_cast<double>(k) + w) / kTable;
    for (int iter = 0; iter < 8; ++iter) {
      const double f = arclength(t) - target;
      const double step = f / norm(derivative(t));
      t = std::clamp(t - step, 0.0, 1.0);
      if (std::abs(step) < 1e-15) break;
    }
    return t;
  }

  Vec2 origin() const { return origin_; }

 private:
  static constexpr std::size_t kTable = 256;

  double integrate_speed(double a, double b) const {
    // 5-point Gauss-Legendre.
    static constexpr std::array<double, 5> x = {0.0, -0.5384693101056831, 0.5384693101056831,
                                                -0.9061798459386640, 0.9061798459386640};
    static constexpr std::array<double, 5> w = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                                0.2369268850561891, 0.2369268850561891};
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t k = 0; k < 5; ++k) sum += w[k] * norm(derivative(mid + half * x[k]));
    return half * sum;
  }

  void build_table() {
    table_s_.assign(kTable + 1, 0.0);
    for (std::size_t k = 0; k < kTable; ++k) {
      const double a = static_cast<double>(k) / kTable;
      const double b = static_cast<double>(k + 1) / kTable;
      table_s_[k + 1] = table_s_[k] + integrate_speed(a, b);
    }
  }

  Vec2 origin_;
  std::array<Vec2, 4> q_{};
  std::vector<double> table_s_;
};

struct BladeProfile {
  SampledCurve camber;
  SampledCurve surface;  // closed, counterclockwise, starts and ends at the trailing edge
  std::size_t le_index = 0;
  std::size_t te_index = 0;
  double chord = 1.0;
  double stagger = 0.0;
};

namespace detail {

inline double bernstein(std::span<const double> ctrl, double u) {
  // de Casteljau
  std::array<double, 16> b{};
  const std::size_t n = ctrl.size();
  std::copy(ctrl.begin(), ctrl.end(), b.begin());
  for (std::size_t r = 1; r < n; ++r)
    for (std::size_t k = 0; k + r < n; ++k) b[k] = (1.0 - u) * b[k] + u * b[k + 1];
  return b[0];
}

inline std::array<double, 8> envelope_controls(const std::array<double, kThicknessCoefficients>& t,
                                               double rho_le, double rho_te, double camber_length) {
  std::array<double, 8> m{};
  m[0] = std::sqrt(2.0 * rho_le * camber_length);
  for (std::size_t k = 0; k < kThicknessCoefficients; ++k) m[k + 1] = 2.0 * t[k];
  m[7] = std::sqrt(2.0 * rho_te * camber_length);
  return m;
}

// Cosine spacing on [0, 1], dense at both ends.
inline double cosine_spacing(std::size_t k, std::size_t n) {
  if (k == 0) return 0.0;
  if (k == n) return 1.0;
  return 0.5 * (1.0 - std::cos(kPi * static_cast<double>(k) / static_cast<double>(n)));
}

}  // namespace detail

/// Half-thickness of one side at normalized camber arclength u.
inline double half_thickness(const std::array<double, kThicknessCoefficients>& t, double rho_le, double rho_te,
                             double camber_length, double u) {
  const auto m = detail::envelope_controls(t, rho_le, rho_te, camber_length);
  return std::sqrt(std::max(0.0, u * (1.0 - u))) * detail::bernstein(m, u);
}

/// Camber line sampled uniformly in arclength from the leading edge to the
/// trailing edge. Throws InvalidShape if x does not increase monotonically.
inline SampledCurve build_camber(const BladeShapeParams& bsp, std::size_t n_samples) {
  HOHMESH_REQUIRE(n_samples >= 16, ErrorKind::InvalidShape, "camber needs at least 16 samples");
  bsp.validate();
  const CamberCurve curve(bsp);
  const Vec2 le = bsp.leading_edge();
  const Vec2 te_local = bsp.chord * unit_from_angle(bsp.stagger);
  std::vector<Vec2> pts(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(n_samples - 1);
    Vec2 local = curve.local_point(curve.parameter_at(u));
    if (k == 0) local = {0.0, 0.0};
    if (k + 1 == n_samples) local = te_local;
    pts[k] = le + local;
  }
  for (std::size_t k = 1; k < n_samples; ++k) {
    HOHMESH_REQUIRE(pts[k].x > pts[k - 1].x, ErrorKind::InvalidShape,
                    "camber line is not monotone in x");
  }
  auto out = SampledCurve::from_points(std::move(pts));
  HOHMESH_REQUIRE(out.is_valid(), ErrorKind::InvalidShape, "degenerate camber sampling");
  return out;
}

/// Closed counterclockwise surface loop: trailing edge, upper side to the
/// leading edge, lower side back to the trailing edge (repeated).
/// n_samples is the number of distinct surface points.
inline BladeProfile build_profile(const BladeShapeParams& bsp, std::size_t n_samples) {
  HOHMESH_REQUIRE(n_samples >= 64, ErrorKind::InvalidShape, "profile needs at least 64 samples");
  bsp.validate();
  const CamberCurve curve(bsp);
  const double c = bsp.chord;
  const double len = curve.length();
  const auto mu = detail::envelope_controls(bsp.t_upper, bsp.rho_le, bsp.rho_te, len);
  const auto ml = detail::envelope_controls(bsp.t_lower, bsp.rho_le, bsp.rho_te, len);
  const std::size_t n_side = n_samples / 2;

  BladeProfile profile;
  profile.chord = c;
  profile.stagger = bsp.stagger;
  profile.camber = build_camber(bsp, std::max<std::size_t>(n_side + 1, 16));

  // Side samples indexed from LE (k = 0) to TE (k = n_side).
  std::vector<Vec2> upper(n_side + 1), lower(n_side + 1);
  const Vec2 le = bsp.leading_edge();
  const Vec2 te_local = c * unit_from_angle(bsp.stagger);
  for (std::size_t k = 0; k <= n_side; ++k) {
    const double u = detail::cosine_spacing(k, n_side);
    const double t = curve.parameter_at(u);
    Vec2 base = curve.local_point(t);
    if (k == 0) base = {0.0, 0.0};
    if (k == n_side) base = te_local;
    const Vec2 n = left_normal(normalized(curve.derivative(t)));
    const double env = std::sqrt(std::max(0.0, u * (1.0 - u)));
    const double hu = env * detail::bernstein(mu, u);
    const double hl = env * detail::bernstein(ml, u);
    upper[k] = le + (base + hu * n);
    lower[k] = le + (base - hl * n);
  }

  std::vector<Vec2> loop;
  loop.reserve(2 * n_side + 1);
  for (std::size_t k = n_side + 1; k-- > 0;) loop.push_back(upper[k]);
  for (std::size_t k = 1; k <= n_side; ++k) loop.push_back(lower[k]);
  profile.te_index = 0;
  profile.le_index = n_side;
  profile.surface = SampledCurve::from_points(std::move(loop));

  HOHMESH_REQUIRE(profile.surface.is_valid(), ErrorKind::InvalidShape, "degenerate profile");
  HOHMESH_REQUIRE(is_simple_loop(profile.surface.points, 1e-12 * c), ErrorKind::InvalidShape,
                  "blade profile self-intersects");
  HOHMESH_REQUIRE(signed_area(profile.surface.points) > 0.0, ErrorKind::InvalidShape,
                  "blade profile has non-positive area");
  return profile;
}

/// Number of strict local extrema of the loop's coordinate along `direction`.
/// A smooth convex-ish blade has exactly two along its chord.
inline std::size_t count_extrema(const SampledCurve& closed_loop, Vec2 direction, double tol) {
  const auto& p = closed_loop.points;
  const std::size_t n = p.size() - 1;  // distinct points
  std::vector<int> signs;
  signs.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double d = dot(p[(k + 1) % n] - p[k], direction);
    if (d > tol) signs.push_back(1);
    else if (d < -tol) signs.push_back(-1);
  }
  std::size_t changes = 0;
  for (std::size_t k = 0; k < signs.size(); ++k)
    if (signs[k] != signs[(k + 1) % signs.size()]) ++changes;
  return changes;
}

/// Applies a rigid translation to every sampled point.
inline BladeProfile translated(BladeProfile p, Vec2 offset) {
  for (auto& q : p.camber.points) q += offset;
  for (auto& q : p.surface.points) q += offset;
  return p;
}

}  // namespace hohmesh
