#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "hohmesh/core.hpp"

namespace hohmesh {

/// Ordered point list with its cumulative arclength.
///
/// Invariants: cumulative_arclength[0] == 0, strictly increasing, so no two
/// consecutive points coincide. A closed loop repeats its first point at the
/// end.
struct SampledCurve {
  std::vector<Vec2> points;
  std::vector<double> cumulative_arclength;

  static SampledCurve from_points(std::vector<Vec2> pts) {
    SampledCurve c;
    c.points = std::move(pts);
    c.cumulative_arclength.resize(c.points.size());
    double s = 0.0;
    for (std::size_t k = 0; k < c.points.size(); ++k) {
      if (k > 0) s += norm(c.points[k] - c.points[k - 1]);
      c.cumulative_arclength[k] = s;
    }
    return c;
  }

  std::size_t size() const noexcept { return points.size(); }
  double length() const { return cumulative_arclength.empty() ? 0.0 : cumulative_arclength.back(); }

  bool is_valid() const {
    if (points.size() < 2 || cumulative_arclength.size() != points.size()) return false;
    if (cumulative_arclength.front() != 0.0) return false;
    for (std::size_t k = 1; k < points.size(); ++k) {
      if (!(cumulative_arclength[k] > cumulative_arclength[k - 1])) return false;
      if (points[k] == points[k - 1]) return false;
    }
    return true;
  }

  /// Point at arclength s (clamped to [0, length]), linear between samples.
  Vec2 at_arclength(double s) const {
    const auto& cs = cumulative_arclength;
    if (s <= 0.0) return points.front();
    if (s >= cs.back()) return points.back();
    const auto it = std::upper_bound(cs.begin(), cs.end(), s);
    const auto k = static_cast<std::size_t>(it - cs.begin());
    const double w = (s - cs[k - 1]) / (cs[k] - cs[k - 1]);
    return (1.0 - w) * points[k - 1] + w * points[k];
  }

  /// Linear interpolation of y at abscissa x. Requires strictly increasing x.
  double y_at(double x) const {
    if (x <= points.front().x) return points.front().y;
    if (x >= points.back().x) return points.back().y;
    const auto it = std::upper_bound(points.begin(), points.end(), x,
                                     [](double v, const Vec2& p) { return v < p.x; });
    const auto k = static_cast<std::size_t>(it - points.begin());
    const Vec2 a = points[k - 1];
    const Vec2 b = points[k];
    const double w = (x - a.x) / (b.x - a.x);
    return (1.0 - w) * a.y + w * b.y;
  }
};

/// Shoelace area; positive for counterclockwise loops. The loop may or may not
/// repeat its first point.
inline double signed_area(std::span<const Vec2> loop) {
  double a = 0.0;
  const std::size_t n = loop.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 p = loop[k];
    const Vec2 q = loop[(k + 1) % n];
    a += cross(p, q);
  }
  return 0.5 * a;
}

/// Proper or touching intersection of closed segments [a,b] and [c,d].
inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol = 0.0) {
  const auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return cross(q - p, r - p); };
  const double d1 = orient(c, d, a);
  const double d2 = orient(c, d, b);
  const double d3 = orient(a, b, c);
  const double d4 = orient(a, b, d);
  const double ab = norm(b - a);
  const double cd = norm(d - c);
  const double t1 = tol * cd;
  const double t2 = tol * ab;
  if (((d1 > t1 && d2 < -t1) || (d1 < -t1 && d2 > t1)) &&
      ((d3 > t2 && d4 < -t2) || (d3 < -t2 && d4 > t2)))
    return true;
  const auto on_segment = [tol](Vec2 p, Vec2 q, Vec2 r) {
    // r collinear with pq: check bounding box.
    return std::min(p.x, q.x) - tol <= r.x && r.x <= std::max(p.x, q.x) + tol &&
           std::min(p.y, q.y) - tol <= r.y && r.y <= std::max(p.y, q.y) + tol;
  };
  if (std::abs(d1) <= t1 && on_segment(c, d, a)) return true;
  if (std::abs(d2) <= t1 && on_segment(c, d, b)) return true;
  if (std::abs(d3) <= t2 && on_segment(a, b, c)) return true;
  if (std::abs(d4) <= t2 && on_segment(a, b, d)) return true;
  return false;
}

namespace detail {

struct Segment {
  Vec2 a, b;
  double xmin, xmax;
  std::size_t owner;  // which polyline
  std::size_t index;  // segment index within owner
};

inline std::vector<Segment> segments_of(std::span<const Vec2> pts, std::size_t owner) {
  std::vector<Segment> out;
  if (pts.size() < 2) return out;
  out.reserve(pts.size() - 1);
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const Vec2 a = pts[k];
    const Vec2 b = pts[k + 1];
    out.push_back({a, b, std::min(a.x, b.x), std::max(a.x, b.x), owner, k});
  }
  return out;
}

/// Sort-and-sweep over x-extents; calls visit(s, t) for candidate pairs whose
/// x-intervals overlap. Stops early when visit returns true.
template <class Visit>
bool sweep_pairs(std::vector<Segment>& segs, Visit&& visit) {
  std::sort(segs.begin(), segs.end(), [](const Segment& l, const Segment& r) { return l.xmin < r.xmin; });
  for (std::size_t s = 0; s < segs.size(); ++s) {
    for (std::size_t t = s + 1; t < segs.size() && segs[t].xmin <= segs[s].xmax; ++t) {
      const double ylo1 = std::min(segs[s].a.y, segs[s].b.y), yhi1 = std::max(segs[s].a.y, segs[s].b.y);
      const double ylo2 = std::min(segs[t].a.y, segs[t].b.y), yhi2 = std::max(segs[t].a.y, segs[t].b.y);
      if (yhi1 < ylo2 || yhi2 < ylo1) continue;
      if (visit(segs[s], segs[t])) return true;
    }
  }
  return false;
}

}  // namespace detail

/// True when a closed loop (first point repeated at the end) has no
/// intersections between non-adjacent segments.
inline bool is_simple_loop(std::span<const Vec2> closed, double tol) {
  auto segs = detail::segments_of(closed, 0);
  const std::size_t m = segs.size();
  return !detail::sweep_pairs(segs, [&](const detail::Segment& s, const detail::Segment& t) {
    const std::size_t i = std::min(s.index, t.index);
    const std::size_t j = std::max(s.index, t.index);
    if (j == i + 1 || (i == 0 && j == m - 1)) return false;
    return segments_intersect(s.a, s.b, t.a, t.b, tol);
  });
}

/// True if any segment of polyline p intersects any segment of polyline q.
inline bool polylines_intersect(std::span<const Vec2> p, std::span<const Vec2> q, double tol) {
  auto segs = detail::segments_of(p, 0);
  auto other = detail::segments_of(q, 1);
  segs.insert(segs.end(), other.begin(), other.end());
  return detail::sweep_pairs(segs, [&](const detail::Segment& s, const detail::Segment& t) {
    if (s.owner == t.owner) return false;
    return segments_intersect(s.a, s.b, t.a, t.b, tol);
  });
}

/// Even-odd point-in-polygon test; the loop may or may not be closed.
inline bool point_in_polygon(Vec2 p, std::span<const Vec2> loop) {
  bool inside = false;
  const std::size_t n = loop.size();
  for (std::size_t k = 0, l = n - 1; k < n; l = k++) {
    const Vec2 a = loop[k];
    const Vec2 b = loop[l];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xi = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xi) inside = !inside;
    }
  }
  return inside;
}

struct RayHit {
  Vec2 point;
  double distance;   // along the ray
  double arclength;  // along the loop
};

/// Nearest forward intersection of ray origin + t*dir (t > 0) with a closed
/// loop (first point repeated at the end).
inline std::optional<RayHit> cast_ray(Vec2 origin, Vec2 dir, std::span<const Vec2> closed,
                                      std::span<const double> loop_arclength) {
  std::optional<RayHit> best;
  for (std::size_t k = 0; k + 1 < closed.size(); ++k) {
    const Vec2 a = closed[k];
    const Vec2 e = closed[k + 1] - a;
    const double den = cross(dir, e);
    if (den == 0.0) continue;
    const Vec2 w = a - origin;
    const double t = cross(w, e) / den;
    const double u = cross(w, dir) / den;
    if (t <= 0.0 || u < 0.0 || u > 1.0) continue;
    if (!best || t < best->distance) {
      const double seg_len = loop_arclength[k + 1] - loop_arclength[k];
      best = RayHit{a + u * e, t, loop_arclength[k] + u * seg_len};
    }
  }
  return best;
}

/// Closest point on a closed loop to p, returned as a RayHit whose distance is
/// the Euclidean gap.
inline RayHit nearest_on_loop(Vec2 p, std::span<const Vec2> closed, std::span<const double> loop_arclength) {
  RayHit best{closed.front(), std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t k = 0; k + 1 < closed.size(); ++k) {
    const Vec2 a = closed[k];
    const Vec2 e = closed[k + 1] - a;
    const double ee = dot(e, e);
    const double u = ee > 0.0 ? std::clamp(dot(p - a, e) / ee, 0.0, 1.0) : 0.0;
    const Vec2 q = a + u * e;
    const double d = norm(p - q);
    if (d < best.distance) {
      best = RayHit{q, d, loop_arclength[k] + u * (loop_arclength[k + 1] - loop_arclength[k])};
    }
  }
  return best;
}

}  // namespace hohmesh
