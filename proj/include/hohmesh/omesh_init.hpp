#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "hohmesh/blade_geometry.hpp"
#include "hohmesh/core.hpp"
#include "hohmesh/passage_domain.hpp"
#include "hohmesh/polyline.hpp"

namespace hohmesh {

/// Which part of the O-block's outer loop an outer-ring node sits on.
enum class OuterSegment : std::uint8_t { Lower, InletInterface, Upper, OutletInterface };

/// Structured block of ni x nj nodes. For the O-block, i runs clockwise around
/// the blade starting at the trailing edge (the closed xi direction, seam
/// stored once) and j runs from the blade surface (j = 0) to the outer loop.
/// Clockwise i with outward j gives positive Jacobians.
struct StructuredBlock {
  std::size_t ni = 0;
  std::size_t nj = 0;
  Grid2D<Vec2> coords;
  bool wrap = false;
  double pitch = 0.0;
  // (i on lower boundary, i on upper boundary) pairs of outer-ring nodes.
  std::vector<std::pair<std::size_t, std::size_t>> periodic_pairs;
  // Per outer-ring node i. Corner nodes are tagged with the interface they bound.
  std::vector<OuterSegment> outer_segment;
  // Outer-ring indices of the four loop corners.
  std::size_t corner_bl = 0, corner_br = 0, corner_tr = 0, corner_tl = 0;

  StructuredBlock() = default;
  StructuredBlock(std::size_t ni_, std::size_t nj_) : ni(ni_), nj(nj_), coords(ni_, nj_) {}

  Vec2& operator()(std::size_t i, std::size_t j) { return coords(i, j); }
  const Vec2& operator()(std::size_t i, std::size_t j) const { return coords(i, j); }
};

struct ClusterSpec {
  double gamma_le = 0.0;
  double gamma_te = 0.0;
  double dn1 = 1e-4;
  std::size_t n_t = 200;
  std::size_t n_n = 50;
  std::size_t outer_relax_passes = 30;  // smoothing of the projected outer-loop distribution
  double outer_spacing_ratio = 1.5;     // then relaxed further until neighbouring spacings are this close
  double outer_spacing_bound = 3.0;     // and every spacing within this factor of the segment's uniform spacing

  /// N_n from the node budget; the floor of 10 keeps a resolvable wall layer.
  static std::size_t normal_count(std::int64_t n_o, std::int64_t n_t) {
    const auto n = static_cast<std::int64_t>(std::llround(static_cast<double>(n_o) / static_cast<double>(n_t)));
    return static_cast<std::size_t>(std::max<std::int64_t>(10, n));
  }

  static ClusterSpec from(const PassageCondition& cond, const MeshingParams& params) {
    ClusterSpec s;
    s.gamma_le = std::clamp(params.gamma_le, 0.0, 5.0);
    s.gamma_te = std::clamp(params.gamma_te, 0.0, 5.0);
    s.dn1 = cond.dn1;
    s.n_t = static_cast<std::size_t>(params.n_t);
    s.n_n = normal_count(cond.n_o, params.n_t);
    return s;
  }
};

/// Two-sided tanh clustering of n parameters on [0, 1]. gamma_a controls the
/// density at 0 and gamma_b at 1; the strength is blended linearly across the
/// interval. Zero strength gives uniform spacing.
inline std::vector<double> tanh_cluster(std::size_t n, double gamma_a, double gamma_b) {
  std::vector<double> t(n);
  if (n == 0) return t;
  if (n == 1) {
    t[0] = 0.0;
    return t;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(n - 1);
    const double g = gamma_a * (1.0 - u) + gamma_b * u;
    const double v = 2.0 * u - 1.0;
    t[k] = g < 1e-8 ? u : 0.5 * (1.0 + std::tanh(g * v) / std::tanh(g));
  }
  t.front() = 0.0;
  t.back() = 1.0;
  return t;
}

namespace detail {

// 1 - tanh(beta (1 - xi)) / tanh(beta), written to avoid cancellation.
inline double one_sided_stretch(double beta, double xi) {
  if (beta < 1e-12) return xi;
  return std::sinh(beta * xi) / (std::cosh(beta * (1.0 - xi)) * std::sinh(beta));
}

}  // namespace detail

/// One-sided tanh stretching of n distances on [0, L] whose first spacing is dn1.
inline std::vector<double> wall_cluster(std::size_t n, double length, double dn1) {
  HOHMESH_REQUIRE(n >= 2 && length > 0.0, ErrorKind::InfeasibleClustering, "wall_cluster needs n >= 2 and L > 0");
  const double h = 1.0 / static_cast<double>(n - 1);
  const double uniform = length * h;
  HOHMESH_REQUIRE(dn1 <= uniform * (1.0 + 1e-12), ErrorKind::InfeasibleClustering,
                  "first cell height exceeds uniform spacing");
  const auto first = [&](double beta) { return length * detail::one_sided_stretch(beta, h); };
  double beta = 0.0;
  if (dn1 < uniform * (1.0 - 1e-14)) {
    double lo = 0.0, hi = 1.0;
    while (first(hi) > dn1) {
      hi *= 2.0;
      HOHMESH_REQUIRE(hi < 600.0, ErrorKind::InfeasibleClustering, "first cell height too small to reach");
    }
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (first(mid) > dn1) lo = mid;
      else hi = mid;
      if (hi - lo <= 1e-15 * hi) break;
    }
    beta = 0.5 * (lo + hi);
  }
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) d[k] = length * detail::one_sided_stretch(beta, static_cast<double>(k) * h);
  d.front() = 0.0;
  d.back() = length;
  return d;
}

/// N_t surface nodes ordered clockwise from the trailing edge: pressure side
/// (loop's lower part) to the leading edge, then suction side back. Node
/// counts per side are proportional to side lengths; each side is clustered
/// toward both edges.
inline std::vector<Vec2> distribute_surface_nodes(const BladeProfile& profile, const ClusterSpec& spec) {
  const auto& surf = profile.surface;
  const double total = surf.length();
  const double s_le = surf.cumulative_arclength[profile.le_index];
  const double len_upper = s_le;
  const double len_lower = total - s_le;
  const std::size_t n = spec.n_t;
  HOHMESH_REQUIRE(n >= 8, ErrorKind::InvalidMesh, "too few tangential nodes");

  // Largest-remainder split of n intervals.
  const double exact_lower = static_cast<double>(n) * len_lower / total;
  auto n_lower = static_cast<std::size_t>(std::floor(exact_lower));
  std::size_t n_upper = n - n_lower;
  const double exact_upper = static_cast<double>(n) - exact_lower;
  if (n_lower + static_cast<std::size_t>(std::floor(exact_upper)) < n &&
      exact_lower - std::floor(exact_lower) >= exact_upper - std::floor(exact_upper)) {
    ++n_lower;
    n_upper = n - n_lower;
  } else {
    n_upper = n - n_lower;
  }
  n_lower = std::clamp<std::size_t>(n_lower, 2, n - 2);
  n_upper = n - n_lower;

  std::vector<Vec2> nodes(n);
  const auto lower_t = tanh_cluster(n_lower + 1, spec.gamma_le, spec.gamma_te);
  for (std::size_t i = 0; i <= n_lower; ++i) {
    // i = 0 is the TE, i = n_lower the LE; parameter measured from the LE.
    const double t = lower_t[n_lower - i];
    if (i == 0) nodes[i] = surf.points[profile.te_index];
    else if (i == n_lower) nodes[i] = surf.points[profile.le_index];
    else nodes[i] = surf.at_arclength(s_le + t * len_lower);
  }
  const auto upper_t = tanh_cluster(n_upper + 1, spec.gamma_le, spec.gamma_te);
  for (std::size_t m = 1; m < n_upper; ++m) {
    nodes[n_lower + m] = surf.at_arclength(s_le - upper_t[m] * len_upper);
  }
  return nodes;
}

/// Index of the LE node in the ordering produced by distribute_surface_nodes.
inline std::size_t leading_edge_node(const std::vector<Vec2>& nodes, const BladeProfile& profile) {
  const Vec2 le = profile.surface.points[profile.le_index];
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i] == le) return i;
  return nodes.size();
}

/// Closed counterclockwise outer loop of the O-block: lower boundary between
/// the two interfaces, outlet interface, upper boundary, inlet interface.
struct OuterLoop {
  SampledCurve curve;  // closed, starts and ends at the bottom-left corner
  double s_bl = 0.0, s_br = 0.0, s_tr = 0.0, s_tl = 0.0;
};

inline OuterLoop build_outer_loop(const PassageBoundary& b) {
  std::vector<Vec2> pts;
  const Vec2 bl{b.x_if_in, b.lower_y(b.x_if_in)};
  const Vec2 br{b.x_if_out, b.lower_y(b.x_if_out)};
  pts.push_back(bl);
  for (const Vec2& p : b.lower.points)
    if (p.x > b.x_if_in && p.x < b.x_if_out) pts.push_back(p);
  pts.push_back(br);
  const std::size_t i_br = pts.size() - 1;
  pts.push_back({br.x, br.y + b.pitch});
  const std::size_t i_tr = pts.size() - 1;
  for (auto it = b.lower.points.rbegin(); it != b.lower.points.rend(); ++it)
    if (it->x > b.x_if_in && it->x < b.x_if_out) pts.push_back({it->x, it->y + b.pitch});
  pts.push_back({bl.x, bl.y + b.pitch});
  const std::size_t i_tl = pts.size() - 1;
  pts.push_back(bl);
  OuterLoop loop;
  loop.curve = SampledCurve::from_points(std::move(pts));
  loop.s_bl = 0.0;
  loop.s_br = loop.curve.cumulative_arclength[i_br];
  loop.s_tr = loop.curve.cumulative_arclength[i_tr];
  loop.s_tl = loop.curve.cumulative_arclength[i_tl];
  return loop;
}

namespace detail {

// Repairs f in place so it increases strictly from f.front() to f.back() (both
// kept): a longest strictly increasing subsequence of the interior values lying
// between the ends is kept and the remaining entries are interpolated by index.
inline void monotone_repair(std::vector<double>& f) {
  const std::size_t m = f.size() - 1;
  const double lo = f.front(), hi = f.back();
  std::vector<std::size_t> tails;
  std::vector<std::ptrdiff_t> prev(f.size(), -1);
  for (std::size_t k = 1; k < m; ++k) {
    if (!(f[k] > lo && f[k] < hi)) continue;
    const auto it = std::lower_bound(tails.begin(), tails.end(), f[k],
                                     [&](std::size_t idx, double v) { return f[idx] < v; });
    const auto pos = static_cast<std::size_t>(it - tails.begin());
    prev[k] = pos > 0 ? static_cast<std::ptrdiff_t>(tails[pos - 1]) : -1;
    if (pos == tails.size()) tails.push_back(k);
    else tails[pos] = k;
  }
  std::vector<std::size_t> keep{m};
  if (!tails.empty())
    for (auto k = static_cast<std::ptrdiff_t>(tails.back()); k >= 0; k = prev[static_cast<std::size_t>(k)])
      keep.push_back(static_cast<std::size_t>(k));
  keep.push_back(0);
  std::reverse(keep.begin(), keep.end());
  std::vector<double> out(f.size());
  for (std::size_t a = 0; a + 1 < keep.size(); ++a) {
    const std::size_t i0 = keep[a], i1 = keep[a + 1];
    for (std::size_t i = i0; i < i1; ++i)
      out[i] = f[i0] + (f[i1] - f[i0]) * static_cast<double>(i - i0) / static_cast<double>(i1 - i0);
  }
  out[m] = hi;
  f = std::move(out);
}

// Jacobi passes of 1-D Laplacian smoothing with fixed ends; preserves ordering.
inline void relax_spacing(std::vector<double>& f, std::size_t passes) {
  std::vector<double> next(f);
  for (std::size_t pass = 0; pass < passes; ++pass) {
    for (std::size_t k = 1; k + 1 < f.size(); ++k) next[k] = 0.5 * f[k] + 0.25 * (f[k - 1] + f[k + 1]);
    f.swap(next);
  }
}

// Largest ratio between neighbouring spacings of an increasing sequence.
inline double max_spacing_ratio(const std::vector<double>& f) {
  double worst = 1.0;
  for (std::size_t k = 1; k + 1 < f.size(); ++k) {
    const double a = f[k] - f[k - 1], b = f[k + 1] - f[k];
    if (!(a > 0.0 && b > 0.0)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::max(a / b, b / a));
  }
  return worst;
}

// Relaxes until neighbouring spacings differ by at most `ratio`, or the pass
// budget runs out. Ray footprints from a blunt nose pile up near the corners
// and a fixed number of passes does not spread them.
inline void relax_to_ratio(std::vector<double>& f, double ratio, std::size_t max_passes) {
  for (std::size_t done = 0; done < max_passes && max_spacing_ratio(f) > ratio; done += 10) relax_spacing(f, 10);
}

// Blends an increasing sequence on [0, 1] toward uniform spacing, in quarter
// steps, until every spacing lies within `bound` of uniform after relaxation.
inline std::vector<double> bounded_spacing(const std::vector<double>& f, double ratio, double bound) {
  const std::size_t m = f.size() - 1;
  const double h = 1.0 / static_cast<double>(m);
  std::vector<double> g(f.size());
  for (int step = 0; step <= 4; ++step) {
    const double w = 0.25 * step;
    for (std::size_t k = 0; k <= m; ++k) g[k] = (1.0 - w) * f[k] + w * static_cast<double>(k) * h;
    if (step == 4) break;
    relax_to_ratio(g, ratio, 2000);
    bool ok = true;
    for (std::size_t k = 0; k < m && ok; ++k) ok = g[k + 1] - g[k] >= h / bound && g[k + 1] - g[k] <= h * bound;
    if (ok) break;
  }
  return g;
}

inline double positive_mod(double a, double p) {
  double r = std::fmod(a, p);
  if (r < 0.0) r += p;
  return r;
}

}  // namespace detail

/// Extrudes surface nodes along outward normals to the outer loop, repairs the
/// outer-ring ordering, pins the four loop corners, matches periodic nodes and
/// fills each surface-to-outer segment with wall-clustered nodes.
inline StructuredBlock extrude_to_outer(const std::vector<Vec2>& surface_nodes, const PassageBoundary& boundary,
                                        const ClusterSpec& spec) {
  const std::size_t n = surface_nodes.size();
  const std::size_t nj = spec.n_n;
  HOHMESH_REQUIRE(n >= 8 && nj >= 3, ErrorKind::ExtrusionFailure, "block too small");
  HOHMESH_REQUIRE(boundary.x_if_out > boundary.x_if_in, ErrorKind::ExtrusionFailure, "empty O-block domain");

  const OuterLoop outer = build_outer_loop(boundary);
  const auto& loop_pts = outer.curve.points;
  const auto& loop_s = outer.curve.cumulative_arclength;
  const double perimeter = outer.curve.length();

  // Blade must sit strictly inside the outer loop.
  std::vector<Vec2> ring(surface_nodes);
  ring.push_back(surface_nodes.front());
  for (const Vec2& p : surface_nodes)
    HOHMESH_REQUIRE(point_in_polygon(p, loop_pts), ErrorKind::ExtrusionFailure,
                    "blade surface lies outside the O-block outer loop");
  HOHMESH_REQUIRE(!polylines_intersect(ring, loop_pts, 0.0), ErrorKind::ExtrusionFailure,
                  "blade surface touches the O-block outer loop");

  // 1. Outward-normal rays. Loop arclength is counterclockwise; the node order is
  // clockwise, so work with d = (s_0 - s_i) mod P, increasing along i.
  std::vector<double> s_hit(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 tangent = surface_nodes[(i + 1) % n] - surface_nodes[(i + n - 1) % n];
    const Vec2 outward = left_normal(normalized(tangent));
    auto hit = cast_ray(surface_nodes[i], outward, loop_pts, loop_s);
    if (!hit) hit = cast_ray(surface_nodes[i], -outward, loop_pts, loop_s);
    if (!hit) hit = nearest_on_loop(surface_nodes[i], loop_pts, loop_s);
    s_hit[i] = hit->arclength;
  }
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = detail::positive_mod(s_hit[0] - s_hit[i], perimeter);
  d[0] = 0.0;

  // 2. Repair crossings: keep a longest increasing subsequence, interpolate the rest.
  {
    d.push_back(perimeter);
    detail::monotone_repair(d);
    d.pop_back();
  }

  // 3. Corners, in clockwise order starting from node 0's hit.
  const auto corner_d = [&](double s) { return detail::positive_mod(s_hit[0] - s, perimeter); };
  struct Corner {
    double d;
    int id;  // 0 BL, 1 BR, 2 TR, 3 TL
    std::size_t node = 0;
  };
  std::array<Corner, 4> corners{{{corner_d(outer.s_bl), 0}, {corner_d(outer.s_br), 1},
                                 {corner_d(outer.s_tr), 2}, {corner_d(outer.s_tl), 3}}};
  std::sort(corners.begin(), corners.end(), [](const Corner& a, const Corner& b) { return a.d < b.d; });
  // Clockwise order must be BL -> TL -> TR -> BR -> BL.
  {
    const std::array<int, 4> cw_next = {3, 0, 1, 2};  // BL->TL, BR->BL, TR->BR, TL->TR
    for (std::size_t k = 0; k < 4; ++k)
      HOHMESH_REQUIRE(cw_next[static_cast<std::size_t>(corners[k].id)] == corners[(k + 1) % 4].id,
                      ErrorKind::ExtrusionFailure, "outer loop corners out of order");
  }
  // Nearest node to each corner, kept strictly increasing. A corner at d = 0 maps to node 0.
  {
    std::size_t lo = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const std::size_t hi = n - (4 - k);  // leave room for later corners
      std::size_t best = lo;
      double best_gap = std::abs(d[lo] - corners[k].d);
      for (std::size_t i = lo; i <= hi; ++i) {
        const double gap = std::abs(d[i] - corners[k].d);
        if (gap < best_gap) {
          best_gap = gap;
          best = i;
        }
      }
      // Also consider wrapping onto node 0 (d = P) for corners near the end.
      corners[k].node = best;
      lo = best + 1;
    }
  }

  // 4. Equalize periodic segment counts. Work with cyclic positions relative to BR.
  std::array<std::size_t, 4> pos{};  // BR, BL, TL, TR node indices
  for (const Corner& c : corners) {
    const std::array<std::size_t, 4> slot = {1, 0, 3, 2};  // id -> slot
    pos[slot[static_cast<std::size_t>(c.id)]] = c.node;
  }
  const auto span_between = [n](std::size_t a, std::size_t b) { return (b + n - a) % n; };
  {
    int turn = 0;
    for (int guard = 0; guard < static_cast<int>(4 * n); ++guard) {
      const std::size_t lower = span_between(pos[0], pos[1]);
      const std::size_t left = span_between(pos[1], pos[2]);
      const std::size_t upper = span_between(pos[2], pos[3]);
      const std::size_t right = span_between(pos[3], pos[0]);
      if (lower == upper) break;
      const bool lower_big = lower > upper;
      bool moved = false;
      if (turn % 2 == 0) {
        // Grow the smaller periodic side by taking a node from the larger interface.
        if (lower_big) {
          if (left >= right && left >= 2) { pos[2] = (pos[2] + n - 1) % n; moved = true; }
          else if (right >= 2) { pos[3] = (pos[3] + 1) % n; moved = true; }
        } else {
          if (left >= right && left >= 2) { pos[1] = (pos[1] + 1) % n; moved = true; }
          else if (right >= 2) { pos[0] = (pos[0] + n - 1) % n; moved = true; }
        }
      }
      if (!moved) {
        // Shrink the larger side, handing a node to the smaller interface.
        if (lower_big) {
          if (left <= right) pos[1] = (pos[1] + n - 1) % n;
          else pos[0] = (pos[0] + 1) % n;
        } else {
          if (left <= right) pos[2] = (pos[2] + 1) % n;
          else pos[3] = (pos[3] + n - 1) % n;
        }
      }
      ++turn;
    }
    HOHMESH_REQUIRE(span_between(pos[0], pos[1]) == span_between(pos[2], pos[3]), ErrorKind::ExtrusionFailure,
                    "cannot balance periodic node counts");
    for (std::size_t k = 0; k < 4; ++k)
      HOHMESH_REQUIRE(span_between(pos[k], pos[(k + 1) % 4]) >= 1, ErrorKind::ExtrusionFailure,
                      "outer loop segment without nodes");
  }

  // 5. Outer-ring positions. d values per corner are exact; segment interiors keep
  // their ray positions when consistent and are otherwise spread uniformly.
  const std::array<double, 4> corner_s = {outer.s_br, outer.s_bl, outer.s_tl, outer.s_tr};
  const std::array<OuterSegment, 4> seg_kind = {OuterSegment::Lower, OuterSegment::InletInterface,
                                                OuterSegment::Upper, OuterSegment::OutletInterface};
  std::vector<double> s_outer(n);  // counterclockwise loop arclength of each outer node
  std::vector<OuterSegment> kind(n);
  for (std::size_t k = 0; k < 4; ++k) {
    const std::size_t a = pos[k];
    const std::size_t m = span_between(a, pos[(k + 1) % 4]);
    // Clockwise travel from corner k to corner k+1 is decreasing loop arclength.
    const double sa = corner_s[k];
    double sb = corner_s[(k + 1) % 4];
    double len = detail::positive_mod(sa - sb, perimeter);
    if (len == 0.0) len = perimeter;
    std::vector<double> frac(m + 1);
    for (std::size_t q = 1; q < m; ++q) {
      const std::size_t i = (a + q) % n;
      frac[q] = detail::positive_mod(sa - s_hit[0] + d[i], perimeter) / len;
    }
    frac[0] = 0.0;
    frac[m] = 1.0;
    detail::monotone_repair(frac);
    detail::relax_spacing(frac, spec.outer_relax_passes);
    frac = detail::bounded_spacing(frac, spec.outer_spacing_ratio, spec.outer_spacing_bound);
    for (std::size_t q = 0; q <= m; ++q) {
      const double f = frac[q];
      const std::size_t i = (a + q) % n;
      if (q < m) {
        s_outer[i] = detail::positive_mod(sa - f * len, perimeter);
        kind[i] = seg_kind[k];
      }
    }
  }
  // Corners tagged with the interface they bound.
  kind[pos[0]] = OuterSegment::OutletInterface;  // BR
  kind[pos[1]] = OuterSegment::InletInterface;   // BL
  kind[pos[2]] = OuterSegment::InletInterface;   // TL
  kind[pos[3]] = OuterSegment::OutletInterface;  // TR

  std::vector<Vec2> outer_pts(n);
  for (std::size_t i = 0; i < n; ++i) outer_pts[i] = outer.curve.at_arclength(s_outer[i]);
  const double y_bl = boundary.lower_y(boundary.x_if_in);
  const double y_br = boundary.lower_y(boundary.x_if_out);
  outer_pts[pos[0]] = {boundary.x_if_out, y_br};
  outer_pts[pos[1]] = {boundary.x_if_in, y_bl};
  outer_pts[pos[2]] = {boundary.x_if_in, y_bl + boundary.pitch};
  outer_pts[pos[3]] = {boundary.x_if_out, y_br + boundary.pitch};
  for (std::size_t i = 0; i < n; ++i) {
    if (i == pos[0] || i == pos[1] || i == pos[2] || i == pos[3]) continue;
    if (kind[i] == OuterSegment::InletInterface) outer_pts[i].x = boundary.x_if_in;
    if (kind[i] == OuterSegment::OutletInterface) outer_pts[i].x = boundary.x_if_out;
  }

  // 6. Periodic matching: lower node BR+k pairs with upper node TR-k.
  StructuredBlock block(n, nj);
  block.wrap = true;
  block.pitch = boundary.pitch;
  const std::size_t m = span_between(pos[0], pos[1]);
  block.periodic_pairs.push_back({pos[0], pos[3]});
  for (std::size_t k = 1; k < m; ++k) {
    const std::size_t il = (pos[0] + k) % n;
    const std::size_t iu = (pos[3] + n - k) % n;
    const double x = 0.5 * (outer_pts[il].x + outer_pts[iu].x);
    const double y = boundary.lower_y(x);
    outer_pts[il] = {x, y};
    outer_pts[iu] = {x, y + boundary.pitch};
    block.periodic_pairs.push_back({il, iu});
  }
  block.periodic_pairs.push_back({pos[1], pos[2]});
  block.outer_segment = kind;
  block.corner_br = pos[0];
  block.corner_bl = pos[1];
  block.corner_tl = pos[2];
  block.corner_tr = pos[3];

  // 7. Interior nodes along straight surface-to-outer segments, clustered toward the wall.
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p0 = surface_nodes[i];
    const Vec2 p1 = outer_pts[i];
    const double len = norm(p1 - p0);
    const auto dist = wall_cluster(nj, len, spec.dn1);
    block(i, 0) = p0;
    for (std::size_t j = 1; j + 1 < nj; ++j) block(i, j) = p0 + (dist[j] / len) * (p1 - p0);
    block(i, nj - 1) = p1;
  }
  return block;
}

/// Signed area of cell (i, j)-(i+1, j)-(i+1, j+1)-(i, j+1), with wrap in i.
inline double cell_area(const StructuredBlock& b, std::size_t i, std::size_t j) {
  const std::size_t ip = b.wrap ? (i + 1) % b.ni : i + 1;
  const Vec2 p0 = b(i, j), p1 = b(ip, j), p2 = b(ip, j + 1), p3 = b(i, j + 1);
  return 0.5 * cross(p2 - p0, p3 - p1);
}

/// Smallest triangle area over both diagonal splits of every cell. Positive
/// means every cell is a convex, positively oriented quadrilateral.
inline double min_cell_triangle_area(const StructuredBlock& b) {
  double worst = std::numeric_limits<double>::infinity();
  const std::size_t ci = b.wrap ? b.ni : b.ni - 1;
  for (std::size_t j = 0; j + 1 < b.nj; ++j) {
    for (std::size_t i = 0; i < ci; ++i) {
      const std::size_t ip = b.wrap ? (i + 1) % b.ni : i + 1;
      const Vec2 p0 = b(i, j), p1 = b(ip, j), p2 = b(ip, j + 1), p3 = b(i, j + 1);
      worst = std::min({worst, cross(p1 - p0, p3 - p0), cross(p2 - p1, p0 - p1), cross(p3 - p2, p1 - p2),
                        cross(p0 - p3, p2 - p3)});
    }
  }
  return 0.5 * worst;
}

/// Throws InvalidMesh if any cell is folded or inverted.
inline void require_unfolded(const StructuredBlock& b, const char* stage) {
  const std::size_t ci = b.wrap ? b.ni : b.ni - 1;
  for (std::size_t j = 0; j + 1 < b.nj; ++j)
    for (std::size_t i = 0; i < ci; ++i)
      HOHMESH_REQUIRE(cell_area(b, i, j) > 0.0, ErrorKind::InvalidMesh,
                      std::string(stage) + ": folded cell at i=" + std::to_string(i) + " j=" + std::to_string(j));
}

/// Every corner turns left, so no cell is concave. A concave cell keeps a
/// positive area while all its corner Jacobians go negative.
inline void require_convex(const StructuredBlock& b, const char* stage) {
  const std::size_t ci = b.wrap ? b.ni : b.ni - 1;
  for (std::size_t j = 0; j + 1 < b.nj; ++j)
    for (std::size_t i = 0; i < ci; ++i) {
      const std::size_t ip = b.wrap ? (i + 1) % b.ni : i + 1;
      const std::array<Vec2, 4> p{b(i, j), b(ip, j), b(ip, j + 1), b(i, j + 1)};
      for (std::size_t k = 0; k < 4; ++k)
        HOHMESH_REQUIRE(cross(p[(k + 1) % 4] - p[k], p[(k + 3) % 4] - p[k]) > 0.0, ErrorKind::FoldedMesh,
                        std::string(stage) + ": concave or folded cell at i=" + std::to_string(i) +
                            " j=" + std::to_string(j));
    }
}

}  // namespace hohmesh
