#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include "hohmesh/core.hpp"
#include "hohmesh/omesh_init.hpp"

namespace hohmesh {

/// Source terms of the Poisson system, one value per node, stored normalized
/// by the metric of their own direction: p1 = P1 J^2 / A1, p2 = P2 J^2 / A3, so
/// the interchanged equations read
///   A1 (r_xixi + p1 r_xi) - 2 A2 r_xieta + A3 (r_etaeta + p2 r_eta) = 0.
/// The normalized values carry no grid scale, which keeps the power-law blend
/// bounded across a wall layer whose spacing and aspect ratio change by orders
/// of magnitude.
struct ControlField {
  Grid2D<double> p1;
  Grid2D<double> p2;

  ControlField() = default;
  ControlField(std::size_t ni, std::size_t nj) : p1(ni, nj, 0.0), p2(ni, nj, 0.0) {}
};

struct SmootherSettings {
  std::size_t max_sweeps = 2000;
  double tolerance = 1e-6;
  double relaxation = 1.5;
  std::size_t control_refresh_every = 10;
  bool use_controls = true;   // false solves the homogeneous (Laplace-like) system
  double control_cap = 1.0;         // bound on the normalized controls
  double control_relaxation = 0.1;  // weight of each control refresh after the first
};

struct BoundaryControls {
  std::vector<double> p1_wall, p2_wall;    // j = 0
  std::vector<double> p1_outer, p2_outer;  // j = nj - 1
};

struct SmoothResult {
  StructuredBlock block;
  ControlField controls;
  std::vector<double> residual_history;  // relative residual after each sweep
  bool converged = false;
  std::size_t sweeps = 0;
  double relaxation = 0.0;  // final relaxation factor (halved on folding)
};

namespace detail {

struct Stencil {
  std::size_t ni, nj;
  bool wrap;
  std::size_t ip(std::size_t i) const { return wrap && i + 1 == ni ? 0 : i + 1; }
  std::size_t im(std::size_t i) const { return wrap && i == 0 ? ni - 1 : i - 1; }
  std::size_t i_begin() const { return wrap ? 0 : 1; }
  std::size_t i_end() const { return wrap ? ni : ni - 1; }
};

// |r_eta| at a boundary row from a second-order one-sided difference toward the interior.
inline std::vector<double> row_spacing(const StructuredBlock& b, std::size_t j, int inward) {
  const std::size_t j1 = inward > 0 ? j + 1 : j - 1;
  const std::size_t j2 = inward > 0 ? j + 2 : j - 2;
  std::vector<double> h(b.ni);
  for (std::size_t i = 0; i < b.ni; ++i) h[i] = norm(0.5 * (-3.0 * b(i, j) + 4.0 * b(i, j1) - b(i, j2)));
  return h;
}

// Control values at one boundary row from the orthogonality condition, with
// r_eta normal to the row and of length spacing[i].
// `inward` is +1 for the wall row (interior at j+1) and -1 for the outer row.
inline void row_controls(const StructuredBlock& b, std::size_t j, int inward, const std::vector<double>& spacing,
                         double cap, std::vector<double>& p1, std::vector<double>& p2) {
  const Stencil st{b.ni, b.nj, b.wrap};
  p1.assign(b.ni, 0.0);
  p2.assign(b.ni, 0.0);
  const std::size_t j1 = inward > 0 ? j + 1 : j - 1;
  const std::size_t j2 = inward > 0 ? j + 2 : j - 2;
  for (std::size_t i = st.i_begin(); i < st.i_end(); ++i) {
    const Vec2 r0 = b(i, j), r1 = b(i, j1), r2 = b(i, j2);
    const Vec2 rxi = 0.5 * (b(st.ip(i), j) - b(st.im(i), j));
    const Vec2 rxixi = b(st.ip(i), j) - 2.0 * r0 + b(st.im(i), j);
    const double mag = spacing[i];
    Vec2 n = left_normal(rxi);
    const double nn = norm(n);
    HOHMESH_REQUIRE(nn > 0.0 && mag > 0.0, ErrorKind::SingularMetric,
                    "degenerate boundary metric at i=" + std::to_string(i) + " j=" + std::to_string(j));
    n = n / nn;
    if (dot(n, r1 - r0) < 0.0) n = -n;
    // r_eta in the eta-increasing sense.
    const Vec2 reta = static_cast<double>(inward) * mag * n;
    const Vec2 retaeta = 0.5 * (8.0 * r1 - r2 - 7.0 * r0 - static_cast<double>(inward) * 6.0 * reta);
    const double a1 = dot(reta, reta);
    const double a3 = dot(rxi, rxi);
    const Vec2 rhs = a1 * rxixi + a3 * retaeta;
    // With r_xi . r_eta = 0 the two components of the equation decouple.
    p1[i] = std::clamp(-dot(rhs, rxi) / (a1 * a3), -cap, cap);
    p2[i] = std::clamp(-dot(rhs, reta) / (a1 * a3), -cap, cap);
  }
}

}  // namespace detail

/// Target |r_eta| on the wall and outer rows.
struct BoundarySpacing {
  std::vector<double> wall, outer;

  static BoundarySpacing of(const StructuredBlock& b) {
    return {detail::row_spacing(b, 0, +1), detail::row_spacing(b, b.nj - 1, -1)};
  }
};

/// Control functions on the wall and outer rows from local orthogonality. The
/// spacing off each row defaults to that of the current grid.
inline BoundaryControls boundary_controls(const StructuredBlock& b, double cap = 1e4,
                                          const BoundarySpacing* spacing = nullptr) {
  HOHMESH_REQUIRE(b.nj >= 3 && b.ni >= 3, ErrorKind::SingularMetric, "block too small for boundary controls");
  const BoundarySpacing own = spacing ? BoundarySpacing{} : BoundarySpacing::of(b);
  const BoundarySpacing& h = spacing ? *spacing : own;
  BoundaryControls c;
  detail::row_controls(b, 0, +1, h.wall, cap, c.p1_wall, c.p2_wall);
  detail::row_controls(b, b.nj - 1, -1, h.outer, cap, c.p1_outer, c.p2_outer);
  return c;
}

/// Power-law interior interpolation with exponent 3, eta = j / (nj - 1).
inline ControlField blend_controls(const BoundaryControls& bc, std::size_t ni, std::size_t nj) {
  ControlField f(ni, nj);
  for (std::size_t j = 0; j < nj; ++j) {
    const double eta = static_cast<double>(j) / static_cast<double>(nj - 1);
    const double w0 = std::pow(1.0 - eta, 3);
    const double w1 = std::pow(eta, 3);
    for (std::size_t i = 0; i < ni; ++i) {
      f.p1(i, j) = bc.p1_wall[i] * w0 + bc.p1_outer[i] * w1;
      f.p2(i, j) = bc.p2_wall[i] * w0 + bc.p2_outer[i] * w1;
    }
  }
  return f;
}

namespace detail {

struct NodeTerms {
  Vec2 residual;  // A1 (r_xixi + p1 r_xi) - 2 A2 r_xieta + A3 (r_etaeta + p2 r_eta)
  Vec2 target;    // Jacobi update for the node
};

inline NodeTerms node_terms(const StructuredBlock& b, const Stencil& st, const ControlField* ctl, std::size_t i,
                            std::size_t j) {
  const std::size_t ip = st.ip(i), im = st.im(i);
  const Vec2 e = b(ip, j), w = b(im, j), n = b(i, j + 1), s = b(i, j - 1), c = b(i, j);
  const Vec2 rxi = 0.5 * (e - w);
  const Vec2 reta = 0.5 * (n - s);
  const Vec2 rxieta = 0.25 * (b(ip, j + 1) - b(ip, j - 1) - b(im, j + 1) + b(im, j - 1));
  const double a1 = dot(reta, reta);
  const double a2 = dot(rxi, reta);
  const double a3 = dot(rxi, rxi);
  Vec2 source{};
  if (ctl != nullptr) source = a1 * ctl->p1(i, j) * rxi + a3 * ctl->p2(i, j) * reta;
  const Vec2 cross_term = -2.0 * a2 * rxieta + source;
  NodeTerms t;
  t.residual = a1 * (e - 2.0 * c + w) + a3 * (n - 2.0 * c + s) + cross_term;
  const double diag = 2.0 * (a1 + a3);
  t.target = diag > 0.0 ? (a1 * (e + w) + a3 * (n + s) + cross_term) / diag : c;
  return t;
}

inline double max_residual(const StructuredBlock& b, const ControlField* ctl) {
  const Stencil st{b.ni, b.nj, b.wrap};
  double r = 0.0;
  for (std::size_t j = 1; j + 1 < b.nj; ++j)
    for (std::size_t i = st.i_begin(); i < st.i_end(); ++i) {
      const Vec2 res = node_terms(b, st, ctl, i, j).residual;
      r = std::max({r, std::abs(res.x), std::abs(res.y)});
    }
  return r;
}

// First cell with non-positive area, if any.
inline std::optional<std::pair<std::size_t, std::size_t>> first_fold(const StructuredBlock& b) {
  const std::size_t ci = b.wrap ? b.ni : b.ni - 1;
  for (std::size_t j = 0; j + 1 < b.nj; ++j)
    for (std::size_t i = 0; i < ci; ++i)
      if (!(cell_area(b, i, j) > 0.0)) return std::pair{i, j};
  return std::nullopt;
}

}  // namespace detail

/// Successive over-relaxation of the interchanged Poisson equations. Rows
/// j = 0 and j = nj - 1 (and, without wrap, columns i = 0 and i = ni - 1) are
/// Dirichlet and never written.
inline SmoothResult smooth(StructuredBlock block, const SmootherSettings& settings = {}) {
  HOHMESH_REQUIRE(settings.tolerance > 0.0, ErrorKind::ConfigError, "smoother tolerance must be positive");
  HOHMESH_REQUIRE(settings.relaxation > 0.0 && settings.relaxation < 2.0, ErrorKind::ConfigError,
                  "relaxation must lie in (0, 2)");
  HOHMESH_REQUIRE(block.ni >= 3 && block.nj >= 3, ErrorKind::InvalidMesh, "block too small to smooth");
  const detail::Stencil st{block.ni, block.nj, block.wrap};
  const std::size_t refresh = std::max<std::size_t>(1, settings.control_refresh_every);

  SmoothResult out;
  out.relaxation = settings.relaxation;
  out.controls = ControlField(block.ni, block.nj);
  // The spacing off both rows is held at its initial value; the boundary
  // values move toward each fresh orthogonality estimate by control_relaxation.
  const BoundarySpacing spacing = BoundarySpacing::of(block);
  BoundaryControls bc;
  const auto refresh_controls = [&] {
    if (!settings.use_controls) return;
    const BoundaryControls target = boundary_controls(block, settings.control_cap, &spacing);
    if (bc.p1_wall.empty()) {
      bc = target;
    } else {
      const double w = settings.control_relaxation;
      const auto relax = [w](std::vector<double>& v, const std::vector<double>& t) {
        for (std::size_t k = 0; k < v.size(); ++k) v[k] += w * (t[k] - v[k]);
      };
      relax(bc.p1_wall, target.p1_wall);
      relax(bc.p2_wall, target.p2_wall);
      relax(bc.p1_outer, target.p1_outer);
      relax(bc.p2_outer, target.p2_outer);
    }
    out.controls = blend_controls(bc, block.ni, block.nj);
  };
  refresh_controls();
  const ControlField* ctl = settings.use_controls ? &out.controls : nullptr;

  const double r0 = detail::max_residual(block, ctl);
  if (!(r0 > 0.0)) {
    out.converged = true;
    out.block = std::move(block);
    return out;
  }

  std::vector<Vec2> backup;
  int halvings = 0;
  for (std::size_t sweep = 1; sweep <= settings.max_sweeps; ++sweep) {
    if (sweep > 1 && (sweep - 1) % refresh == 0) refresh_controls();
    const auto vals = block.coords.values();
    backup.assign(vals.begin(), vals.end());
    for (;;) {
      const double omega = out.relaxation;
      for (std::size_t j = 1; j + 1 < block.nj; ++j)
        for (std::size_t i = st.i_begin(); i < st.i_end(); ++i) {
          const Vec2 target = detail::node_terms(block, st, ctl, i, j).target;
          Vec2& c = block(i, j);
          c = c + omega * (target - c);
        }
      const auto fold = detail::first_fold(block);
      if (!fold) break;
      std::copy(backup.begin(), backup.end(), block.coords.values().begin());
      ++halvings;
      HOHMESH_REQUIRE(halvings <= 3, ErrorKind::FoldedMesh,
                      "smoothing folds cell i=" + std::to_string(fold->first) + " j=" + std::to_string(fold->second) +
                          " after 3 relaxation halvings (sweep " + std::to_string(sweep) + ")");
      out.relaxation *= 0.5;
    }
    const double rel = detail::max_residual(block, ctl) / r0;
    out.residual_history.push_back(rel);
    out.sweeps = sweep;
    if (rel <= settings.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.block = std::move(block);
  return out;
}

/// Mean |90 deg - angle| between the wall tangent and the first grid line off the wall, in degrees.
inline double mean_wall_angle_deviation(const StructuredBlock& b) {
  const detail::Stencil st{b.ni, b.nj, b.wrap};
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = st.i_begin(); i < st.i_end(); ++i) {
    const Vec2 t = b(st.ip(i), 0) - b(st.im(i), 0);
    const Vec2 n = b(i, 1) - b(i, 0);
    const double ang = rad2deg(std::atan2(std::abs(cross(t, n)), dot(t, n)));
    sum += std::abs(90.0 - ang);
    ++count;
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

}  // namespace hohmesh
