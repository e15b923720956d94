#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hohmesh/core.hpp"
#include "hohmesh/hmesh_assembler.hpp"
#include "hohmesh/omesh_init.hpp"

namespace hohmesh {

struct CellIndex {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

struct QualityReport {
  double qj_min = 0.0;
  double qj_avg = 0.0;
  double qs_min = 0.0;
  double qs_avg = 0.0;
  double q = 0.0;
  CellIndex worst_qj_cell;
  CellIndex worst_qs_cell;
  std::optional<Grid2D<double>> qj_cells;
  std::optional<Grid2D<double>> qs_cells;
};

/// Combined score: the mean of the two minima and the two averages.
inline double combine_quality(double qj_min, double qj_avg, double qs_min, double qs_avg) {
  return (qj_min + qj_avg + qs_min + qs_avg) / 4.0;
}

using OuterGhosts = std::vector<std::optional<Vec2>>;

/// Neighbor of each O outer-ring node across the outer loop: the adjacent H
/// column at interfaces (also at corners), else the partner of a periodic pair
/// one ring inside, shifted by the pitch.
inline OuterGhosts outer_ghosts(const MultiblockMesh& mesh) {
  const StructuredBlock& o = mesh.o_block();
  OuterGhosts g(o.ni);
  for (const auto& link : mesh.interfaces) {
    const StructuredBlock& h = mesh.blocks[link.h_block];
    if (h.ni < 2) continue;
    const std::size_t col = link.h_column + 1 == h.ni ? link.h_column - 1 : link.h_column + 1;
    for (std::size_t j = 0; j < link.o_indices.size(); ++j) g[link.o_indices[j]] = h(col, j);
  }
  const Vec2 shift{0.0, mesh.pitch};
  for (const auto& [lo, up] : o.periodic_pairs) {
    if (!g[lo]) g[lo] = o(up, o.nj - 2) - shift;
    if (!g[up]) g[up] = o(lo, o.nj - 2) + shift;
  }
  return g;
}

/// Nodal Jacobian determinant x_xi y_eta - x_eta y_xi by centered differences,
/// i.e. the area spanned by the node's four neighbours. Where a neighbour is
/// missing (the wall, an outer row without a ghost, the ends of an unwrapped
/// block) the node itself stands in for it, which clips that area at the
/// boundary. A second-order one-sided stencil there shrinks toward zero and
/// below on a layer growing by 3x or more, although no cell is folded.
inline Grid2D<double> node_jacobians(const StructuredBlock& b, const OuterGhosts& ghosts = {}) {
  HOHMESH_REQUIRE(b.ni >= 3 && b.nj >= 3, ErrorKind::InvalidMesh, "block too small for Jacobians");
  Grid2D<double> jac(b.ni, b.nj);
  const std::size_t m = b.nj - 1;
  for (std::size_t j = 0; j < b.nj; ++j) {
    for (std::size_t i = 0; i < b.ni; ++i) {
      Vec2 rxi;
      if (b.wrap) rxi = 0.5 * (b((i + 1) % b.ni, j) - b((i + b.ni - 1) % b.ni, j));
      else if (i == 0) rxi = b(1, j) - b(0, j);
      else if (i + 1 == b.ni) rxi = b(i, j) - b(i - 1, j);
      else rxi = 0.5 * (b(i + 1, j) - b(i - 1, j));
      Vec2 reta;
      if (j == 0) reta = b(i, 1) - b(i, 0);
      else if (j < m) reta = 0.5 * (b(i, j + 1) - b(i, j - 1));
      else if (i < ghosts.size() && ghosts[i]) reta = 0.5 * (*ghosts[i] - b(i, m - 1));
      else reta = b(i, m) - b(i, m - 1);
      jac(i, j) = cross(rxi, reta);
    }
  }
  return jac;
}

/// Ratio of the smallest to the largest corner Jacobian of each cell.
inline Grid2D<double> qj_per_cell(const Grid2D<double>& jac, bool wrap) {
  const std::size_t ni = jac.ni(), nj = jac.nj();
  const std::size_t ci = wrap ? ni : ni - 1;
  Grid2D<double> q(ci, nj - 1);
  for (std::size_t j = 0; j + 1 < nj; ++j)
    for (std::size_t i = 0; i < ci; ++i) {
      const std::size_t ip = wrap ? (i + 1) % ni : i + 1;
      const double c[4] = {jac(i, j), jac(ip, j), jac(ip, j + 1), jac(i, j + 1)};
      const double lo = *std::min_element(c, c + 4);
      const double hi = *std::max_element(c, c + 4);
      q(i, j) = hi > 0.0 ? lo / hi : -std::numeric_limits<double>::infinity();
    }
  return q;
}

/// Interior angles (degrees, in [0, 360)) of quad p0 p1 p2 p3, counterclockwise.
inline std::array<double, 4> interior_angles(const std::array<Vec2, 4>& p) {
  std::array<double, 4> a{};
  for (std::size_t k = 0; k < 4; ++k) {
    const Vec2 to_next = p[(k + 1) % 4] - p[k];
    const Vec2 to_prev = p[(k + 3) % 4] - p[k];
    HOHMESH_REQUIRE(!(to_next == Vec2{}) && !(to_prev == Vec2{}), ErrorKind::DegenerateCell, "zero-length cell edge");
    double deg = rad2deg(std::atan2(cross(to_next, to_prev), dot(to_next, to_prev)));
    if (deg < 0.0) deg += 360.0;
    a[k] = deg;
  }
  return a;
}

inline double skewness_quality(const std::array<Vec2, 4>& p) {
  const auto a = interior_angles(p);
  const double lo = *std::min_element(a.begin(), a.end());
  const double hi = *std::max_element(a.begin(), a.end());
  return 1.0 - std::max((90.0 - lo) / 90.0, (hi - 90.0) / 90.0);
}

inline Grid2D<double> qs_per_cell(const StructuredBlock& b) {
  const std::size_t ci = b.wrap ? b.ni : b.ni - 1;
  Grid2D<double> q(ci, b.nj - 1);
  for (std::size_t j = 0; j + 1 < b.nj; ++j)
    for (std::size_t i = 0; i < ci; ++i) {
      const std::size_t ip = b.wrap ? (i + 1) % b.ni : i + 1;
      q(i, j) = skewness_quality({b(i, j), b(ip, j), b(ip, j + 1), b(i, j + 1)});
    }
  return q;
}

inline QualityReport aggregate(const Grid2D<double>& qj, const Grid2D<double>& qs, bool keep_cells = false) {
  HOHMESH_REQUIRE(!qj.empty() && qj.ni() == qs.ni() && qj.nj() == qs.nj(), ErrorKind::DimensionMismatch,
                  "quality grids must be non-empty and equally sized");
  QualityReport r;
  r.qj_min = std::numeric_limits<double>::infinity();
  r.qs_min = std::numeric_limits<double>::infinity();
  double sj = 0.0, ss = 0.0;
  for (std::size_t j = 0; j < qj.nj(); ++j)
    for (std::size_t i = 0; i < qj.ni(); ++i) {
      const double a = qj(i, j), s = qs(i, j);
      sj += a;
      ss += s;
      if (a < r.qj_min) {
        r.qj_min = a;
        r.worst_qj_cell = {i, j};
      }
      if (s < r.qs_min) {
        r.qs_min = s;
        r.worst_qs_cell = {i, j};
      }
    }
  const auto count = static_cast<double>(qj.size());
  r.qj_avg = sj / count;
  r.qs_avg = ss / count;
  r.q = combine_quality(r.qj_min, r.qj_avg, r.qs_min, r.qs_avg);
  if (keep_cells) {
    r.qj_cells = qj;
    r.qs_cells = qs;
  }
  return r;
}

/// Quality of a single block with explicitly supplied outer ghosts.
inline QualityReport evaluate_block(const StructuredBlock& o, const OuterGhosts& ghosts, bool keep_cells = false) {
  return aggregate(qj_per_cell(node_jacobians(o, ghosts), o.wrap), qs_per_cell(o), keep_cells);
}

/// Quality over the O-block cells of a multiblock mesh.
inline QualityReport evaluate(const MultiblockMesh& mesh, bool keep_cells = false) {
  return evaluate_block(mesh.o_block(), outer_ghosts(mesh), keep_cells);
}

inline std::string to_key_value(const QualityReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "qj_min = " << r.qj_min << '\n'
     << "qj_avg = " << r.qj_avg << '\n'
     << "qs_min = " << r.qs_min << '\n'
     << "qs_avg = " << r.qs_avg << '\n'
     << "q = " << r.q << '\n'
     << "worst_qj_cell = " << r.worst_qj_cell.i << ' ' << r.worst_qj_cell.j << '\n'
     << "worst_qs_cell = " << r.worst_qs_cell.i << ' ' << r.worst_qs_cell.j << '\n';
  return os.str();
}

inline nlohmann::json to_json(const QualityReport& r) {
  const auto finite_or_null = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  return {{"qj_min", finite_or_null(r.qj_min)},
          {"qj_avg", finite_or_null(r.qj_avg)},
          {"qs_min", finite_or_null(r.qs_min)},
          {"qs_avg", finite_or_null(r.qs_avg)},
          {"q", finite_or_null(r.q)},
          {"worst_qj_cell", {r.worst_qj_cell.i, r.worst_qj_cell.j}},
          {"worst_qs_cell", {r.worst_qs_cell.i, r.worst_qs_cell.j}}};
}

}  // namespace hohmesh
