#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hohmesh/core.hpp"
#include "hohmesh/omesh_init.hpp"
#include "hohmesh/passage_domain.hpp"

namespace hohmesh {

enum class BlockRole { InletH, O, OutletH };

inline const char* to_string(BlockRole r) {
  switch (r) {
    case BlockRole::InletH: return "inlet-H";
    case BlockRole::O: return "O";
    case BlockRole::OutletH: return "outlet-H";
  }
  return "?";
}

/// H-block column `h_column` node j coincides with O outer-ring node o_indices[j].
struct InterfaceLink {
  std::size_t h_block = 0;
  std::size_t h_column = 0;
  std::vector<std::size_t> o_indices;
};

struct Provenance {
  PassageCondition cond;
  MeshingParams params;
};

struct MultiblockMesh {
  std::vector<StructuredBlock> blocks;
  std::vector<BlockRole> roles;
  std::vector<InterfaceLink> interfaces;
  double pitch = 0.0;
  std::optional<Provenance> provenance;

  std::size_t o_index() const {
    for (std::size_t b = 0; b < roles.size(); ++b)
      if (roles[b] == BlockRole::O) return b;
    throw Error(ErrorKind::InvalidMesh, "mesh has no O block");
  }
  const StructuredBlock& o_block() const { return blocks[o_index()]; }

  std::size_t unique_node_count() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.ni * b.nj;
    for (const auto& l : interfaces) n -= l.o_indices.size();
    return n;
  }
};

/// Median distance between the O outer ring and the ring inside it over a set of outer nodes.
inline double median_normal_spacing(const StructuredBlock& o, const std::vector<std::size_t>& outer_nodes) {
  std::vector<double> h;
  h.reserve(outer_nodes.size());
  for (std::size_t i : outer_nodes) h.push_back(norm(o(i, o.nj - 1) - o(i, o.nj - 2)));
  const auto mid = h.begin() + static_cast<std::ptrdiff_t>(h.size() / 2);
  std::nth_element(h.begin(), mid, h.end());
  if (h.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(h.begin(), mid);
  return 0.5 * (lower + upper);
}

/// Uniform columns between x0 and x1 whose rows follow the O interface nodes.
/// The interface column (first or last) copies the O coordinates bit for bit.
inline StructuredBlock make_h_block(const StructuredBlock& o, const std::vector<std::size_t>& iface, double x0,
                                    double x1, bool interface_on_right, std::size_t n_cells, double pitch) {
  StructuredBlock h(n_cells + 1, iface.size());
  h.pitch = pitch;
  const std::size_t if_col = interface_on_right ? n_cells : 0;
  for (std::size_t j = 0; j < iface.size(); ++j) {
    const Vec2 p = o(iface[j], o.nj - 1);
    for (std::size_t i = 0; i <= n_cells; ++i) {
      if (i == if_col) {
        h(i, j) = p;
        continue;
      }
      const double x = i == 0 ? x0 : (i == n_cells ? x1 : x0 + (x1 - x0) * static_cast<double>(i) / n_cells);
      h(i, j) = {x, p.y};
    }
  }
  for (std::size_t i = 0; i <= n_cells; ++i) h.periodic_pairs.push_back({i, i});
  return h;
}

namespace detail {

inline std::vector<std::size_t> walk_ring(std::size_t from, std::size_t to, std::size_t n, int step) {
  std::vector<std::size_t> out{from};
  for (std::size_t i = from; i != to;) {
    i = step > 0 ? (i + 1) % n : (i + n - 1) % n;
    out.push_back(i);
  }
  return out;
}

inline void require_monotone_y(const StructuredBlock& o, const std::vector<std::size_t>& nodes, const char* which) {
  for (std::size_t k = 1; k < nodes.size(); ++k)
    HOHMESH_REQUIRE(o(nodes[k], o.nj - 1).y > o(nodes[k - 1], o.nj - 1).y, ErrorKind::InterfaceMismatch,
                    std::string(which) + " interface nodes are not strictly increasing in y");
}

}  // namespace detail

/// Adds inlet and outlet H blocks to a smoothed O block. Zero-width blocks are omitted.
inline MultiblockMesh build_h_blocks(const PassageBoundary& boundary, StructuredBlock omesh) {
  MultiblockMesh mesh;
  mesh.pitch = boundary.pitch;
  const std::size_t n = omesh.ni;
  // Inlet interface runs clockwise BL -> TL (upward); outlet interface runs TR -> BR
  // clockwise, so walk it backwards from BR to get increasing y.
  const auto inlet_nodes = detail::walk_ring(omesh.corner_bl, omesh.corner_tl, n, +1);
  const auto outlet_nodes = detail::walk_ring(omesh.corner_br, omesh.corner_tr, n, -1);

  const double w_in = boundary.x_if_in - boundary.x_start;
  const double w_out = boundary.x_end - boundary.x_if_out;

  std::optional<StructuredBlock> inlet, outlet;
  if (w_in > 0.0) {
    detail::require_monotone_y(omesh, inlet_nodes, "inlet");
    const double h = median_normal_spacing(omesh, inlet_nodes);
    const auto cells = static_cast<std::size_t>(std::max(2.0, std::round(w_in / h)));
    inlet = make_h_block(omesh, inlet_nodes, boundary.x_start, boundary.x_if_in, true, cells, boundary.pitch);
  }
  if (w_out > 0.0) {
    detail::require_monotone_y(omesh, outlet_nodes, "outlet");
    const double h = median_normal_spacing(omesh, outlet_nodes);
    const auto cells = static_cast<std::size_t>(std::max(2.0, std::round(w_out / h)));
    outlet = make_h_block(omesh, outlet_nodes, boundary.x_if_out, boundary.x_end, false, cells, boundary.pitch);
  }

  if (inlet) {
    mesh.interfaces.push_back({mesh.blocks.size(), inlet->ni - 1, inlet_nodes});
    mesh.blocks.push_back(std::move(*inlet));
    mesh.roles.push_back(BlockRole::InletH);
  }
  mesh.blocks.push_back(std::move(omesh));
  mesh.roles.push_back(BlockRole::O);
  if (outlet) {
    mesh.interfaces.push_back({mesh.blocks.size(), 0, outlet_nodes});
    mesh.blocks.push_back(std::move(*outlet));
    mesh.roles.push_back(BlockRole::OutletH);
  }
  return mesh;
}

/// Largest deviation from exact interface and periodic matching, as
/// (interface mismatch, periodic mismatch). Interface mismatch is 0 only when
/// shared nodes are bit-identical.
struct Watertightness {
  double interface_gap = 0.0;
  double periodic_gap = 0.0;
  bool interfaces_bit_identical = true;
};

inline Watertightness check_watertight(const MultiblockMesh& mesh) {
  Watertightness w;
  const StructuredBlock& o = mesh.o_block();
  for (const auto& link : mesh.interfaces) {
    const StructuredBlock& h = mesh.blocks[link.h_block];
    for (std::size_t j = 0; j < link.o_indices.size(); ++j) {
      const Vec2 a = h(link.h_column, j);
      const Vec2 b = o(link.o_indices[j], o.nj - 1);
      if (!(a == b)) w.interfaces_bit_identical = false;
      w.interface_gap = std::max(w.interface_gap, norm(a - b));
    }
  }
  for (std::size_t b = 0; b < mesh.blocks.size(); ++b) {
    const StructuredBlock& blk = mesh.blocks[b];
    const bool is_o = mesh.roles[b] == BlockRole::O;
    for (const auto& [lo, up] : blk.periodic_pairs) {
      const Vec2 p = is_o ? blk(lo, blk.nj - 1) : blk(lo, 0);
      const Vec2 q = is_o ? blk(up, blk.nj - 1) : blk(up, blk.nj - 1);
      w.periodic_gap = std::max(w.periodic_gap, norm(q - (p + Vec2{0.0, mesh.pitch})));
    }
  }
  return w;
}

}  // namespace hohmesh
