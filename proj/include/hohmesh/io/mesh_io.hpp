#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hohmesh/condition_space.hpp"
#include "hohmesh/core.hpp"
#include "hohmesh/hmesh_assembler.hpp"
#include "hohmesh/io/config.hpp"

namespace hohmesh::io {

inline constexpr const char* kToolVersion = "0.1.0";

/// What every written file records about its origin.
struct FileProvenance {
  std::string version = kToolVersion;
  std::uint64_t seed = 0;
  std::string condition_hash = "none";
};

inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// FNV-1a over the condition values printed with 17 significant digits.
inline std::string condition_hash(const PassageCondition& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (double v : condition_values(c)) {
    for (char ch : fmt17(v) + ";") {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline FileProvenance provenance_for(const MultiblockMesh& mesh, std::uint64_t seed) {
  FileProvenance p;
  p.seed = seed;
  if (mesh.provenance) p.condition_hash = condition_hash(mesh.provenance->cond);
  return p;
}

inline std::string roles_string(const std::vector<BlockRole>& roles) {
  std::string s;
  for (auto r : roles) s += (s.empty() ? "" : " ") + std::string(to_string(r));
  return s;
}

inline std::vector<BlockRole> parse_roles(const std::string& s) {
  std::vector<BlockRole> out;
  std::istringstream is(s);
  std::string w;
  while (is >> w) {
    if (w == "inlet-H") out.push_back(BlockRole::InletH);
    else if (w == "O") out.push_back(BlockRole::O);
    else if (w == "outlet-H") out.push_back(BlockRole::OutletH);
    else throw Error(ErrorKind::IoError, "unknown block role '" + w + "'");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Plot3D, 2-D multiblock ASCII: nblocks, ni nj per block, then per block all x
// then all y with i fastest. Leading '#' lines carry provenance.
// ---------------------------------------------------------------------------

inline void write_plot3d(std::ostream& os, const MultiblockMesh& mesh, const FileProvenance& prov) {
  os << "# hohmesh " << prov.version << '\n'
     << "# seed = " << prov.seed << '\n'
     << "# condition = " << prov.condition_hash << '\n'
     << "# pitch = " << fmt17(mesh.pitch) << '\n'
     << "# roles = " << roles_string(mesh.roles) << '\n';
  os << mesh.blocks.size() << '\n';
  for (const auto& b : mesh.blocks) os << b.ni << ' ' << b.nj << '\n';
  for (const auto& b : mesh.blocks) {
    for (int comp = 0; comp < 2; ++comp) {
      std::size_t col = 0;
      for (std::size_t j = 0; j < b.nj; ++j)
        for (std::size_t i = 0; i < b.ni; ++i) {
          os << fmt17(comp == 0 ? b(i, j).x : b(i, j).y) << (++col % 4 == 0 ? '\n' : ' ');
        }
      if (col % 4 != 0) os << '\n';
    }
  }
  HOHMESH_REQUIRE(os.good(), ErrorKind::IoError, "failed to write Plot3D data");
}

struct Plot3dFile {
  std::vector<StructuredBlock> blocks;  // coordinates only
  KeyValues header;                     // from '# key = value' lines
};

inline Plot3dFile read_plot3d(std::istream& is) {
  Plot3dFile f;
  std::string line;
  std::ostringstream body;
  while (std::getline(is, line)) {
    const auto t = trim(line);
    if (!t.empty() && t.front() == '#') {
      const auto eq = t.find('=');
      if (eq != std::string_view::npos)
        f.header[std::string(trim(t.substr(1, eq - 1)))] = std::string(trim(t.substr(eq + 1)));
      continue;
    }
    body << line << '\n';
  }
  std::istringstream in(body.str());
  std::size_t nb = 0;
  HOHMESH_REQUIRE(static_cast<bool>(in >> nb) && nb > 0 && nb < 1000, ErrorKind::IoError, "bad Plot3D block count");
  std::vector<std::pair<std::size_t, std::size_t>> dims(nb);
  for (auto& [ni, nj] : dims)
    HOHMESH_REQUIRE(static_cast<bool>(in >> ni >> nj) && ni > 0 && nj > 0, ErrorKind::IoError,
                    "bad Plot3D block dimensions");
  std::string tok;
  const auto next = [&] {
    HOHMESH_REQUIRE(static_cast<bool>(in >> tok), ErrorKind::IoError, "Plot3D file ends early");
    return parse_double(tok, "Plot3D coordinate");
  };
  for (const auto& [ni, nj] : dims) {
    StructuredBlock b(ni, nj);
    for (std::size_t j = 0; j < nj; ++j)
      for (std::size_t i = 0; i < ni; ++i) b(i, j).x = next();
    for (std::size_t j = 0; j < nj; ++j)
      for (std::size_t i = 0; i < ni; ++i) b(i, j).y = next();
    f.blocks.push_back(std::move(b));
  }
  return f;
}

/// Rebuilds connectivity from coordinates: the O block wraps in i, interface
/// links join H columns to O outer nodes with identical coordinates, and O
/// outer nodes one pitch apart in y form periodic pairs.
inline MultiblockMesh reconstruct_mesh(std::vector<StructuredBlock> blocks, std::vector<BlockRole> roles,
                                       double pitch) {
  HOHMESH_REQUIRE(blocks.size() == roles.size(), ErrorKind::IoError, "block and role counts differ");
  MultiblockMesh mesh;
  mesh.pitch = pitch;
  mesh.blocks = std::move(blocks);
  mesh.roles = std::move(roles);
  const std::size_t oi = mesh.o_index();
  StructuredBlock& o = mesh.blocks[oi];
  o.wrap = true;
  o.pitch = pitch;
  const std::size_t top = o.nj - 1;
  std::map<std::pair<double, double>, std::size_t> outer;
  for (std::size_t i = 0; i < o.ni; ++i) outer[{o(i, top).x, o(i, top).y}] = i;

  for (std::size_t b = 0; b < mesh.blocks.size(); ++b) {
    if (b == oi) continue;
    StructuredBlock& h = mesh.blocks[b];
    h.pitch = pitch;
    for (std::size_t i = 0; i < h.ni; ++i) h.periodic_pairs.push_back({i, i});
    for (std::size_t col : {std::size_t{0}, h.ni - 1}) {
      InterfaceLink link{b, col, {}};
      for (std::size_t j = 0; j < h.nj; ++j) {
        const auto it = outer.find({h(col, j).x, h(col, j).y});
        if (it == outer.end()) break;
        link.o_indices.push_back(it->second);
      }
      if (link.o_indices.size() == h.nj) {
        mesh.interfaces.push_back(std::move(link));
        break;
      }
    }
  }
  const double tol = 1e-10 * std::max(1.0, std::abs(pitch));
  for (std::size_t lo = 0; lo < o.ni; ++lo) {
    const Vec2 target = o(lo, top) + Vec2{0.0, pitch};
    for (std::size_t up = 0; up < o.ni; ++up)
      if (norm(o(up, top) - target) <= tol) {
        o.periodic_pairs.push_back({lo, up});
        break;
      }
  }
  return mesh;
}

inline MultiblockMesh read_plot3d_mesh(const std::filesystem::path& path) {
  std::ifstream is(path);
  HOHMESH_REQUIRE(is.good(), ErrorKind::IoError, "cannot open " + path.string());
  Plot3dFile f = read_plot3d(is);
  const auto pitch_it = f.header.find("pitch");
  const auto roles_it = f.header.find("roles");
  HOHMESH_REQUIRE(pitch_it != f.header.end() && roles_it != f.header.end(), ErrorKind::IoError,
                  path.string() + ": missing '# pitch' or '# roles' header line");
  return reconstruct_mesh(std::move(f.blocks), parse_roles(roles_it->second),
                          parse_double(pitch_it->second, "pitch"));
}

// ---------------------------------------------------------------------------
// Legacy VTK, ASCII structured grid, one file per block; the title line
// carries provenance. A .vtm index lists the block files.
// ---------------------------------------------------------------------------

inline void write_vtk_block(std::ostream& os, const StructuredBlock& b, const std::string& title) {
  os << "# vtk DataFile Version 3.0\n" << title.substr(0, 255) << "\nASCII\nDATASET STRUCTURED_GRID\n";
  os << "DIMENSIONS " << b.ni << ' ' << b.nj << " 1\n";
  os << "POINTS " << b.ni * b.nj << " double\n";
  for (std::size_t j = 0; j < b.nj; ++j)
    for (std::size_t i = 0; i < b.ni; ++i) os << fmt17(b(i, j).x) << ' ' << fmt17(b(i, j).y) << " 0\n";
  HOHMESH_REQUIRE(os.good(), ErrorKind::IoError, "failed to write VTK data");
}

/// Writes <stem>_<k>.vtk per block and <stem>.vtm; returns the written paths, index last.
inline std::vector<std::filesystem::path> write_vtk(const std::filesystem::path& dir, const std::string& stem,
                                                    const MultiblockMesh& mesh, const FileProvenance& prov) {
  std::vector<std::filesystem::path> out;
  std::ostringstream index;
  index << "<?xml version=\"1.0\"?>\n<!-- hohmesh " << prov.version << " seed=" << prov.seed
        << " condition=" << prov.condition_hash << " pitch=" << fmt17(mesh.pitch) << " -->\n"
        << "<VTKFile type=\"vtkMultiBlockDataSet\" version=\"1.0\">\n  <vtkMultiBlockDataSet>\n";
  for (std::size_t k = 0; k < mesh.blocks.size(); ++k) {
    const std::string name = stem + "_" + std::to_string(k) + ".vtk";
    const auto path = dir / name;
    std::ofstream os(path);
    HOHMESH_REQUIRE(os.good(), ErrorKind::IoError, "cannot write " + path.string());
    write_vtk_block(os, mesh.blocks[k],
                    "hohmesh " + prov.version + " seed=" + std::to_string(prov.seed) +
                        " condition=" + prov.condition_hash + " pitch=" + fmt17(mesh.pitch) +
                        " role=" + to_string(mesh.roles[k]));
    out.push_back(path);
    index << "    <DataSet index=\"" << k << "\" name=\"" << to_string(mesh.roles[k]) << "\" file=\"" << name
          << "\"/>\n";
  }
  index << "  </vtkMultiBlockDataSet>\n</VTKFile>\n";
  const auto ipath = dir / (stem + ".vtm");
  std::ofstream is(ipath);
  HOHMESH_REQUIRE(is.good(), ErrorKind::IoError, "cannot write " + ipath.string());
  is << index.str();
  out.push_back(ipath);
  return out;
}

inline void write_plot3d_file(const std::filesystem::path& path, const MultiblockMesh& mesh,
                              const FileProvenance& prov) {
  std::ofstream os(path);
  HOHMESH_REQUIRE(os.good(), ErrorKind::IoError, "cannot write " + path.string());
  write_plot3d(os, mesh, prov);
}

}  // namespace hohmesh::io
