#include <catch2/catch_amalgamated.hpp>

#include "hohmesh/pipeline.hpp"
#include "support.hpp"

using namespace hohmesh;

namespace {

const MeshResult& reference_mesh() {
  static const MeshResult r = [] {
    PipelineOptions opt;
    opt.smoother.max_sweeps = 300;
    return generate_mesh(testing::reference_condition(), testing::reference_params(), opt);
  }();
  return r;
}

}  // namespace

TEST_CASE("HOH topology", "[hmesh_assembler]") {
  const auto& mesh = reference_mesh().mesh;
  REQUIRE(mesh.blocks.size() == 3);
  CHECK(mesh.roles[0] == BlockRole::InletH);
  CHECK(mesh.roles[1] == BlockRole::O);
  CHECK(mesh.roles[2] == BlockRole::OutletH);
  CHECK(mesh.interfaces.size() == 2);
  const auto& o = mesh.o_block();
  std::size_t shared = 0;
  for (const auto& l : mesh.interfaces) shared += l.o_indices.size();
  std::size_t total = 0;
  for (const auto& b : mesh.blocks) total += b.ni * b.nj;
  CHECK(mesh.unique_node_count() == total - shared);
  CHECK(o.ni * o.nj < total);
}

TEST_CASE("interfaces and periodic rows match exactly", "[hmesh_assembler]") {
  const auto& mesh = reference_mesh().mesh;
  const auto w = check_watertight(mesh);
  CHECK(w.interfaces_bit_identical);
  CHECK(w.interface_gap == 0.0);
  CHECK(w.periodic_gap <= 1e-10 * testing::reference_condition().bsp.chord);
  for (std::size_t b = 0; b < mesh.blocks.size(); ++b) {
    if (mesh.roles[b] == BlockRole::O) continue;
    const auto& h = mesh.blocks[b];
    for (std::size_t i = 0; i < h.ni; ++i) {
      CHECK(h(i, h.nj - 1).x == h(i, 0).x);
      CHECK(h(i, h.nj - 1).y == Catch::Approx(h(i, 0).y + mesh.pitch).margin(1e-12));
    }
  }
}

TEST_CASE("H blocks are uniform rectangles", "[hmesh_assembler]") {
  const auto& mesh = reference_mesh().mesh;
  const double c = testing::reference_condition().bsp.chord;
  for (const auto& l : mesh.interfaces) {
    const auto& h = mesh.blocks[l.h_block];
    const std::size_t skip = l.h_column;
    const double dx = h(skip == 0 ? 2 : 1, 0).x - h(skip == 0 ? 1 : 0, 0).x;
    for (std::size_t j = 0; j < h.nj; ++j)
      for (std::size_t i = 0; i + 1 < h.ni; ++i) {
        if (i == skip || i + 1 == skip) continue;
        CHECK(std::abs(h(i + 1, j).x - h(i, j).x - dx) <= 1e-12 * c);
      }
    for (std::size_t j = 0; j + 1 < h.nj; ++j)
      for (std::size_t i = 0; i + 1 < h.ni; ++i) {
        if (i == skip || i + 1 == skip) continue;
        const auto a = interior_angles({h(i, j), h(i + 1, j), h(i + 1, j + 1), h(i, j + 1)});
        for (double deg : a) CHECK(std::abs(deg2rad(deg - 90.0)) <= 1e-9);
      }
  }
}

TEST_CASE("non-monotone interface nodes are rejected", "[hmesh_assembler]") {
  const auto cond = testing::reference_condition();
  const auto params = testing::reference_params();
  const auto profile = build_profile(cond.bsp, 1024);
  const auto boundary = build_boundary(cond, params, profile);
  const auto spec = ClusterSpec::from(cond, params);
  auto o = extrude_to_outer(distribute_surface_nodes(profile, spec), boundary, spec);
  const std::size_t a = (o.corner_bl + 1) % o.ni, b = (o.corner_bl + 2) % o.ni;
  std::swap(o(a, o.nj - 1), o(b, o.nj - 1));
  CHECK_THROWS_MATCHES(build_h_blocks(boundary, o), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.kind() == ErrorKind::InterfaceMismatch;
                       }));
}

TEST_CASE("zero-length inflow drops the inlet block", "[hmesh_assembler]") {
  auto cond = testing::reference_condition();
  cond.x_in = 0.0;
  PipelineOptions opt;
  opt.smooth = false;
  try {
    const auto r = generate_mesh(cond, testing::reference_params(), opt);
    CHECK(r.mesh.blocks.size() == 2);
    CHECK(r.mesh.roles.front() == BlockRole::O);
  } catch (const Error& e) {
    // A blade touching the inlet boundary may not extrude; that must be reported, not crash.
    CHECK(e.kind() != ErrorKind::InterfaceMismatch);
  }
}
