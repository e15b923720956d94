#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hohmesh/mesh_quality.hpp"
#include "hohmesh/pipeline.hpp"
#include "support.hpp"

using namespace hohmesh;

namespace {

// Independent recomputation: twice the area of the quadrilateral through the
// four neighbours, clamped to the block, divided by the index steps spanned.
double brute_jacobian(const StructuredBlock& b, std::size_t i, std::size_t j) {
  const long I = static_cast<long>(i), J = static_cast<long>(j);
  const long ni = static_cast<long>(b.ni), nj = static_cast<long>(b.nj);
  const long e = std::min(I + 1, ni - 1), w = std::max(I - 1, 0L);
  const long n = std::min(J + 1, nj - 1), s = std::max(J - 1, 0L);
  const auto at = [&](long ii, long jj) { return b(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)); };
  // Shoelace over W(I) S(J) E(I) N(J) with the node standing in for clipped neighbours.
  const Vec2 q[4] = {at(w, J), at(I, s), at(e, J), at(I, n)};
  double twice = 0.0;
  for (int k = 0; k < 4; ++k) twice += q[k].x * q[(k + 1) % 4].y - q[(k + 1) % 4].x * q[k].y;
  return twice / static_cast<double>((e - w) * (n - s));
}

double brute_skew(const std::array<Vec2, 4>& p) {
  double lo = 360.0, hi = 0.0;
  for (int k = 0; k < 4; ++k) {
    const Vec2 a = p[(k + 1) % 4] - p[k], c = p[(k + 3) % 4] - p[k];
    double ang = std::acos(std::clamp(dot(a, c) / (norm(a) * norm(c)), -1.0, 1.0)) * 180.0 / kPi;
    lo = std::min(lo, ang);
    hi = std::max(hi, ang);
  }
  return 1.0 - std::max((90.0 - lo) / 90.0, (hi - 90.0) / 90.0);
}

StructuredBlock random_block(std::uint64_t seed) {
  auto b = testing::uniform_block(7, 6, 1.0, 1.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (auto& p : b.coords.values()) p += Vec2{u(rng), u(rng)};
  return b;
}

void check_same(const QualityReport& a, const QualityReport& b, double tol) {
  CHECK(std::abs(a.qj_min - b.qj_min) <= tol);
  CHECK(std::abs(a.qj_avg - b.qj_avg) <= tol);
  CHECK(std::abs(a.qs_min - b.qs_min) <= tol);
  CHECK(std::abs(a.qs_avg - b.qs_avg) <= tol);
  CHECK(std::abs(a.q - b.q) <= tol);
}

}  // namespace

TEST_CASE("uniform Cartesian block scores one", "[mesh_quality]") {
  const auto r = evaluate_block(testing::uniform_block(12, 9, 0.25, 0.5), {});
  CHECK(r.qj_min == 1.0);
  CHECK(r.qj_avg == 1.0);
  CHECK(r.qs_min == 1.0);
  CHECK(r.qs_avg == 1.0);
  CHECK(r.q == 1.0);
}

TEST_CASE("combined score is the mean of four terms", "[mesh_quality]") {
  CHECK(combine_quality(0.62, 0.92, 0.37, 0.83) == Catch::Approx(0.685).margin(1e-12));
  CHECK(combine_quality(0.58, 0.91, 0.47, 0.83) == Catch::Approx(0.6975).margin(1e-12));
  CHECK(combine_quality(0.62, 0.90, 0.47, 0.86) == Catch::Approx(0.7125).margin(1e-12));
  const auto r = evaluate_block(random_block(3), {});
  CHECK(r.q == (r.qj_min + r.qj_avg + r.qs_min + r.qs_avg) / 4.0);
}

TEST_CASE("skewness spot values", "[mesh_quality]") {
  CHECK(skewness_quality({Vec2{0, 0}, {1, 0}, {1, 1}, {0, 1}}) == 1.0);
  CHECK(skewness_quality({Vec2{0, 0}, {1, 0}, {2, 1}, {1, 1}}) == Catch::Approx(0.5).margin(1e-12));
  // Right angles at the base, 60 and 120 degrees on top.
  const double h = 1.0, top = 1.0 / std::tan(deg2rad(60.0));
  CHECK(skewness_quality({Vec2{0, 0}, {2, 0}, {2, h}, {top, h}}) == Catch::Approx(2.0 / 3.0).margin(1e-12));
  CHECK_THROWS_MATCHES(skewness_quality({Vec2{0, 0}, {0, 0}, {1, 1}, {0, 1}}), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return e.kind() == ErrorKind::DegenerateCell; }));
}

TEST_CASE("jacobians are local to their stencil", "[mesh_quality]") {
  auto b = testing::uniform_block(9, 9, 0.5, 0.5);
  const auto before = node_jacobians(b);
  b(4, 4) += Vec2{0.1, -0.07};
  const auto after = node_jacobians(b);
  for (std::size_t j = 0; j < b.nj; ++j)
    for (std::size_t i = 0; i < b.ni; ++i) {
      const bool neighbor = (i == 4 && (j == 3 || j == 5)) || (j == 4 && (i == 3 || i == 5));
      if (neighbor) CHECK(after(i, j) != before(i, j));
      else CHECK(after(i, j) == before(i, j));
    }
}

TEST_CASE("metrics match a brute-force recomputation", "[mesh_quality]") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const auto b = random_block(seed);
    const auto jac = node_jacobians(b);
    const auto r = evaluate_block(b, {}, true);
    for (std::size_t j = 0; j + 1 < b.nj; ++j)
      for (std::size_t i = 0; i + 1 < b.ni; ++i) {
        const double c[4] = {brute_jacobian(b, i, j), brute_jacobian(b, i + 1, j), brute_jacobian(b, i + 1, j + 1),
                             brute_jacobian(b, i, j + 1)};
        CHECK(jac(i, j) == Catch::Approx(c[0]).margin(1e-13));
        const double qj = *std::min_element(c, c + 4) / *std::max_element(c, c + 4);
        CHECK((*r.qj_cells)(i, j) == Catch::Approx(qj).margin(1e-12));
        CHECK((*r.qs_cells)(i, j) == Catch::Approx(brute_skew({b(i, j), b(i + 1, j), b(i + 1, j + 1), b(i, j + 1)})).margin(1e-10));
      }
  }
}

TEST_CASE("metrics ignore scale and rotation", "[mesh_quality]") {
  const auto b = random_block(11);
  const auto ref = evaluate_block(b, {});
  check_same(ref, evaluate_block(testing::transformed(b, 37.5, 0.0, {}), {}), 1e-12);
  check_same(ref, evaluate_block(testing::transformed(b, 1.0, 0.83, {2.0, -1.0}), {}), 1e-10);
}

TEST_CASE("per-cell ranges on an unfolded grid", "[mesh_quality]") {
  const auto r = evaluate_block(random_block(5), {}, true);
  for (double q : r.qj_cells->values()) {
    CHECK(q > 0.0);
    CHECK(q <= 1.0);
  }
  for (double q : r.qs_cells->values()) {
    CHECK(q >= 0.0);
    CHECK(q <= 1.0);
  }
}

TEST_CASE("a zero jacobian maximum is flagged", "[mesh_quality]") {
  Grid2D<double> jac(3, 3, 0.0);
  const auto q = qj_per_cell(jac, false);
  CHECK(std::isinf(q(0, 0)));
  CHECK(q(0, 0) < 0.0);
}

TEST_CASE("H blocks only enter through the ghost row", "[mesh_quality]") {
  PipelineOptions opt;
  opt.smoother.max_sweeps = 100;
  const auto r = generate_mesh(testing::reference_condition(), testing::reference_params(), opt);
  const auto ghosts = outer_ghosts(r.mesh);
  MultiblockMesh o_only;
  o_only.blocks = {r.mesh.o_block()};
  o_only.roles = {BlockRole::O};
  o_only.pitch = r.mesh.pitch;
  const auto a = evaluate(r.mesh);
  const auto b = evaluate_block(o_only.o_block(), ghosts);
  CHECK(a.q == b.q);
  CHECK(a.qj_min == b.qj_min);
  CHECK(a.qs_avg == b.qs_avg);
}

TEST_CASE("reports serialize", "[mesh_quality]") {
  const auto r = evaluate_block(testing::uniform_block(4, 4), {});
  CHECK(to_key_value(r).find("q = 1\n") != std::string::npos);
  CHECK(to_json(r)["q"].get<double>() == 1.0);
}
