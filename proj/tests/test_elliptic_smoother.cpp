#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hohmesh/elliptic_smoother.hpp"
#include "hohmesh/pipeline.hpp"
#include "support.hpp"

using namespace hohmesh;

namespace {

double max_deviation(const StructuredBlock& a, const StructuredBlock& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.nj; ++j)
    for (std::size_t i = 0; i < a.ni; ++i) d = std::max(d, norm(a(i, j) - b(i, j)));
  return d;
}

StructuredBlock perturbed(const StructuredBlock& base, double amplitude, std::uint64_t seed) {
  StructuredBlock b = base;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  for (std::size_t j = 1; j + 1 < b.nj; ++j)
    for (std::size_t i = 1; i + 1 < b.ni; ++i) b(i, j) += Vec2{u(rng), u(rng)};
  return b;
}

StructuredBlock reference_initial_block() {
  const auto cond = testing::reference_condition();
  const auto params = testing::reference_params();
  const auto profile = build_profile(cond.bsp, 1024);
  const auto boundary = build_boundary(cond, params, profile);
  const auto spec = ClusterSpec::from(cond, params);
  return extrude_to_outer(distribute_surface_nodes(profile, spec), boundary, spec);
}

}  // namespace

TEST_CASE("a uniform rectangle is a fixed point", "[elliptic_smoother]") {
  const auto b = testing::uniform_block(21, 17, 0.25, 0.5);
  SmootherSettings s;
  s.use_controls = false;
  const auto r = smooth(b, s);
  CHECK(r.converged);
  CHECK(max_deviation(r.block, b) <= 1e-14);
}

TEST_CASE("a perturbed rectangle relaxes back to uniform", "[elliptic_smoother]") {
  const auto base = testing::uniform_block(41, 41, 0.025, 0.025);
  const auto start = perturbed(base, 0.008, 7);
  SmootherSettings s;
  s.use_controls = false;
  s.tolerance = 1e-13;
  const auto r = smooth(start, s);
  CHECK(r.sweeps <= 2000);
  CHECK(max_deviation(r.block, base) <= 1e-8);
  SECTION("boundary nodes are untouched") {
    for (std::size_t i = 0; i < start.ni; ++i) {
      CHECK(r.block(i, 0) == start(i, 0));
      CHECK(r.block(i, start.nj - 1) == start(i, start.nj - 1));
    }
    for (std::size_t j = 0; j < start.nj; ++j) {
      CHECK(r.block(0, j) == start(0, j));
      CHECK(r.block(start.ni - 1, j) == start(start.ni - 1, j));
    }
  }
}

TEST_CASE("polar grid controls are purely radial", "[elliptic_smoother]") {
  const auto b = testing::polar_block(64, 20, 1.0, 1.15, 0.01);
  const auto bc = boundary_controls(b);
  double p1 = 0.0, p2 = 0.0;
  for (std::size_t i = 0; i < b.ni; ++i) {
    p1 = std::max({p1, std::abs(bc.p1_wall[i]), std::abs(bc.p1_outer[i])});
    p2 = std::max(p2, std::abs(bc.p2_wall[i]));
  }
  CHECK(p1 <= 1e-8);
  CHECK(p2 > 1e-3);
}

TEST_CASE("interior controls follow the cubic blend exactly", "[elliptic_smoother]") {
  const auto b = testing::polar_block(48, 15, 1.0, 1.2, 0.02);
  const auto bc = boundary_controls(b);
  const auto f = blend_controls(bc, b.ni, b.nj);
  for (std::size_t j = 0; j < b.nj; ++j) {
    const double eta = static_cast<double>(j) / static_cast<double>(b.nj - 1);
    for (std::size_t i = 0; i < b.ni; ++i) {
      CHECK(f.p1(i, j) == bc.p1_wall[i] * std::pow(1.0 - eta, 3) + bc.p1_outer[i] * std::pow(eta, 3));
      CHECK(f.p2(i, j) == bc.p2_wall[i] * std::pow(1.0 - eta, 3) + bc.p2_outer[i] * std::pow(eta, 3));
    }
  }
}

TEST_CASE("stored controls of a smoothing run satisfy the blend", "[elliptic_smoother]") {
  SmootherSettings s;
  s.max_sweeps = 40;
  const auto r = smooth(reference_initial_block(), s);
  const auto& f = r.controls;
  const std::size_t nj = f.p1.nj(), m = nj - 1;
  for (std::size_t j = 1; j < m; ++j) {
    const double eta = static_cast<double>(j) / static_cast<double>(m);
    for (std::size_t i = 0; i < f.p1.ni(); i += 7)
      CHECK(f.p1(i, j) == f.p1(i, 0) * std::pow(1.0 - eta, 3) + f.p1(i, m) * std::pow(eta, 3));
  }
}

TEST_CASE("smoothing the reference blade", "[elliptic_smoother]") {
  const auto initial = reference_initial_block();
  SmootherSettings s;
  s.max_sweeps = 600;
  const auto r = smooth(initial, s);

  SECTION("wall and outer rows are Dirichlet") {
    for (std::size_t i = 0; i < initial.ni; ++i) {
      CHECK(r.block(i, 0) == initial(i, 0));
      CHECK(r.block(i, initial.nj - 1) == initial(i, initial.nj - 1));
    }
  }
  SECTION("wall orthogonality improves") {
    CHECK(mean_wall_angle_deviation(r.block) <= mean_wall_angle_deviation(initial));
  }
  SECTION("no folds") { CHECK_FALSE(detail::first_fold(r.block).has_value()); }
  SECTION("residual decreases across refresh cycles once the controls settle") {
    const auto& h = r.residual_history;
    REQUIRE(h.size() >= 400);
    for (std::size_t k = 300; k + 10 < h.size(); k += 10) CHECK(h[k + 10 - 1] <= h[k - 1]);
  }
}

TEST_CASE("smoothing commutes with translation", "[elliptic_smoother]") {
  const auto initial = reference_initial_block();
  const Vec2 shift{0.75, -0.4};
  auto moved = initial;
  for (auto& p : moved.coords.values()) p += shift;
  SmootherSettings s;
  s.max_sweeps = 100;
  const auto a = smooth(initial, s);
  const auto b = smooth(moved, s);
  double worst = 0.0;
  for (std::size_t j = 0; j < initial.nj; ++j)
    for (std::size_t i = 0; i < initial.ni; ++i) worst = std::max(worst, norm(b.block(i, j) - shift - a.block(i, j)));
  CHECK(worst <= 1e-10 * testing::reference_condition().bsp.chord);
}

TEST_CASE("degenerate boundary metrics are reported", "[elliptic_smoother]") {
  auto b = testing::uniform_block(6, 5);
  b(2, 0) = b(0, 0);
  CHECK_THROWS_MATCHES(boundary_controls(b), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.kind() == ErrorKind::SingularMetric;
                       }));
}

TEST_CASE("fold detection names the cell", "[elliptic_smoother]") {
  auto b = testing::uniform_block(6, 6);
  CHECK_FALSE(detail::first_fold(b).has_value());
  b(3, 2) = Vec2{5.0, 5.0};
  const auto f = detail::first_fold(b);
  REQUIRE(f.has_value());
  CHECK(f->first >= 2);
  CHECK(f->second >= 1);
}

TEST_CASE("settings are validated", "[elliptic_smoother]") {
  const auto b = testing::uniform_block(5, 5);
  SmootherSettings s;
  s.relaxation = 2.0;
  CHECK_THROWS_AS(smooth(b, s), Error);
  s = {};
  s.tolerance = 0.0;
  CHECK_THROWS_AS(smooth(b, s), Error);
}
