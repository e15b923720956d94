#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

#include "hohmesh/condition_space.hpp"
#include "hohmesh/drl/trainer.hpp"
#include "hohmesh/pipeline.hpp"

namespace hohmesh::drl {

/// r(s, a) = 1 - |a - g(s)|^2 / 8 with an affine target g(s) = W s + c drawn
/// once from the seed. States are uniform in [-1, 1]^n.
class ToyEnvironment {
 public:
  explicit ToyEnvironment(std::uint64_t seed, std::size_t state_dim = 25, std::size_t action_dim = 8,
                          double w_scale = 0.02, double c_scale = 0.3)
      : w_(static_cast<Eigen::Index>(action_dim), static_cast<Eigen::Index>(state_dim)),
        c_(static_cast<Eigen::Index>(action_dim)) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Eigen::Index i = 0; i < w_.rows(); ++i)
      for (Eigen::Index j = 0; j < w_.cols(); ++j) w_(i, j) = w_scale * u(rng);
    for (Eigen::Index i = 0; i < c_.size(); ++i) c_(i) = c_scale * u(rng);
  }

  std::size_t state_dim() const { return static_cast<std::size_t>(w_.cols()); }
  std::size_t action_dim() const { return static_cast<std::size_t>(w_.rows()); }

  Vector sample_state(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector s(w_.cols());
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = u(rng);
    return s;
  }

  Vector optimum(const Vector& s) const { return w_ * s + c_; }
  double reward(const Vector& s, const Vector& a) const { return 1.0 - (a - optimum(s)).squaredNorm() / 8.0; }

 private:
  Matrix w_;
  Vector c_;
};

inline constexpr double kFailedMeshReward = -1.0;

struct MeshEnvironmentStats {
  std::uint64_t meshes = 0;
  std::uint64_t failures = 0;
};

/// Conditions sampled from a space; the reward is the combined quality Q of
/// the generated mesh, or -1 when any stage fails.
class MeshEnvironment {
 public:
  explicit MeshEnvironment(SpaceSpec space, PipelineOptions options = default_options())
      : space_(std::move(space)), options_(options) {
    space_.validate();
  }

  /// Training runs cap the smoother; the library default runs to tolerance.
  static PipelineOptions default_options() {
    PipelineOptions o;
    o.smoother.max_sweeps = 500;
    return o;
  }

  std::size_t state_dim() const { return kConditionDim; }
  std::size_t action_dim() const { return kDecisionDim; }
  const SpaceSpec& space() const { return space_; }
  const PipelineOptions& options() const { return options_; }
  const MeshEnvironmentStats& stats() const { return stats_; }
  const std::optional<PassageCondition>& current() const { return current_; }

  Vector sample_state(std::mt19937_64& rng) { return set_condition(sample_condition(space_, rng)); }

  /// Makes `c` the current condition and returns its state vector.
  Vector set_condition(const PassageCondition& c) {
    current_ = c;
    const auto s = condition_to_state(c, space_);
    return Eigen::Map<const Vector>(s.data(), static_cast<Eigen::Index>(s.size()));
  }

  /// Reward for the current condition (the state argument only documents the pairing).
  double reward(const Vector&, const Vector& action) {
    HOHMESH_REQUIRE(current_.has_value(), ErrorKind::ConfigError, "reward requested before a state was drawn");
    ++stats_.meshes;
    if (!action.allFinite()) {
      ++stats_.failures;
      return kFailedMeshReward;
    }
    try {
      const MeshingParams p = action_to_params(std::span(action.data(), static_cast<std::size_t>(action.size())),
                                               *current_, space_);
      const double q = generate_mesh(*current_, p, options_).report.q;
      if (std::isfinite(q)) return q;
      ++stats_.failures;
      return kFailedMeshReward;
    } catch (const Error&) {
      ++stats_.failures;
      return kFailedMeshReward;
    }
  }

 private:
  SpaceSpec space_;
  PipelineOptions options_;
  std::optional<PassageCondition> current_;
  MeshEnvironmentStats stats_;
};

struct SingleShot {
  MeshingParams params;
  Vector action;
  MeshResult result;
};

/// Noise-free actor action for `cond`, rescaled and meshed. Pipeline errors propagate.
inline SingleShot generate_single_shot(const PolicyBundle& bundle, const PassageCondition& cond,
                                       const SpaceSpec& space, const PipelineOptions& options = {}) {
  const auto s = condition_to_state(cond, space);
  SingleShot out;
  out.action = bundle.act(Eigen::Map<const Vector>(s.data(), static_cast<Eigen::Index>(s.size())));
  out.params = action_to_params(std::span(out.action.data(), static_cast<std::size_t>(out.action.size())), cond, space);
  out.result = generate_mesh(cond, out.params, options);
  return out;
}

}  // namespace hohmesh::drl
