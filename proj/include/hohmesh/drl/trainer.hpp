#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "hohmesh/core.hpp"
#include "hohmesh/drl/mlp.hpp"
#include "hohmesh/drl/replay_buffer.hpp"

namespace hohmesh::drl {

/// Exploration noise: 1 for the first 1000 episodes, then a cosine with period 1000.
inline double noise_sigma(std::uint64_t episode) {
  if (episode <= 1000) return 1.0;
  return 0.25 * (std::cos(2.0 * kPi * static_cast<double>(episode) / 1000.0) + 1.0);
}

struct TrainerConfig {
  std::uint64_t episodes = 1000;
  std::size_t batch_size = 100;
  std::uint64_t actor_period = 2;
  std::uint64_t critic_period = 1;
  std::size_t buffer_capacity = 100000;
  std::uint64_t seed = 0;
  std::uint64_t checkpoint_every = 0;  // 0 disables periodic checkpoints
  AdamSettings adam{};
  double actor_last_layer_scale = 0.1;
  std::vector<std::size_t> hidden = hidden_widths();
  bool log_greedy_reward = false;  // also evaluate the noise-free action each episode
};

/// Actor, critic, their optimizer state and the replay buffer.
struct PolicyBundle {
  Mlp actor;
  Mlp critic;
  AdamState actor_opt;
  AdamState critic_opt;
  ReplayBuffer buffer{1};
  std::uint64_t episode = 0;
  std::uint64_t critic_steps = 0;
  std::uint64_t actor_steps = 0;

  std::size_t state_dim() const { return actor.input_dim(); }
  std::size_t action_dim() const { return actor.output_dim(); }

  static PolicyBundle create(std::size_t state_dim, std::size_t action_dim, const TrainerConfig& cfg,
                             std::mt19937_64& rng) {
    PolicyBundle b;
    b.actor = Mlp(make_widths(state_dim, action_dim, cfg.hidden), OutputActivation::Tanh);
    b.critic = Mlp(make_widths(state_dim + action_dim, 1, cfg.hidden), OutputActivation::Identity);
    b.actor.init_uniform(rng, cfg.actor_last_layer_scale);
    b.critic.init_uniform(rng);
    b.actor_opt = AdamState(b.actor.parameter_count(), cfg.adam);
    b.critic_opt = AdamState(b.critic.parameter_count(), cfg.adam);
    b.buffer = ReplayBuffer(cfg.buffer_capacity);
    return b;
  }

  /// Deterministic action for one state.
  Vector act(const Vector& state) const { return actor.forward(state); }
};

inline Matrix stack(const Matrix& top, const Matrix& bottom) {
  Matrix m(top.rows() + bottom.rows(), top.cols());
  m << top, bottom;
  return m;
}

/// One Adam step on the mean squared error between stored rewards and critic
/// predictions. The target is the reward itself: with one step per episode the
/// return equals the reward. Returns the loss before the step.
inline double critic_update(PolicyBundle& b, const Batch& batch) {
  const auto n = static_cast<double>(batch.rewards.size());
  Mlp::Cache cache;
  const Matrix q = b.critic.forward(stack(batch.states, batch.actions), cache);
  const Eigen::RowVectorXd err = q.row(0) - batch.rewards;
  const double loss = err.squaredNorm() / n;
  Mlp::Gradients g;
  b.critic.backward(cache, Matrix(2.0 / n * err), g);
  b.critic_opt.apply(b.critic, g);
  ++b.critic_steps;
  return loss;
}

/// J_pi and its gradient with respect to the actor parameters (flattened),
/// chained through the critic's action input. The critic is not modified.
inline double actor_objective(const PolicyBundle& b, const Matrix& states, std::vector<double>* grad = nullptr) {
  const auto n = static_cast<double>(states.cols());
  Mlp::Cache actor_cache, critic_cache;
  const Matrix a = b.actor.forward(states, actor_cache);
  const Matrix q = b.critic.forward(stack(states, a), critic_cache);
  const double j = q.sum() / n;
  if (grad) {
    Mlp::Gradients critic_g, actor_g;
    const Matrix d_in = b.critic.backward(critic_cache, Matrix::Constant(1, states.cols(), 1.0 / n), critic_g);
    const Matrix d_a = d_in.bottomRows(a.rows());
    b.actor.backward(actor_cache, d_a, actor_g);
    *grad = Mlp::flatten(actor_g);
  }
  return j;
}

/// One Adam ascent step on J_pi = mean Q(s, pi(s)). Returns J_pi before the step.
inline double actor_update(PolicyBundle& b, const Matrix& states) {
  std::vector<double> grad;
  const double j = actor_objective(b, states, &grad);
  for (double& g : grad) g = -g;
  auto p = b.actor.parameters();
  b.actor_opt.apply(p, grad);
  b.actor.set_parameters(p);
  ++b.actor_steps;
  return j;
}

/// A single-step task: states are drawn by the environment, the reward is
/// returned for the most recently drawn state.
template <class E>
concept Environment = requires(E& e, std::mt19937_64& rng, const Vector& v) {
  { e.state_dim() } -> std::convertible_to<std::size_t>;
  { e.action_dim() } -> std::convertible_to<std::size_t>;
  { e.sample_state(rng) } -> std::convertible_to<Vector>;
  { e.reward(v, v) } -> std::convertible_to<double>;
};

struct EpisodeLog {
  std::uint64_t episode = 0;
  double reward = 0.0;
  double sigma = 0.0;
  double critic_loss = std::numeric_limits<double>::quiet_NaN();  // NaN when no update ran
  double j_pi = std::numeric_limits<double>::quiet_NaN();
  double greedy_reward = std::numeric_limits<double>::quiet_NaN();
};

inline std::string log_header() { return "episode,reward,sigma,critic_loss,j_pi"; }

inline std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string log_line(const EpisodeLog& e) {
  return std::to_string(e.episode) + "," + format_double(e.reward) + "," + format_double(e.sigma) + "," +
         format_double(e.critic_loss) + "," + format_double(e.j_pi);
}

/// Hooks called during training; all optional.
struct TrainHooks {
  std::function<void(const EpisodeLog&)> on_episode;
  std::function<void(const PolicyBundle&)> on_checkpoint;
};

/// The training loop. `bundle` continues from its episode counter, so a
/// loaded checkpoint resumes where it stopped; the buffer then refills.
template <Environment Env>
std::vector<EpisodeLog> train(PolicyBundle& bundle, Env& env, const TrainerConfig& cfg, std::mt19937_64& rng,
                              const TrainHooks& hooks = {}) {
  HOHMESH_REQUIRE(bundle.state_dim() == env.state_dim() && bundle.action_dim() == env.action_dim(),
                  ErrorKind::DimensionMismatch, "networks do not match the environment dimensions");
  HOHMESH_REQUIRE(cfg.batch_size > 0 && cfg.actor_period > 0 && cfg.critic_period > 0, ErrorKind::ConfigError,
                  "batch size and update periods must be positive");
  std::vector<EpisodeLog> log;
  log.reserve(cfg.episodes);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::uint64_t k = 0; k < cfg.episodes; ++k) {
    EpisodeLog e;
    e.episode = ++bundle.episode;
    e.sigma = noise_sigma(e.episode);
    const Vector s = env.sample_state(rng);
    const Vector greedy = bundle.act(s);
    Vector a = greedy;
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = std::clamp(a(i) + e.sigma * normal(rng), -1.0, 1.0);
    if (cfg.log_greedy_reward) e.greedy_reward = env.reward(s, greedy);
    e.reward = env.reward(s, a);
    bundle.buffer.push({s, a, e.reward});

    if (bundle.buffer.size() >= cfg.batch_size) {
      const Batch batch = bundle.buffer.sample(cfg.batch_size, rng);
      if (e.episode % cfg.critic_period == 0) e.critic_loss = critic_update(bundle, batch);
      if (e.episode % cfg.actor_period == 0) e.j_pi = actor_update(bundle, batch.states);
    }
    if (hooks.on_episode) hooks.on_episode(e);
    if (hooks.on_checkpoint && cfg.checkpoint_every > 0 && e.episode % cfg.checkpoint_every == 0)
      hooks.on_checkpoint(bundle);
    log.push_back(e);
  }
  return log;
}

/// Environment adapter holding one state fixed.
template <Environment Env>
class FixedStateEnvironment {
 public:
  FixedStateEnvironment(Env& inner, Vector state) : inner_(&inner), state_(std::move(state)) {}
  std::size_t state_dim() const { return inner_->state_dim(); }
  std::size_t action_dim() const { return inner_->action_dim(); }
  Vector sample_state(std::mt19937_64&) { return state_; }
  double reward(const Vector& s, const Vector& a) { return inner_->reward(s, a); }

 private:
  Env* inner_;
  Vector state_;
};

struct IterativeResult {
  Vector best_action;
  double best_reward = -std::numeric_limits<double>::infinity();
  std::vector<double> trace;  // best-so-far reward after each iteration
};

/// The training loop with the condition held fixed: each iteration is one
/// episode on the same state, and the best reward seen so far is traced.
template <Environment Env>
IterativeResult iterative_optimize(Env& env, const Vector& state, const TrainerConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  PolicyBundle b = PolicyBundle::create(env.state_dim(), env.action_dim(), cfg, rng);
  FixedStateEnvironment<Env> fixed(env, state);
  IterativeResult out;
  out.trace.reserve(cfg.episodes);
  TrainHooks hooks;
  hooks.on_episode = [&](const EpisodeLog& e) {
    if (e.reward > out.best_reward) {
      out.best_reward = e.reward;
      out.best_action = b.buffer.last().action;
    }
    out.trace.push_back(out.best_reward);
  };
  train(b, fixed, cfg, rng, hooks);
  return out;
}

}  // namespace hohmesh::drl
