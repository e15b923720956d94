#pragma once

#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hohmesh/core.hpp"

namespace hohmesh::drl {

struct Transition {
  Eigen::VectorXd state;
  Eigen::VectorXd action;
  double reward = 0.0;
};

struct Batch {
  Eigen::MatrixXd states;   // state_dim x n
  Eigen::MatrixXd actions;  // action_dim x n
  Eigen::RowVectorXd rewards;
};

/// Fixed-capacity ring of (s, a, r). Once full, the oldest entry is overwritten.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 100000) : capacity_(capacity) {
    HOHMESH_REQUIRE(capacity > 0, ErrorKind::ConfigError, "replay buffer capacity must be positive");
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return data_.size(); }
  std::size_t head() const { return head_; }
  bool empty() const { return data_.empty(); }
  const Transition& operator[](std::size_t k) const { return data_[k]; }
  const Transition& last() const { return data_[(head_ + capacity_ - 1) % capacity_]; }

  void push(Transition t) {
    if (data_.size() < capacity_) {
      data_.push_back(std::move(t));
    } else {
      data_[head_] = std::move(t);
    }
    head_ = (head_ + 1) % capacity_;
  }

  /// n distinct entries chosen uniformly (partial Fisher-Yates).
  template <class Rng>
  Batch sample(std::size_t n, Rng& rng) const {
    HOHMESH_REQUIRE(n > 0 && n <= data_.size(), ErrorKind::DimensionMismatch,
                    "cannot draw " + std::to_string(n) + " distinct samples from " + std::to_string(data_.size()));
    std::vector<std::size_t> idx(data_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t k = 0; k < n; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, idx.size() - 1);
      std::swap(idx[k], idx[pick(rng)]);
    }
    idx.resize(n);
    return gather(idx);
  }

  Batch gather(const std::vector<std::size_t>& idx) const {
    const auto n = static_cast<Eigen::Index>(idx.size());
    Batch b;
    b.states.resize(data_.front().state.size(), n);
    b.actions.resize(data_.front().action.size(), n);
    b.rewards.resize(n);
    for (Eigen::Index c = 0; c < n; ++c) {
      const Transition& t = data_[idx[static_cast<std::size_t>(c)]];
      b.states.col(c) = t.state;
      b.actions.col(c) = t.action;
      b.rewards(c) = t.reward;
    }
    return b;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<Transition> data_;
};

}  // namespace hohmesh::drl
