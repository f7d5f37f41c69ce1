#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "quadsac/rng.hpp"

namespace quadsac {

struct Transition {
  Eigen::VectorXd obs;
  Eigen::VectorXd action;
  double reward = 0.0;
  Eigen::VectorXd next_obs;
  // Failure-terminations only; time-limit truncation still bootstraps.
  bool done = false;
};

// Column-per-sample batch, ready for the network forward passes.
struct Batch {
  Eigen::MatrixXd obs;        // obs_dim x B
  Eigen::MatrixXd actions;    // act_dim x B
  Eigen::RowVectorXd rewards; // 1 x B
  Eigen::MatrixXd next_obs;   // obs_dim x B
  Eigen::RowVectorXd done;    // 1 x B, 0.0 or 1.0
};

// Fixed-capacity FIFO ring with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  ReplayBuffer(int obs_dim, int act_dim, std::int64_t capacity);

  // Rejects non-finite entries and action components outside [-100, 100].
  void push(const Transition& t);

  // Uniform with replacement; deterministic given the rng state.
  Batch sample(int batch_size, Rng& rng) const;

  std::int64_t size() const { return size_; }
  std::int64_t capacity() const { return capacity_; }
  int obs_dim() const { return obs_dim_; }
  int act_dim() const { return act_dim_; }

  // age_index 0 = oldest transition still stored (FIFO inspection).
  Transition transition(std::int64_t age_index) const;

 private:
  int obs_dim_;
  int act_dim_;
  std::int64_t capacity_;
  std::int64_t size_ = 0;
  std::int64_t next_ = 0;  // ring head
  // Flat column storage: one column per slot.
  Eigen::MatrixXd obs_;
  Eigen::MatrixXd actions_;
  Eigen::VectorXd rewards_;
  Eigen::MatrixXd next_obs_;
  Eigen::VectorXd done_;
};

}  // namespace quadsac
