#include "quadsac/replay_buffer.hpp"

#include <cmath>
#include <stdexcept>

namespace quadsac {

ReplayBuffer::ReplayBuffer(int obs_dim, int act_dim, std::int64_t capacity)
    : obs_dim_(obs_dim), act_dim_(act_dim), capacity_(capacity) {
  if (obs_dim <= 0 || act_dim <= 0) {
    throw std::invalid_argument("ReplayBuffer: dimensions must be positive");
  }
  if (capacity <= 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  obs_.resize(obs_dim_, capacity_);
  actions_.resize(act_dim_, capacity_);
  rewards_.resize(capacity_);
  next_obs_.resize(obs_dim_, capacity_);
  done_.resize(capacity_);
}

void ReplayBuffer::push(const Transition& t) {
  if (t.obs.size() != obs_dim_ || t.next_obs.size() != obs_dim_ ||
      t.action.size() != act_dim_) {
    throw std::invalid_argument("ReplayBuffer::push: dimension mismatch");
  }
  if (!t.obs.allFinite() || !t.next_obs.allFinite() || !t.action.allFinite() ||
      !std::isfinite(t.reward)) {
    throw std::invalid_argument("ReplayBuffer::push: non-finite transition");
  }
  if ((t.action.array().abs() > 100.0).any()) {
    throw std::invalid_argument("ReplayBuffer::push: action outside [-100, 100]");
  }
  obs_.col(next_) = t.obs;
  actions_.col(next_) = t.action;
  rewards_[next_] = t.reward;
  next_obs_.col(next_) = t.next_obs;
  done_[next_] = t.done ? 1.0 : 0.0;
  next_ = (next_ + 1) % capacity_;
  if (size_ < capacity_) size_ += 1;
}

Batch ReplayBuffer::sample(int batch_size, Rng& rng) const {
  if (size_ == 0) throw std::runtime_error("ReplayBuffer::sample: buffer is empty");
  if (batch_size <= 0) throw std::invalid_argument("ReplayBuffer::sample: batch_size must be > 0");
  Batch b;
  b.obs.resize(obs_dim_, batch_size);
  b.actions.resize(act_dim_, batch_size);
  b.rewards.resize(batch_size);
  b.next_obs.resize(obs_dim_, batch_size);
  b.done.resize(batch_size);
  for (int i = 0; i < batch_size; ++i) {
    const auto k = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(size_)));
    b.obs.col(i) = obs_.col(k);
    b.actions.col(i) = actions_.col(k);
    b.rewards[i] = rewards_[k];
    b.next_obs.col(i) = next_obs_.col(k);
    b.done[i] = done_[k];
  }
  return b;
}

Transition ReplayBuffer::transition(std::int64_t age_index) const {
  if (age_index < 0 || age_index >= size_) {
    throw std::out_of_range("ReplayBuffer::transition: index out of range");
  }
  // When full, the ring head points at the oldest slot.
  const std::int64_t start = (size_ == capacity_) ? next_ : 0;
  const std::int64_t k = (start + age_index) % capacity_;
  Transition t;
  t.obs = obs_.col(k);
  t.action = actions_.col(k);
  t.reward = rewards_[k];
  t.next_obs = next_obs_.col(k);
  t.done = done_[k] != 0.0;
  return t;
}

}  // namespace quadsac
