#pragma once

#include <Eigen/Dense>

#include "bems/errors.hpp"
#include "bems/rng.hpp"

namespace bems::agent {

// Fixed-capacity transition ring with uniform sampling. Row storage is
// pre-allocated; logical index 0 is the oldest retained transition.
class ReplayBuffer {
 public:
  ReplayBuffer(int capacity, int obs_dim, int act_dim)
      : capacity_(capacity), obs_dim_(obs_dim), act_dim_(act_dim) {
    if (capacity < 1) throw UsageError("replay capacity must be >= 1");
    obs_.resize(capacity, obs_dim);
    act_.resize(capacity, act_dim);
    next_obs_.resize(capacity, obs_dim);
    rew_.resize(capacity);
    done_.resize(capacity);
  }

  void push(const Eigen::RowVectorXd& obs, const Eigen::RowVectorXd& act,
            double rew, const Eigen::RowVectorXd& next_obs, bool done) {
    if (obs.size() != obs_dim_ || next_obs.size() != obs_dim_ ||
        act.size() != act_dim_) {
      throw UsageError("replay push: dimension mismatch");
    }
    obs_.row(head_) = obs;
    act_.row(head_) = act;
    next_obs_.row(head_) = next_obs;
    rew_(head_) = rew;
    done_(head_) = done ? 1.0 : 0.0;
    head_ = (head_ + 1) % capacity_;
    if (size_ < capacity_) ++size_;
  }

  int size() const { return size_; }
  int capacity() const { return capacity_; }

  struct Transition {
    Eigen::RowVectorXd obs, act, next_obs;
    double rew;
    bool done;
  };

  // logical 0 = oldest retained
  Transition at(int logical) const {
    if (logical < 0 || logical >= size_) throw UsageError("replay index");
    const int phys = size_ < capacity_ ? logical : (head_ + logical) % capacity_;
    return {obs_.row(phys), act_.row(phys), next_obs_.row(phys), rew_(phys),
            done_(phys) != 0.0};
  }

  struct Batch {
    Eigen::MatrixXd obs, act, next_obs;
    Eigen::VectorXd rew, done;
  };

  // Uniform with replacement; draw order is fixed for determinism.
  Batch sample(int batch_size, Rng& rng) const {
    if (size_ < batch_size) {
      throw UsageError("replay sample: size " + std::to_string(size_) +
                       " < batch " + std::to_string(batch_size));
    }
    Batch b;
    b.obs.resize(batch_size, obs_dim_);
    b.act.resize(batch_size, act_dim_);
    b.next_obs.resize(batch_size, obs_dim_);
    b.rew.resize(batch_size);
    b.done.resize(batch_size);
    for (int i = 0; i < batch_size; ++i) {
      const int phys = static_cast<int>(rng.uniform_index(size_));
      b.obs.row(i) = obs_.row(phys);
      b.act.row(i) = act_.row(phys);
      b.next_obs.row(i) = next_obs_.row(phys);
      b.rew(i) = rew_(phys);
      b.done(i) = done_(phys);
    }
    return b;
  }

 private:
  int capacity_;
  int obs_dim_;
  int act_dim_;
  int head_ = 0;
  int size_ = 0;
  Eigen::MatrixXd obs_, act_, next_obs_;
  Eigen::VectorXd rew_, done_;
};

}  // namespace bems::agent
