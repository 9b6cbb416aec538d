#pragma once

#include <deque>
#include <map>
#include <string>
#include <vector>

#include "ltlrl/product.hpp"

namespace ltlrl {

/// One off-policy transition for Q-learning. For environment actions the
/// arrival automaton state reads the arrival label; for jumps the
/// environment state is unchanged. The reward is the accepting indicator
/// of the arrival automaton state.
struct QTuple {
  int s = 0;
  int b = 0;
  ProductAction action;
  double reward = 0.0;
  int s_next = 0;
  int b_next = 0;
  auto operator<=>(const QTuple&) const = default;
};

/// Counterfactual Q-tuples from one rollout: for every environment
/// transition (s_t, a_t, s_{t+1}) and every automaton state b, one sigma
/// tuple plus one tuple per jump available in b. Jump steps taken by the
/// behavior policy contribute no environment transition of their own; the
/// jump tuples are regenerated for all b instead.
std::vector<QTuple> lcer_q(const ProductTrajectory& traj,
                           const ProductSystem& sys);

/// The rollout's own transitions as tuples (replay without counterfactuals).
std::vector<QTuple> onpolicy_tuples(const ProductTrajectory& traj,
                                    const ProductSystem& sys);

/// All automaton-consistent counterfactual annotations of the rollout's
/// environment projection: one trajectory per initial automaton state,
/// closed under inserting available jumps at any position (the observed
/// trajectory is always among them). Returned deduplicated, in canonical
/// order.
std::vector<ProductTrajectory> lcer_pg_offline(const ProductTrajectory& traj,
                                               const ProductSystem& sys);

/// Incremental construction of the same feasible set during a rollout.
/// Seed with the initial environment state, feed every behavior step
/// (including jump steps), then finish(). Per observed step each tracked
/// trajectory is extended by case analysis:
///   1. environment action, no jumps available: plain extension;
///   2. observed jump, feasible here: jump extension (the unjumped copy is
///      kept, since taking an available jump is optional);
///   3. environment action with jumps available: plain extension plus every
///      jump-then-action extension;
///   4. observed jump, infeasible here: passed through unchanged.
/// finish() closes the set under trailing jumps.
class OnlineCfBuilder {
 public:
  OnlineCfBuilder(const ProductSystem& sys, int initial_env_state);

  void observe(const ProductAction& action, int next_env_state);
  std::vector<ProductTrajectory> finish() const;

  const std::vector<ProductTrajectory>& pending() const { return set_; }

 private:
  void dedup();

  const ProductSystem* sys_;
  std::vector<ProductTrajectory> set_;
};

/// Number of automaton states with at least one jump: the minimum horizon
/// that gives every counterfactual annotation the opportunity to commit.
int min_horizon(const Ldba& aut);

/// Stable content key; equal trajectories produce equal keys.
std::string trajectory_key(const ProductTrajectory& traj);

bool tuple_consistent(const QTuple& tuple, const ProductSystem& sys);
bool trajectory_consistent(const ProductTrajectory& traj,
                           const ProductSystem& sys);

// ---------------------------------------------------------------------------
// Replay stores
// ---------------------------------------------------------------------------

/// FIFO-bounded multiset with uniform sampling.
template <typename T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

  void push(T item) {
    if (items_.size() == capacity_) items_.pop_front();
    items_.push_back(std::move(item));
  }

  const T& sample(Rng& rng) const {
    return items_[uniform_index(rng, items_.size())];
  }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<T>& items() const { return items_; }

 private:
  std::size_t capacity_;
  std::deque<T> items_;
};

/// Content-deduplicated trajectory set for policy-gradient replay.
class TrajectoryStore {
 public:
  /// Returns true when the trajectory was new.
  bool insert(ProductTrajectory traj);
  const std::vector<ProductTrajectory>& contents() const { return items_; }
  std::size_t size() const { return items_.size(); }

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<ProductTrajectory> items_;
};

std::string dump_tuples(const std::deque<QTuple>& tuples);

}  // namespace ltlrl
