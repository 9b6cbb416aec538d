#pragma once

#include <compare>
#include <functional>
#include <string>
#include <vector>

#include "ltlrl/env.hpp"
#include "ltlrl/ldba.hpp"

namespace ltlrl {

struct ProductState {
  int s = 0;  // environment state
  int b = 0;  // automaton state
  auto operator<=>(const ProductState&) const = default;
};

/// Either an environment action (index into the state's local action list)
/// or an indexed jump of the automaton.
struct ProductAction {
  enum class Kind { Mdp, Jump };
  Kind kind = Kind::Mdp;
  int index = 0;

  static ProductAction mdp(int a) { return {Kind::Mdp, a}; }
  static ProductAction jump(int j) { return {Kind::Jump, j}; }
  bool is_jump() const { return kind == Kind::Jump; }
  auto operator<=>(const ProductAction&) const = default;
};

struct ProductStep {
  ProductState state;
  double reward = 0.0;  // 1 when the automaton state is accepting
};

/// Alternating state/action record of a synchronized run. steps has one
/// more entry than actions; jump actions consume an index but no
/// environment step.
struct ProductTrajectory {
  std::vector<ProductStep> steps;
  std::vector<ProductAction> actions;

  int length() const { return static_cast<int>(actions.size()); }
  int env_step_count() const;
  double total_reward() const;
  bool operator==(const ProductTrajectory& other) const;
};

enum class DiscountMode { Eventual, Standard };

struct DiscountSpec {
  double gamma = 0.99;
  DiscountMode mode = DiscountMode::Eventual;
};

/// Synchronization of an environment with an automaton: translates labels
/// into the automaton's alphabet once and exposes the product transition
/// structure. Holds references only; both inputs must outlive it.
class ProductSystem {
 public:
  ProductSystem(const LabelledMdp& env, const Ldba& aut);

  const LabelledMdp& env() const { return *env_; }
  const Ldba& automaton() const { return *aut_; }

  Letter letter_of(int s) const { return letters_[s]; }
  int state_count() const {
    return env_->state_count() * aut_->state_count();
  }
  int index_of(const ProductState& z) const {
    return z.s * aut_->state_count() + z.b;
  }
  ProductState state_at(int index) const {
    return {index / aut_->state_count(), index % aut_->state_count()};
  }

  bool accepting(const ProductState& z) const {
    return aut_->is_accepting(z.b);
  }

  /// Available actions at z: the environment's actions first, then the
  /// automaton's indexed jumps.
  int action_count(const ProductState& z) const {
    return env_->action_count(z.s) + aut_->jump_count(z.b);
  }
  ProductAction action_at(const ProductState& z, int slot) const;
  int slot_of(const ProductState& z, const ProductAction& a) const;
  std::string action_name(const ProductState& z,
                          const ProductAction& a) const;

  /// One product transition: an environment action samples the environment
  /// and feeds the arrival label to the automaton; a jump moves only the
  /// automaton state.
  ProductState step(const ProductState& z, const ProductAction& a,
                    Rng& rng) const;

  /// Initial product state: sample s0, then let the automaton read its
  /// label from the initial automaton state.
  ProductState initial_state(Rng& rng) const;
  std::vector<std::pair<ProductState, double>> initial_distribution() const;

 private:
  const LabelledMdp* env_;
  const Ldba* aut_;
  std::vector<Letter> letters_;
};

using Policy = std::function<ProductAction(const ProductState&, Rng&)>;

/// Run the policy for exactly `horizon` product steps (environment steps
/// and jumps both count one index).
ProductTrajectory rollout(const ProductSystem& sys, const Policy& policy,
                          int horizon, Rng& rng);

/// Return of a finite trajectory. In Eventual mode each reward is weighted
/// by gamma^(number of earlier accepting visits), so a trajectory with m
/// accepting visits is worth (1-gamma^m)/(1-gamma) regardless of the gaps
/// between them. Standard mode weights step i by gamma^i.
double eventual_return(const ProductTrajectory& traj,
                       const DiscountSpec& spec);

/// Tail return from step k with weights renormalized at k
/// (sum_{i>=k} Gamma_i/Gamma_k * r_i); reward_to_go(traj, 0) equals
/// eventual_return(traj).
double reward_to_go(const ProductTrajectory& traj, int k,
                    const DiscountSpec& spec);

/// Tail return keeping the absolute weights Gamma_i from the trajectory
/// start.
double reward_to_go_absolute(const ProductTrajectory& traj, int k,
                             const DiscountSpec& spec);

/// One line per step: index, environment state, automaton state, action
/// ("-" on the final line), reward, and discount multiplier gamma(b_i).
std::string serialize_trajectory(const ProductTrajectory& traj,
                                 const DiscountSpec& spec);

}  // namespace ltlrl
