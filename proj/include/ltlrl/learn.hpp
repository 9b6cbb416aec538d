#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ltlrl/exact.hpp"
#include "ltlrl/lcer.hpp"
#include "ltlrl/product.hpp"

namespace ltlrl {

struct EpsilonSchedule {
  enum class Decay { Linear, Exponential };

  double initial = 0.3;
  double floor = 0.0;
  Decay decay = Decay::Exponential;
  double rate = 0.9;   // subtracted (linear) or multiplied (exponential)
  int frequency = 100;  // episodes between decay steps

  double at(int episode) const;
};

struct LearnerConfig {
  double gamma = 0.99;
  DiscountMode mode = DiscountMode::Eventual;
  double learning_rate = 0.1;
  EpsilonSchedule epsilon;
  int batch_size = 128;
  int updates_per_episode = 5;  // sampled batches per episode
  int horizon = 20;
  int episodes = 1000;
  bool lcer = true;
  std::uint64_t seed = 0;
  std::size_t replay_capacity = 100000;
  bool pg_absolute_discount = false;

  DiscountSpec discount() const { return {gamma, mode}; }
};

/// Action-value table over product states; rows are indexed by action slot
/// and missing entries read as zero.
class QTable {
 public:
  double value(const ProductState& z, int slot) const;
  double max_value(const ProductState& z, int slot_count) const;
  int argmax_slot(const ProductState& z, int slot_count) const;
  std::vector<double>& row(const ProductState& z, int slot_count);
  const std::map<ProductState, std::vector<double>>& data() const {
    return table_;
  }

 private:
  std::map<ProductState, std::vector<double>> table_;
};

/// One tabular Q-learning backup. The discount applied across the
/// transition follows the arrival state: gamma when it is accepting, 1
/// otherwise (Eventual mode), or gamma unconditionally (Standard mode).
void q_update(QTable& table, const QTuple& tuple, const ProductSystem& sys,
              const LearnerConfig& cfg);

/// Tabular softmax policy over product action slots.
class SoftmaxPolicy {
 public:
  std::vector<double> probabilities(const ProductState& z,
                                    int slot_count) const;
  int sample_slot(const ProductState& z, int slot_count, Rng& rng) const;
  int mode_slot(const ProductState& z, int slot_count) const;
  std::vector<double>& preferences(const ProductState& z, int slot_count);
  const std::map<ProductState, std::vector<double>>& data() const {
    return prefs_;
  }

 private:
  std::map<ProductState, std::vector<double>> prefs_;
};

struct QTrainResult {
  QTable table;
  std::vector<double> curve;  // per-episode evaluation metric
};

struct PgTrainResult {
  SoftmaxPolicy policy;
  std::vector<double> curve;
};

/// Episodes of epsilon-greedy rollouts feeding a replay buffer (all
/// counterfactual tuples when cfg.lcer, the rollout's own transitions
/// otherwise) followed by sampled batch sweeps. The curve entry per episode
/// is the fraction of the last 20 greedy evaluation rollouts that visited
/// an accepting state at least twice.
QTrainResult train_q(const ProductSystem& sys, const LearnerConfig& cfg);

/// REINFORCE with a per-state running-mean baseline over the episode's
/// trajectory set (all counterfactual annotations when cfg.lcer, the
/// observed rollout otherwise); the curve metric matches train_q with the
/// highest-probability action in evaluations.
PgTrainResult train_pg(const ProductSystem& sys, const LearnerConfig& cfg);

/// Argmax action slot per product state, ties broken by the lowest slot;
/// states without table entries fall back to slot 0.
PolicySlots greedy_policy(const QTable& table, const ProductSystem& sys);
PolicySlots mode_policy(const SoftmaxPolicy& policy, const ProductSystem& sys);

}  // namespace ltlrl
