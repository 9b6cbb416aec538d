#include "ltlrl/learn.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace ltlrl {

double EpsilonSchedule::at(int episode) const {
  if (frequency <= 0) return std::max(initial, floor);
  const int steps = episode / frequency;
  double eps = initial;
  if (decay == Decay::Linear)
    eps = initial - rate * steps;
  else
    eps = initial * std::pow(rate, steps);
  return std::max(eps, floor);
}

// ---------------------------------------------------------------------------
// QTable
// ---------------------------------------------------------------------------

double QTable::value(const ProductState& z, int slot) const {
  const auto it = table_.find(z);
  if (it == table_.end() || slot >= static_cast<int>(it->second.size()))
    return 0.0;
  return it->second[slot];
}

double QTable::max_value(const ProductState& z, int slot_count) const {
  const auto it = table_.find(z);
  if (it == table_.end()) return 0.0;
  double best = 0.0;
  for (int slot = 0; slot < slot_count; ++slot)
    best = std::max(best,
                    slot < static_cast<int>(it->second.size())
                        ? it->second[slot]
                        : 0.0);
  // Unseen slots read as zero, so the maximum is at least zero; that is
  // consistent with the zero-initialized table.
  return best;
}

int QTable::argmax_slot(const ProductState& z, int slot_count) const {
  int best = 0;
  double best_value = value(z, 0);
  for (int slot = 1; slot < slot_count; ++slot) {
    const double v = value(z, slot);
    if (v > best_value) {
      best = slot;
      best_value = v;
    }
  }
  return best;
}

std::vector<double>& QTable::row(const ProductState& z, int slot_count) {
  std::vector<double>& row = table_[z];
  if (static_cast<int>(row.size()) < slot_count) row.resize(slot_count, 0.0);
  return row;
}

void q_update(QTable& table, const QTuple& tuple, const ProductSystem& sys,
              const LearnerConfig& cfg) {
  const ProductState next{tuple.s_next, tuple.b_next};
  const bool arrival_accepting = sys.automaton().is_accepting(tuple.b_next);
  const double g = cfg.mode == DiscountMode::Standard
                       ? cfg.gamma
                       : (arrival_accepting ? cfg.gamma : 1.0);
  const double target =
      tuple.reward + g * table.max_value(next, sys.action_count(next));
  const ProductState z{tuple.s, tuple.b};
  double& q = table.row(z, sys.action_count(z))[sys.slot_of(z, tuple.action)];
  q += cfg.learning_rate * (target - q);
}

// ---------------------------------------------------------------------------
// Softmax policy
// ---------------------------------------------------------------------------

std::vector<double> SoftmaxPolicy::probabilities(const ProductState& z,
                                                 int slot_count) const {
  std::vector<double> out(slot_count, 0.0);
  const auto it = prefs_.find(z);
  double max_pref = 0.0;
  for (int slot = 0; slot < slot_count; ++slot) {
    const double p = it != prefs_.end() &&
                             slot < static_cast<int>(it->second.size())
                         ? it->second[slot]
                         : 0.0;
    out[slot] = p;
    max_pref = std::max(max_pref, p);
  }
  double total = 0.0;
  for (double& p : out) {
    p = std::exp(p - max_pref);
    total += p;
  }
  for (double& p : out) p /= total;
  return out;
}

int SoftmaxPolicy::sample_slot(const ProductState& z, int slot_count,
                               Rng& rng) const {
  const std::vector<double> probs = probabilities(z, slot_count);
  const double u = uniform_real01(rng);
  double acc = 0.0;
  for (int slot = 0; slot < slot_count; ++slot) {
    acc += probs[slot];
    if (u < acc) return slot;
  }
  return slot_count - 1;
}

int SoftmaxPolicy::mode_slot(const ProductState& z, int slot_count) const {
  const std::vector<double> probs = probabilities(z, slot_count);
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) -
                          probs.begin());
}

std::vector<double>& SoftmaxPolicy::preferences(const ProductState& z,
                                                int slot_count) {
  std::vector<double>& row = prefs_[z];
  if (static_cast<int>(row.size()) < slot_count) row.resize(slot_count, 0.0);
  return row;
}

// ---------------------------------------------------------------------------
// Training loops
// ---------------------------------------------------------------------------

namespace {

constexpr int kEvalWindow = 20;

Rng derive_eval_rng(std::uint64_t seed) {
  // Separate stream from the behavior rng so evaluation rollouts do not
  // perturb training randomness.
  return Rng(seed * 0x9e3779b97f4a7c15ULL + 0x52b9e8c63d1a5f7dULL);
}

/// Metric: did the evaluation rollout visit an accepting state at least
/// twice within the horizon?
bool doubled_accepting_visit(const ProductTrajectory& traj) {
  return traj.total_reward() >= 2.0;
}

double window_metric(std::deque<char>& window, bool hit) {
  if (static_cast<int>(window.size()) == kEvalWindow) window.pop_front();
  window.push_back(hit ? 1 : 0);
  double total = 0.0;
  for (char c : window) total += c;
  return total / static_cast<double>(window.size());
}

}  // namespace

QTrainResult train_q(const ProductSystem& sys, const LearnerConfig& cfg) {
  QTrainResult result;
  if (cfg.episodes <= 0) return result;
  if (cfg.horizon < min_horizon(sys.automaton()) || cfg.horizon < 1)
    throw std::invalid_argument(
        "horizon is below the automaton's jump-state count");

  Rng rng(cfg.seed);
  Rng eval_rng = derive_eval_rng(cfg.seed);
  ReplayBuffer<QTuple> buffer(cfg.replay_capacity);
  std::deque<char> window;

  const Policy greedy = [&](const ProductState& z, Rng&) {
    return sys.action_at(z, result.table.argmax_slot(z, sys.action_count(z)));
  };

  for (int episode = 0; episode < cfg.episodes; ++episode) {
    const double eps = cfg.epsilon.at(episode);
    const Policy behavior = [&](const ProductState& z, Rng& r) {
      const int count = sys.action_count(z);
      if (uniform_real01(r) < eps)
        return sys.action_at(z, static_cast<int>(uniform_index(r, count)));
      return sys.action_at(z, result.table.argmax_slot(z, count));
    };

    const ProductTrajectory traj = rollout(sys, behavior, cfg.horizon, rng);
    for (QTuple& tuple :
         cfg.lcer ? lcer_q(traj, sys) : onpolicy_tuples(traj, sys))
      buffer.push(std::move(tuple));

    // A rollout consisting solely of jump steps contributes no
    // counterfactual tuples; skip the sweeps until something is stored.
    if (!buffer.empty())
      for (int sweep = 0; sweep < cfg.updates_per_episode; ++sweep)
        for (int i = 0; i < cfg.batch_size; ++i)
          q_update(result.table, buffer.sample(rng), sys, cfg);

    const ProductTrajectory eval =
        rollout(sys, greedy, cfg.horizon, eval_rng);
    result.curve.push_back(window_metric(window, doubled_accepting_visit(eval)));
  }
  return result;
}

PgTrainResult train_pg(const ProductSystem& sys, const LearnerConfig& cfg) {
  PgTrainResult result;
  if (cfg.episodes <= 0) return result;
  if (cfg.horizon < min_horizon(sys.automaton()) || cfg.horizon < 1)
    throw std::invalid_argument(
        "horizon is below the automaton's jump-state count");

  Rng rng(cfg.seed);
  Rng eval_rng = derive_eval_rng(cfg.seed);
  std::deque<char> window;
  const DiscountSpec spec = cfg.discount();

  // Per-state running mean of observed reward-to-go.
  std::map<ProductState, std::pair<double, long>> baseline;
  auto baseline_advance = [&](const ProductState& z, double value) {
    auto& [mean, count] = baseline[z];
    const double before = count == 0 ? 0.0 : mean;
    ++count;
    mean += (value - mean) / static_cast<double>(count);
    return before;
  };

  const Policy mode = [&](const ProductState& z, Rng&) {
    return sys.action_at(z,
                         result.policy.mode_slot(z, sys.action_count(z)));
  };

  for (int episode = 0; episode < cfg.episodes; ++episode) {
    const Policy behavior = [&](const ProductState& z, Rng& r) {
      return sys.action_at(
          z, result.policy.sample_slot(z, sys.action_count(z), r));
    };
    const ProductTrajectory traj = rollout(sys, behavior, cfg.horizon, rng);

    std::vector<ProductTrajectory> batch;
    if (cfg.lcer)
      batch = lcer_pg_offline(traj, sys);
    else
      batch.push_back(traj);

    for (const ProductTrajectory& sample : batch) {
      for (int k = 0; k < sample.length(); ++k) {
        const ProductState& z = sample.steps[k].state;
        const double tail = cfg.pg_absolute_discount
                                ? reward_to_go_absolute(sample, k, spec)
                                : reward_to_go(sample, k, spec);
        const double advantage = tail - baseline_advance(z, tail);
        const int count = sys.action_count(z);
        const int taken = sys.slot_of(z, sample.actions[k]);
        const std::vector<double> probs =
            result.policy.probabilities(z, count);
        std::vector<double>& prefs = result.policy.preferences(z, count);
        for (int slot = 0; slot < count; ++slot)
          prefs[slot] += cfg.learning_rate * advantage *
                         ((slot == taken ? 1.0 : 0.0) - probs[slot]);
      }
    }

    const ProductTrajectory eval = rollout(sys, mode, cfg.horizon, eval_rng);
    result.curve.push_back(window_metric(window, doubled_accepting_visit(eval)));
  }
  return result;
}

PolicySlots greedy_policy(const QTable& table, const ProductSystem& sys) {
  PolicySlots slots(sys.state_count(), 0);
  for (int z = 0; z < sys.state_count(); ++z) {
    const ProductState state = sys.state_at(z);
    slots[z] = table.argmax_slot(state, sys.action_count(state));
  }
  return slots;
}

PolicySlots mode_policy(const SoftmaxPolicy& policy,
                        const ProductSystem& sys) {
  PolicySlots slots(sys.state_count(), 0);
  for (int z = 0; z < sys.state_count(); ++z) {
    const ProductState state = sys.state_at(z);
    slots[z] = policy.mode_slot(state, sys.action_count(state));
  }
  return slots;
}

}  // namespace ltlrl
