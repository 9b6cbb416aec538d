#include "ltlrl/product.hpp"

#include <sstream>
#include <stdexcept>

namespace ltlrl {

int ProductTrajectory::env_step_count() const {
  int count = 0;
  for (const ProductAction& a : actions)
    if (!a.is_jump()) ++count;
  return count;
}

double ProductTrajectory::total_reward() const {
  double total = 0.0;
  for (const ProductStep& step : steps) total += step.reward;
  return total;
}

bool ProductTrajectory::operator==(const ProductTrajectory& other) const {
  if (actions != other.actions) return false;
  if (steps.size() != other.steps.size()) return false;
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (steps[i].state != other.steps[i].state ||
        steps[i].reward != other.steps[i].reward)
      return false;
  return true;
}

ProductSystem::ProductSystem(const LabelledMdp& env, const Ldba& aut)
    : env_(&env), aut_(&aut) {
  const LetterMap map(env.alphabet(), aut.alphabet());
  letters_.reserve(env.state_count());
  for (int s = 0; s < env.state_count(); ++s)
    letters_.push_back(map.translate(env.label(s)));
}

ProductAction ProductSystem::action_at(const ProductState& z,
                                       int slot) const {
  const int env_actions = env_->action_count(z.s);
  if (slot < env_actions) return ProductAction::mdp(slot);
  return ProductAction::jump(slot - env_actions);
}

int ProductSystem::slot_of(const ProductState& z,
                           const ProductAction& a) const {
  return a.is_jump() ? env_->action_count(z.s) + a.index : a.index;
}

std::string ProductSystem::action_name(const ProductState& z,
                                       const ProductAction& a) const {
  if (a.is_jump()) return "eps" + std::to_string(a.index);
  return env_->action_name(z.s, a.index);
}

ProductState ProductSystem::step(const ProductState& z,
                                 const ProductAction& a, Rng& rng) const {
  if (a.is_jump()) return {z.s, aut_->step_jump(z.b, a.index)};
  const int s2 = env_->sample_transition(z.s, a.index, rng);
  return {s2, aut_->step_sigma(z.b, letters_[s2])};
}

ProductState ProductSystem::initial_state(Rng& rng) const {
  const int s0 = sample_weighted(env_->initial_distribution(), rng);
  return {s0, aut_->step_sigma(aut_->initial_state(), letters_[s0])};
}

std::vector<std::pair<ProductState, double>>
ProductSystem::initial_distribution() const {
  std::vector<std::pair<ProductState, double>> out;
  for (const auto& [s0, p] : env_->initial_distribution())
    out.emplace_back(
        ProductState{s0, aut_->step_sigma(aut_->initial_state(),
                                          letters_[s0])},
        p);
  return out;
}

ProductTrajectory rollout(const ProductSystem& sys, const Policy& policy,
                          int horizon, Rng& rng) {
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  ProductTrajectory traj;
  ProductState z = sys.initial_state(rng);
  traj.steps.push_back({z, sys.accepting(z) ? 1.0 : 0.0});
  for (int t = 0; t < horizon; ++t) {
    const ProductAction a = policy(z, rng);
    z = sys.step(z, a, rng);
    traj.actions.push_back(a);
    traj.steps.push_back({z, sys.accepting(z) ? 1.0 : 0.0});
  }
  return traj;
}

namespace {

double tail_return(const ProductTrajectory& traj, int k,
                   const DiscountSpec& spec, double initial_weight) {
  double weight = initial_weight;
  double total = 0.0;
  for (std::size_t i = k; i < traj.steps.size(); ++i) {
    total += weight * traj.steps[i].reward;
    if (spec.mode == DiscountMode::Standard || traj.steps[i].reward > 0.0)
      weight *= spec.gamma;
  }
  return total;
}

}  // namespace

double eventual_return(const ProductTrajectory& traj,
                       const DiscountSpec& spec) {
  return tail_return(traj, 0, spec, 1.0);
}

double reward_to_go(const ProductTrajectory& traj, int k,
                    const DiscountSpec& spec) {
  return tail_return(traj, k, spec, 1.0);
}

double reward_to_go_absolute(const ProductTrajectory& traj, int k,
                             const DiscountSpec& spec) {
  double weight = 1.0;
  for (int i = 0; i < k && i < static_cast<int>(traj.steps.size()); ++i)
    if (spec.mode == DiscountMode::Standard || traj.steps[i].reward > 0.0)
      weight *= spec.gamma;
  return tail_return(traj, k, spec, weight);
}

std::string serialize_trajectory(const ProductTrajectory& traj,
                                 const DiscountSpec& spec) {
  std::ostringstream out;
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const ProductStep& step = traj.steps[i];
    const double multiplier =
        (spec.mode == DiscountMode::Standard || step.reward > 0.0)
            ? spec.gamma
            : 1.0;
    out << i << ' ' << step.state.s << ' ' << step.state.b << ' ';
    if (i < traj.actions.size()) {
      const ProductAction& a = traj.actions[i];
      out << (a.is_jump() ? "eps" + std::to_string(a.index)
                          : "a" + std::to_string(a.index));
    } else {
      out << '-';
    }
    out << ' ' << step.reward << ' ' << multiplier << '\n';
  }
  return out.str();
}

}  // namespace ltlrl
