#include "oracles.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "ltlrl/lcer.hpp"

namespace ltlrl::testing {

namespace {

class UnrollingEvaluator {
 public:
  explicit UnrollingEvaluator(const LassoWord& word)
      : word_(word),
        prefix_(static_cast<int>(word.prefix.size())),
        cycle_(static_cast<int>(word.cycle.size())) {}

  bool eval(const Formula& f, int p) {
    p = canon(p);
    const auto key = std::make_pair(&f, p);
    const auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    // Distinct positions at or after p are exhausted one full cycle past
    // the prefix; scanning to this bound covers them all.
    const int bound = prefix_ + 2 * cycle_;
    bool value = false;
    switch (f.kind()) {
      case LtlKind::True:
        value = true;
        break;
      case LtlKind::False:
        value = false;
        break;
      case LtlKind::Atom: {
        const int bit = word_.alphabet.index_of(f.atom_name());
        if (bit < 0) throw std::invalid_argument("undeclared atom");
        value = letter(p) >> bit & 1u;
        break;
      }
      case LtlKind::Not:
        value = !eval(*f.left(), p);
        break;
      case LtlKind::And:
        value = eval(*f.left(), p) && eval(*f.right(), p);
        break;
      case LtlKind::Or:
        value = eval(*f.left(), p) || eval(*f.right(), p);
        break;
      case LtlKind::Implies:
        value = !eval(*f.left(), p) || eval(*f.right(), p);
        break;
      case LtlKind::Next:
        value = eval(*f.left(), p + 1);
        break;
      case LtlKind::Finally:
        for (int q = p; q < bound && !value; ++q)
          value = eval(*f.left(), q);
        break;
      case LtlKind::Globally:
        value = true;
        for (int q = p; q < bound && value; ++q)
          value = eval(*f.left(), q);
        break;
      case LtlKind::Until:
        for (int q = p; q < bound && !value; ++q) {
          if (!eval(*f.right(), q)) {
            if (!eval(*f.left(), q)) break;  // left fails before right held
            continue;
          }
          value = true;
        }
        break;
    }
    memo_.emplace(key, value);
    return value;
  }

 private:
  int canon(int p) const {
    if (p < prefix_) return p;
    return prefix_ + (p - prefix_) % cycle_;
  }
  Letter letter(int p) const {
    return p < prefix_ ? word_.prefix[p] : word_.cycle[p - prefix_];
  }

  const LassoWord& word_;
  int prefix_;
  int cycle_;
  std::map<std::pair<const Formula*, int>, bool> memo_;
};

}  // namespace

bool eval_by_unrolling(const Formula& phi, const LassoWord& word) {
  UnrollingEvaluator evaluator(word);
  return evaluator.eval(phi, 0);
}

FormulaPtr random_formula(const std::vector<std::string>& atoms, int depth,
                          Rng& rng) {
  const auto leaf = [&]() -> FormulaPtr {
    const auto roll = uniform_index(rng, atoms.size() + 2);
    if (roll == atoms.size()) return Formula::make_true();
    if (roll == atoms.size() + 1) return Formula::make_false();
    return Formula::make_atom(atoms[roll]);
  };
  if (depth <= 0) return leaf();
  switch (uniform_index(rng, 9)) {
    case 0:
      return leaf();
    case 1:
      return Formula::make_not(random_formula(atoms, depth - 1, rng));
    case 2:
      return Formula::make_and(random_formula(atoms, depth - 1, rng),
                               random_formula(atoms, depth - 1, rng));
    case 3:
      return Formula::make_or(random_formula(atoms, depth - 1, rng),
                              random_formula(atoms, depth - 1, rng));
    case 4:
      return Formula::make_implies(random_formula(atoms, depth - 1, rng),
                                   random_formula(atoms, depth - 1, rng));
    case 5:
      return Formula::make_next(random_formula(atoms, depth - 1, rng));
    case 6:
      return Formula::make_globally(random_formula(atoms, depth - 1, rng));
    case 7:
      return Formula::make_finally(random_formula(atoms, depth - 1, rng));
    default:
      return Formula::make_until(random_formula(atoms, depth - 1, rng),
                                 random_formula(atoms, depth - 1, rng));
  }
}

namespace {

void enumerate_from(const ProductSystem& sys,
                    const std::vector<int>& env_states,
                    const std::vector<int>& env_actions, std::size_t position,
                    ProductTrajectory& current,
                    std::vector<ProductTrajectory>& out) {
  const Ldba& aut = sys.automaton();
  const int b = current.steps.back().state.b;
  const int s = current.steps.back().state.s;

  // Jump choices (a jump target carries no jumps of its own, so at most
  // one insertion per position is possible).
  for (int j = 0; j < aut.jump_count(b); ++j) {
    const int b2 = aut.step_jump(b, j);
    current.actions.push_back(ProductAction::jump(j));
    current.steps.push_back(
        {{s, b2}, aut.is_accepting(b2) ? 1.0 : 0.0});
    enumerate_from(sys, env_states, env_actions, position, current, out);
    current.actions.pop_back();
    current.steps.pop_back();
  }

  if (position == env_actions.size()) {
    out.push_back(current);
    return;
  }

  const int s2 = env_states[position + 1];
  const int b2 = aut.step_sigma(b, sys.letter_of(s2));
  current.actions.push_back(ProductAction::mdp(env_actions[position]));
  current.steps.push_back({{s2, b2}, aut.is_accepting(b2) ? 1.0 : 0.0});
  enumerate_from(sys, env_states, env_actions, position + 1, current, out);
  current.actions.pop_back();
  current.steps.pop_back();
}

}  // namespace

std::vector<ProductTrajectory> enumerate_annotations(
    const ProductTrajectory& traj, const ProductSystem& sys) {
  std::vector<int> env_states{traj.steps.front().state.s};
  std::vector<int> env_actions;
  for (int i = 0; i < traj.length(); ++i) {
    if (traj.actions[i].is_jump()) continue;
    env_actions.push_back(traj.actions[i].index);
    env_states.push_back(traj.steps[i + 1].state.s);
  }

  std::vector<ProductTrajectory> out;
  for (int b0 = 0; b0 < sys.automaton().state_count(); ++b0) {
    ProductTrajectory current;
    current.steps.push_back(
        {{env_states[0], b0},
         sys.automaton().is_accepting(b0) ? 1.0 : 0.0});
    enumerate_from(sys, env_states, env_actions, 0, current, out);
  }
  std::sort(out.begin(), out.end(),
            [](const ProductTrajectory& a, const ProductTrajectory& b) {
              return trajectory_key(a) < trajectory_key(b);
            });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ChainSample simulate_chain(const InducedChain& chain, const BsccInfo& info,
                           Rng& rng, long step_cap) {
  const auto draw = [&rng](auto probability_of, int count) {
    const double u = uniform_real01(rng);
    double acc = 0.0;
    int chosen = -1;
    for (int i = 0; i < count; ++i) {
      const double p = probability_of(i);
      if (p == 0.0) continue;
      acc += p;
      chosen = i;
      if (u < acc) break;
    }
    return chosen;
  };

  ChainSample sample;
  int state = draw([&](int i) { return chain.initial[i]; },
                   chain.state_count);
  for (long step = 0; step < step_cap; ++step) {
    if (info.state_class[state] != BsccInfo::kTransient) {
      sample.satisfied = info.state_class[state] == BsccInfo::kGood;
      return sample;
    }
    if (chain.accepting[state]) ++sample.accepting_visits;
    state = draw([&](int j) { return chain.p(state, j); }, chain.state_count);
  }
  throw std::runtime_error("chain simulation exceeded the step cap");
}

}  // namespace ltlrl::testing
