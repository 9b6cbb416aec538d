#include "ltlrl/lcer.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ltlrl {

namespace {

struct EnvSkeleton {
  std::vector<int> states;   // s_0 .. s_m
  std::vector<int> actions;  // environment action ids, length m
};

// Projection of the rollout to the environment: jump steps are removed.
EnvSkeleton project(const ProductTrajectory& traj) {
  EnvSkeleton out;
  out.states.push_back(traj.steps.front().state.s);
  for (int i = 0; i < traj.length(); ++i) {
    if (traj.actions[i].is_jump()) continue;
    out.actions.push_back(traj.actions[i].index);
    out.states.push_back(traj.steps[i + 1].state.s);
  }
  return out;
}

double reward_of(const ProductSystem& sys, int b) {
  return sys.automaton().is_accepting(b) ? 1.0 : 0.0;
}

void append_sigma(ProductTrajectory& traj, const ProductSystem& sys,
                  int action, int s_next) {
  const int b_next =
      sys.automaton().step_sigma(traj.steps.back().state.b,
                                 sys.letter_of(s_next));
  traj.actions.push_back(ProductAction::mdp(action));
  traj.steps.push_back({{s_next, b_next}, reward_of(sys, b_next)});
}

void append_jump(ProductTrajectory& traj, const ProductSystem& sys, int j) {
  const ProductState& z = traj.steps.back().state;
  const int b_next = sys.automaton().step_jump(z.b, j);
  traj.actions.push_back(ProductAction::jump(j));
  traj.steps.push_back({{z.s, b_next}, reward_of(sys, b_next)});
}

ProductTrajectory prefix_of(const ProductTrajectory& traj, int length) {
  ProductTrajectory out;
  out.steps.assign(traj.steps.begin(), traj.steps.begin() + length + 1);
  out.actions.assign(traj.actions.begin(), traj.actions.begin() + length);
  return out;
}

// Insert jump j at trajectory position i, then replay the remaining
// environment actions through the automaton. Jump steps in the suffix are
// dropped; their automaton moves are no longer feasible from the
// deterministic part reached by the new jump, and the sigma replay
// re-derives every later state.
ProductTrajectory insert_jump(const ProductTrajectory& traj,
                              const ProductSystem& sys, int i, int j) {
  ProductTrajectory out = prefix_of(traj, i);
  append_jump(out, sys, j);
  for (int k = i; k < traj.length(); ++k) {
    if (traj.actions[k].is_jump()) continue;
    append_sigma(out, sys, traj.actions[k].index, traj.steps[k + 1].state.s);
  }
  return out;
}

std::vector<ProductTrajectory> sorted_unique(
    std::vector<ProductTrajectory> set) {
  std::sort(set.begin(), set.end(),
            [](const ProductTrajectory& a, const ProductTrajectory& b) {
              return trajectory_key(a) < trajectory_key(b);
            });
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

}  // namespace

std::vector<QTuple> lcer_q(const ProductTrajectory& traj,
                           const ProductSystem& sys) {
  const EnvSkeleton skeleton = project(traj);
  const Ldba& aut = sys.automaton();
  std::vector<QTuple> out;
  for (std::size_t t = 0; t < skeleton.actions.size(); ++t) {
    const int s = skeleton.states[t];
    const int s_next = skeleton.states[t + 1];
    for (int b = 0; b < aut.state_count(); ++b) {
      const int b_sigma = aut.step_sigma(b, sys.letter_of(s_next));
      out.push_back({s, b, ProductAction::mdp(skeleton.actions[t]),
                     reward_of(sys, b_sigma), s_next, b_sigma});
      for (int j = 0; j < aut.jump_count(b); ++j) {
        const int b_jump = aut.step_jump(b, j);
        out.push_back({s, b, ProductAction::jump(j), reward_of(sys, b_jump),
                       s, b_jump});
      }
    }
  }
  return out;
}

std::vector<QTuple> onpolicy_tuples(const ProductTrajectory& traj,
                                    const ProductSystem& sys) {
  std::vector<QTuple> out;
  for (int i = 0; i < traj.length(); ++i) {
    const ProductState& z = traj.steps[i].state;
    const ProductState& z2 = traj.steps[i + 1].state;
    out.push_back(
        {z.s, z.b, traj.actions[i], traj.steps[i + 1].reward, z2.s, z2.b});
  }
  return out;
}

std::vector<ProductTrajectory> lcer_pg_offline(const ProductTrajectory& traj,
                                               const ProductSystem& sys) {
  const EnvSkeleton skeleton = project(traj);
  const Ldba& aut = sys.automaton();

  // One annotation per initial automaton state.
  std::vector<ProductTrajectory> current;
  for (int b0 = 0; b0 < aut.state_count(); ++b0) {
    ProductTrajectory base;
    base.steps.push_back({{skeleton.states[0], b0}, reward_of(sys, b0)});
    for (std::size_t t = 0; t < skeleton.actions.size(); ++t)
      append_sigma(base, sys, skeleton.actions[t], skeleton.states[t + 1]);
    current.push_back(std::move(base));
  }
  current = sorted_unique(std::move(current));

  // Close under jump insertion. Each pass inserts one jump anywhere in any
  // member; the bound of length+1 passes is generous since a jump lands in
  // the deterministic part.
  for (int pass = 0; pass <= traj.length(); ++pass) {
    std::vector<ProductTrajectory> extended = current;
    for (const ProductTrajectory& member : current)
      for (int i = 0; i < static_cast<int>(member.steps.size()); ++i)
        for (int j = 0; j < aut.jump_count(member.steps[i].state.b); ++j)
          extended.push_back(insert_jump(member, sys, i, j));
    extended = sorted_unique(std::move(extended));
    if (extended.size() == current.size()) break;
    current = std::move(extended);
  }
  return current;
}

OnlineCfBuilder::OnlineCfBuilder(const ProductSystem& sys,
                                 int initial_env_state)
    : sys_(&sys) {
  for (int b = 0; b < sys.automaton().state_count(); ++b) {
    ProductTrajectory seed;
    seed.steps.push_back({{initial_env_state, b}, reward_of(sys, b)});
    set_.push_back(std::move(seed));
  }
}

void OnlineCfBuilder::observe(const ProductAction& action,
                              int next_env_state) {
  const Ldba& aut = sys_->automaton();
  std::vector<ProductTrajectory> next;
  for (const ProductTrajectory& tracked : set_) {
    const int b = tracked.steps.back().state.b;
    const int jumps = aut.jump_count(b);
    if (!action.is_jump()) {
      ProductTrajectory plain = tracked;
      append_sigma(plain, *sys_, action.index, next_env_state);
      next.push_back(std::move(plain));
      for (int j = 0; j < jumps; ++j) {  // case 3
        ProductTrajectory withjump = tracked;
        append_jump(withjump, *sys_, j);
        append_sigma(withjump, *sys_, action.index, next_env_state);
        next.push_back(std::move(withjump));
      }
    } else if (action.index < jumps) {  // case 2
      ProductTrajectory withjump = tracked;
      append_jump(withjump, *sys_, action.index);
      next.push_back(std::move(withjump));
      next.push_back(tracked);  // the jump was optional
    } else {  // case 4
      next.push_back(tracked);
    }
  }
  set_ = std::move(next);
  dedup();
}

std::vector<ProductTrajectory> OnlineCfBuilder::finish() const {
  // Trailing jumps: the offline closure admits a jump at the final
  // position even though no action follows it.
  std::vector<ProductTrajectory> out = set_;
  std::size_t scan = 0;
  while (scan < out.size()) {
    const ProductTrajectory member = out[scan++];
    const int b = member.steps.back().state.b;
    for (int j = 0; j < sys_->automaton().jump_count(b); ++j) {
      ProductTrajectory extended = member;
      append_jump(extended, *sys_, j);
      out.push_back(std::move(extended));
    }
  }
  return sorted_unique(std::move(out));
}

void OnlineCfBuilder::dedup() { set_ = sorted_unique(std::move(set_)); }

int min_horizon(const Ldba& aut) {
  int count = 0;
  for (int b = 0; b < aut.state_count(); ++b)
    if (aut.jump_count(b) > 0) ++count;
  return count;
}

std::string trajectory_key(const ProductTrajectory& traj) {
  std::ostringstream out;
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    out << traj.steps[i].state.s << ':' << traj.steps[i].state.b;
    if (i < traj.actions.size())
      out << (traj.actions[i].is_jump() ? "/e" : "/a")
          << traj.actions[i].index << ' ';
  }
  return out.str();
}

bool tuple_consistent(const QTuple& tuple, const ProductSystem& sys) {
  const Ldba& aut = sys.automaton();
  int expected;
  if (tuple.action.is_jump()) {
    if (tuple.action.index >= aut.jump_count(tuple.b)) return false;
    if (tuple.s_next != tuple.s) return false;
    expected = aut.step_jump(tuple.b, tuple.action.index);
  } else {
    expected = aut.step_sigma(tuple.b, sys.letter_of(tuple.s_next));
  }
  return tuple.b_next == expected &&
         tuple.reward == (aut.is_accepting(tuple.b_next) ? 1.0 : 0.0);
}

bool trajectory_consistent(const ProductTrajectory& traj,
                           const ProductSystem& sys) {
  const Ldba& aut = sys.automaton();
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const ProductStep& step = traj.steps[i];
    if (step.reward != (aut.is_accepting(step.state.b) ? 1.0 : 0.0))
      return false;
    if (i == traj.steps.size() - 1) break;
    const ProductAction& a = traj.actions[i];
    const ProductState& next = traj.steps[i + 1].state;
    if (a.is_jump()) {
      if (a.index >= aut.jump_count(step.state.b)) return false;
      if (next.s != step.state.s ||
          next.b != aut.step_jump(step.state.b, a.index))
        return false;
    } else if (next.b != aut.step_sigma(step.state.b, sys.letter_of(next.s))) {
      return false;
    }
  }
  return true;
}

bool TrajectoryStore::insert(ProductTrajectory traj) {
  std::string key = trajectory_key(traj);
  if (index_.contains(key)) return false;
  index_.emplace(std::move(key), items_.size());
  items_.push_back(std::move(traj));
  return true;
}

std::string dump_tuples(const std::deque<QTuple>& tuples) {
  std::ostringstream out;
  for (const QTuple& t : tuples) {
    out << t.s << ' ' << t.b << ' '
        << (t.action.is_jump() ? "eps" + std::to_string(t.action.index)
                               : "a" + std::to_string(t.action.index))
        << ' ' << t.reward << ' ' << t.s_next << ' ' << t.b_next << '\n';
  }
  return out.str();
}

}  // namespace ltlrl
