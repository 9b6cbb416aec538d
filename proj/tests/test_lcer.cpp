#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "ltlrl/harness.hpp"
#include "ltlrl/lcer.hpp"
#include "support/oracles.hpp"

using namespace ltlrl;

namespace {

std::string fixture_path(const std::string& name) {
  return (std::filesystem::path(LTLRL_FIXTURE_DIR) / name).string();
}

// Two unlabelled states joined by one action; the workhorse for pinned
// counterfactual examples.
TabularMdp plain_pair_env(Letter label0 = 0, Letter label1 = 0) {
  return TabularMdp(Alphabet({"y", "b", "r"}), {label0, label1},
                    {{{{1, 1.0}}}, {{{1, 1.0}}}}, {{0, 1.0}});
}

ProductTrajectory one_step(const ProductSystem& sys) {
  Rng rng(1);
  return rollout(
      sys, [](const ProductState&, Rng&) { return ProductAction::mdp(0); }, 1,
      rng);
}

std::vector<std::string> keys_of(const std::vector<ProductTrajectory>& set) {
  std::vector<std::string> keys;
  for (const ProductTrajectory& t : set) keys.push_back(trajectory_key(t));
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace

TEST_CASE("lcer_q emits the full counterfactual tuple set") {
  const TabularMdp env = plain_pair_env(0, /*label1=*/1);  // L(s') = {y}
  const Ldba aut = Ldba::load_file(fixture_path("fgy.ldba"));
  const ProductSystem sys(env, aut);
  const std::vector<QTuple> tuples = lcer_q(one_step(sys), sys);

  REQUIRE(tuples.size() == 4);
  const std::vector<QTuple> expected = {
      {0, 0, ProductAction::mdp(0), 0.0, 1, 0},
      {0, 0, ProductAction::jump(0), 1.0, 0, 1},
      {0, 1, ProductAction::mdp(0), 1.0, 1, 1},
      {0, 2, ProductAction::mdp(0), 0.0, 1, 2},
  };
  for (const QTuple& want : expected)
    CHECK(std::count(tuples.begin(), tuples.end(), want) == 1);
  for (const QTuple& tuple : tuples) CHECK(tuple_consistent(tuple, sys));
}

TEST_CASE("tuple counts scale with the automaton and rollout") {
  const TabularMdp env = plain_pair_env();
  SUBCASE("no jumps: one tuple per automaton state") {
    const Ldba aut = Ldba::load_file(fixture_path("cycle_yr.ldba"));
    const ProductSystem sys(env, aut);
    CHECK(lcer_q(one_step(sys), sys).size() == 4);  // |S^B| = 4, no jumps
  }
  SUBCASE("fgy: 4T tuples for T transitions") {
    const Ldba aut = Ldba::load_file(fixture_path("fgy.ldba"));
    const ProductSystem sys(env, aut);
    Rng rng(2);
    const ProductTrajectory traj = rollout(
        sys, [](const ProductState&, Rng&) { return ProductAction::mdp(0); },
        7, rng);
    CHECK(lcer_q(traj, sys).size() == 4 * 7);
  }
}

TEST_CASE("behavior jump steps contribute no sigma transitions") {
  const TabularMdp env = plain_pair_env();
  const Ldba aut = Ldba::load_file(fixture_path("fgy.ldba"));
  const ProductSystem sys(env, aut);
  Rng rng(3);
  // Jump first, then one environment step.
  int calls = 0;
  const ProductTrajectory traj = rollout(
      sys,
      [&](const ProductState&, Rng&) {
        return calls++ == 0 ? ProductAction::jump(0) : ProductAction::mdp(0);
      },
      2, rng);
  REQUIRE(traj.env_step_count() == 1);
  CHECK(lcer_q(traj, sys).size() == 4);  // one environment transition
}

TEST_CASE("offline counterfactual set on the pinned two-step example") {
  const TabularMdp env = plain_pair_env();  // both labels empty
  const Ldba aut = Ldba::load_file(fixture_path("fgy.ldba"));
  const ProductSystem sys(env, aut);
  const ProductTrajectory observed = one_step(sys);

  const std::vector<ProductTrajectory> set = lcer_pg_offline(observed, sys);
  // Annotations of tau_M = (s0, s1): three seed states, the jump taken
  // before the action (reaching state 1 and sinking to 2 on the empty
  // label), and the trailing jump.
  std::vector<ProductTrajectory> expected;
  {
    ProductTrajectory t;  // seed 0, no jump
    t.steps = {{{0, 0}, 0}, {{1, 0}, 0}};
    t.actions = {ProductAction::mdp(0)};
    expected.push_back(t);
    t.steps = {{{0, 1}, 1}, {{1, 2}, 0}};  // seed 1 start
    expected.push_back(t);
    t.steps = {{{0, 2}, 0}, {{1, 2}, 0}};  // seed 2 start
    expected.push_back(t);
    t.steps = {{{0, 0}, 0}, {{0, 1}, 1}, {{1, 2}, 0}};  // jump at 0
    t.actions = {ProductAction::jump(0), ProductAction::mdp(0)};
    expected.push_back(t);
    t.steps = {{{0, 0}, 0}, {{1, 0}, 0}, {{1, 1}, 1}};  // trailing jump
    t.actions = {ProductAction::mdp(0), ProductAction::jump(0)};
    expected.push_back(t);
  }
  CHECK(keys_of(set) == keys_of(expected));

  // The observed trajectory is a member, every member is consistent, and
  // the environment projection is preserved.
  CHECK(std::count(set.begin(), set.end(), observed) == 1);
  for (const ProductTrajectory& member : set) {
    CHECK(trajectory_consistent(member, sys));
    CHECK(member.env_step_count() == 1);
  }
}

TEST_CASE("offline set without jumps is one annotation per seed") {
  const TabularMdp env = plain_pair_env(1, 4);  // labels {y}, {r}
  const Ldba aut = Ldba::load_file(fixture_path("cycle_yr.ldba"));
  const ProductSystem sys(env, aut);
  const std::vector<ProductTrajectory> set =
      lcer_pg_offline(one_step(sys), sys);
  CHECK(set.size() == 4);
}

TEST_CASE("offline closure is idempotent across members") {
  const TabularMdp env = plain_pair_env();
  const Ldba aut = Ldba::load_file(fixture_path("fgy.ldba"));
  const ProductSystem sys(env, aut);
  const std::vector<ProductTrajectory> set =
      lcer_pg_offline(one_step(sys), sys);
  // Every member shares the observed environment skeleton, so expanding a
  // member reproduces the identical set.
  for (const ProductTrajectory& member : set)
    CHECK(keys_of(lcer_pg_offline(member, sys)) == keys_of(set));
}

TEST_CASE("offline output equals brute-force annotation enumeration") {
  Rng rng(53);
  const Alphabet alphabet({"y", "b", "r"});
  const Ldba automata[] = {Ldba::load_file(fixture_path("fgy.ldba")),
                           Ldba::load_file(fixture_path("cycle_yr.ldba"))};
  for (int trial = 0; trial < 60; ++trial) {
    const auto env = harness::random_tabular_env(alphabet, rng);
    const ProductSystem sys(*env, automata[trial % 2]);
    const Policy uniform = [&](const ProductState& z, Rng& r) {
      return sys.action_at(
          z, static_cast<int>(uniform_index(r, sys.action_count(z))));
    };
    const int horizon = 1 + static_cast<int>(uniform_index(rng, 4));
    const ProductTrajectory traj = rollout(sys, uniform, horizon, rng);
    CHECK(keys_of(lcer_pg_offline(traj, sys)) ==
          keys_of(testing::enumerate_annotations(traj, sys)));
  }
}

TEST_CASE("online construction matches the offline set") {
  Rng rng(59);
  const Alphabet alphabet({"y", "b", "r"});
  const Ldba automata[] = {Ldba::load_file(fixture_path("fgy.ldba")),
                           Ldba::load_file(fixture_path("cycle_yr.ldba"))};
  for (int trial = 0; trial < 40; ++trial) {
    const auto env = harness::random_tabular_env(alphabet, rng);
    const ProductSystem sys(*env, automata[trial % 2]);
    const Policy uniform = [&](const ProductState& z, Rng& r) {
      return sys.action_at(
          z, static_cast<int>(uniform_index(r, sys.action_count(z))));
    };
    const int horizon = 1 + static_cast<int>(uniform_index(rng, 8));
    const ProductTrajectory traj = rollout(sys, uniform, horizon, rng);

    OnlineCfBuilder builder(sys, traj.steps.front().state.s);
    for (int t = 0; t < traj.length(); ++t)
      builder.observe(traj.actions[t], traj.steps[t + 1].state.s);
    CHECK(builder.finish() == lcer_pg_offline(traj, sys));
  }
}

TEST_CASE("infeasible observed jumps pass trajectories through") {
  const TabularMdp env = plain_pair_env();
  const Ldba aut = Ldba::load_file(fixture_path("fgy.ldba"));
  const ProductSystem sys(env, aut);
  OnlineCfBuilder builder(sys, 0);
  REQUIRE(builder.pending().size() == 3);
  // Behavior takes eps0 (feasible only at automaton state 0): the
  // trajectories tracking states 1 and 2 are passed unchanged.
  builder.observe(ProductAction::jump(0), 0);
  const auto& pending = builder.pending();
  REQUIRE(pending.size() == 4);  // {0-unjumped, 0-jumped, 1, 2}
  int untouched = 0;
  for (const ProductTrajectory& t : pending)
    untouched += t.steps.size() == 1 &&
                 (t.steps[0].state.b == 1 || t.steps[0].state.b == 2);
  CHECK(untouched == 2);
}

TEST_CASE("min_horizon counts jump states") {
  CHECK(min_horizon(Ldba::load_file(fixture_path("fgy.ldba"))) == 1);
  CHECK(min_horizon(Ldba::load_file(fixture_path("cycle_yr.ldba"))) == 0);
  const Ldba three = Ldba::parse(
      "ap: y\nstates: 4\ninitial: 0\naccepting: 3\n"
      "0 [true] -> 1\n1 [true] -> 2\n2 [true] -> 2\n3 [true] -> 3\n"
      "0 eps -> 3\n1 eps -> 3\n2 eps -> 3\n",
      "three-jumps");
  CHECK(min_horizon(three) == 3);
}

TEST_CASE("replay buffer evicts in order and samples its contents") {
  ReplayBuffer<int> buffer(3);
  for (int i = 0; i < 5; ++i) buffer.push(i);
  REQUIRE(buffer.size() == 3);
  CHECK(buffer.items().front() == 2);  // 0 and 1 evicted
  Rng rng(61);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 3000; ++i) ++counts[buffer.sample(rng)];
  CHECK(counts[0] == 0);
  CHECK(counts[1] == 0);
  for (int v : {2, 3, 4}) CHECK(counts[v] > 800);
}

TEST_CASE("trajectory store deduplicates by content") {
  const TabularMdp env = plain_pair_env();
  const Ldba aut = Ldba::load_file(fixture_path("fgy.ldba"));
  const ProductSystem sys(env, aut);
  const ProductTrajectory traj = one_step(sys);
  TrajectoryStore store;
  CHECK(store.insert(traj));
  CHECK_FALSE(store.insert(traj));
  CHECK(store.size() == 1);
  for (const ProductTrajectory& member : lcer_pg_offline(traj, sys))
    store.insert(member);
  CHECK(store.size() == 5);  // observed annotation was already present
}

TEST_CASE("tuple dump format") {
  std::deque<QTuple> tuples;
  tuples.push_back({0, 0, ProductAction::jump(0), 1.0, 0, 1});
  tuples.push_back({3, 1, ProductAction::mdp(2), 0.0, 4, 2});
  CHECK(dump_tuples(tuples) ==
        "0 0 eps0 1 0 1\n"
        "3 1 a2 0 4 2\n");
}
