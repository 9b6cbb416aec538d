#include <doctest.h>

#include <cmath>
#include <map>

#include "ltlrl/env.hpp"

using namespace ltlrl;

namespace {

double chi_square(const LabelledMdp& env, int s, int a, int samples,
                  Rng& rng) {
  std::map<int, int> observed;
  for (int i = 0; i < samples; ++i) ++observed[env.sample_transition(s, a, rng)];
  double statistic = 0.0;
  for (const auto& [target, p] : env.transition_distribution(s, a)) {
    const double expected = p * samples;
    const double diff = observed[target] - expected;
    statistic += diff * diff / expected;
    observed.erase(target);
  }
  REQUIRE(observed.empty());  // nothing sampled outside the support
  return statistic;
}

}  // namespace

TEST_CASE("minecraft grid basics") {
  const GridWorld env = make_minecraft();
  CHECK(env.width() == 10);
  CHECK(env.height() == 10);
  CHECK(env.start_cell() == env.cell(9, 2));
  CHECK(env.action_count(env.start_cell()) == 5);
  CHECK(env.label(env.start_cell()) == 0);
  CHECK(env.transition_distribution(env.start_cell(), GridWorld::kNothing) ==
        Distribution{{env.start_cell(), 1.0}});
  validate_env(env);

  int y_cells = 0, b_cells = 0, r_cells = 0;
  for (int s = 0; s < env.state_count(); ++s) {
    const Letter label = env.label(s);
    y_cells += label == env.alphabet().singleton("y");
    b_cells += label == env.alphabet().singleton("b");
    r_cells += label == env.alphabet().singleton("r");
  }
  CHECK(y_cells == 4);
  CHECK(b_cells == 4);
  CHECK(r_cells == 6);
}

TEST_CASE("grid moves clamp at the boundary") {
  const GridWorld env = make_minecraft();
  // Start cell sits on the right edge.
  CHECK(env.transition_distribution(env.start_cell(), GridWorld::kRight) ==
        Distribution{{env.start_cell(), 1.0}});
  CHECK(env.transition_distribution(env.cell(0, 0), GridWorld::kLeft) ==
        Distribution{{env.cell(0, 0), 1.0}});
  CHECK(env.transition_distribution(env.cell(0, 0), GridWorld::kUp) ==
        Distribution{{env.cell(0, 0), 1.0}});
  for (int s = 0; s < env.state_count(); ++s)
    for (int a = 0; a < 5; ++a) {
      const Distribution dist = env.transition_distribution(s, a);
      REQUIRE(dist.size() == 1);  // deterministic grid
      CHECK(dist.front().first >= 0);
      CHECK(dist.front().first < env.state_count());
    }
}

TEST_CASE("blocked cells behave like walls") {
  const GridWorld env = GridWorld::from_layout({
      "S#",
      "..",
  });
  CHECK(env.transition_distribution(env.cell(0, 0), GridWorld::kRight) ==
        Distribution{{env.cell(0, 0), 1.0}});
  CHECK(env.transition_distribution(env.cell(0, 0), GridWorld::kDown) ==
        Distribution{{env.cell(0, 1), 1.0}});
}

TEST_CASE("flatworld grid rasterizes the documented disks") {
  const GridWorld env = make_flatworld_grid(10);
  const Alphabet& ap = env.alphabet();
  const double cell = 4.0 / 10;
  auto cell_of = [&](double x, double y) {
    return env.cell(static_cast<int>((x + 2.0) / cell),
                    static_cast<int>((y + 2.0) / cell));
  };
  CHECK(env.start_cell() == cell_of(-1.0, -1.0));
  CHECK(env.label(env.start_cell()) == 0);
  // Cell centered at (1.4, 0.6) lies inside both the yellow and blue disks.
  CHECK(env.label(cell_of(1.4, 0.6)) ==
        (ap.singleton("y") | ap.singleton("b")));
  CHECK(env.label(cell_of(1.0, 1.0)) == ap.singleton("y"));
  CHECK(env.label(cell_of(-1.0, 1.0)) == ap.singleton("r"));
  // Far corners are unlabelled.
  CHECK(env.label(env.cell(0, 0)) == 0);
  CHECK(env.label(env.cell(9, 9)) == 0);
  CHECK(env.label(env.cell(0, 9)) == 0);
  CHECK(env.label(env.cell(9, 0)) == 0);
  for (int s = 0; s < env.state_count(); ++s) CHECK(env.action_count(s) == 5);
  CHECK_THROWS_AS(make_flatworld_grid(9), std::invalid_argument);
  validate_env(env);
}

TEST_CASE("two-choice transitions match the construction") {
  const TwoChoiceMdp env = make_two_choice(0.9);
  validate_env(env);
  CHECK(env.transition_distribution(TwoChoiceMdp::kStart,
                                    TwoChoiceMdp::kActionA) ==
        Distribution{{TwoChoiceMdp::kAcc2a, 1.0}});
  const Distribution risky = env.transition_distribution(
      TwoChoiceMdp::kStart, TwoChoiceMdp::kActionB);
  REQUIRE(risky.size() == 2);
  CHECK(risky[0].first == TwoChoiceMdp::kAcc1);
  CHECK(risky[0].second == doctest::Approx(0.9));
  CHECK(risky[1].first == TwoChoiceMdp::kSink);
  CHECK(risky[1].second == doctest::Approx(0.1));
  CHECK(env.transition_distribution(TwoChoiceMdp::kSink, 0) ==
        Distribution{{TwoChoiceMdp::kSink, 1.0}});
  CHECK(env.transition_distribution(TwoChoiceMdp::kAcc2a, 0) ==
        Distribution{{TwoChoiceMdp::kAcc2b, 1.0}});
  CHECK(env.transition_distribution(TwoChoiceMdp::kAcc2b, 0) ==
        Distribution{{TwoChoiceMdp::kAcc2a, 1.0}});

  const Letter acc = env.alphabet().singleton("acc");
  CHECK(env.label(TwoChoiceMdp::kAcc2a) == acc);
  CHECK(env.label(TwoChoiceMdp::kAcc1) == acc);
  CHECK(env.label(TwoChoiceMdp::kStart) == 0);
  CHECK(env.label(TwoChoiceMdp::kAcc2b) == 0);

  // The only stochastic transition is (start, B).
  for (int s = 0; s < env.state_count(); ++s)
    for (int a = 0; a < env.action_count(s); ++a) {
      const bool stochastic = env.transition_distribution(s, a).size() > 1;
      CHECK(stochastic == (s == TwoChoiceMdp::kStart &&
                           a == TwoChoiceMdp::kActionB));
    }

  CHECK_THROWS_AS(make_two_choice(0.0), std::domain_error);
  CHECK_THROWS_AS(make_two_choice(1.0), std::domain_error);
}

TEST_CASE("pacman ghost chases with probability 0.8") {
  const PacmanMdp env = make_pacman();
  validate_env(env);
  const Letter food = env.alphabet().singleton("food");
  const Letter ghost = env.alphabet().singleton("ghost");

  // Agent at (2,2), ghost at (5,2): after the agent stays put the unique
  // distance-decreasing ghost move is left.
  const int agent = 2 * env.width() + 2;
  const int ghost_cell = 2 * env.width() + 5;
  const int state = agent * env.cells() + ghost_cell;
  double toward = 0.0, total = 0.0;
  for (const auto& [next, p] : env.transition_distribution(state, 4)) {
    const int g2 = next % env.cells();
    const int d = std::abs(g2 % env.width() - 2) +
                  std::abs(g2 / env.width() - 2);
    if (d < 3) toward += p;
    total += p;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // 0.8 chase mass plus the random component that happens to step closer.
  CHECK(toward == doctest::Approx(0.8 + 0.2 / 5.0));

  const int food_state = (3 * env.width() + 7) * env.cells() + ghost_cell;
  CHECK((env.label(food_state) & food) == food);
  CHECK((env.label(agent * env.cells() + agent) & ghost) == ghost);
}

TEST_CASE("sampled frequencies match the distributions") {
  Rng rng(211);
  std::vector<double> statistics;

  const TwoChoiceMdp two_choice = make_two_choice(0.9);
  statistics.push_back(
      chi_square(two_choice, TwoChoiceMdp::kStart, TwoChoiceMdp::kActionB,
                 10000, rng));

  const PacmanMdp pacman = make_pacman();
  const int start = pacman.initial_distribution().front().first;
  for (int a = 0; a < 5; ++a)
    statistics.push_back(chi_square(pacman, start, a, 10000, rng));

  const GridWorld slippery = GridWorld::from_layout(
      {
          "S..",
          ".y.",
          "..b",
      },
      0.25);
  for (int s : {0, 4, 8})
    for (int a = 0; a < 5; ++a)
      statistics.push_back(chi_square(slippery, s, a, 10000, rng));

  REQUIRE(statistics.size() <= 21);
  for (double statistic : statistics) CHECK(statistic < 40.0);
}
