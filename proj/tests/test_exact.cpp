#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "ltlrl/exact.hpp"
#include "ltlrl/harness.hpp"
#include "support/oracles.hpp"

using namespace ltlrl;

namespace {

std::string fixture_path(const std::string& name) {
  return (std::filesystem::path(LTLRL_FIXTURE_DIR) / name).string();
}

struct TwoChoiceSetup {
  TwoChoiceMdp env;
  Ldba aut;
  ProductSystem sys;

  explicit TwoChoiceSetup(double alpha)
      : env(alpha), aut(Ldba::load_file(fixture_path("two_choice.ldba"))),
        sys(env, aut) {}

  // start_action applies at the start state for every automaton state;
  // all other states have the single continue action.
  InducedChain chain(int start_action) const {
    PolicySlots slots(sys.state_count(), 0);
    for (int b = 0; b < aut.state_count(); ++b)
      slots[sys.index_of({TwoChoiceMdp::kStart, b})] = start_action;
    return build_chain(sys, slots);
  }
};

// Three-state chain: start -> accepting -> absorbing sink; every run fails
// after exactly one accepting visit.
InducedChain one_visit_chain() {
  InducedChain chain;
  chain.state_count = 3;
  chain.transition = {0, 1, 0, 0, 0, 1, 0, 0, 1};
  chain.accepting = {0, 1, 0};
  chain.initial = {1, 0, 0};
  chain.validate();
  return chain;
}

}  // namespace

TEST_CASE("satisfaction probabilities of the two-choice policies") {
  const TwoChoiceSetup setup(0.9);
  CHECK(satisfaction_probability(setup.chain(TwoChoiceMdp::kActionA)) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(satisfaction_probability(setup.chain(TwoChoiceMdp::kActionB)) ==
        doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("absorbing non-accepting start never satisfies") {
  InducedChain chain;
  chain.state_count = 1;
  chain.transition = {1.0};
  chain.accepting = {0};
  chain.initial = {1.0};
  CHECK(satisfaction_probability(chain) == 0.0);
  CHECK(eventual_value(chain, 0.99) == 0.0);
  CHECK(expected_failing_visits(chain) == 0.0);
}

TEST_CASE("eventual and standard values reproduce the closed forms") {
  const TwoChoiceSetup setup(0.9);
  const double gamma = 0.99;
  const InducedChain a = setup.chain(TwoChoiceMdp::kActionA);
  const InducedChain b = setup.chain(TwoChoiceMdp::kActionB);

  // Accepting visit every second step with undiscounted gaps: 1/(1-gamma).
  CHECK(eventual_value(a, gamma) ==
        doctest::Approx(1.0 / (1.0 - gamma)).epsilon(1e-9));
  CHECK(eventual_value(b, gamma) ==
        doctest::Approx(0.9 / (1.0 - gamma)).epsilon(1e-9));
  CHECK(standard_value(a, gamma) ==
        doctest::Approx(1.0 / (1.0 - gamma * gamma)).epsilon(1e-9));
  CHECK(standard_value(b, gamma) ==
        doctest::Approx(0.9 / (1.0 - gamma)).epsilon(1e-9));

  // The myopia flip: standard discounting prefers B, eventual prefers A.
  CHECK(standard_value(b, gamma) > standard_value(a, gamma));
  CHECK(eventual_value(a, gamma) > eventual_value(b, gamma));
}

TEST_CASE("expected failing visits") {
  CHECK(expected_failing_visits(one_visit_chain()) == doctest::Approx(1.0));

  // Policy B fails straight into the sink without accepting visits; the
  // Monte Carlo estimate agrees.
  const TwoChoiceSetup setup(0.9);
  const InducedChain chain = setup.chain(TwoChoiceMdp::kActionB);
  CHECK(expected_failing_visits(chain) == doctest::Approx(0.0));
  const BsccInfo info = classify_bsccs(chain);
  Rng rng(31);
  long failing = 0, visits = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto sample = testing::simulate_chain(chain, info, rng);
    if (!sample.satisfied) {
      ++failing;
      visits += sample.accepting_visits;
    }
  }
  CHECK(failing > 8000);
  CHECK(visits == 0);

  // No failures at all: 0 by convention.
  CHECK(expected_failing_visits(setup.chain(TwoChoiceMdp::kActionA)) == 0.0);
}

TEST_CASE("lemma 1 sandwich on hand-built chains") {
  SUBCASE("always inside a good bottom SCC is tight") {
    InducedChain chain;
    chain.state_count = 2;
    chain.transition = {0, 1, 1, 0};
    chain.accepting = {1, 1};
    chain.initial = {1, 0};
    const BoundReport report = lemma1_report(chain, 0.99);
    CHECK(report.pass);
    CHECK(report.p_sat == doctest::Approx(1.0));
    CHECK(report.mid == doctest::Approx(1.0));
    CHECK(report.o_pi == doctest::Approx(0.0));
  }
  SUBCASE("one accepting visit then failure") {
    const BoundReport report = lemma1_report(one_visit_chain(), 0.9);
    CHECK(report.pass);
    CHECK(report.p_sat == doctest::Approx(0.0));
    CHECK(report.mid == doctest::Approx(0.1));
    CHECK(report.rhs == doctest::Approx(std::log(1.0 / 0.9)));
    CHECK(report.mid <= report.rhs);
  }
}

TEST_CASE("lemma 1 property suite on random chains") {
  Rng rng(37);
  for (int i = 0; i < 50; ++i) {
    const InducedChain chain = harness::random_chain(rng);
    for (double gamma : {0.9, 0.99, 0.999}) {
      const BoundReport report = lemma1_report(chain, gamma);
      CAPTURE(i);
      CAPTURE(report.csv_row());
      CHECK(report.pass);
    }
  }
}

TEST_CASE("scaled eventual value decreases toward the satisfaction "
          "probability as gamma rises") {
  Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    const InducedChain chain = harness::random_chain(rng);
    const double p = satisfaction_probability(chain);
    double previous = 1.0 + 1e-9;
    for (double gamma : {0.9, 0.99, 0.999}) {
      const double scaled = (1.0 - gamma) * eventual_value(chain, gamma);
      CHECK(scaled >= p - 1e-8);
      CHECK(scaled <= previous + 1e-8);
      previous = scaled;
    }
  }
}

TEST_CASE("exact quantities agree with Monte Carlo") {
  Rng rng(43);
  int chains_checked = 0;
  while (chains_checked < 10) {
    const InducedChain chain = harness::random_chain(rng);
    const BsccInfo info = classify_bsccs(chain);
    const double p = satisfaction_probability(chain);
    const double o = expected_failing_visits(chain);

    constexpr int kSamples = 100000;
    long satisfied = 0, failing = 0;
    double visit_total = 0.0, visit_square_total = 0.0;
    for (int i = 0; i < kSamples; ++i) {
      const auto sample = testing::simulate_chain(chain, info, rng);
      if (sample.satisfied) {
        ++satisfied;
      } else {
        ++failing;
        visit_total += static_cast<double>(sample.accepting_visits);
        visit_square_total += static_cast<double>(sample.accepting_visits) *
                              static_cast<double>(sample.accepting_visits);
      }
    }
    ++chains_checked;

    const double p_hat = static_cast<double>(satisfied) / kSamples;
    const double p_se = std::sqrt(std::max(p_hat * (1 - p_hat), 1e-12) /
                                  kSamples);
    CHECK(std::abs(p_hat - p) <= 3.0 * p_se + 1e-6);

    if (failing >= 100) {
      const double o_hat = visit_total / static_cast<double>(failing);
      const double variance =
          std::max(visit_square_total / failing - o_hat * o_hat, 1e-12);
      const double o_se = std::sqrt(variance / failing);
      CHECK(std::abs(o_hat - o) <= 3.0 * o_se + 1e-6);
    }
  }
}

TEST_CASE("policy enumeration verifies the suboptimality bound") {
  const TwoChoiceSetup setup(0.9);
  const EnumerationReport report = enumerate_optimal(setup.sys, 0.99);

  // Two start-state choices per automaton state: 4 deterministic policies.
  CHECK(report.policies.size() == 4);
  CHECK(report.sup_p_sat == doctest::Approx(1.0));

  // Eventual discounting picks A (probability 1), standard picks B.
  const PolicyEvaluation& eventual = report.policies[report.best_eventual];
  CHECK(eventual.slots[setup.sys.index_of({TwoChoiceMdp::kStart, 0})] ==
        TwoChoiceMdp::kActionA);
  CHECK(eventual.p_sat == doctest::Approx(1.0));
  CHECK(report.gap_eventual == doctest::Approx(0.0));
  CHECK(report.pass);

  const PolicyEvaluation& standard = report.policies[report.best_standard];
  CHECK(standard.slots[setup.sys.index_of({TwoChoiceMdp::kStart, 0})] ==
        TwoChoiceMdp::kActionB);
  CHECK(report.gap_standard == doctest::Approx(0.1));

  CHECK(report.max_o_pi == doctest::Approx(0.0));
  CHECK(report.bound == doctest::Approx(0.0));
}

TEST_CASE("enumeration rejects oversized policy spaces") {
  const GridWorld env = make_minecraft();
  const Ldba aut = Ldba::load_file(fixture_path("minecraft.ldba"));
  const ProductSystem sys(env, aut);
  CHECK_THROWS_AS(enumerate_optimal(sys, 0.99), SizeLimitError);
}

TEST_CASE("chains validate their tables") {
  InducedChain chain;
  chain.state_count = 2;
  chain.transition = {0.5, 0.5, 0.7, 0.2};  // second row sums to 0.9
  chain.accepting = {0, 0};
  chain.initial = {1, 0};
  CHECK_THROWS_AS(chain.validate(), std::invalid_argument);
}
