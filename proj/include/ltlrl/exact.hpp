#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ltlrl/product.hpp"

namespace ltlrl {

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IterationLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SizeLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Markov chain induced on the product space by a fixed policy. Jump
/// actions are collapsed into probability-1 edges; rows are stochastic
/// within 1e-12.
struct InducedChain {
  int state_count = 0;
  std::vector<double> transition;  // row-major state_count x state_count
  std::vector<char> accepting;
  std::vector<double> initial;

  double p(int from, int to) const {
    return transition[static_cast<std::size_t>(from) * state_count + to];
  }
  double& p(int from, int to) {
    return transition[static_cast<std::size_t>(from) * state_count + to];
  }
  void validate() const;
};

/// Distribution over the available product actions at a state.
using StochasticPolicy = std::function<std::vector<std::pair<ProductAction, double>>(
    const ProductState&)>;

/// Deterministic policy as an action-slot choice per product state index.
using PolicySlots = std::vector<int>;

InducedChain build_chain(const ProductSystem& sys,
                         const StochasticPolicy& policy);
InducedChain build_chain(const ProductSystem& sys, const PolicySlots& slots);

/// Bottom-SCC classification: a state is transient when its SCC has an
/// outgoing edge; a bottom SCC is good when it contains an accepting state
/// (inside a bottom SCC every state recurs almost surely, so containment
/// is equivalent to visiting accepting states infinitely often).
struct BsccInfo {
  enum Class : char { kTransient = 0, kGood = 1, kBad = 2 };
  std::vector<int> component;
  std::vector<char> state_class;
};

BsccInfo classify_bsccs(const InducedChain& chain);

/// Probability of absorption into a good bottom SCC from the initial
/// distribution, via the reachability linear system on transient states.
double satisfaction_probability(const InducedChain& chain);

/// Value of the accepting-visit objective where the discount is applied
/// only when leaving an accepting state: states in good bottom SCCs are
/// worth exactly 1/(1-gamma), bad ones 0, and the transient block is
/// closed by a monotone fixpoint from zero (the minimal solution; a direct
/// solve can be singular on reward-free recurrent blocks).
double eventual_value(const InducedChain& chain, double gamma);

/// Uniformly discounted variant (a plain linear solve).
double standard_value(const InducedChain& chain, double gamma);

/// Expected number of accepting-state visits conditioned on failing:
/// sum over accepting transient states of (expected visits) x (absorption
/// probability into bad bottom SCCs), divided by the failure probability;
/// 0 by convention when failure has probability 0.
double expected_failing_visits(const InducedChain& chain);

struct BoundReport {
  double p_sat = 0.0;
  double v_gamma = 0.0;
  double o_pi = 0.0;
  double gamma = 0.0;
  double lhs = 0.0;  // p_sat
  double mid = 0.0;  // (1-gamma) * v_gamma
  double rhs = 0.0;  // p_sat + log(1/gamma) * o_pi
  bool pass = false;

  std::string csv_row() const;
  static std::string csv_header();
};

/// Checks p_sat <= (1-gamma) V <= p_sat + log(1/gamma) O within 1e-8.
BoundReport lemma1_report(const InducedChain& chain, double gamma);

struct PolicyEvaluation {
  PolicySlots slots;
  double p_sat = 0.0;
  double v_eventual = 0.0;
  double v_standard = 0.0;
  double o_pi = 0.0;
};

struct EnumerationReport {
  std::vector<PolicyEvaluation> policies;
  int best_prob = -1;       // argmax p_sat
  int best_eventual = -1;   // argmax v_eventual
  int best_standard = -1;   // argmax v_standard
  double sup_p_sat = 0.0;
  double gap_eventual = 0.0;  // sup p_sat - p_sat(best_eventual)
  double gap_standard = 0.0;
  double max_o_pi = 0.0;
  double bound = 0.0;  // 2 log(1/gamma) max_o_pi
  bool pass = false;   // gap_eventual <= bound (up to float slack)
};

/// Evaluate every deterministic product policy; throws SizeLimitError when
/// the policy count exceeds the limit.
EnumerationReport enumerate_optimal(const ProductSystem& sys, double gamma,
                                    std::size_t policy_limit = 10000);

}  // namespace ltlrl
