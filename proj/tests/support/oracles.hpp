#pragma once

// Test-side reference implementations, kept independent of the library
// algorithms they check.

#include <vector>

#include "ltlrl/exact.hpp"
#include "ltlrl/ltl.hpp"
#include "ltlrl/product.hpp"

namespace ltlrl::testing {

/// Forward-scanning LTL evaluation on a lasso word. Positions past the
/// prefix are canonicalized modulo the cycle and temporal operators scan
/// ahead across the distinct positions directly (one full cycle suffices),
/// instead of the backward fixpoint used by the library.
bool eval_by_unrolling(const Formula& phi, const LassoWord& word);

/// Random formula of the given depth over the atoms; all node kinds.
FormulaPtr random_formula(const std::vector<std::string>& atoms, int depth,
                          Rng& rng);

/// Every automaton-consistent counterfactual annotation of the rollout's
/// environment projection, enumerated directly: any initial automaton
/// state, at most one jump insertion per position (including a trailing
/// one). Returned in canonical order.
std::vector<ProductTrajectory> enumerate_annotations(
    const ProductTrajectory& traj, const ProductSystem& sys);

struct ChainSample {
  bool satisfied = false;
  long accepting_visits = 0;  // visits before the bottom SCC decides it
};

/// Simulate the chain until it enters a bottom SCC (classified once up
/// front); the outcome is decided there, so the estimate is unbiased.
ChainSample simulate_chain(const InducedChain& chain, const BsccInfo& info,
                           Rng& rng, long step_cap = 100000);

}  // namespace ltlrl::testing
