#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ltlrl/ltl.hpp"

namespace ltlrl {

class LdbaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidJumpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Limit-deterministic Buchi automaton over 2^AP with indexed jump
/// transitions. Loading validates:
///   - every state has exactly one satisfied guard per letter (the sigma
///     transition function is deterministic and total),
///   - the deterministic part (the sigma-closure of the accepting states
///     and all jump targets) carries no jump transitions and contains all
///     accepting states.
class Ldba {
 public:
  struct Edge {
    FormulaPtr guard;  // boolean formula over the alphabet, no temporal ops
    int target;
  };

  /// Parse the line-oriented file format; '#' starts a comment.
  ///
  ///   ap: y b r
  ///   states: 3
  ///   initial: 0
  ///   accepting: 1
  ///   0 [true] -> 0
  ///   0 eps -> 1
  ///   1 [y] -> 1
  ///   1 [!y] -> 2
  ///   2 [true] -> 2
  ///
  /// Multiple eps lines from one state are indexed in file order.
  static Ldba parse(const std::string& text, const std::string& origin = "");
  static Ldba load_file(const std::string& path);

  const Alphabet& alphabet() const { return alphabet_; }
  int state_count() const { return state_count_; }
  int initial_state() const { return initial_; }
  bool is_accepting(int b) const { return accepting_[b]; }
  const std::vector<int>& accepting_states() const { return accepting_list_; }

  /// The unique successor of b after reading letter a.
  int step_sigma(int b, Letter a) const {
    return table_[static_cast<std::size_t>(b) * alphabet_.letter_count() + a];
  }

  int jump_count(int b) const {
    return static_cast<int>(jump_edges_[b].size());
  }

  /// Target of the indexed jump; throws InvalidJumpError when the index is
  /// not available in b.
  int step_jump(int b, int jump_index) const;

  bool in_deterministic_part(int b) const { return deterministic_[b]; }
  const std::vector<Edge>& sigma_edges(int b) const { return sigma_edges_[b]; }

 private:
  Ldba() = default;
  void validate(const std::string& origin);

  Alphabet alphabet_;
  int state_count_ = 0;
  int initial_ = 0;
  std::vector<char> accepting_;
  std::vector<int> accepting_list_;
  std::vector<std::vector<Edge>> sigma_edges_;
  std::vector<std::vector<int>> jump_edges_;
  std::vector<int> table_;  // state-major letter lookup, built at load
  std::vector<char> deterministic_;
};

/// Decision and certificate for Buchi acceptance of a lasso word, resolving
/// the jump nondeterminism existentially.
struct LassoAcceptanceWitness {
  struct Step {
    int state;
    int position;    // index into prefix.cycle, in [0, |prefix|+|cycle|)
    bool consumed;   // sigma step reading letter(position) vs. jump
    int jump_index;  // meaningful when !consumed
  };

  bool accepted = false;
  /// When accepted: a closed cycle through the product of automaton states
  /// and word positions that visits an accepting state and consumes at
  /// least one letter. Applying each step's transition yields the next
  /// entry, wrapping around at the end.
  std::vector<Step> cycle;
};

LassoAcceptanceWitness accepts_lasso(const Ldba& aut, const LassoWord& w);

}  // namespace ltlrl
