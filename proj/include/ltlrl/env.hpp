#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ltlrl/ltl.hpp"
#include "ltlrl/rng.hpp"

namespace ltlrl {

using Distribution = std::vector<std::pair<int, double>>;

/// Labelled MDP contract. States and actions are dense integer ids; actions
/// are local to a state (0 .. action_count(s)-1). Environments are immutable
/// after construction and sampling takes the caller's generator, so parallel
/// rollouts only need independent generators.
class LabelledMdp {
 public:
  virtual ~LabelledMdp() = default;

  virtual const Alphabet& alphabet() const = 0;
  virtual int state_count() const = 0;
  virtual int action_count(int s) const = 0;
  virtual Distribution transition_distribution(int s, int a) const = 0;
  virtual Distribution initial_distribution() const = 0;
  virtual Letter label(int s) const = 0;

  virtual int sample_transition(int s, int a, Rng& rng) const;
  virtual std::string state_name(int s) const;
  virtual std::string action_name(int s, int a) const;
};

/// Throws std::invalid_argument when any distribution fails to be a
/// probability vector (tolerance 1e-12) or a label uses undeclared bits.
void validate_env(const LabelledMdp& env);

// ---------------------------------------------------------------------------
// Table-driven environment
// ---------------------------------------------------------------------------

/// Fully explicit finite environment; the building block for small test
/// fixtures and randomly generated instances.
class TabularMdp final : public LabelledMdp {
 public:
  TabularMdp(Alphabet alphabet, std::vector<Letter> labels,
             std::vector<std::vector<Distribution>> transitions,
             Distribution initial);

  const Alphabet& alphabet() const override { return alphabet_; }
  int state_count() const override {
    return static_cast<int>(labels_.size());
  }
  int action_count(int s) const override {
    return static_cast<int>(transitions_[s].size());
  }
  Distribution transition_distribution(int s, int a) const override {
    return transitions_[s][a];
  }
  Distribution initial_distribution() const override { return initial_; }
  Letter label(int s) const override { return labels_[s]; }

 private:
  Alphabet alphabet_;
  std::vector<Letter> labels_;
  std::vector<std::vector<Distribution>> transitions_;
  Distribution initial_;
};

// ---------------------------------------------------------------------------
// Grid worlds
// ---------------------------------------------------------------------------

/// Rectangular grid with zone labels, optional blocked cells and a slip
/// probability. Actions are left, right, up, down, nothing; moves off the
/// edge or into a blocked cell leave the state unchanged. With slip > 0 the
/// executed action is uniform over all five with probability slip.
class GridWorld final : public LabelledMdp {
 public:
  enum Action { kLeft = 0, kRight = 1, kUp = 2, kDown = 3, kNothing = 4 };

  GridWorld(int width, int height, Alphabet alphabet,
            std::vector<Letter> zones, std::vector<char> blocked,
            int start_cell, double slip = 0.0);

  /// Rows of characters: '.' empty, 'y'/'b'/'r' zone cells, '#' blocked,
  /// 'S' start. The alphabet is fixed to {y, b, r}.
  static GridWorld from_layout(const std::vector<std::string>& rows,
                               double slip = 0.0);

  const Alphabet& alphabet() const override { return alphabet_; }
  int state_count() const override { return width_ * height_; }
  int action_count(int) const override { return 5; }
  Distribution transition_distribution(int s, int a) const override;
  Distribution initial_distribution() const override {
    return {{start_, 1.0}};
  }
  Letter label(int s) const override { return zones_[s]; }
  std::string state_name(int s) const override;
  std::string action_name(int s, int a) const override;

  int width() const { return width_; }
  int height() const { return height_; }
  int cell(int x, int y) const { return y * width_ + x; }
  int start_cell() const { return start_; }

 private:
  int move(int s, int a) const;

  int width_;
  int height_;
  Alphabet alphabet_;
  std::vector<Letter> zones_;
  std::vector<char> blocked_;
  int start_;
  double slip_;
};

// ---------------------------------------------------------------------------
// Two-choice chain
// ---------------------------------------------------------------------------

/// Five-state environment contrasting a safe two-step accepting cycle with
/// a risky one-step one: from the start, action A deterministically enters
/// a 2-cycle whose first state carries the accepting label, while action B
/// reaches a labelled self-loop with probability alpha and an absorbing
/// sink otherwise. The accepting condition is expressed through the "acc"
/// atom and a two-state automaton tracking its occurrence.
class TwoChoiceMdp final : public LabelledMdp {
 public:
  enum State { kStart = 0, kAcc2a = 1, kAcc2b = 2, kAcc1 = 3, kSink = 4 };
  enum StartAction { kActionA = 0, kActionB = 1 };

  explicit TwoChoiceMdp(double alpha);

  const Alphabet& alphabet() const override { return alphabet_; }
  int state_count() const override { return 5; }
  int action_count(int s) const override { return s == kStart ? 2 : 1; }
  Distribution transition_distribution(int s, int a) const override;
  Distribution initial_distribution() const override {
    return {{kStart, 1.0}};
  }
  Letter label(int s) const override;
  std::string state_name(int s) const override;
  std::string action_name(int s, int a) const override;

  double alpha() const { return alpha_; }

 private:
  double alpha_;
  Alphabet alphabet_;
};

// ---------------------------------------------------------------------------
// Pursuit grid
// ---------------------------------------------------------------------------

/// 5x8 grid with one food pellet and a ghost that moves toward the agent
/// with probability 0.8 (uniformly among the distance-decreasing moves) and
/// uniformly at random otherwise. States are joint (agent, ghost) positions;
/// labels are {food} on the pellet cell and {ghost} on co-location.
class PacmanMdp final : public LabelledMdp {
 public:
  PacmanMdp();

  const Alphabet& alphabet() const override { return alphabet_; }
  int state_count() const override { return cells() * cells(); }
  int action_count(int) const override { return 5; }
  Distribution transition_distribution(int s, int a) const override;
  Distribution initial_distribution() const override;
  Letter label(int s) const override;
  std::string state_name(int s) const override;
  std::string action_name(int s, int a) const override;

  int width() const { return kWidth; }
  int height() const { return kHeight; }
  int cells() const { return kWidth * kHeight; }

  static constexpr int kWidth = 8;
  static constexpr int kHeight = 5;
  static constexpr double kChaseProbability = 0.8;

 private:
  int joint(int agent, int ghost) const { return agent * cells() + ghost; }
  int move(int cell, int a) const;
  Distribution ghost_moves(int agent, int ghost) const;

  Alphabet alphabet_;
  int food_cell_;
  int agent_start_;
  int ghost_start_;
};

// ---------------------------------------------------------------------------
// Fixture factories
// ---------------------------------------------------------------------------

/// 10x10 deterministic grid, start (9,2), with yellow and blue regions
/// separated by open ground and a red obstacle block in the middle.
GridWorld make_minecraft();

/// n x n discretization of the [-2,2]^2 plane (n >= 10). The agent starts
/// in the cell containing (-1,-1); zones are disks rasterized by cell
/// center: yellow at (1,1) radius 0.9, blue at (1.5,0.5) radius 0.6
/// (overlapping yellow), red at (-1,1) radius 0.7.
GridWorld make_flatworld_grid(int n);

/// alpha must lie strictly inside (0,1).
TwoChoiceMdp make_two_choice(double alpha);

PacmanMdp make_pacman();

}  // namespace ltlrl
