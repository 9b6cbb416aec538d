#include "ltlrl/env.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>

namespace ltlrl {

int LabelledMdp::sample_transition(int s, int a, Rng& rng) const {
  const Distribution dist = transition_distribution(s, a);
  if (dist.size() == 1) return dist.front().first;
  return sample_weighted(dist, rng);
}

std::string LabelledMdp::state_name(int s) const {
  return "s" + std::to_string(s);
}

std::string LabelledMdp::action_name(int, int a) const {
  return "a" + std::to_string(a);
}

namespace {

void check_distribution(const Distribution& dist, const std::string& what,
                        int state_count) {
  if (dist.empty())
    throw std::invalid_argument(what + ": empty distribution");
  double total = 0.0;
  for (const auto& [s, p] : dist) {
    if (s < 0 || s >= state_count)
      throw std::invalid_argument(what + ": state out of range");
    if (p < 0.0) throw std::invalid_argument(what + ": negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument(what + ": probabilities sum to " +
                                std::to_string(total));
}

}  // namespace

void validate_env(const LabelledMdp& env) {
  const int n = env.state_count();
  check_distribution(env.initial_distribution(), "initial distribution", n);
  const Letter letter_limit = env.alphabet().letter_count();
  for (int s = 0; s < n; ++s) {
    if (env.label(s) >= letter_limit)
      throw std::invalid_argument("label of state " + std::to_string(s) +
                                  " uses undeclared atoms");
    const int actions = env.action_count(s);
    if (actions <= 0)
      throw std::invalid_argument("state " + std::to_string(s) +
                                  " has no actions");
    for (int a = 0; a < actions; ++a)
      check_distribution(env.transition_distribution(s, a),
                         "transition (" + std::to_string(s) + ", " +
                             std::to_string(a) + ")",
                         n);
  }
}

// ---------------------------------------------------------------------------
// TabularMdp
// ---------------------------------------------------------------------------

TabularMdp::TabularMdp(Alphabet alphabet, std::vector<Letter> labels,
                       std::vector<std::vector<Distribution>> transitions,
                       Distribution initial)
    : alphabet_(std::move(alphabet)), labels_(std::move(labels)),
      transitions_(std::move(transitions)), initial_(std::move(initial)) {
  if (labels_.size() != transitions_.size())
    throw std::invalid_argument("labels/transitions size mismatch");
  validate_env(*this);
}

// ---------------------------------------------------------------------------
// GridWorld
// ---------------------------------------------------------------------------

GridWorld::GridWorld(int width, int height, Alphabet alphabet,
                     std::vector<Letter> zones, std::vector<char> blocked,
                     int start_cell, double slip)
    : width_(width), height_(height), alphabet_(std::move(alphabet)),
      zones_(std::move(zones)), blocked_(std::move(blocked)),
      start_(start_cell), slip_(slip) {
  if (width_ <= 0 || height_ <= 0)
    throw std::invalid_argument("grid dimensions must be positive");
  if (zones_.size() != static_cast<std::size_t>(width_ * height_) ||
      blocked_.size() != zones_.size())
    throw std::invalid_argument("grid table size mismatch");
  if (start_ < 0 || start_ >= width_ * height_ || blocked_[start_])
    throw std::invalid_argument("start cell out of bounds or blocked");
  if (slip_ < 0.0 || slip_ >= 1.0)
    throw std::invalid_argument("slip probability must lie in [0,1)");
}

GridWorld GridWorld::from_layout(const std::vector<std::string>& rows,
                                 double slip) {
  if (rows.empty()) throw std::invalid_argument("empty layout");
  const int height = static_cast<int>(rows.size());
  const int width = static_cast<int>(rows[0].size());
  Alphabet alphabet({"y", "b", "r"});
  std::vector<Letter> zones(width * height, 0);
  std::vector<char> blocked(width * height, 0);
  int start = -1;
  for (int y = 0; y < height; ++y) {
    if (static_cast<int>(rows[y].size()) != width)
      throw std::invalid_argument("ragged layout row " + std::to_string(y));
    for (int x = 0; x < width; ++x) {
      const int cell = y * width + x;
      switch (rows[y][x]) {
        case '.':
          break;
        case 'y':
        case 'b':
        case 'r':
          zones[cell] = alphabet.singleton(std::string(1, rows[y][x]));
          break;
        case '#':
          blocked[cell] = 1;
          break;
        case 'S':
          start = cell;
          break;
        default:
          throw std::invalid_argument(std::string("bad layout character '") +
                                      rows[y][x] + "'");
      }
    }
  }
  if (start < 0) throw std::invalid_argument("layout has no start cell");
  return GridWorld(width, height, std::move(alphabet), std::move(zones),
                   std::move(blocked), start, slip);
}

int GridWorld::move(int s, int a) const {
  int x = s % width_, y = s / width_;
  switch (a) {
    case kLeft:
      --x;
      break;
    case kRight:
      ++x;
      break;
    case kUp:
      --y;
      break;
    case kDown:
      ++y;
      break;
    default:
      return s;
  }
  if (x < 0 || x >= width_ || y < 0 || y >= height_) return s;
  const int target = y * width_ + x;
  return blocked_[target] ? s : target;
}

Distribution GridWorld::transition_distribution(int s, int a) const {
  if (slip_ == 0.0) return {{move(s, a), 1.0}};
  std::map<int, double> mass;
  mass[move(s, a)] += 1.0 - slip_;
  for (int other = 0; other < 5; ++other) mass[move(s, other)] += slip_ / 5.0;
  return Distribution(mass.begin(), mass.end());
}

std::string GridWorld::state_name(int s) const {
  return "(" + std::to_string(s % width_) + "," + std::to_string(s / width_) +
         ")";
}

std::string GridWorld::action_name(int, int a) const {
  static const char* names[] = {"left", "right", "up", "down", "nothing"};
  return names[a];
}

// ---------------------------------------------------------------------------
// TwoChoiceMdp
// ---------------------------------------------------------------------------

TwoChoiceMdp::TwoChoiceMdp(double alpha)
    : alpha_(alpha), alphabet_({"acc"}) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("alpha must lie strictly inside (0,1)");
}

Distribution TwoChoiceMdp::transition_distribution(int s, int a) const {
  switch (s) {
    case kStart:
      if (a == kActionA) return {{kAcc2a, 1.0}};
      return {{kAcc1, alpha_}, {kSink, 1.0 - alpha_}};
    case kAcc2a:
      return {{kAcc2b, 1.0}};
    case kAcc2b:
      return {{kAcc2a, 1.0}};
    case kAcc1:
      return {{kAcc1, 1.0}};
    default:
      return {{kSink, 1.0}};
  }
}

Letter TwoChoiceMdp::label(int s) const {
  return (s == kAcc2a || s == kAcc1) ? alphabet_.singleton("acc") : 0;
}

std::string TwoChoiceMdp::state_name(int s) const {
  static const char* names[] = {"start", "acc2a", "acc2b", "acc1", "sink"};
  return names[s];
}

std::string TwoChoiceMdp::action_name(int s, int a) const {
  if (s == kStart) return a == kActionA ? "A" : "B";
  return "continue";
}

// ---------------------------------------------------------------------------
// PacmanMdp
// ---------------------------------------------------------------------------

PacmanMdp::PacmanMdp() : alphabet_({"food", "ghost"}) {
  // Fixture layout: agent starts at (0,3), ghost at (7,1), one food pellet
  // at (7,3).
  agent_start_ = 3 * kWidth + 0;
  ghost_start_ = 1 * kWidth + 7;
  food_cell_ = 3 * kWidth + 7;
}

int PacmanMdp::move(int cell, int a) const {
  int x = cell % kWidth, y = cell / kWidth;
  switch (a) {
    case 0:
      --x;
      break;
    case 1:
      ++x;
      break;
    case 2:
      --y;
      break;
    case 3:
      ++y;
      break;
    default:
      return cell;
  }
  if (x < 0 || x >= kWidth || y < 0 || y >= kHeight) return cell;
  return y * kWidth + x;
}

Distribution PacmanMdp::ghost_moves(int agent, int ghost) const {
  const int ax = agent % kWidth, ay = agent / kWidth;
  std::map<int, double> mass;
  // Chase component: uniform over the moves that strictly decrease the
  // Manhattan distance; stays put when already co-located.
  std::vector<int> chasing;
  const int d0 = std::abs(ghost % kWidth - ax) + std::abs(ghost / kWidth - ay);
  for (int a = 0; a < 4; ++a) {
    const int g2 = move(ghost, a);
    const int d = std::abs(g2 % kWidth - ax) + std::abs(g2 / kWidth - ay);
    if (d < d0) chasing.push_back(g2);
  }
  if (chasing.empty()) chasing.push_back(ghost);
  for (int g2 : chasing)
    mass[g2] += kChaseProbability / static_cast<double>(chasing.size());
  for (int a = 0; a < 5; ++a)
    mass[move(ghost, a)] += (1.0 - kChaseProbability) / 5.0;
  return Distribution(mass.begin(), mass.end());
}

Distribution PacmanMdp::transition_distribution(int s, int a) const {
  const int agent = s / cells(), ghost = s % cells();
  const int agent2 = move(agent, a);
  Distribution out;
  for (const auto& [ghost2, p] : ghost_moves(agent2, ghost))
    out.emplace_back(joint(agent2, ghost2), p);
  return out;
}

Distribution PacmanMdp::initial_distribution() const {
  return {{joint(agent_start_, ghost_start_), 1.0}};
}

Letter PacmanMdp::label(int s) const {
  const int agent = s / cells(), ghost = s % cells();
  Letter out = 0;
  if (agent == food_cell_) out |= alphabet_.singleton("food");
  if (agent == ghost) out |= alphabet_.singleton("ghost");
  return out;
}

std::string PacmanMdp::state_name(int s) const {
  const int agent = s / cells(), ghost = s % cells();
  return "a(" + std::to_string(agent % kWidth) + "," +
         std::to_string(agent / kWidth) + ")g(" +
         std::to_string(ghost % kWidth) + "," +
         std::to_string(ghost / kWidth) + ")";
}

std::string PacmanMdp::action_name(int, int a) const {
  static const char* names[] = {"left", "right", "up", "down", "nothing"};
  return names[a];
}

// ---------------------------------------------------------------------------
// Factories
// ---------------------------------------------------------------------------

GridWorld make_minecraft() {
  return GridWorld::from_layout({
      "..........",
      ".yy.......",
      ".yy......S",
      "....rr....",
      "....rr....",
      "....rr....",
      "..........",
      ".bb.......",
      ".bb.......",
      "..........",
  });
}

GridWorld make_flatworld_grid(int n) {
  if (n < 10) throw std::invalid_argument("resolution must be at least 10");
  Alphabet alphabet({"y", "b", "r"});
  struct Disk {
    double x, y, radius;
    Letter atom;
  };
  const Disk disks[] = {
      {1.0, 1.0, 0.9, alphabet.singleton("y")},
      {1.5, 0.5, 0.6, alphabet.singleton("b")},
      {-1.0, 1.0, 0.7, alphabet.singleton("r")},
  };
  const double cell_size = 4.0 / n;
  auto cell_of = [&](double x, double y) {
    const int i = std::min(n - 1, static_cast<int>((x + 2.0) / cell_size));
    const int j = std::min(n - 1, static_cast<int>((y + 2.0) / cell_size));
    return j * n + i;
  };
  std::vector<Letter> zones(n * n, 0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double cx = -2.0 + (i + 0.5) * cell_size;
      const double cy = -2.0 + (j + 0.5) * cell_size;
      for (const Disk& d : disks)
        if (std::hypot(cx - d.x, cy - d.y) <= d.radius)
          zones[j * n + i] |= d.atom;
    }
  }
  return GridWorld(n, n, std::move(alphabet), std::move(zones),
                   std::vector<char>(n * n, 0), cell_of(-1.0, -1.0));
}

TwoChoiceMdp make_two_choice(double alpha) { return TwoChoiceMdp(alpha); }

PacmanMdp make_pacman() { return PacmanMdp(); }

}  // namespace ltlrl
