#include "ltlrl/ldba.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>

namespace ltlrl {

namespace {

std::string strip(const std::string& line) {
  std::string s = line.substr(0, line.find('#'));
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool eval_guard(const Formula& g, Letter a, const Alphabet& ap) {
  switch (g.kind()) {
    case LtlKind::True:
      return true;
    case LtlKind::False:
      return false;
    case LtlKind::Atom:
      return a >> ap.index_of(g.atom_name()) & 1u;
    case LtlKind::Not:
      return !eval_guard(*g.left(), a, ap);
    case LtlKind::And:
      return eval_guard(*g.left(), a, ap) && eval_guard(*g.right(), a, ap);
    case LtlKind::Or:
      return eval_guard(*g.left(), a, ap) || eval_guard(*g.right(), a, ap);
    case LtlKind::Implies:
      return !eval_guard(*g.left(), a, ap) || eval_guard(*g.right(), a, ap);
    default:
      throw LdbaError("temporal operator in guard");
  }
}

[[noreturn]] void fail(const std::string& origin, int line,
                       const std::string& message) {
  std::string where = origin.empty() ? "" : origin + ":";
  if (line > 0) where += std::to_string(line) + ": ";
  throw LdbaError(where + message);
}

}  // namespace

Ldba Ldba::parse(const std::string& text, const std::string& origin) {
  Ldba aut;
  bool have_ap = false, have_states = false, have_initial = false,
       have_accepting = false;
  struct RawEdge {
    int line;
    int source;
    bool is_jump;
    std::string guard;
    int target;
  };
  std::vector<RawEdge> raw;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = strip(line);
    if (s.empty()) continue;

    if (s.rfind("ap:", 0) == 0) {
      std::istringstream fields(s.substr(3));
      std::vector<std::string> atoms;
      for (std::string atom; fields >> atom;) atoms.push_back(atom);
      try {
        aut.alphabet_ = Alphabet(std::move(atoms));
      } catch (const std::invalid_argument& e) {
        fail(origin, lineno, e.what());
      }
      have_ap = true;
      continue;
    }
    if (s.rfind("states:", 0) == 0) {
      aut.state_count_ = std::atoi(s.c_str() + 7);
      if (aut.state_count_ <= 0) fail(origin, lineno, "bad state count");
      have_states = true;
      continue;
    }
    if (s.rfind("initial:", 0) == 0) {
      aut.initial_ = std::atoi(s.c_str() + 8);
      have_initial = true;
      continue;
    }
    if (s.rfind("accepting:", 0) == 0) {
      std::istringstream fields(s.substr(10));
      for (int b; fields >> b;) aut.accepting_list_.push_back(b);
      have_accepting = true;
      continue;
    }

    // Edge lines: "<src> [guard] -> <dst>" or "<src> eps -> <dst>".
    std::istringstream fields(s);
    int source;
    if (!(fields >> source)) fail(origin, lineno, "expected a state index");
    std::string rest;
    std::getline(fields, rest);
    const auto arrow = rest.find("->");
    if (arrow == std::string::npos) fail(origin, lineno, "expected '->'");
    std::string lhs = strip(rest.substr(0, arrow));
    std::string rhs = strip(rest.substr(arrow + 2));
    int target = 0;
    try {
      target = std::stoi(rhs);
    } catch (...) {
      fail(origin, lineno, "expected a target state index");
    }
    if (lhs == "eps") {
      raw.push_back({lineno, source, true, "", target});
    } else if (lhs.size() >= 2 && lhs.front() == '[' && lhs.back() == ']') {
      raw.push_back(
          {lineno, source, false, lhs.substr(1, lhs.size() - 2), target});
    } else {
      fail(origin, lineno, "expected '[guard]' or 'eps'");
    }
  }

  if (!have_ap) fail(origin, 0, "missing 'ap:' line");
  if (!have_states) fail(origin, 0, "missing 'states:' line");
  if (!have_initial) fail(origin, 0, "missing 'initial:' line");
  if (!have_accepting) fail(origin, 0, "missing 'accepting:' line");

  const int n = aut.state_count_;
  if (aut.initial_ < 0 || aut.initial_ >= n)
    fail(origin, 0, "initial state out of range");
  aut.accepting_.assign(n, 0);
  for (int b : aut.accepting_list_) {
    if (b < 0 || b >= n) fail(origin, 0, "accepting state out of range");
    aut.accepting_[b] = 1;
  }
  std::sort(aut.accepting_list_.begin(), aut.accepting_list_.end());

  aut.sigma_edges_.resize(n);
  aut.jump_edges_.resize(n);
  for (const RawEdge& e : raw) {
    if (e.source < 0 || e.source >= n)
      fail(origin, e.line, "source state out of range");
    if (e.target < 0 || e.target >= n)
      fail(origin, e.line, "target state out of range");
    if (e.is_jump) {
      aut.jump_edges_[e.source].push_back(e.target);
      continue;
    }
    FormulaPtr guard;
    try {
      guard = parse_ltl(e.guard);
    } catch (const ParseError& err) {
      fail(origin, e.line, std::string("bad guard: ") + err.what());
    }
    if (!guard->is_temporal_free())
      fail(origin, e.line, "temporal operator in guard");
    for (const std::string& atom : atoms_of(*guard))
      if (aut.alphabet_.index_of(atom) < 0)
        fail(origin, e.line, "undeclared atom in guard: '" + atom + "'");
    aut.sigma_edges_[e.source].push_back({std::move(guard), e.target});
  }

  aut.validate(origin);
  return aut;
}

void Ldba::validate(const std::string& origin) {
  const int n = state_count_;
  const Letter letters = alphabet_.letter_count();

  // Determinism and totality over the full alphabet, checked by
  // enumerating every letter; the lookup table falls out of the check.
  table_.assign(static_cast<std::size_t>(n) * letters, -1);
  for (int b = 0; b < n; ++b) {
    for (Letter a = 0; a < letters; ++a) {
      int hits = 0;
      for (const Edge& e : sigma_edges_[b]) {
        if (!eval_guard(*e.guard, a, alphabet_)) continue;
        ++hits;
        table_[static_cast<std::size_t>(b) * letters + a] = e.target;
      }
      if (hits == 0)
        fail(origin, 0,
             "partial guards: state " + std::to_string(b) +
                 " has no transition on " + alphabet_.format_letter(a));
      if (hits > 1)
        fail(origin, 0,
             "non-deterministic guards: state " + std::to_string(b) +
                 " has " + std::to_string(hits) + " transitions on " +
                 alphabet_.format_letter(a));
    }
  }

  // Deterministic part: sigma-closure of accepting states and jump targets.
  deterministic_.assign(n, 0);
  std::deque<int> queue;
  auto seed = [&](int b) {
    if (!deterministic_[b]) {
      deterministic_[b] = 1;
      queue.push_back(b);
    }
  };
  for (int b = 0; b < n; ++b)
    if (accepting_[b]) seed(b);
  for (int b = 0; b < n; ++b)
    for (int target : jump_edges_[b]) seed(target);
  while (!queue.empty()) {
    const int b = queue.front();
    queue.pop_front();
    for (Letter a = 0; a < letters; ++a) seed(step_sigma(b, a));
  }

  for (int b = 0; b < n; ++b)
    if (deterministic_[b] && !jump_edges_[b].empty())
      fail(origin, 0,
           "jump inside deterministic part: state " + std::to_string(b));
  for (int b = 0; b < n; ++b)
    if (accepting_[b] && !deterministic_[b])
      fail(origin, 0, "accepting outside S_D: state " + std::to_string(b));
}

Ldba Ldba::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LdbaError("cannot open LDBA file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path);
}

int Ldba::step_jump(int b, int jump_index) const {
  if (jump_index < 0 || jump_index >= jump_count(b))
    throw InvalidJumpError("state " + std::to_string(b) +
                           " has no jump with index " +
                           std::to_string(jump_index));
  return jump_edges_[b][jump_index];
}

// ---------------------------------------------------------------------------
// Lasso acceptance
// ---------------------------------------------------------------------------

namespace {

struct LassoGraph {
  // Node (b, p) = automaton state b about to read word position p.
  int positions;
  int cycle_start;

  int node(int b, int p) const { return b * positions + p; }
  int next(int p) const { return p + 1 < positions ? p + 1 : cycle_start; }
};

}  // namespace

LassoAcceptanceWitness accepts_lasso(const Ldba& aut, const LassoWord& w) {
  if (w.cycle.empty()) throw EvalError("lasso cycle must be nonempty");
  const LetterMap map(w.alphabet, aut.alphabet());
  std::vector<Letter> letters;
  for (Letter a : w.prefix) letters.push_back(map.translate(a));
  for (Letter a : w.cycle) letters.push_back(map.translate(a));

  const LassoGraph g{static_cast<int>(letters.size()),
                     static_cast<int>(w.prefix.size())};
  const int node_count = aut.state_count() * g.positions;

  struct Arc {
    int to;
    bool consumed;
    int jump_index;
  };
  std::vector<std::vector<Arc>> arcs(node_count);
  for (int b = 0; b < aut.state_count(); ++b) {
    for (int p = 0; p < g.positions; ++p) {
      const int from = g.node(b, p);
      arcs[from].push_back(
          {g.node(aut.step_sigma(b, letters[p]), g.next(p)), true, -1});
      for (int j = 0; j < aut.jump_count(b); ++j)
        arcs[from].push_back({g.node(aut.step_jump(b, j), p), false, j});
    }
  }

  // Reachable fragment from (initial, 0).
  std::vector<char> reachable(node_count, 0);
  std::deque<int> queue{g.node(aut.initial_state(), 0)};
  reachable[queue.front()] = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const Arc& arc : arcs[u])
      if (!reachable[arc.to]) {
        reachable[arc.to] = 1;
        queue.push_back(arc.to);
      }
  }

  boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS> graph(
      node_count);
  for (int u = 0; u < node_count; ++u)
    if (reachable[u])
      for (const Arc& arc : arcs[u])
        boost::add_edge(u, arc.to, graph);
  std::vector<int> component(node_count);
  boost::strong_components(graph, component.data());

  // An accepting run exists iff some reachable SCC contains a node with an
  // accepting automaton state and an internal consuming arc; the cycle
  // through both reads the word infinitely often.
  auto state_of = [&](int u) { return u / g.positions; };
  auto position_of = [&](int u) { return u % g.positions; };

  int chosen = -1, accepting_node = -1;
  {
    const int comp_count =
        node_count == 0
            ? 0
            : *std::max_element(component.begin(), component.end()) + 1;
    std::vector<int> accepting_in(comp_count, -1);
    std::vector<char> consuming_in(comp_count, 0);
    std::vector<int> size(comp_count, 0);
    for (int u = 0; u < node_count; ++u) {
      if (!reachable[u]) continue;
      const int c = component[u];
      ++size[c];
      if (aut.is_accepting(state_of(u)) && accepting_in[c] < 0)
        accepting_in[c] = u;
      for (const Arc& arc : arcs[u])
        if (arc.consumed && component[arc.to] == c) consuming_in[c] = 1;
    }
    for (int c = 0; c < comp_count; ++c) {
      // Single nodes without a self-loop are trivial SCCs, filtered by the
      // consuming-arc requirement.
      if (accepting_in[c] >= 0 && consuming_in[c]) {
        chosen = c;
        accepting_node = accepting_in[c];
        break;
      }
    }
  }

  LassoAcceptanceWitness witness;
  if (chosen < 0) return witness;
  witness.accepted = true;

  // Shortest closed walk from the accepting node back to itself that uses
  // at least one consuming arc, staying inside the SCC: BFS over
  // (node, consumed-anything-yet).
  struct Visit {
    int prev_node = -1;
    int prev_flag = -1;
    Arc via{-1, false, -1};
  };
  std::vector<std::array<Visit, 2>> visits(node_count);
  std::vector<std::array<char, 2>> seen(node_count, {0, 0});
  std::deque<std::pair<int, int>> frontier;
  seen[accepting_node][0] = 1;
  frontier.emplace_back(accepting_node, 0);
  int goal_flag = -1;
  while (!frontier.empty() && goal_flag < 0) {
    const auto [u, flag] = frontier.front();
    frontier.pop_front();
    for (const Arc& arc : arcs[u]) {
      if (component[arc.to] != chosen) continue;
      const int nflag = flag || arc.consumed;
      if (arc.to == accepting_node && nflag == 1) {
        visits[arc.to][1] = {u, flag, arc};
        goal_flag = 1;
        break;
      }
      if (seen[arc.to][nflag]) continue;
      seen[arc.to][nflag] = 1;
      visits[arc.to][nflag] = {u, flag, arc};
      frontier.emplace_back(arc.to, nflag);
    }
  }

  if (goal_flag < 0)
    throw std::logic_error("acceptance witness search failed");

  std::vector<LassoAcceptanceWitness::Step> steps;
  int u = accepting_node, flag = 1;
  while (true) {
    const Visit& v = visits[u][flag];
    steps.push_back({state_of(v.prev_node), position_of(v.prev_node),
                     v.via.consumed, v.via.jump_index});
    u = v.prev_node;
    flag = v.prev_flag;
    if (u == accepting_node && flag == 0) break;
  }
  std::reverse(steps.begin(), steps.end());
  witness.cycle = std::move(steps);
  return witness;
}

}  // namespace ltlrl
