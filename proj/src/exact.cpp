#include "ltlrl/exact.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>

namespace ltlrl {

void InducedChain::validate() const {
  const int n = state_count;
  if (static_cast<std::size_t>(n) * n != transition.size() ||
      accepting.size() != static_cast<std::size_t>(n) ||
      initial.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("chain table size mismatch");
  double init_total = 0.0;
  for (double v : initial) {
    if (v < 0.0) throw std::invalid_argument("negative initial probability");
    init_total += v;
  }
  if (std::abs(init_total - 1.0) > 1e-12)
    throw std::invalid_argument("initial distribution sums to " +
                                std::to_string(init_total));
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (p(i, j) < 0.0)
        throw std::invalid_argument("negative transition probability");
      row += p(i, j);
    }
    if (std::abs(row - 1.0) > 1e-12)
      throw std::invalid_argument("row " + std::to_string(i) + " sums to " +
                                  std::to_string(row));
  }
}

InducedChain build_chain(const ProductSystem& sys,
                         const StochasticPolicy& policy) {
  const int n = sys.state_count();
  InducedChain chain;
  chain.state_count = n;
  chain.transition.assign(static_cast<std::size_t>(n) * n, 0.0);
  chain.accepting.assign(n, 0);
  chain.initial.assign(n, 0.0);

  for (int z = 0; z < n; ++z) {
    const ProductState state = sys.state_at(z);
    chain.accepting[z] = sys.accepting(state);
    for (const auto& [action, p_action] : policy(state)) {
      if (p_action == 0.0) continue;
      if (action.is_jump()) {
        const int b2 = sys.automaton().step_jump(state.b, action.index);
        chain.p(z, sys.index_of({state.s, b2})) += p_action;
      } else {
        for (const auto& [s2, p_env] :
             sys.env().transition_distribution(state.s, action.index)) {
          const int b2 =
              sys.automaton().step_sigma(state.b, sys.letter_of(s2));
          chain.p(z, sys.index_of({s2, b2})) += p_action * p_env;
        }
      }
    }
  }
  for (const auto& [z0, p0] : sys.initial_distribution())
    chain.initial[sys.index_of(z0)] += p0;
  return chain;
}

InducedChain build_chain(const ProductSystem& sys, const PolicySlots& slots) {
  return build_chain(sys, [&](const ProductState& z) {
    const int slot = slots[sys.index_of(z)];
    return std::vector<std::pair<ProductAction, double>>{
        {sys.action_at(z, slot), 1.0}};
  });
}

// ---------------------------------------------------------------------------
// Bottom SCCs
// ---------------------------------------------------------------------------

BsccInfo classify_bsccs(const InducedChain& chain) {
  const int n = chain.state_count;
  boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS> graph(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (chain.p(i, j) > 0.0) boost::add_edge(i, j, graph);

  BsccInfo info;
  info.component.resize(n);
  const int comp_count = boost::strong_components(graph, info.component.data());

  std::vector<char> has_exit(comp_count, 0), has_accepting(comp_count, 0);
  for (int i = 0; i < n; ++i) {
    if (chain.accepting[i]) has_accepting[info.component[i]] = 1;
    for (int j = 0; j < n; ++j)
      if (chain.p(i, j) > 0.0 && info.component[j] != info.component[i])
        has_exit[info.component[i]] = 1;
  }

  info.state_class.resize(n);
  for (int i = 0; i < n; ++i) {
    const int c = info.component[i];
    info.state_class[i] = has_exit[c]        ? BsccInfo::kTransient
                          : has_accepting[c] ? BsccInfo::kGood
                                             : BsccInfo::kBad;
  }
  return info;
}

// ---------------------------------------------------------------------------
// Linear algebra helpers
// ---------------------------------------------------------------------------

namespace {

struct TransientSystem {
  std::vector<int> states;        // transient state ids, in chain order
  std::vector<int> index;         // chain id -> position in `states`, or -1
  Eigen::MatrixXd coefficients;   // I - Q restricted to transient states
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;

  explicit TransientSystem(const InducedChain& chain, const BsccInfo& info) {
    const int n = chain.state_count;
    index.assign(n, -1);
    for (int i = 0; i < n; ++i)
      if (info.state_class[i] == BsccInfo::kTransient) {
        index[i] = static_cast<int>(states.size());
        states.push_back(i);
      }
    const int m = size();
    coefficients = Eigen::MatrixXd::Identity(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        coefficients(a, b) -= chain.p(states[a], states[b]);
    lu.compute(coefficients);
  }

  int size() const { return static_cast<int>(states.size()); }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs,
                        const std::string& what) const {
    Eigen::VectorXd x = lu.solve(rhs);
    const double residual = (coefficients * x - rhs).lpNorm<Eigen::Infinity>();
    if (!std::isfinite(residual) ||
        residual > 1e-6 * (1.0 + rhs.lpNorm<Eigen::Infinity>()))
      throw SingularSystemError("ill-conditioned transient system in " + what);
    return x;
  }

  Eigen::VectorXd solve_transposed(const Eigen::VectorXd& rhs,
                                   const std::string& what) const {
    Eigen::MatrixXd at = coefficients.transpose();
    Eigen::PartialPivLU<Eigen::MatrixXd> lut(at);
    Eigen::VectorXd x = lut.solve(rhs);
    const double residual = (at * x - rhs).lpNorm<Eigen::Infinity>();
    if (!std::isfinite(residual) ||
        residual > 1e-6 * (1.0 + rhs.lpNorm<Eigen::Infinity>()))
      throw SingularSystemError("ill-conditioned transient system in " + what);
    return x;
  }
};

// Absorption probability into the target class from each transient state.
Eigen::VectorXd absorption(const InducedChain& chain, const BsccInfo& info,
                           const TransientSystem& sys, char target,
                           const std::string& what) {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys.size());
  for (int a = 0; a < sys.size(); ++a)
    for (int j = 0; j < chain.state_count; ++j)
      if (info.state_class[j] == target) rhs(a) += chain.p(sys.states[a], j);
  return sys.solve(rhs, what);
}

double weighted_by_initial(const InducedChain& chain, const BsccInfo& info,
                           const TransientSystem& sys,
                           const Eigen::VectorXd& transient_values,
                           char full_class, double full_value) {
  double total = 0.0;
  for (int i = 0; i < chain.state_count; ++i) {
    if (chain.initial[i] == 0.0) continue;
    if (info.state_class[i] == BsccInfo::kTransient)
      total += chain.initial[i] * transient_values(sys.index[i]);
    else if (info.state_class[i] == full_class)
      total += chain.initial[i] * full_value;
  }
  return total;
}

}  // namespace

double satisfaction_probability(const InducedChain& chain) {
  const BsccInfo info = classify_bsccs(chain);
  const TransientSystem sys(chain, info);
  const Eigen::VectorXd reach =
      absorption(chain, info, sys, BsccInfo::kGood, "satisfaction_probability");
  return weighted_by_initial(chain, info, sys, reach, BsccInfo::kGood, 1.0);
}

double eventual_value(const InducedChain& chain, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::domain_error("gamma must lie strictly inside (0,1)");
  const int n = chain.state_count;
  const BsccInfo info = classify_bsccs(chain);

  // Values on bottom SCCs are exact: infinitely many accepting visits give
  // the full geometric series, none give zero.
  std::vector<double> value(n, 0.0);
  for (int i = 0; i < n; ++i)
    if (info.state_class[i] == BsccInfo::kGood)
      value[i] = 1.0 / (1.0 - gamma);

  // Transient block: monotone Gauss-Seidel from zero for
  //   V(z) = sum_z' P(z,z') (r(z') + d(z') V(z'))
  // with d(z') = gamma at accepting states and 1 elsewhere. Self-loop mass
  // is folded into the diagonal so near-absorbing transient states do not
  // stall the sweep.
  std::vector<int> transient;
  for (int i = 0; i < n; ++i)
    if (info.state_class[i] == BsccInfo::kTransient) transient.push_back(i);

  auto discount = [&](int j) { return chain.accepting[j] ? gamma : 1.0; };
  constexpr long kSweepLimit = 10'000'000;
  const double tolerance = 1e-13 / (1.0 - gamma);
  long sweep = 0;
  double delta = tolerance + 1.0;
  while (delta > tolerance) {
    if (++sweep > kSweepLimit)
      throw IterationLimitError("eventual_value did not converge within " +
                                std::to_string(kSweepLimit) + " sweeps");
    delta = 0.0;
    for (int i : transient) {
      double off_diagonal = 0.0;
      for (int j = 0; j < n; ++j) {
        if (chain.p(i, j) == 0.0) continue;
        if (j == i)
          off_diagonal += chain.p(i, j) * chain.accepting[j];
        else
          off_diagonal +=
              chain.p(i, j) * (chain.accepting[j] + discount(j) * value[j]);
      }
      const double self = chain.p(i, i) * discount(i);
      const double updated =
          self < 1.0 ? off_diagonal / (1.0 - self) : off_diagonal;
      delta = std::max(delta, updated - value[i]);
      value[i] = updated;
    }
  }

  double total = 0.0;
  for (int i = 0; i < n; ++i) total += chain.initial[i] * value[i];
  return total;
}

double standard_value(const InducedChain& chain, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::domain_error("gamma must lie strictly inside (0,1)");
  const int n = chain.state_count;
  // (I - gamma P) V = P r; nonsingular for gamma < 1.
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a(i, j) -= gamma * chain.p(i, j);
      rhs(i) += chain.p(i, j) * chain.accepting[j];
    }
  const Eigen::VectorXd v = a.partialPivLu().solve(rhs);
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += chain.initial[i] * v(i);
  return total;
}

double expected_failing_visits(const InducedChain& chain) {
  const BsccInfo info = classify_bsccs(chain);
  const TransientSystem sys(chain, info);

  // Failure probability via absorption into bad bottom SCCs.
  const Eigen::VectorXd fail_from =
      absorption(chain, info, sys, BsccInfo::kBad, "expected_failing_visits");
  const double p_fail =
      weighted_by_initial(chain, info, sys, fail_from, BsccInfo::kBad, 1.0);
  if (p_fail < 1e-14) return 0.0;

  // Expected visit counts to transient states from the initial
  // distribution: eta^T = d0^T (I - Q)^{-1}.
  Eigen::VectorXd d0 = Eigen::VectorXd::Zero(sys.size());
  for (int a = 0; a < sys.size(); ++a) d0(a) = chain.initial[sys.states[a]];
  const Eigen::VectorXd eta =
      sys.solve_transposed(d0, "expected_failing_visits");

  // Accepting states inside bottom SCCs never lie on failing trajectories:
  // good ones cannot fail, bad ones contain no accepting states. Only
  // accepting transient visits contribute.
  double numerator = 0.0;
  for (int a = 0; a < sys.size(); ++a)
    if (chain.accepting[sys.states[a]]) numerator += eta(a) * fail_from(a);
  return numerator / p_fail;
}

std::string BoundReport::csv_header() {
  return "p_sat,v_gamma,o_pi,gamma,lhs,mid,rhs,pass";
}

std::string BoundReport::csv_row() const {
  std::ostringstream out;
  out.precision(12);
  out << p_sat << ',' << v_gamma << ',' << o_pi << ',' << gamma << ',' << lhs
      << ',' << mid << ',' << rhs << ',' << (pass ? 1 : 0);
  return out.str();
}

BoundReport lemma1_report(const InducedChain& chain, double gamma) {
  constexpr double kSlack = 1e-8;
  BoundReport report;
  report.gamma = gamma;
  report.p_sat = satisfaction_probability(chain);
  report.v_gamma = eventual_value(chain, gamma);
  report.o_pi = expected_failing_visits(chain);
  report.lhs = report.p_sat;
  report.mid = (1.0 - gamma) * report.v_gamma;
  report.rhs = report.p_sat + std::log(1.0 / gamma) * report.o_pi;
  report.pass =
      report.lhs <= report.mid + kSlack && report.mid <= report.rhs + kSlack;
  return report;
}

EnumerationReport enumerate_optimal(const ProductSystem& sys, double gamma,
                                    std::size_t policy_limit) {
  const int n = sys.state_count();
  std::vector<int> choices(n);
  double policy_count = 1.0;
  for (int z = 0; z < n; ++z) {
    choices[z] = sys.action_count(sys.state_at(z));
    policy_count *= choices[z];
    if (policy_count > static_cast<double>(policy_limit))
      throw SizeLimitError("deterministic policy count exceeds " +
                           std::to_string(policy_limit));
  }

  EnumerationReport report;
  PolicySlots slots(n, 0);
  while (true) {
    InducedChain chain = build_chain(sys, slots);
    PolicyEvaluation eval;
    eval.slots = slots;
    eval.p_sat = satisfaction_probability(chain);
    eval.v_eventual = eventual_value(chain, gamma);
    eval.v_standard = standard_value(chain, gamma);
    eval.o_pi = expected_failing_visits(chain);
    report.policies.push_back(std::move(eval));

    int z = 0;
    for (; z < n; ++z) {
      if (++slots[z] < choices[z]) break;
      slots[z] = 0;
    }
    if (z == n) break;
  }

  for (std::size_t i = 0; i < report.policies.size(); ++i) {
    const PolicyEvaluation& e = report.policies[i];
    if (report.best_prob < 0 || e.p_sat > report.policies[report.best_prob].p_sat)
      report.best_prob = static_cast<int>(i);
    if (report.best_eventual < 0 ||
        e.v_eventual > report.policies[report.best_eventual].v_eventual)
      report.best_eventual = static_cast<int>(i);
    if (report.best_standard < 0 ||
        e.v_standard > report.policies[report.best_standard].v_standard)
      report.best_standard = static_cast<int>(i);
    report.max_o_pi = std::max(report.max_o_pi, e.o_pi);
  }
  report.sup_p_sat = report.policies[report.best_prob].p_sat;
  report.gap_eventual =
      report.sup_p_sat - report.policies[report.best_eventual].p_sat;
  report.gap_standard =
      report.sup_p_sat - report.policies[report.best_standard].p_sat;
  report.bound = 2.0 * std::log(1.0 / gamma) * report.max_o_pi;
  report.pass = report.gap_eventual <= report.bound + 1e-9;
  return report;
}

}  // namespace ltlrl
