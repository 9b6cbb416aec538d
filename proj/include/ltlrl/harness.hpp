#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ltlrl/exact.hpp"
#include "ltlrl/learn.hpp"

namespace ltlrl::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment description, loaded from an INI-style file of
/// "[section]" headers and "key = value" lines ('#' comments):
///
///   [experiment]   name, algorithm (qlearn|pg), variants
///                  (lcer|baseline|both), seeds (space-separated), out,
///                  metric_threshold
///   [env]          name (minecraft|flatworld_grid|two_choice|pacman) and
///                  per-environment parameters (resolution, alpha, ...)
///   [spec]         ldba (file path), formula (cross-check oracle)
///   [learner]      gamma, mode (eventual|standard), learning_rate,
///                  epsilon_* (init, min, decay, rate, frequency),
///                  batch_size, updates_per_episode, horizon, episodes,
///                  replay_capacity
struct ExperimentConfig {
  std::string name;
  std::string algorithm = "qlearn";
  std::vector<std::string> variants;  // subset of {"lcer", "baseline"}
  std::vector<std::uint64_t> seeds;
  std::string out_dir = "out";
  double metric_threshold = 0.9;

  std::string env_name;
  std::map<std::string, std::string> env_params;

  std::string ldba_path;
  std::string formula;

  LearnerConfig learner;

  static ExperimentConfig load_file(const std::string& path);
  static ExperimentConfig parse(const std::string& text,
                                const std::string& origin = "");

  /// Resolve env_name/env_params into an environment instance.
  std::unique_ptr<LabelledMdp> make_env() const;
};

struct RunRecord {
  std::string variant;
  std::uint64_t seed = 0;
  std::vector<double> curve;
  double wall_seconds = 0.0;
  /// Exact satisfaction probability of the final greedy (or mode) policy,
  /// or -1 when the product is too large for exact analysis.
  double final_p_sat = -1.0;
  /// 1-based episode index at which the metric first reached the
  /// threshold; episodes+1 when it never did.
  int episodes_to_threshold = 0;
  std::string replay_dump;  // populated when dump_replay was requested
};

struct ExperimentResult {
  std::vector<RunRecord> runs;  // ordered by (variant, seed)
};

/// Execute every (variant, seed) cell on a worker pool. Results are
/// deterministic per (config, seed) regardless of the job count.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs,
                                bool dump_replay, std::ostream& log);

void write_curves_csv(const ExperimentResult& result, const std::string& path);
void write_summary_csv(const ExperimentResult& result,
                       const std::string& path);
/// Median line and interquartile band per variant.
void write_curves_svg(const ExperimentResult& result, const std::string& path);

int cmd_train(const ExperimentConfig& cfg, int jobs, bool dump_replay,
              std::ostream& log);

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

struct SuiteResult {
  std::string name;
  int passed = 0;
  int total = 0;
  std::vector<std::string> failures;
  bool ok() const { return passed == total; }
};

/// Fixture pairs: (fgy.ldba, "FGy") and (cycle_yr.ldba, the yellow/red
/// oscillation formula), resolved against the given directory.
std::vector<std::pair<std::string, std::string>> fixture_pairs();

/// LDBA acceptance vs. direct LTL semantics on random lasso words.
SuiteResult verify_oracle(const std::string& fixture_dir,
                          int words_per_fixture = 1000);

/// P <= (1-gamma) V <= P + log(1/gamma) O on random chains for
/// gamma in {0.9, 0.99, 0.999}.
SuiteResult verify_lemma1(int chain_count = 200);

/// Enumerated-policy suboptimality bound on the two-choice environment
/// over (alpha, gamma) in {0.6, 0.9} x {0.9, 0.99}.
SuiteResult verify_theorem1();

/// Offline vs. online counterfactual trajectory sets on random rollouts.
SuiteResult verify_lcer_equiv(const std::string& fixture_dir,
                              int rollouts = 100);

int cmd_verify(const std::string& suite, const std::string& fixture_dir,
               std::ostream& out);

int cmd_inspect(const std::string& ldba_path, const std::string& formula,
                std::ostream& out);

// ---------------------------------------------------------------------------
// Random instance generators (seeded; shared by suites and tests)
// ---------------------------------------------------------------------------

LassoWord random_lasso_word(const Alphabet& alphabet, Rng& rng,
                            int max_prefix = 4, int max_cycle = 4);
InducedChain random_chain(Rng& rng, int max_states = 12);
std::unique_ptr<TabularMdp> random_tabular_env(const Alphabet& alphabet,
                                               Rng& rng, int max_states = 5);

}  // namespace ltlrl::harness
