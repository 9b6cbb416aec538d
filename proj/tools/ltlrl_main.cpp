// Command-line front end: train experiments from a config file, run the
// verification suites, or inspect an automaton against a formula.

#include <CLI11.hpp>
#include <exception>
#include <iostream>

#include "ltlrl/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Policy learning and exact analysis for linear temporal "
               "logic objectives"};
  app.require_subcommand(1);

  std::string config_path, out_dir, fixture_dir = "fixtures";
  std::string suite, ldba_path, formula;
  int jobs = 0;
  bool dump_replay = false;

  CLI::App* train = app.add_subcommand("train", "Run a config's experiment");
  train->add_option("config", config_path, "experiment config file")
      ->required();
  train->add_option("--out", out_dir, "override the output directory");
  train->add_option("--jobs", jobs, "worker count (default: hardware)");
  train->add_flag("--dump-replay", dump_replay,
                  "write replay store dumps per run");

  CLI::App* verify = app.add_subcommand("verify", "Run a verification suite");
  verify
      ->add_option("suite", suite,
                   "one of lemma1, theorem1, lcer-equiv, oracle, all")
      ->required();
  verify->add_option("--fixtures", fixture_dir, "fixture directory");

  CLI::App* inspect =
      app.add_subcommand("inspect", "Summarize an automaton and spot-check "
                         "it against a formula");
  inspect->add_option("ldba", ldba_path, "automaton file")->required();
  inspect->add_option("formula", formula, "LTL formula")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      ltlrl::harness::ExperimentConfig cfg =
          ltlrl::harness::ExperimentConfig::load_file(config_path);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      return ltlrl::harness::cmd_train(cfg, jobs, dump_replay, std::cout);
    }
    if (verify->parsed())
      return ltlrl::harness::cmd_verify(suite, fixture_dir, std::cout);
    return ltlrl::harness::cmd_inspect(ldba_path, formula, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
