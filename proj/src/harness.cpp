#include "ltlrl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace ltlrl::harness {

namespace fs = std::filesystem;

namespace {

// Product-state limit for the exact final evaluation; beyond it the dense
// chain solves are not worth the memory and final_p_sat is reported as -1.
constexpr int kExactLimit = 2500;

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6f", v);
  return buffer;
}

// The two-state tracker pairing environments whose accepting condition is
// "a labelled cell is visited infinitely often" (atom "acc").
constexpr const char* kAccTrackerText =
    "ap: acc\n"
    "states: 2\n"
    "initial: 0\n"
    "accepting: 1\n"
    "0 [acc] -> 1\n"
    "0 [!acc] -> 0\n"
    "1 [acc] -> 1\n"
    "1 [!acc] -> 0\n";

}  // namespace

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace {

using Section = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::map<std::string, Section> parse_ini(const std::string& text,
                                         const std::string& origin) {
  std::map<std::string, Section> out;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line.substr(0, line.find('#')));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      out[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    if (section.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": key outside any section");
    out[section][trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
  }
  return out;
}

class SectionReader {
 public:
  SectionReader(std::string name, Section section)
      : name_(std::move(name)), section_(std::move(section)) {}

  std::string path(const std::string& key) const {
    return "[" + name_ + "]." + key;
  }

  bool has(const std::string& key) const { return section_.contains(key); }

  std::string take_string(const std::string& key) {
    const auto it = section_.find(key);
    if (it == section_.end())
      throw ConfigError(path(key) + ": missing required key");
    std::string value = it->second;
    section_.erase(it);
    return value;
  }

  std::string take_string_or(const std::string& key,
                             const std::string& fallback) {
    return has(key) ? take_string(key) : fallback;
  }

  double take_double(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const std::string raw = take_string(key);
    try {
      std::size_t used = 0;
      const double v = std::stod(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
      return v;
    } catch (...) {
      throw ConfigError(path(key) + ": not a number: '" + raw + "'");
    }
  }

  long take_int(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    const std::string raw = take_string(key);
    try {
      std::size_t used = 0;
      const long v = std::stol(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
      return v;
    } catch (...) {
      throw ConfigError(path(key) + ": not an integer: '" + raw + "'");
    }
  }

  void finish() const {
    if (!section_.empty())
      throw ConfigError(path(section_.begin()->first) + ": unknown key");
  }

  Section remainder() && { return std::move(section_); }

 private:
  std::string name_;
  Section section_;
};

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text,
                                         const std::string& origin) {
  auto sections = parse_ini(text, origin);
  for (const auto& [section, _] : sections)
    if (section != "experiment" && section != "env" && section != "spec" &&
        section != "learner")
      throw ConfigError("[" + section + "]: unknown section");
  ExperimentConfig cfg;

  SectionReader experiment("experiment", sections["experiment"]);
  cfg.name = experiment.take_string_or("name", "experiment");
  cfg.algorithm = experiment.take_string_or("algorithm", "qlearn");
  if (cfg.algorithm != "qlearn" && cfg.algorithm != "pg")
    throw ConfigError(experiment.path("algorithm") +
                      ": expected 'qlearn' or 'pg'");
  const std::string variants = experiment.take_string_or("variants", "both");
  if (variants == "both")
    cfg.variants = {"lcer", "baseline"};
  else if (variants == "lcer" || variants == "baseline")
    cfg.variants = {variants};
  else
    throw ConfigError(experiment.path("variants") +
                      ": expected 'lcer', 'baseline' or 'both'");
  {
    std::istringstream in(experiment.take_string_or("seeds", "0"));
    for (std::string token; in >> token;) {
      try {
        cfg.seeds.push_back(std::stoull(token));
      } catch (...) {
        throw ConfigError(experiment.path("seeds") + ": bad seed '" + token +
                          "'");
      }
    }
    if (cfg.seeds.empty())
      throw ConfigError(experiment.path("seeds") + ": empty seed list");
  }
  cfg.out_dir = experiment.take_string_or("out", "out/" + cfg.name);
  cfg.metric_threshold = experiment.take_double("metric_threshold", 0.9);
  experiment.finish();

  SectionReader env("env", sections["env"]);
  cfg.env_name = env.take_string("name");
  cfg.env_params = std::move(env).remainder();

  SectionReader spec("spec", sections["spec"]);
  cfg.ldba_path = spec.take_string("ldba");
  cfg.formula = spec.take_string_or("formula", "");
  spec.finish();

  SectionReader learner("learner", sections["learner"]);
  LearnerConfig& lc = cfg.learner;
  lc.gamma = learner.take_double("gamma", lc.gamma);
  if (!(lc.gamma > 0.0 && lc.gamma < 1.0))
    throw ConfigError(learner.path("gamma") + ": must lie in (0,1)");
  const std::string mode = learner.take_string_or("mode", "eventual");
  if (mode == "eventual")
    lc.mode = DiscountMode::Eventual;
  else if (mode == "standard")
    lc.mode = DiscountMode::Standard;
  else
    throw ConfigError(learner.path("mode") +
                      ": expected 'eventual' or 'standard'");
  lc.learning_rate = learner.take_double("learning_rate", lc.learning_rate);
  if (!(lc.learning_rate > 0.0 && lc.learning_rate <= 1.0))
    throw ConfigError(learner.path("learning_rate") + ": must lie in (0,1]");
  lc.epsilon.initial = learner.take_double("epsilon_init", lc.epsilon.initial);
  lc.epsilon.floor = learner.take_double("epsilon_min", lc.epsilon.floor);
  const std::string decay =
      learner.take_string_or("epsilon_decay", "exponential");
  if (decay == "linear")
    lc.epsilon.decay = EpsilonSchedule::Decay::Linear;
  else if (decay == "exponential")
    lc.epsilon.decay = EpsilonSchedule::Decay::Exponential;
  else
    throw ConfigError(learner.path("epsilon_decay") +
                      ": expected 'linear' or 'exponential'");
  lc.epsilon.rate = learner.take_double("epsilon_rate", lc.epsilon.rate);
  lc.epsilon.frequency = static_cast<int>(
      learner.take_int("epsilon_frequency", lc.epsilon.frequency));
  lc.batch_size =
      static_cast<int>(learner.take_int("batch_size", lc.batch_size));
  lc.updates_per_episode = static_cast<int>(
      learner.take_int("updates_per_episode", lc.updates_per_episode));
  lc.horizon = static_cast<int>(learner.take_int("horizon", lc.horizon));
  lc.episodes = static_cast<int>(learner.take_int("episodes", lc.episodes));
  lc.replay_capacity = static_cast<std::size_t>(
      learner.take_int("replay_capacity",
                       static_cast<long>(lc.replay_capacity)));
  lc.pg_absolute_discount =
      learner.take_int("pg_absolute_discount", 0) != 0;
  learner.finish();
  return cfg;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  ExperimentConfig cfg = parse(buffer.str(), path);
  // Relative LDBA paths resolve against the config file's directory.
  const fs::path ldba(cfg.ldba_path);
  if (ldba.is_relative()) {
    const fs::path sibling = fs::path(path).parent_path() / ldba;
    if (fs::exists(sibling)) cfg.ldba_path = sibling.string();
  }
  return cfg;
}

std::unique_ptr<LabelledMdp> ExperimentConfig::make_env() const {
  SectionReader params("env", env_params);
  std::unique_ptr<LabelledMdp> env;
  if (env_name == "minecraft") {
    env = std::make_unique<GridWorld>(make_minecraft());
  } else if (env_name == "flatworld_grid") {
    const int n = static_cast<int>(params.take_int("resolution", 10));
    env = std::make_unique<GridWorld>(make_flatworld_grid(n));
  } else if (env_name == "two_choice") {
    if (!params.has("alpha"))
      throw ConfigError("[env].alpha: missing required key");
    env = std::make_unique<TwoChoiceMdp>(params.take_double("alpha", 0.0));
  } else if (env_name == "pacman") {
    env = std::make_unique<PacmanMdp>(make_pacman());
  } else {
    throw ConfigError("[env].name: unknown environment '" + env_name + "'");
  }
  params.finish();
  return env;
}

// ---------------------------------------------------------------------------
// Experiment execution
// ---------------------------------------------------------------------------

namespace {

RunRecord run_cell(const ExperimentConfig& cfg, const std::string& variant,
                   std::uint64_t seed, bool dump_replay) {
  const auto start = std::chrono::steady_clock::now();
  const std::unique_ptr<LabelledMdp> env = cfg.make_env();
  const Ldba aut = Ldba::load_file(cfg.ldba_path);
  const ProductSystem sys(*env, aut);

  LearnerConfig lc = cfg.learner;
  lc.seed = seed;
  lc.lcer = variant == "lcer";

  RunRecord record;
  record.variant = variant;
  record.seed = seed;
  PolicySlots slots;
  if (cfg.algorithm == "qlearn") {
    QTrainResult trained = train_q(sys, lc);
    record.curve = std::move(trained.curve);
    slots = greedy_policy(trained.table, sys);
  } else {
    PgTrainResult trained = train_pg(sys, lc);
    record.curve = std::move(trained.curve);
    slots = mode_policy(trained.policy, sys);
  }

  if (sys.state_count() <= kExactLimit)
    record.final_p_sat = satisfaction_probability(build_chain(sys, slots));

  record.episodes_to_threshold = lc.episodes + 1;
  for (std::size_t i = 0; i < record.curve.size(); ++i) {
    if (record.curve[i] >= cfg.metric_threshold) {
      record.episodes_to_threshold = static_cast<int>(i) + 1;
      break;
    }
  }

  if (dump_replay) {
    // Replay content regenerated from one final-policy rollout.
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + 1);
    const Policy policy = [&](const ProductState& z, Rng&) {
      return sys.action_at(z, slots[sys.index_of(z)]);
    };
    const ProductTrajectory traj = rollout(sys, policy, lc.horizon, rng);
    if (cfg.algorithm == "qlearn") {
      std::deque<QTuple> tuples;
      for (QTuple& t : lc.lcer ? lcer_q(traj, sys) : onpolicy_tuples(traj, sys))
        tuples.push_back(std::move(t));
      record.replay_dump = dump_tuples(tuples);
    } else {
      std::ostringstream out;
      if (lc.lcer) {
        for (const ProductTrajectory& member : lcer_pg_offline(traj, sys))
          out << serialize_trajectory(member, lc.discount()) << '\n';
      } else {
        out << serialize_trajectory(traj, lc.discount()) << '\n';
      }
      record.replay_dump = out.str();
    }
  }

  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return record;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs,
                                bool dump_replay, std::ostream& log) {
  if (!fs::exists(cfg.ldba_path))
    throw ConfigError("[spec].ldba: file does not exist: " + cfg.ldba_path);
  const Ldba aut = Ldba::load_file(cfg.ldba_path);
  if (!cfg.formula.empty()) {
    const FormulaPtr phi = parse_ltl(cfg.formula);
    for (const std::string& atom : atoms_of(*phi))
      if (aut.alphabet().index_of(atom) < 0)
        throw ConfigError("[spec].formula: atom '" + atom +
                          "' is not declared by the automaton");
  }
  if (cfg.learner.horizon < min_horizon(aut))
    log << "warning: horizon " << cfg.learner.horizon
        << " is below the automaton's jump-state count " << min_horizon(aut)
        << "\n";

  struct Cell {
    std::string variant;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const std::string& variant : cfg.variants)
    for (std::uint64_t seed : cfg.seeds) cells.push_back({variant, seed});

  ExperimentResult result;
  result.runs.resize(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
      try {
        result.runs[i] =
            run_cell(cfg, cells[i].variant, cells[i].seed, dump_replay);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const int worker_count = std::clamp<int>(
      jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency()),
      1, static_cast<int>(cells.size()));
  std::vector<std::thread> pool;
  for (int i = 0; i < worker_count - 1; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (const std::exception_ptr& error : errors)
    if (error) std::rethrow_exception(error);

  for (const RunRecord& run : result.runs) {
    log << cfg.name << " variant=" << run.variant << " seed=" << run.seed
        << " episodes_to_threshold=" << run.episodes_to_threshold
        << " final_p_sat=" << run.final_p_sat << " ("
        << format_double(run.wall_seconds) << " s)\n";
  }
  return result;
}

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

void write_curves_csv(const ExperimentResult& result,
                      const std::string& path) {
  std::ofstream out(path);
  out << "episode,seed,variant,metric\n";
  for (const RunRecord& run : result.runs)
    for (std::size_t ep = 0; ep < run.curve.size(); ++ep)
      out << ep << ',' << run.seed << ',' << run.variant << ','
          << format_double(run.curve[ep]) << '\n';
}

void write_summary_csv(const ExperimentResult& result,
                       const std::string& path) {
  std::ofstream out(path);
  out << "variant,seed,episodes_to_threshold,final_p_sat\n";
  for (const RunRecord& run : result.runs)
    out << run.variant << ',' << run.seed << ','
        << run.episodes_to_threshold << ',' << format_double(run.final_p_sat)
        << '\n';
}

namespace {

double percentile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  const double index = q * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(index);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = index - lo;
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

}  // namespace

void write_curves_svg(const ExperimentResult& result,
                      const std::string& path) {
  constexpr int kWidth = 640, kHeight = 400;
  constexpr int kLeft = 56, kRight = 16, kTop = 20, kBottom = 40;
  const int plot_w = kWidth - kLeft - kRight;
  const int plot_h = kHeight - kTop - kBottom;

  std::vector<std::string> variants;
  std::size_t episodes = 0;
  for (const RunRecord& run : result.runs) {
    if (std::find(variants.begin(), variants.end(), run.variant) ==
        variants.end())
      variants.push_back(run.variant);
    episodes = std::max(episodes, run.curve.size());
  }

  auto x_of = [&](std::size_t ep) {
    const double span = episodes > 1 ? static_cast<double>(episodes - 1) : 1.0;
    return kLeft + plot_w * (static_cast<double>(ep) / span);
  };
  auto y_of = [&](double metric) { return kTop + plot_h * (1.0 - metric); };
  auto point = [&](double x, double y) {
    char buffer[48];
    std::snprintf(buffer, sizeof buffer, "%.2f,%.2f ", x, y);
    return std::string(buffer);
  };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  std::ofstream out(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" fill=\"white\"/>\n";

  // Axes and ticks.
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
      << kLeft + plot_w << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double metric = tick / 4.0;
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << y_of(metric) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">"
        << format_double(metric).substr(0, 4) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" font-size=\"12\" text-anchor=\"middle\">episode</text>\n";
  if (episodes > 0)
    out << "<text x=\"" << kLeft + plot_w << "\" y=\"" << kHeight - 10
        << "\" font-size=\"11\" text-anchor=\"end\">" << episodes - 1
        << "</text>\n";

  for (std::size_t v = 0; v < variants.size(); ++v) {
    std::vector<std::vector<double>> per_episode(episodes);
    for (const RunRecord& run : result.runs)
      if (run.variant == variants[v])
        for (std::size_t ep = 0; ep < run.curve.size(); ++ep)
          per_episode[ep].push_back(run.curve[ep]);

    const char* color = kColors[v % 4];
    std::string band, median;
    std::string band_back;
    for (std::size_t ep = 0; ep < episodes; ++ep) {
      if (per_episode[ep].empty()) continue;
      band += point(x_of(ep), y_of(percentile(per_episode[ep], 0.75)));
      band_back =
          point(x_of(ep), y_of(percentile(per_episode[ep], 0.25))) + band_back;
      median += point(x_of(ep), y_of(percentile(per_episode[ep], 0.5)));
    }
    if (!band.empty())
      out << "<polygon points=\"" << band << band_back << "\" fill=\"" << color
          << "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
    if (!median.empty())
      out << "<polyline points=\"" << median << "\" fill=\"none\" stroke=\""
          << color << "\" stroke-width=\"1.5\"/>\n";

    const int legend_y = kTop + 14 + static_cast<int>(v) * 16;
    out << "<rect x=\"" << kLeft + 10 << "\" y=\"" << legend_y - 9
        << "\" width=\"12\" height=\"6\" fill=\"" << color << "\"/>\n"
        << "<text x=\"" << kLeft + 28 << "\" y=\"" << legend_y
        << "\" font-size=\"12\">" << xml_escape(variants[v]) << "</text>\n";
  }
  out << "</svg>\n";
}

int cmd_train(const ExperimentConfig& cfg, int jobs, bool dump_replay,
              std::ostream& log) {
  const ExperimentResult result = run_experiment(cfg, jobs, dump_replay, log);
  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);
  write_curves_csv(result, (out / "curves.csv").string());
  write_summary_csv(result, (out / "summary.csv").string());
  write_curves_svg(result, (out / "curves.svg").string());
  if (dump_replay)
    for (const RunRecord& run : result.runs) {
      std::ofstream dump(out / ("replay_" + run.variant + "_" +
                                std::to_string(run.seed) + ".txt"));
      dump << run.replay_dump;
    }
  log << "wrote " << (out / "curves.csv").string() << ", "
      << (out / "summary.csv").string() << ", "
      << (out / "curves.svg").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

LassoWord random_lasso_word(const Alphabet& alphabet, Rng& rng,
                            int max_prefix, int max_cycle) {
  LassoWord word;
  word.alphabet = alphabet;
  const int prefix_len = static_cast<int>(uniform_index(rng, max_prefix + 1));
  const int cycle_len = 1 + static_cast<int>(uniform_index(rng, max_cycle));
  for (int i = 0; i < prefix_len; ++i)
    word.prefix.push_back(
        static_cast<Letter>(uniform_index(rng, alphabet.letter_count())));
  for (int i = 0; i < cycle_len; ++i)
    word.cycle.push_back(
        static_cast<Letter>(uniform_index(rng, alphabet.letter_count())));
  return word;
}

namespace {

// Random support of `size` distinct values in [0, n) with exactly
// normalized weights (the last entry absorbs rounding).
std::vector<std::pair<int, double>> random_support(Rng& rng, int n,
                                                   int size) {
  std::vector<int> targets;
  while (static_cast<int>(targets.size()) < size) {
    const int candidate = static_cast<int>(uniform_index(rng, n));
    if (std::find(targets.begin(), targets.end(), candidate) == targets.end())
      targets.push_back(candidate);
  }
  std::vector<double> weights;
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    weights.push_back(0.05 + uniform_real01(rng));
    total += weights.back();
  }
  std::vector<std::pair<int, double>> out;
  double assigned = 0.0;
  for (int i = 0; i < size; ++i) {
    const double p =
        i + 1 == size ? 1.0 - assigned : weights[i] / total;
    assigned += p;
    out.emplace_back(targets[i], p);
  }
  return out;
}

}  // namespace

InducedChain random_chain(Rng& rng, int max_states) {
  const int n = 2 + static_cast<int>(uniform_index(rng, max_states - 1));
  InducedChain chain;
  chain.state_count = n;
  chain.transition.assign(static_cast<std::size_t>(n) * n, 0.0);
  chain.accepting.assign(n, 0);
  chain.initial.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const int support = 1 + static_cast<int>(uniform_index(rng, std::min(4, n)));
    for (const auto& [j, p] : random_support(rng, n, support))
      chain.p(i, j) = p;
    chain.accepting[i] = uniform_real01(rng) < 0.3;
  }
  if (uniform_real01(rng) < 0.5) {
    chain.initial[uniform_index(rng, n)] = 1.0;
  } else {
    const int support = 1 + static_cast<int>(uniform_index(rng, n));
    for (const auto& [j, p] : random_support(rng, n, support))
      chain.initial[j] = p;
  }
  chain.validate();
  return chain;
}

std::unique_ptr<TabularMdp> random_tabular_env(const Alphabet& alphabet,
                                               Rng& rng, int max_states) {
  const int n = 2 + static_cast<int>(uniform_index(rng, max_states - 1));
  std::vector<Letter> labels;
  std::vector<std::vector<Distribution>> transitions(n);
  for (int s = 0; s < n; ++s) {
    labels.push_back(
        static_cast<Letter>(uniform_index(rng, alphabet.letter_count())));
    const int actions = 1 + static_cast<int>(uniform_index(rng, 3));
    for (int a = 0; a < actions; ++a) {
      const int support =
          1 + static_cast<int>(uniform_index(rng, std::min(3, n)));
      transitions[s].push_back(random_support(rng, n, support));
    }
  }
  return std::make_unique<TabularMdp>(alphabet, std::move(labels),
                                      std::move(transitions),
                                      Distribution{{0, 1.0}});
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> fixture_pairs() {
  return {
      {"fgy.ldba", "FGy"},
      {"cycle_yr.ldba", "GF(y & X F r) & G!b"},
  };
}

SuiteResult verify_oracle(const std::string& fixture_dir,
                          int words_per_fixture) {
  SuiteResult suite{"oracle"};
  Rng rng(0x0acce55ULL);
  for (const auto& [file, formula_text] : fixture_pairs()) {
    const Ldba aut = Ldba::load_file((fs::path(fixture_dir) / file).string());
    const FormulaPtr phi = parse_ltl(formula_text);
    for (int i = 0; i < words_per_fixture; ++i) {
      const LassoWord word = random_lasso_word(aut.alphabet(), rng);
      ++suite.total;
      const bool expected = eval_lasso(*phi, word);
      const bool actual = accepts_lasso(aut, word).accepted;
      if (expected == actual) {
        ++suite.passed;
      } else {
        std::ostringstream why;
        why << file << ": disagreement on prefix=[";
        for (Letter a : word.prefix) why << aut.alphabet().format_letter(a);
        why << "] cycle=[";
        for (Letter a : word.cycle) why << aut.alphabet().format_letter(a);
        why << "]: formula=" << expected << " automaton=" << actual;
        suite.failures.push_back(why.str());
      }
    }
  }
  return suite;
}

SuiteResult verify_lemma1(int chain_count) {
  SuiteResult suite{"lemma1"};
  Rng rng(0x1e44a1ULL);
  const double gammas[] = {0.9, 0.99, 0.999};
  for (int i = 0; i < chain_count; ++i) {
    const InducedChain chain = random_chain(rng);
    for (double gamma : gammas) {
      ++suite.total;
      const BoundReport report = lemma1_report(chain, gamma);
      if (report.pass)
        ++suite.passed;
      else
        suite.failures.push_back("chain " + std::to_string(i) + ": " +
                                 report.csv_row());
    }
  }
  return suite;
}

SuiteResult verify_theorem1() {
  SuiteResult suite{"theorem1"};
  const Ldba tracker = Ldba::parse(kAccTrackerText, "acc-tracker");
  for (double alpha : {0.6, 0.9}) {
    for (double gamma : {0.9, 0.99}) {
      ++suite.total;
      const TwoChoiceMdp env(alpha);
      const ProductSystem sys(env, tracker);
      const EnumerationReport report = enumerate_optimal(sys, gamma);
      if (report.pass) {
        ++suite.passed;
      } else {
        std::ostringstream why;
        why << "alpha=" << alpha << " gamma=" << gamma
            << ": gap=" << report.gap_eventual << " bound=" << report.bound;
        suite.failures.push_back(why.str());
      }
    }
  }
  return suite;
}

SuiteResult verify_lcer_equiv(const std::string& fixture_dir, int rollouts) {
  SuiteResult suite{"lcer-equiv"};
  Rng rng(0x1ce4e9ULL);
  const auto pairs = fixture_pairs();
  std::vector<Ldba> automata;
  for (const auto& [file, _] : pairs)
    automata.push_back(Ldba::load_file((fs::path(fixture_dir) / file).string()));

  const Alphabet alphabet({"y", "b", "r"});
  for (int i = 0; i < rollouts; ++i) {
    const Ldba& aut = automata[i % automata.size()];
    const auto env = random_tabular_env(alphabet, rng);
    const ProductSystem sys(*env, aut);
    const Policy uniform = [&](const ProductState& z, Rng& r) {
      return sys.action_at(
          z, static_cast<int>(uniform_index(r, sys.action_count(z))));
    };
    const int horizon = 1 + static_cast<int>(uniform_index(rng, 8));
    const ProductTrajectory traj = rollout(sys, uniform, horizon, rng);

    const std::vector<ProductTrajectory> offline = lcer_pg_offline(traj, sys);
    OnlineCfBuilder builder(sys, traj.steps.front().state.s);
    for (int t = 0; t < traj.length(); ++t)
      builder.observe(traj.actions[t], traj.steps[t + 1].state.s);
    const std::vector<ProductTrajectory> online = builder.finish();

    ++suite.total;
    if (offline == online) {
      ++suite.passed;
    } else {
      std::ostringstream why;
      why << "rollout " << i << " (automaton " << pairs[i % pairs.size()].first
          << ", horizon " << horizon << "):\nobserved:\n"
          << serialize_trajectory(traj, {0.99, DiscountMode::Eventual})
          << "offline set (" << offline.size() << "):\n";
      for (const ProductTrajectory& member : offline)
        why << "  " << trajectory_key(member) << '\n';
      why << "online set (" << online.size() << "):\n";
      for (const ProductTrajectory& member : online)
        why << "  " << trajectory_key(member) << '\n';
      suite.failures.push_back(why.str());
    }
  }
  return suite;
}

int cmd_verify(const std::string& suite_name, const std::string& fixture_dir,
               std::ostream& out) {
  std::vector<SuiteResult> results;
  if (suite_name == "oracle" || suite_name == "all")
    results.push_back(verify_oracle(fixture_dir));
  if (suite_name == "lemma1" || suite_name == "all")
    results.push_back(verify_lemma1());
  if (suite_name == "theorem1" || suite_name == "all")
    results.push_back(verify_theorem1());
  if (suite_name == "lcer-equiv" || suite_name == "all")
    results.push_back(verify_lcer_equiv(fixture_dir));
  if (results.empty()) {
    out << "unknown suite '" << suite_name
        << "' (expected lemma1, theorem1, lcer-equiv, oracle or all)\n";
    return 2;
  }
  bool ok = true;
  for (const SuiteResult& result : results) {
    out << result.name << ": " << result.passed << "/" << result.total
        << (result.ok() ? " PASS" : " FAIL") << "\n";
    for (const std::string& failure : result.failures)
      out << "  counterexample: " << failure << "\n";
    ok = ok && result.ok();
  }
  return ok ? 0 : 1;
}

int cmd_inspect(const std::string& ldba_path, const std::string& formula_text,
                std::ostream& out) {
  const Ldba aut = Ldba::load_file(ldba_path);
  const FormulaPtr phi = parse_ltl(formula_text);
  for (const std::string& atom : atoms_of(*phi))
    if (aut.alphabet().index_of(atom) < 0) {
      out << "formula atom '" << atom << "' is not declared by the automaton\n";
      return 2;
    }

  out << "states: " << aut.state_count() << "\n";
  out << "initial: " << aut.initial_state() << "\n";
  out << "accepting:";
  for (int b : aut.accepting_states()) out << ' ' << b;
  out << "\n";
  out << "deterministic part:";
  for (int b = 0; b < aut.state_count(); ++b)
    if (aut.in_deterministic_part(b)) out << ' ' << b;
  out << "\n";
  out << "jump states:";
  for (int b = 0; b < aut.state_count(); ++b)
    if (aut.jump_count(b) > 0)
      out << ' ' << b << "(x" << aut.jump_count(b) << ")";
  out << "\n";
  out << "min horizon: " << min_horizon(aut) << "\n";

  Rng rng(0x17a550ULL);
  constexpr int kWords = 200;
  int agree = 0;
  for (int i = 0; i < kWords; ++i) {
    const LassoWord word = random_lasso_word(aut.alphabet(), rng);
    if (eval_lasso(*phi, word) == accepts_lasso(aut, word).accepted) ++agree;
  }
  out << "oracle agreement: " << agree << "/" << kWords << "\n";
  return agree == kWords ? 0 : 1;
}

}  // namespace ltlrl::harness
