// mepf: experiment runner and debugging front end.
#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mepf/checks.hpp"
#include "mepf/code_tree.hpp"
#include "mepf/error.hpp"
#include "mepf/experiment.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitCheck = 2;
constexpr int kExitIo = 3;

struct RunFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<double> delta;
  std::optional<std::string> algo;
  std::optional<std::string> dist;
  std::optional<unsigned> jobs;
  std::optional<std::string> out;
  bool trace = false;
  bool timing = false;
  std::string sweep;
  std::string plot;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mepf::Error(mepf::Errc::kIoFailure, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw mepf::Error(mepf::Errc::kIoFailure, "cannot write " + path);
}

// Config file, then MEPF_SEED, then flags.
mepf::ExperimentConfig load_config(const RunFlags& flags) {
  mepf::ExperimentConfig config;
  if (!flags.config_path.empty()) config = mepf::ExperimentConfig::parse(read_file(flags.config_path));
  if (const char* env = std::getenv("MEPF_SEED")) mepf::apply_setting(config, "seed", env);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.trials) config.trials = *flags.trials;
  if (flags.delta) config.delta = *flags.delta;
  if (flags.algo) mepf::apply_setting(config, "algorithms", *flags.algo);
  if (flags.dist) config.dist = mepf::DistributionSpec::parse(*flags.dist);
  if (flags.jobs) config.jobs = *flags.jobs;
  if (flags.out) config.out = *flags.out;
  if (flags.timing) config.timing = true;
  config.validate();
  return config;
}

void write_trace(const mepf::ExperimentConfig& config) {
  const mepf::ProbabilityVector pv = config.dist.build();
  std::ostringstream trace;
  for (mepf::Algorithm algo : config.algorithms) {
    trace << "# " << mepf::to_string(algo) << " trial 0\n";
    (void)mepf::run_trial(config, pv, algo, 0, &trace);
  }
  write_file(config.out + ".trace", trace.str());
}

std::vector<mepf::ExperimentConfig> expand_sweep(const mepf::ExperimentConfig& base, const std::string& sweep,
                                                 mepf::PlotAxis& axis) {
  const auto eq = sweep.find('=');
  if (eq == std::string::npos) throw mepf::Error(mepf::Errc::kInvalidConfig, "sweep must be AXIS=v1,v2,...");
  const auto parsed = mepf::parse_plot_axis(sweep.substr(0, eq));
  if (!parsed) throw mepf::Error(mepf::Errc::kInvalidConfig, "unknown sweep axis " + sweep.substr(0, eq));
  axis = *parsed;
  std::vector<mepf::ExperimentConfig> configs;
  std::istringstream values(sweep.substr(eq + 1));
  for (std::string v; std::getline(values, v, ',');) {
    mepf::ExperimentConfig c = base;
    switch (axis) {
      case mepf::PlotAxis::kM:
        if (c.dist.family == mepf::DistributionSpec::Family::kCustom) {
          throw mepf::Error(mepf::Errc::kInvalidConfig, "cannot sweep m of a custom distribution");
        }
        c.dist.m = std::stoul(v);
        break;
      case mepf::PlotAxis::kDelta: mepf::apply_setting(c, "delta", v); break;
      case mepf::PlotAxis::kN: mepf::apply_setting(c, "samples", v); break;
    }
    if (!c.out.empty()) c.out += "." + std::string(mepf::to_string(axis)) + "=" + v;
    c.validate();
    configs.push_back(std::move(c));
  }
  return configs;
}

int cmd_run(const RunFlags& flags) {
  const mepf::ExperimentConfig config = load_config(flags);
  if (flags.sweep.empty()) {
    const mepf::ExperimentSummary summary = mepf::run_experiment(config);
    std::cout << mepf::format_summary(summary);
    if (flags.trace && !config.out.empty()) write_trace(config);
    return 0;
  }
  mepf::PlotAxis axis{};
  std::vector<mepf::ExperimentSummary> summaries;
  for (const mepf::ExperimentConfig& c : expand_sweep(config, flags.sweep, axis)) {
    summaries.push_back(mepf::run_experiment(c));
    std::cout << mepf::format_summary(summaries.back()) << '\n';
  }
  if (!flags.plot.empty()) {
    std::ostringstream plot;
    mepf::emit_plot_data(plot, summaries, axis);
    write_file(flags.plot, plot.str());
  }
  return 0;
}

int cmd_alpha(const RunFlags& flags) {
  const mepf::ExperimentConfig config = load_config(flags);
  const mepf::ProbabilityVector pv = config.dist.build();
  std::cout << "dist " << config.dist.to_string() << "\n";
  for (mepf::Algorithm algo : config.algorithms) {
    std::cout << mepf::to_string(algo) << '\t' << mepf::theoretical_alpha(pv, algo) << '\n';
  }
  return 0;
}

int cmd_check(const std::vector<std::string>& only, std::optional<std::uint64_t> seed, unsigned jobs) {
  mepf::CheckOptions options;
  if (const char* env = std::getenv("MEPF_SEED")) options.seed = std::stoull(env, nullptr, 0);
  if (seed) options.seed = *seed;
  options.jobs = jobs;
  std::vector<int> ids;
  for (const std::string& name : only) {
    const int id = mepf::check_id(name);
    if (id < 0) throw mepf::Error(mepf::Errc::kInvalidConfig, "unknown check " + name);
    ids.push_back(id);
  }
  if (ids.empty()) {
    for (int id = 1; id <= mepf::kCheckCount; ++id) ids.push_back(id);
  }
  std::vector<mepf::CheckResult> results;
  for (int id : ids) {
    results.push_back(mepf::run_check(id, options));
    std::cout << mepf::format_check_line(results.back()) << std::endl;
  }
  return mepf::exit_code_for(results);
}

std::vector<std::uint64_t> parse_list(const std::string& text) {
  std::vector<std::uint64_t> values;
  std::istringstream in(text);
  for (std::string v; std::getline(in, v, ',');) values.push_back(std::stoull(v));
  return values;
}

int cmd_dump_tree(const std::string& counts, const std::string& observe, std::size_t m) {
  if (!observe.empty()) {
    mepf::CodeTree tree = mepf::CodeTree::fresh(m);
    for (std::uint64_t y : parse_list(observe)) tree.observe(static_cast<mepf::ClassIndex>(y));
    std::cout << tree.dump();
    return 0;
  }
  std::map<mepf::ClassIndex, mepf::Count> keyed;
  const std::vector<std::uint64_t> values = parse_list(counts);
  for (std::size_t i = 0; i < values.size(); ++i) keyed[static_cast<mepf::ClassIndex>(i)] = values[i];
  std::cout << mepf::CodeTree::build_huffman(keyed).dump();
  return 0;
}

void add_run_flags(CLI::App* app, RunFlags& flags) {
  app->add_option("--config", flags.config_path, "key=value config file");
  app->add_option("--seed", flags.seed, "master seed");
  app->add_option("--trials", flags.trials, "number of trials");
  app->add_option("--delta", flags.delta, "target error probability");
  app->add_option("--algo", flags.algo, "comma-separated algorithms or 'all'");
  app->add_option("--dist", flags.dist, "custom:p1,p2,.. | zipf:s,m | footnote1:m | footnote2:m");
  app->add_option("--jobs", flags.jobs, "worker threads");
  app->add_option("--out", flags.out, "per-trial CSV path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mode estimation with partial feedback"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run an experiment");
  add_run_flags(run, run_flags);
  run->add_flag("--trace", run_flags.trace, "write <out>.trace with trial 0's queries");
  run->add_flag("--timing", run_flags.timing, "record wall_ns per trial");
  run->add_option("--sweep", run_flags.sweep, "AXIS=v1,v2,... with AXIS one of m, delta, n");
  run->add_option("--plot", run_flags.plot, "plot-data path for a sweep");

  RunFlags alpha_flags;
  CLI::App* alpha = app.add_subcommand("alpha", "print theoretical query coefficients");
  add_run_flags(alpha, alpha_flags);

  std::vector<std::string> only;
  std::optional<std::uint64_t> check_seed;
  unsigned check_jobs = 1;
  CLI::App* check = app.add_subcommand("check", "run acceptance suites");
  check->add_option("--only", only, "suite ids or names")->delimiter(',');
  check->add_option("--seed", check_seed, "suite seed");
  check->add_option("--jobs", check_jobs, "worker threads");

  std::string counts = "69,14,8,3,6";
  std::string observe;
  std::size_t tree_m = 8;
  CLI::App* dump = app.add_subcommand("dump-tree", "render a code tree");
  dump->add_option("--counts", counts, "comma-separated class counts");
  dump->add_option("--observe", observe, "comma-separated class sequence fed to an empty tree");
  dump->add_option("--m", tree_m, "number of classes for --observe");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*alpha) return cmd_alpha(alpha_flags);
    if (*check) return cmd_check(only, check_seed, check_jobs);
    if (*dump) return cmd_dump_tree(counts, observe, tree_m);
  } catch (const mepf::Error& e) {
    std::cerr << "mepf: " << e.what() << '\n';
    if (e.code() == mepf::Errc::kIoFailure) return kExitIo;
    if (*check && e.code() != mepf::Errc::kInvalidConfig) return kExitCheck;
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "mepf: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
