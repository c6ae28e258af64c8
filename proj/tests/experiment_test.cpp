#include <gtest/gtest.h>

#include <sstream>

#include "mepf/error.hpp"
#include "mepf/experiment.hpp"

namespace mepf {
namespace {

ExperimentConfig small_config() {
  return ExperimentConfig::parse("dist=footnote2:16\ntrials=12\nseed=99\ndelta=0.1\n");
}

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::kInvalidArgument;
}

TEST(DistributionSpec, RoundTrip) {
  for (const char* text : {"custom:0.5,0.3,0.2", "zipf:1.5,20", "footnote1:32", "footnote2:64"}) {
    const DistributionSpec spec = DistributionSpec::parse(text);
    EXPECT_EQ(DistributionSpec::parse(spec.to_string()), spec) << text;
  }
  EXPECT_EQ(error_of([] { DistributionSpec::parse("zipf:1").build(); }), Errc::kInvalidConfig);
}

TEST(ExperimentConfig, RoundTripsThroughText) {
  ExperimentConfig c = small_config();
  c.budget = 5000;
  c.algorithms = {Algorithm::kElimination, Algorithm::kAdaptive};
  c.schedule.first_round = 4;
  c.schedule.eps_scale = 0.3;
  c.out = "x.csv";
  c.timing = true;
  EXPECT_EQ(ExperimentConfig::parse(c.to_text()), c);
}

TEST(ExperimentConfig, Validation) {
  EXPECT_EQ(error_of([] { ExperimentConfig::parse("trials=0\n"); }), Errc::kInvalidConfig);
  EXPECT_EQ(error_of([] { ExperimentConfig::parse("delta=1.5\n"); }), Errc::kInvalidConfig);
  EXPECT_EQ(error_of([] { ExperimentConfig::parse("colour=blue\n"); }), Errc::kInvalidConfig);
  EXPECT_EQ(error_of([] { ExperimentConfig::parse("algorithms=guessing\n"); }), Errc::kInvalidConfig);
}

TEST(Trials, SerialMatchesParallel) {
  const ExperimentConfig c = small_config();
  const auto serial = run_trials_serial(c);
  ASSERT_EQ(serial.size(), 12u * c.algorithms.size());
  EXPECT_EQ(serial, run_trials_parallel(c, 4));
  EXPECT_EQ(serial, run_trials_parallel(c, 1));
  for (const TrialRecord& r : serial) {
    EXPECT_GE(r.queries_paper, r.queries_raw);
    EXPECT_EQ(r.wall_ns, 0u);
  }
}

TEST(Trials, SeedChangesRecords) {
  ExperimentConfig c = small_config();
  const auto a = run_trials_serial(c);
  c.seed = 100;
  EXPECT_NE(a, run_trials_serial(c));
}

TEST(Csv, RoundTripAndRecompute) {
  const ExperimentConfig c = small_config();
  const auto records = run_trials_serial(c);
  std::ostringstream out;
  write_csv(out, records);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "trial_id,algorithm,m,delta,correct,queries_raw,queries_paper,samples,rounds,wall_ns");
  EXPECT_EQ(text.find('\r'), std::string::npos);
  std::istringstream in(text);
  const auto back = read_csv(in);
  EXPECT_EQ(back, records);

  const ExperimentSummary s = summarize(c, records);
  const ExperimentSummary t = summarize(c, back);
  ASSERT_EQ(s.algorithms.size(), t.algorithms.size());
  for (std::size_t i = 0; i < s.algorithms.size(); ++i) {
    EXPECT_NEAR(s.algorithms[i].mean_queries_paper, t.algorithms[i].mean_queries_paper, 1e-12);
    EXPECT_GE(s.algorithms[i].error_rate, 0.0);
    EXPECT_LE(s.algorithms[i].error_rate, 1.0);
  }
}

TEST(PlotData, DeltaSweep) {
  std::vector<ExperimentSummary> summaries;
  for (double delta : {0.2, 0.1, 0.05, 0.02}) {
    ExperimentConfig c = small_config();
    c.algorithms = {Algorithm::kElimination};
    c.trials = 40;
    c.delta = delta;
    summaries.push_back(summarize(c, run_trials_serial(c)));
  }
  std::ostringstream out;
  emit_plot_data(out, summaries, PlotAxis::kDelta);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line[0], '#');
  std::vector<double> queries;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    double axis = 0.0;
    double q = 0.0;
    row >> axis >> q;
    queries.push_back(q);
  }
  ASSERT_EQ(queries.size(), 4u);
  // rows ascend in delta, so queries must not increase
  for (std::size_t i = 1; i < queries.size(); ++i) EXPECT_LE(queries[i], queries[i - 1]);
}

TEST(PlotData, MixedAxes) {
  const ExperimentConfig c = small_config();
  const ExperimentSummary s = summarize(c, run_trials_serial(c));
  std::ostringstream out;
  EXPECT_EQ(error_of([&] { emit_plot_data(out, std::span(&s, 1), PlotAxis::kDelta); }), Errc::kMixedAxes);

  ExperimentConfig other = c;
  other.dist.m = 32;
  other.delta = 0.05;
  const std::vector<ExperimentSummary> mixed{s, summarize(other, run_trials_serial(other))};
  EXPECT_EQ(error_of([&] { emit_plot_data(out, mixed, PlotAxis::kDelta); }), Errc::kMixedAxes);
}

TEST(RunExperiment, RejectsZeroTrials) {
  ExperimentConfig c = small_config();
  c.trials = 0;
  EXPECT_EQ(error_of([&] { run_experiment(c); }), Errc::kInvalidConfig);
}

TEST(RunExperiment, UnwritableOutput) {
  ExperimentConfig c = small_config();
  c.out = "/nonexistent-dir/x.csv";
  EXPECT_EQ(error_of([&] { run_experiment(c); }), Errc::kIoFailure);
}

}  // namespace
}  // namespace mepf
