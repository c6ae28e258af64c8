#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mepf/distribution.hpp"
#include "mepf/estimators.hpp"
#include "mepf/types.hpp"

namespace mepf {

/// Text forms: "custom:0.5,0.3,0.2", "zipf:1,64", "footnote1:32", "footnote2:64".
struct DistributionSpec {
  enum class Family { kCustom, kZipf, kFootnote1, kFootnote2 };

  Family family = Family::kFootnote2;
  std::vector<double> masses;  // custom only
  double exponent = 1.0;       // zipf only
  std::size_t m = 16;

  static DistributionSpec parse(std::string_view text);
  std::string to_string() const;
  ProbabilityVector build() const;
  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

/// Flat key=value configuration. Unset sizes are derived from the
/// distribution so every algorithm targets error delta:
///   samples    = ceil(ln(1/delta) / Delta_2^2)    (exhaustive, adaptive)
///   max_rounds = min r with 2^r >= samples         (truncated)
/// Elimination-family runs stop on their own, on `budget`, or after
/// `elimination_rounds` set-elimination rounds.
struct ExperimentConfig {
  DistributionSpec dist;
  std::vector<Algorithm> algorithms{std::begin(kAllAlgorithms), std::end(kAllAlgorithms)};
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  double delta = 0.1;
  std::optional<std::uint64_t> budget;
  std::uint64_t samples = 0;
  std::uint64_t max_rounds = 0;
  std::uint64_t elimination_rounds = 40;
  Schedule schedule;
  std::string out;
  unsigned jobs = 1;
  bool timing = false;

  /// Throws kInvalidConfig on unknown keys, bad values or failed validation.
  static ExperimentConfig parse(std::string_view text);
  std::string to_text() const;
  /// Throws kInvalidConfig.
  void validate() const;

  std::uint64_t resolved_samples(const ProbabilityVector& pv) const;
  std::uint64_t resolved_rounds(const ProbabilityVector& pv) const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Applies one "key=value" assignment; throws kInvalidConfig.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

struct TrialRecord {
  std::uint64_t trial_id = 0;
  Algorithm algorithm = Algorithm::kExhaustive;
  std::size_t m = 0;
  double delta = 0.0;
  bool correct = false;
  std::uint64_t queries_raw = 0;
  std::uint64_t queries_paper = 0;
  std::uint64_t samples = 0;
  std::uint64_t rounds = 0;
  std::uint64_t wall_ns = 0;  // 0 unless timing is on
  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Oracle seed of a trial; every algorithm in the trial sees the same stream.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial_id);

/// One trial of one algorithm. `trace` receives the oracle's query log.
TrialRecord run_trial(const ExperimentConfig& config, const ProbabilityVector& pv, Algorithm algorithm,
                      std::uint64_t trial_id, std::ostream* trace = nullptr);

/// Records ordered by trial id, then by config.algorithms order.
std::vector<TrialRecord> run_trials_serial(const ExperimentConfig& config);
/// Same records as run_trials_serial; trials spread over `jobs` OpenMP threads.
std::vector<TrialRecord> run_trials_parallel(const ExperimentConfig& config, unsigned jobs);

struct AlgorithmSummary {
  Algorithm algorithm = Algorithm::kExhaustive;
  std::uint64_t trials = 0;
  std::uint64_t errors = 0;
  double error_rate = 0.0;
  double error_stderr = 0.0;
  double mean_queries_raw = 0.0;
  double median_queries_raw = 0.0;
  double mean_queries_paper = 0.0;
  double median_queries_paper = 0.0;
  double mean_samples = 0.0;
  double mean_wall_ns = 0.0;
  double alpha_theory = 0.0;
  double alpha_empirical = 0.0;  // mean queries_paper / ln(1/delta)
};

struct ExperimentSummary {
  std::string dist;
  std::size_t m = 0;
  double delta = 0.0;
  std::uint64_t samples = 0;  // resolved fixed-sample size
  std::vector<AlgorithmSummary> algorithms;
};

ExperimentSummary summarize(const ExperimentConfig& config, std::span<const TrialRecord> records);

void write_csv(std::ostream& out, std::span<const TrialRecord> records);
/// Throws kInvalidArgument on malformed input.
std::vector<TrialRecord> read_csv(std::istream& in);
std::string format_summary(const ExperimentSummary& summary);

/// Runs the trials, writes `<out>` (CSV) and `<out>.summary` when out is set.
/// Throws kInvalidConfig, kIoFailure.
ExperimentSummary run_experiment(const ExperimentConfig& config);

enum class PlotAxis { kM, kDelta, kN };
std::optional<PlotAxis> parse_plot_axis(std::string_view name);
std::string_view to_string(PlotAxis axis);

/// Tab-separated rows, one per summary, sorted by axis value; header line
/// starts with '#'. Throws kMixedAxes for fewer than two summaries,
/// differing algorithm sets, or summaries that differ off the axis.
void emit_plot_data(std::ostream& out, std::span<const ExperimentSummary> summaries, PlotAxis axis);

}  // namespace mepf
