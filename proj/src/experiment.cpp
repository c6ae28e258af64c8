#include "mepf/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "mepf/error.hpp"

namespace mepf {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = s.find(sep, pos);
    parts.push_back(trim(s.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos)));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return parts;
}

[[noreturn]] void bad_config(const std::string& what) { throw Error(Errc::kInvalidConfig, what); }

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    bad_config("bad value for " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool parse_bool(std::string_view text, std::string_view what) {
  if (text == "1" || text == "true") return true;
  if (text == "0" || text == "false") return false;
  bad_config("bad value for " + std::string(what) + ": '" + std::string(text) + "'");
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2.0;
}

}  // namespace

// --- distribution spec ---------------------------------------------------

DistributionSpec DistributionSpec::parse(std::string_view text) {
  text = trim(text);
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) bad_config("distribution needs 'family:params': '" + std::string(text) + "'");
  const std::string_view family = trim(text.substr(0, colon));
  const std::vector<std::string_view> args = split(text.substr(colon + 1), ',');

  DistributionSpec spec;
  if (family == "custom") {
    spec.family = Family::kCustom;
    for (std::string_view a : args) spec.masses.push_back(parse_number<double>(a, "custom mass"));
    spec.m = spec.masses.size();
  } else if (family == "zipf") {
    if (args.size() != 2) bad_config("zipf needs 'zipf:s,m'");
    spec.family = Family::kZipf;
    spec.exponent = parse_number<double>(args[0], "zipf exponent");
    spec.m = parse_number<std::size_t>(args[1], "zipf m");
  } else if (family == "footnote1" || family == "footnote2") {
    if (args.size() != 1) bad_config(std::string(family) + " needs one parameter m");
    spec.family = family == "footnote1" ? Family::kFootnote1 : Family::kFootnote2;
    spec.m = parse_number<std::size_t>(args[0], "m");
  } else {
    bad_config("unknown distribution family '" + std::string(family) + "'");
  }
  return spec;
}

std::string DistributionSpec::to_string() const {
  switch (family) {
    case Family::kCustom: {
      std::string s = "custom:";
      for (std::size_t i = 0; i < masses.size(); ++i) {
        if (i) s += ',';
        s += format_double(masses[i]);
      }
      return s;
    }
    case Family::kZipf: return "zipf:" + format_double(exponent) + "," + std::to_string(m);
    case Family::kFootnote1: return "footnote1:" + std::to_string(m);
    case Family::kFootnote2: return "footnote2:" + std::to_string(m);
  }
  return {};
}

ProbabilityVector DistributionSpec::build() const {
  try {
    switch (family) {
      case Family::kCustom: return ProbabilityVector::from_weights(masses);
      case Family::kZipf: return make_zipf(exponent, m);
      case Family::kFootnote1: return make_footnote1(m);
      case Family::kFootnote2: return make_footnote2(m);
    }
  } catch (const Error& e) {
    bad_config("invalid distribution " + to_string() + ": " + e.what());
  }
  bad_config("invalid distribution family");
}

// --- config --------------------------------------------------------------

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "dist") {
    c.dist = DistributionSpec::parse(value);
  } else if (key == "algorithms") {
    c.algorithms.clear();
    for (std::string_view name : split(value, ',')) {
      if (name == "all") {
        c.algorithms.insert(c.algorithms.end(), std::begin(kAllAlgorithms), std::end(kAllAlgorithms));
        continue;
      }
      const auto a = parse_algorithm(name);
      if (!a) bad_config("unknown algorithm '" + std::string(name) + "'");
      c.algorithms.push_back(*a);
    }
  } else if (key == "trials") {
    c.trials = parse_number<std::uint64_t>(value, key);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(value, key);
  } else if (key == "delta") {
    c.delta = parse_number<double>(value, key);
  } else if (key == "budget") {
    if (value == "none") {
      c.budget.reset();
    } else {
      c.budget = parse_number<std::uint64_t>(value, key);
    }
  } else if (key == "samples") {
    c.samples = parse_number<std::uint64_t>(value, key);
  } else if (key == "max_rounds") {
    c.max_rounds = parse_number<std::uint64_t>(value, key);
  } else if (key == "elimination_rounds") {
    c.elimination_rounds = parse_number<std::uint64_t>(value, key);
  } else if (key == "schedule.first_round") {
    c.schedule.first_round = parse_number<std::uint64_t>(value, key);
  } else if (key == "schedule.eps_scale") {
    c.schedule.eps_scale = parse_number<double>(value, key);
  } else if (key == "schedule.c") {
    c.schedule.c = parse_number<double>(value, key);
  } else if (key == "out") {
    c.out = std::string(value);
  } else if (key == "jobs") {
    c.jobs = parse_number<unsigned>(value, key);
  } else if (key == "timing") {
    c.timing = parse_bool(value, key);
  } else {
    bad_config("unknown key '" + std::string(key) + "'");
  }
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig c;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) bad_config("line " + std::to_string(line_no) + ": expected key=value");
    apply_setting(c, line.substr(0, eq), line.substr(eq + 1));
  }
  c.validate();
  return c;
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream text;
  text << "dist=" << dist.to_string() << '\n';
  text << "algorithms=";
  for (std::size_t i = 0; i < algorithms.size(); ++i) text << (i ? "," : "") << mepf::to_string(algorithms[i]);
  text << '\n';
  text << "trials=" << trials << '\n';
  text << "seed=" << seed << '\n';
  text << "delta=" << format_double(delta) << '\n';
  text << "budget=" << (budget ? std::to_string(*budget) : std::string("none")) << '\n';
  text << "samples=" << samples << '\n';
  text << "max_rounds=" << max_rounds << '\n';
  text << "elimination_rounds=" << elimination_rounds << '\n';
  text << "schedule.first_round=" << schedule.first_round << '\n';
  text << "schedule.eps_scale=" << format_double(schedule.eps_scale) << '\n';
  text << "schedule.c=" << format_double(schedule.c) << '\n';
  text << "out=" << out << '\n';
  text << "jobs=" << jobs << '\n';
  text << "timing=" << (timing ? 1 : 0) << '\n';
  return text.str();
}

void ExperimentConfig::validate() const {
  if (trials < 1) bad_config("trials must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) bad_config("delta must lie in (0, 1)");
  if (algorithms.empty()) bad_config("no algorithms selected");
  if (jobs < 1) bad_config("jobs must be at least 1");
  if (schedule.first_round < 1) bad_config("schedule.first_round must be at least 1");
  if (!(schedule.eps_scale >= 0.0)) bad_config("schedule.eps_scale must be non-negative");
  if (!(schedule.c > 1.0)) bad_config("schedule.c must exceed 1");
  if (elimination_rounds < 1 || elimination_rounds > 60) bad_config("elimination_rounds must lie in [1, 60]");
  if (max_rounds > 60) bad_config("max_rounds must not exceed 60");
  if (out != trim(out) || out.find('\n') != std::string::npos) bad_config("out path has surrounding whitespace");
  (void)dist.build();
}

std::uint64_t ExperimentConfig::resolved_samples(const ProbabilityVector& pv) const {
  if (samples) return samples;
  const double d2 = gaps(pv).delta_sq[pv.runner_up()];
  return static_cast<std::uint64_t>(std::ceil(std::log(1.0 / delta) / d2));
}

std::uint64_t ExperimentConfig::resolved_rounds(const ProbabilityVector& pv) const {
  if (max_rounds) return max_rounds;
  const std::uint64_t n = resolved_samples(pv);
  std::uint64_t r = 1;
  while (schedule.round_size(r) < n && r < 60) ++r;
  return r;
}

// --- trials --------------------------------------------------------------

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial_id) {
  return mix64(master ^ mix64(trial_id + 0x632be59bd9b4e019ULL));
}

TrialRecord run_trial(const ExperimentConfig& config, const ProbabilityVector& pv, Algorithm algorithm,
                      std::uint64_t trial_id, std::ostream* trace) {
  QueryOracle oracle(pv, trial_seed(config.seed, trial_id));
  oracle.set_trace(trace);
  const std::size_t m = pv.size();
  const auto start = std::chrono::steady_clock::now();
  ModeEstimate est;
  switch (algorithm) {
    case Algorithm::kExhaustive:
      est = exhaustive_search(oracle, m, config.resolved_samples(pv));
      break;
    case Algorithm::kAdaptive:
      est = adaptive_search(oracle, m, config.resolved_samples(pv));
      break;
    case Algorithm::kTruncated:
      est = truncated_search(oracle, m, config.schedule, config.resolved_rounds(pv));
      break;
    case Algorithm::kElimination:
      est = elimination(oracle, m, config.delta, config.schedule.c, config.budget);
      break;
    case Algorithm::kSetElimination:
      est = set_elimination(oracle, m, config.delta, config.schedule, config.elimination_rounds, config.budget);
      break;
  }
  const auto stop = std::chrono::steady_clock::now();

  TrialRecord rec;
  rec.trial_id = trial_id;
  rec.algorithm = algorithm;
  rec.m = m;
  rec.delta = config.delta;
  rec.correct = est.mode == pv.mode();
  rec.queries_raw = est.queries_used;
  rec.queries_paper = est.queries_paper;
  rec.samples = est.samples_used;
  rec.rounds = est.rounds;
  if (config.timing) {
    rec.wall_ns = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count());
  }
  return rec;
}

std::vector<TrialRecord> run_trials_serial(const ExperimentConfig& config) {
  config.validate();
  const ProbabilityVector pv = config.dist.build();
  std::vector<TrialRecord> records;
  records.reserve(config.trials * config.algorithms.size());
  for (std::uint64_t t = 0; t < config.trials; ++t) {
    for (Algorithm a : config.algorithms) records.push_back(run_trial(config, pv, a, t));
  }
  return records;
}

std::vector<TrialRecord> run_trials_parallel(const ExperimentConfig& config, unsigned jobs) {
  config.validate();
  if (jobs < 1) throw Error(Errc::kInvalidConfig, "jobs must be at least 1");
  const ProbabilityVector pv = config.dist.build();
  const std::size_t per_trial = config.algorithms.size();
  std::vector<TrialRecord> records(config.trials * per_trial);
  std::exception_ptr failure;
  const auto trials = static_cast<std::int64_t>(config.trials);

#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (std::int64_t t = 0; t < trials; ++t) {
    try {
      for (std::size_t a = 0; a < per_trial; ++a) {
        records[static_cast<std::size_t>(t) * per_trial + a] =
            run_trial(config, pv, config.algorithms[a], static_cast<std::uint64_t>(t));
      }
    } catch (...) {
#pragma omp critical(mepf_trial_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

// --- aggregation -----------------------------------------------------------

ExperimentSummary summarize(const ExperimentConfig& config, std::span<const TrialRecord> records) {
  const ProbabilityVector pv = config.dist.build();
  ExperimentSummary s;
  s.dist = config.dist.to_string();
  s.m = pv.size();
  s.delta = config.delta;
  s.samples = config.resolved_samples(pv);
  const double log_inv_delta = std::log(1.0 / config.delta);
  for (Algorithm a : config.algorithms) {
    AlgorithmSummary as;
    as.algorithm = a;
    std::vector<double> raw;
    std::vector<double> paper;
    double samples = 0.0;
    double wall = 0.0;
    for (const TrialRecord& r : records) {
      if (r.algorithm != a) continue;
      ++as.trials;
      as.errors += r.correct ? 0 : 1;
      raw.push_back(static_cast<double>(r.queries_raw));
      paper.push_back(static_cast<double>(r.queries_paper));
      samples += static_cast<double>(r.samples);
      wall += static_cast<double>(r.wall_ns);
    }
    if (as.trials) {
      const double n = static_cast<double>(as.trials);
      as.error_rate = static_cast<double>(as.errors) / n;
      as.error_stderr = std::sqrt(as.error_rate * (1.0 - as.error_rate) / n);
      double sum_raw = 0.0;
      double sum_paper = 0.0;
      for (double q : raw) sum_raw += q;
      for (double q : paper) sum_paper += q;
      as.mean_queries_raw = sum_raw / n;
      as.mean_queries_paper = sum_paper / n;
      as.median_queries_raw = median(raw);
      as.median_queries_paper = median(paper);
      as.mean_samples = samples / n;
      as.mean_wall_ns = wall / n;
    }
    as.alpha_theory = theoretical_alpha(pv, a);
    as.alpha_empirical = as.mean_queries_paper / log_inv_delta;
    s.algorithms.push_back(as);
  }
  return s;
}

void write_csv(std::ostream& out, std::span<const TrialRecord> records) {
  out << "trial_id,algorithm,m,delta,correct,queries_raw,queries_paper,samples,rounds,wall_ns\n";
  for (const TrialRecord& r : records) {
    out << r.trial_id << ',' << to_string(r.algorithm) << ',' << r.m << ',' << format_double(r.delta) << ','
        << (r.correct ? 1 : 0) << ',' << r.queries_raw << ',' << r.queries_paper << ',' << r.samples << ','
        << r.rounds << ',' << r.wall_ns << '\n';
  }
}

std::vector<TrialRecord> read_csv(std::istream& in) {
  std::vector<TrialRecord> records;
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::kInvalidArgument, "empty CSV");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string_view> f = split(line, ',');
    if (f.size() != 10) throw Error(Errc::kInvalidArgument, "CSV row needs 10 fields: " + line);
    try {
      TrialRecord r;
      r.trial_id = parse_number<std::uint64_t>(f[0], "trial_id");
      const auto a = parse_algorithm(f[1]);
      if (!a) throw Error(Errc::kInvalidArgument, "unknown algorithm in CSV");
      r.algorithm = *a;
      r.m = parse_number<std::size_t>(f[2], "m");
      r.delta = parse_number<double>(f[3], "delta");
      r.correct = parse_number<int>(f[4], "correct") != 0;
      r.queries_raw = parse_number<std::uint64_t>(f[5], "queries_raw");
      r.queries_paper = parse_number<std::uint64_t>(f[6], "queries_paper");
      r.samples = parse_number<std::uint64_t>(f[7], "samples");
      r.rounds = parse_number<std::uint64_t>(f[8], "rounds");
      r.wall_ns = parse_number<std::uint64_t>(f[9], "wall_ns");
      records.push_back(r);
    } catch (const Error& e) {
      throw Error(Errc::kInvalidArgument, e.what());
    }
  }
  return records;
}

std::string format_summary(const ExperimentSummary& s) {
  std::ostringstream out;
  char buf[256];
  out << "dist " << s.dist << "  m " << s.m << "  delta " << s.delta << "  n " << s.samples << '\n';
  std::snprintf(buf, sizeof buf, "%-16s %7s %9s %9s %12s %12s %12s %12s %10s %10s\n", "algorithm", "trials",
                "error", "stderr", "q_raw_mean", "q_raw_med", "q_paper_mean", "samples", "alpha_emp",
                "alpha_th");
  out << buf;
  for (const AlgorithmSummary& a : s.algorithms) {
    std::snprintf(buf, sizeof buf, "%-16s %7llu %9.5f %9.5f %12.1f %12.1f %12.1f %12.1f %10.2f %10.2f\n",
                  std::string(to_string(a.algorithm)).c_str(), static_cast<unsigned long long>(a.trials),
                  a.error_rate, a.error_stderr, a.mean_queries_raw, a.median_queries_raw, a.mean_queries_paper,
                  a.mean_samples, a.alpha_empirical, a.alpha_theory);
    out << buf;
  }
  return out.str();
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::vector<TrialRecord> records =
      config.jobs > 1 ? run_trials_parallel(config, config.jobs) : run_trials_serial(config);
  ExperimentSummary summary = summarize(config, records);
  if (!config.out.empty()) {
    std::ofstream csv(config.out, std::ios::binary);
    if (!csv) throw Error(Errc::kIoFailure, "cannot open " + config.out);
    write_csv(csv, records);
    std::ofstream text(config.out + ".summary", std::ios::binary);
    if (!text) throw Error(Errc::kIoFailure, "cannot open " + config.out + ".summary");
    text << format_summary(summary);
    csv.flush();
    text.flush();
    if (!csv || !text) throw Error(Errc::kIoFailure, "write failed for " + config.out);
  }
  return summary;
}

// --- plot data -----------------------------------------------------------

std::optional<PlotAxis> parse_plot_axis(std::string_view name) {
  if (name == "m") return PlotAxis::kM;
  if (name == "delta") return PlotAxis::kDelta;
  if (name == "n") return PlotAxis::kN;
  return std::nullopt;
}

std::string_view to_string(PlotAxis axis) {
  switch (axis) {
    case PlotAxis::kM: return "m";
    case PlotAxis::kDelta: return "delta";
    case PlotAxis::kN: return "n";
  }
  return "?";
}

void emit_plot_data(std::ostream& out, std::span<const ExperimentSummary> summaries, PlotAxis axis) {
  if (summaries.size() < 2) throw Error(Errc::kMixedAxes, "plot data needs at least two summaries");
  auto family = [](const std::string& dist) { return dist.substr(0, dist.find(':')); };
  auto axis_value = [axis](const ExperimentSummary& s) {
    switch (axis) {
      case PlotAxis::kM: return static_cast<double>(s.m);
      case PlotAxis::kDelta: return s.delta;
      case PlotAxis::kN: return static_cast<double>(s.samples);
    }
    return 0.0;
  };
  const ExperimentSummary& first = summaries.front();
  for (const ExperimentSummary& s : summaries) {
    if (s.algorithms.size() != first.algorithms.size()) throw Error(Errc::kMixedAxes, "algorithm sets differ");
    for (std::size_t i = 0; i < s.algorithms.size(); ++i) {
      if (s.algorithms[i].algorithm != first.algorithms[i].algorithm) {
        throw Error(Errc::kMixedAxes, "algorithm sets differ");
      }
    }
    const bool same = axis == PlotAxis::kM       ? family(s.dist) == family(first.dist) && s.delta == first.delta
                      : axis == PlotAxis::kDelta ? s.dist == first.dist
                                                 : s.dist == first.dist && s.delta == first.delta;
    if (!same) throw Error(Errc::kMixedAxes, "summaries differ off the " + std::string(to_string(axis)) + " axis");
  }

  std::vector<const ExperimentSummary*> rows;
  for (const ExperimentSummary& s : summaries) rows.push_back(&s);
  std::stable_sort(rows.begin(), rows.end(),
                   [&](const ExperimentSummary* a, const ExperimentSummary* b) { return axis_value(*a) < axis_value(*b); });

  out << "# " << to_string(axis);
  for (const AlgorithmSummary& a : first.algorithms) {
    out << '\t' << to_string(a.algorithm) << "_queries\t" << to_string(a.algorithm) << "_error";
  }
  out << '\n';
  for (const ExperimentSummary* s : rows) {
    out << format_double(axis_value(*s));
    for (const AlgorithmSummary& a : s->algorithms) {
      out << '\t' << format_double(a.mean_queries_paper) << '\t' << format_double(a.error_rate);
    }
    out << '\n';
  }
}

}  // namespace mepf
