#include "mepf/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "mepf/error.hpp"

namespace mepf {

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::kExhaustive: return "exhaustive";
    case Algorithm::kAdaptive: return "adaptive";
    case Algorithm::kTruncated: return "truncated";
    case Algorithm::kElimination: return "elimination";
    case Algorithm::kSetElimination: return "set_elimination";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (Algorithm a : kAllAlgorithms) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

ProbabilityVector ProbabilityVector::from_weights(std::span<const double> weights) {
  if (weights.size() < 2) {
    throw Error(Errc::kEmptyOrDegenerate, "need at least two classes");
  }
  double total = 0.0;
  std::size_t nonzero = 0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(Errc::kNegativeWeight, "weights must be finite and non-negative");
    }
    total += w;
    if (w > 0.0) ++nonzero;
  }
  if (nonzero < 2) {
    throw Error(Errc::kEmptyOrDegenerate, "need at least two non-zero weights");
  }

  ProbabilityVector pv;
  pv.masses_.reserve(weights.size());
  for (double w : weights) pv.masses_.push_back(w / total);

  auto best = std::max_element(pv.masses_.begin(), pv.masses_.end());
  pv.mode_ = static_cast<ClassIndex>(best - pv.masses_.begin());
  for (std::size_t i = 0; i < pv.masses_.size(); ++i) {
    if (i != pv.mode_ && pv.masses_[i] == *best) {
      throw Error(Errc::kTiedMode, "mode is not strictly unique");
    }
  }

  pv.runner_up_ = pv.mode_ == 0 ? 1 : 0;
  for (std::size_t i = 0; i < pv.masses_.size(); ++i) {
    if (i != pv.mode_ && pv.masses_[i] > pv.masses_[pv.runner_up_]) {
      pv.runner_up_ = static_cast<ClassIndex>(i);
    }
  }

  pv.cumulative_.resize(pv.masses_.size());
  std::partial_sum(pv.masses_.begin(), pv.masses_.end(), pv.cumulative_.begin());
  pv.cumulative_.back() = 1.0;
  return pv;
}

ClassIndex ProbabilityVector::quantile(double u) const noexcept {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  idx = std::min(idx, masses_.size() - 1);
  // upper_bound can land on a zero-mass class sitting at a flat step; skip it.
  while (masses_[idx] == 0.0 && idx + 1 < masses_.size()) ++idx;
  return static_cast<ClassIndex>(idx);
}

ClassIndex sample_at(const ProbabilityVector& pv, std::uint64_t seed, std::uint64_t index) {
  return pv.quantile(to_unit(mix64(mix64(seed) ^ (index * 0xd1b54a32d192ed03ULL))));
}

std::vector<ClassIndex> sample(const ProbabilityVector& pv, std::uint64_t seed, std::size_t n) {
  std::vector<ClassIndex> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = sample_at(pv, seed, j);
  return out;
}

double entropy_bits(const ProbabilityVector& pv) {
  double h = 0.0;
  for (double p : pv.masses()) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double chernoff_gap_sq(double mode_mass, double other_mass) {
  const double d = std::sqrt(mode_mass) - std::sqrt(other_mass);
  return -std::log1p(-d * d);
}

GapVector gaps(const ProbabilityVector& pv) {
  const double top = pv.mode_mass();
  GapVector g;
  g.delta_sq.resize(pv.size());
  g.nabla.resize(pv.size());
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const ClassIndex other = i == pv.mode() ? pv.runner_up() : static_cast<ClassIndex>(i);
    g.delta_sq[i] = chernoff_gap_sq(top, pv[other]);
    g.nabla[i] = top - pv[other];
  }
  return g;
}

InformationProjection information_projection(const ProbabilityVector& pv) {
  const double p1 = pv.mode_mass();
  const double p2 = pv[pv.runner_up()];
  const double d = std::sqrt(p1) - std::sqrt(p2);

  InformationProjection proj;
  proj.lambda = 1.0 / (1.0 - d * d);
  const double rest = 1.0 - p1 - p2;
  const double tied = (1.0 - proj.lambda * rest) / 2.0;
  proj.q_star.resize(pv.size());
  for (std::size_t i = 0; i < pv.size(); ++i) proj.q_star[i] = proj.lambda * pv[static_cast<ClassIndex>(i)];
  proj.q_star[pv.mode()] = tied;
  proj.q_star[pv.runner_up()] = tied;
  proj.divergence_nats = chernoff_gap_sq(p1, p2);
  proj.divergence_bits = proj.divergence_nats / std::numbers::ln2;
  return proj;
}

double kl_divergence_bits(std::span<const double> q, std::span<const double> p) {
  double d = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] <= 0.0) continue;
    if (p[i] <= 0.0) return std::numeric_limits<double>::infinity();
    d += q[i] * std::log2(q[i] / p[i]);
  }
  return d;
}

double mode_error_bound(const ProbabilityVector& pv, std::uint64_t n) {
  const double d2 = chernoff_gap_sq(pv.mode_mass(), pv[pv.runner_up()]);
  return std::exp(-static_cast<double>(n) * d2);
}

double theoretical_alpha(const ProbabilityVector& pv, Algorithm algorithm) {
  const GapVector g = gaps(pv);
  const double base = 1.0 / g.delta_sq[pv.runner_up()];
  const double p1 = pv.mode_mass();
  switch (algorithm) {
    case Algorithm::kExhaustive:
      return base + base * std::log2(static_cast<double>(pv.size()));
    case Algorithm::kAdaptive:
      return base + base * entropy_bits(pv);
    case Algorithm::kTruncated:
      return base + base * std::abs(std::log2(p1));
    case Algorithm::kElimination: {
      double sum = 0.0;
      for (std::size_t i = 0; i < pv.size(); ++i) {
        const double p = pv[static_cast<ClassIndex>(i)];
        if (p > 0.0) sum += p / g.delta_sq[i] * std::abs(std::log2(p));
      }
      return base + sum;
    }
    case Algorithm::kSetElimination: {
      double sum = 0.0;
      for (std::size_t i = 0; i < pv.size(); ++i) {
        const double p = pv[static_cast<ClassIndex>(i)];
        if (p > 0.0) sum += p / g.delta_sq[i];
      }
      return base + sum * std::abs(std::log2(p1));
    }
  }
  return 0.0;
}

GapComparison gap_comparison_bounds(const ProbabilityVector& pv, ClassIndex i) {
  if (i >= pv.size() || i == pv.mode()) {
    throw Error(Errc::kInvalidArgument, "class must be a non-mode index");
  }
  const double p1 = pv.mode_mass();
  const double nabla = p1 - pv[i];
  if (nabla <= 0.0) throw Error(Errc::kDegenerateGap, "zero gap to the mode");

  GapComparison c;
  const double inv_nabla_sq = 1.0 / (nabla * nabla);
  c.lower = p1 / -std::log1p(-p1) * p1 * inv_nabla_sq;
  c.upper = 4.0 * p1 * inv_nabla_sq;
  c.value = 1.0 / chernoff_gap_sq(p1, pv[i]);
  c.holds = c.lower <= c.value && c.value <= c.upper;
  return c;
}

ProbabilityVector make_zipf(double exponent, std::size_t m) {
  std::vector<double> w(m);
  for (std::size_t k = 0; k < m; ++k) w[k] = std::pow(static_cast<double>(k + 1), -exponent);
  return ProbabilityVector::from_weights(w);
}

ProbabilityVector make_footnote1(std::size_t m) {
  if (m < 3) throw Error(Errc::kInvalidArgument, "footnote1 needs m >= 3");
  const double md = static_cast<double>(m);
  std::vector<double> w(m);
  w[0] = 2.0 / md;
  w[1] = 2.0 / md - 1.0 / (md * md);
  const double rest = (1.0 - w[0] - w[1]) / (md - 2.0);
  for (std::size_t k = 2; k < m; ++k) w[k] = rest;
  return ProbabilityVector::from_weights(w);
}

ProbabilityVector make_footnote2(std::size_t m) {
  if (m < 2) throw Error(Errc::kInvalidArgument, "footnote2 needs m >= 2");
  std::vector<double> w(m, 1.0 / (2.0 * static_cast<double>(m - 1)));
  w[0] = 0.5;
  return ProbabilityVector::from_weights(w);
}

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kEmptyOrDegenerate: return "EmptyOrDegenerate";
    case Errc::kTiedMode: return "TiedMode";
    case Errc::kNegativeWeight: return "NegativeWeight";
    case Errc::kDegenerateGap: return "DegenerateGap";
    case Errc::kEmptyInput: return "EmptyInput";
    case Errc::kNonPositiveCount: return "NonPositiveCount";
    case Errc::kUnknownClass: return "UnknownClass";
    case Errc::kAlreadyObserved: return "AlreadyObserved";
    case Errc::kZeroRootValue: return "ZeroRootValue";
    case Errc::kDegenerateSet: return "DegenerateSet";
    case Errc::kReplayExhausted: return "ReplayExhausted";
    case Errc::kNoData: return "NoData";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kInvalidConfig: return "InvalidConfig";
    case Errc::kMixedAxes: return "MixedAxes";
    case Errc::kIoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace mepf
