#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mepf/types.hpp"

namespace mepf {

/// A discrete distribution over classes 0..m-1 with a strictly unique mode.
///
/// Masses are stored in class order, not sorted by probability. Zero-mass
/// classes are allowed.
class ProbabilityVector {
 public:
  /// Normalizes non-negative weights. Throws kEmptyOrDegenerate when fewer
  /// than two classes (or fewer than two non-zero weights) are given,
  /// kNegativeWeight, and kTiedMode when the maximum is not unique.
  static ProbabilityVector from_weights(std::span<const double> weights);

  std::size_t size() const noexcept { return masses_.size(); }
  double operator[](ClassIndex y) const { return masses_[y]; }
  std::span<const double> masses() const noexcept { return masses_; }

  ClassIndex mode() const noexcept { return mode_; }
  /// Largest non-mode mass; lowest index on ties.
  ClassIndex runner_up() const noexcept { return runner_up_; }
  double mode_mass() const noexcept { return masses_[mode_]; }

  /// Inverse-CDF draw for a uniform u in [0, 1).
  ClassIndex quantile(double u) const noexcept;

 private:
  ProbabilityVector() = default;

  std::vector<double> masses_;
  std::vector<double> cumulative_;
  ClassIndex mode_ = 0;
  ClassIndex runner_up_ = 0;
};

/// Deterministic draw of the index-th sample of the stream identified by seed.
/// Random access: the value does not depend on which other indices were drawn.
ClassIndex sample_at(const ProbabilityVector& pv, std::uint64_t seed, std::uint64_t index);

std::vector<ClassIndex> sample(const ProbabilityVector& pv, std::uint64_t seed, std::size_t n);

double entropy_bits(const ProbabilityVector& pv);

/// Exponential error rates against the mode, natural-log units.
/// The mode slot carries the runner-up values.
struct GapVector {
  std::vector<double> delta_sq;
  std::vector<double> nabla;
};

/// -ln(1 - (sqrt(a) - sqrt(b))^2)
double chernoff_gap_sq(double mode_mass, double other_mass);

GapVector gaps(const ProbabilityVector& pv);

/// Closest distribution in KL whose mode is no longer unique-to-y1.
struct InformationProjection {
  double lambda = 1.0;
  std::vector<double> q_star;
  double divergence_nats = 0.0;
  double divergence_bits = 0.0;
};

InformationProjection information_projection(const ProbabilityVector& pv);

/// KL divergence D(q || p) in bits; +inf if q puts mass where p has none.
double kl_divergence_bits(std::span<const double> q, std::span<const double> p);

/// exp(-n * Delta_2^2)
double mode_error_bound(const ProbabilityVector& pv, std::uint64_t n);

/// Asymptotic query coefficient per algorithm, universal constants dropped.
double theoretical_alpha(const ProbabilityVector& pv, Algorithm algorithm);

struct GapComparison {
  double lower = 0.0;
  double upper = 0.0;
  double value = 0.0;  // Delta_i^{-2}
  bool holds = false;
};

/// Sandwich of Delta_i^{-2} between multiples of p(y1) / nabla_i^2.
/// Throws kDegenerateGap when p(y_i) == p(y1), kInvalidArgument for the mode.
GapComparison gap_comparison_bounds(const ProbabilityVector& pv, ClassIndex i);

// Named families used by the experiment layer.
ProbabilityVector make_zipf(double exponent, std::size_t m);
/// p(y1) = 2/m, p(y2) = 2/m - 1/m^2, remainder uniform.
ProbabilityVector make_footnote1(std::size_t m);
/// p(y1) = 1/2, remainder uniform.
ProbabilityVector make_footnote2(std::size_t m);

}  // namespace mepf
