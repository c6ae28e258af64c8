#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "mepf/distribution.hpp"
#include "mepf/error.hpp"

namespace mepf {
namespace {

ProbabilityVector pv_of(std::initializer_list<double> w) {
  const std::vector<double> v(w);
  return ProbabilityVector::from_weights(v);
}

void expect_errc(Errc code, auto&& fn) {
  try {
    fn();
    ADD_FAILURE() << "no error thrown";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

// Direct evaluation, independent of the library's gap code.
double direct_gap(double a, double b) {
  const double d = std::sqrt(a) - std::sqrt(b);
  return -std::log1p(-d * d);
}

TEST(ProbabilityVector, Normalizes) {
  const auto pv = pv_of({1, 1, 2});
  EXPECT_DOUBLE_EQ(pv[0], 0.25);
  EXPECT_DOUBLE_EQ(pv[1], 0.25);
  EXPECT_DOUBLE_EQ(pv[2], 0.5);
  EXPECT_EQ(pv.mode(), 2u);

  const auto same = pv_of({0.5, 0.3, 0.2});
  EXPECT_DOUBLE_EQ(same[1], 0.3);
  EXPECT_EQ(same.mode(), 0u);
  EXPECT_EQ(same.runner_up(), 1u);
}

TEST(ProbabilityVector, RejectsBadInput) {
  expect_errc(Errc::kTiedMode, [] { pv_of({3, 3}); });
  expect_errc(Errc::kNegativeWeight, [] { pv_of({1, -1, 3}); });
  expect_errc(Errc::kEmptyOrDegenerate, [] { pv_of({}); });
  expect_errc(Errc::kEmptyOrDegenerate, [] { pv_of({1}); });
}

TEST(Sampling, EmptyAndDeterministic) {
  const auto pv = pv_of({0.999, 0.001});
  EXPECT_TRUE(sample(pv, 5, 0).empty());
  EXPECT_EQ(sample(pv, 5, 100), sample(pv, 5, 100));
  const auto spread = pv_of({0.5, 0.3, 0.2});
  EXPECT_NE(sample(spread, 5, 100), sample(spread, 6, 100));
}

TEST(Sampling, ModeFrequency) {
  const auto pv = pv_of({0.999, 0.001});
  const auto ys = sample(pv, 11, 10000);
  const double freq = static_cast<double>(std::count(ys.begin(), ys.end(), 0u)) / ys.size();
  EXPECT_NEAR(freq, 0.99, 0.01);
  for (std::size_t j = 0; j < ys.size(); ++j) ASSERT_EQ(ys[j], sample_at(pv, 11, j));
}

TEST(Entropy, KnownValues) {
  EXPECT_DOUBLE_EQ(entropy_bits(pv_of({0.5, 0.25, 0.125, 0.125})), 1.75);
  EXPECT_NEAR(entropy_bits(pv_of({0.5, 0.3, 0.2})), 1.48547529722733, 1e-12);
}

TEST(Gaps, FrozenValues) {
  const GapVector g = gaps(pv_of({0.5, 0.25, 0.25}));
  EXPECT_NEAR(g.delta_sq[1], 0.0438403146663647, 1e-13);
  EXPECT_NEAR(g.delta_sq[2], 0.0438403146663647, 1e-13);
  EXPECT_DOUBLE_EQ(g.nabla[1], 0.25);

  const GapVector h = gaps(pv_of({0.5, 0.3, 0.2}));
  EXPECT_NEAR(h.delta_sq[1], 0.0257315661432301, 1e-13);
  EXPECT_NEAR(h.delta_sq[2], 0.0699338154283766, 1e-13);
  EXPECT_NEAR(h.delta_sq[1], direct_gap(0.5, 0.3), 1e-15);
  EXPECT_NEAR(h.delta_sq[2], direct_gap(0.5, 0.2), 1e-15);
}

TEST(Gaps, NearTieGoesToZero) {
  const GapVector g = gaps(pv_of({0.5, 0.5 - 1e-12, 1e-12}));
  EXPECT_LT(g.delta_sq[1], 1e-20);
}

TEST(Projection, TwoClasses) {
  const InformationProjection p = information_projection(pv_of({0.6, 0.4}));
  EXPECT_NEAR(p.q_star[0], 0.5, 1e-12);
  EXPECT_NEAR(p.q_star[1], 0.5, 1e-12);
  const double direct = 0.5 * std::log2(0.5 / 0.6) + 0.5 * std::log2(0.5 / 0.4);
  EXPECT_NEAR(p.divergence_bits, direct, 1e-12);
  EXPECT_NEAR(p.divergence_bits, 0.0294468445267843, 1e-12);
}

TEST(Projection, ThreeClasses) {
  const auto pv = pv_of({0.5, 0.3, 0.2});
  const InformationProjection p = information_projection(pv);
  EXPECT_NEAR(p.lambda, 1.02606548078836, 1e-12);
  EXPECT_NEAR(p.q_star[0], 0.397393451921164, 1e-12);
  EXPECT_NEAR(p.q_star[1], 0.397393451921164, 1e-12);
  EXPECT_NEAR(p.q_star[2], 0.205213096157673, 1e-12);
  EXPECT_NEAR(p.divergence_bits, 0.0371228028691444, 1e-12);
  EXPECT_NEAR(p.divergence_nats, gaps(pv).delta_sq[1], 1e-12);
}

TEST(Projection, NatsMatchGapOnRandomInstances) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick_m(2, 20);
  std::exponential_distribution<double> expo(1.0);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> w(static_cast<std::size_t>(pick_m(rng)));
    for (double& x : w) x = expo(rng);
    const auto pv = ProbabilityVector::from_weights(w);
    const InformationProjection p = information_projection(pv);
    ASSERT_NEAR(p.divergence_nats, gaps(pv).delta_sq[pv.runner_up()], 1e-9);
    ASSERT_NEAR(p.divergence_bits, kl_divergence_bits(p.q_star, pv.masses()), 1e-9);
  }
}

TEST(ErrorBound, Values) {
  EXPECT_NEAR(mode_error_bound(pv_of({0.5, 0.3, 0.2}), 200), 0.00582082526811535, 1e-14);
  EXPECT_DOUBLE_EQ(mode_error_bound(pv_of({0.5, 0.3, 0.2}), 0), 1.0);
  EXPECT_NEAR(mode_error_bound(pv_of({0.5, 0.25, 0.25}), 100), 0.0124749647046333, 1e-14);
}

TEST(Alpha, FrozenValues) {
  const auto pv = pv_of({0.5, 0.25, 0.25});
  const double inv = 1.0 / direct_gap(0.5, 0.25);
  EXPECT_NEAR(theoretical_alpha(pv, Algorithm::kExhaustive), inv * (1.0 + std::log2(3.0)), 1e-9);
  EXPECT_NEAR(theoretical_alpha(pv, Algorithm::kExhaustive), 58.9631374773047, 1e-9);
  EXPECT_NEAR(theoretical_alpha(pv, Algorithm::kTruncated), 45.6201105129031, 1e-9);
}

TEST(GapComparison, Examples) {
  EXPECT_TRUE(gap_comparison_bounds(pv_of({0.5, 0.3, 0.2}), 1).holds);
  EXPECT_TRUE(gap_comparison_bounds(pv_of({0.5, 0.25, 0.25}), 2).holds);
  expect_errc(Errc::kInvalidArgument, [] { gap_comparison_bounds(pv_of({0.5, 0.3, 0.2}), 0); });
}

TEST(Families, Shapes) {
  const auto f1 = make_footnote1(32);
  EXPECT_NEAR(f1[f1.mode()], 2.0 / 32, 1e-15);
  EXPECT_NEAR(f1[f1.runner_up()], 2.0 / 32 - 1.0 / (32 * 32), 1e-15);
  const auto f2 = make_footnote2(64);
  EXPECT_NEAR(f2.mode_mass(), 0.5, 1e-15);
  EXPECT_NEAR(f2[f2.runner_up()], 0.5 / 63, 1e-15);
  const auto z = make_zipf(1.0, 4);
  EXPECT_NEAR(z[0] / z[3], 4.0, 1e-12);
}

}  // namespace
}  // namespace mepf
