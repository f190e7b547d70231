#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "symentropy/correlation.hpp"
#include "symentropy/entropy.hpp"

using namespace symentropy;

namespace {

SymbolSequence alternating(std::size_t length) {
  std::vector<SymbolIndex> data(length);
  for (std::size_t i = 0; i < length; ++i) data[i] = static_cast<SymbolIndex>(i % 2);
  return oracle::from_indices(2, data);
}

}  // namespace

TEST(H0, Examples) {
  EXPECT_DOUBLE_EQ(uncorrelated_entropy(ProbabilityVector({0.5, 0.5})), 1.0);
  EXPECT_NEAR(uncorrelated_entropy(ProbabilityVector(std::vector<double>(27, 1.0 / 27))), std::log2(27.0), 1e-12);
  EXPECT_NEAR(uncorrelated_entropy(ProbabilityVector(std::vector<double>(27, 1.0 / 27))), 4.7549, 1e-4);
  EXPECT_EQ(uncorrelated_entropy(ProbabilityVector({1.0, 0.0})), 0.0);
}

TEST(CorrelationCurve, ZeroCorrelationStaysAtH0) {
  const ProbabilityVector p({0.2, 0.3, 0.5});
  std::vector<double> values(11 * 9, 0.0);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) values[a * 3 + b] = zero_lag_covariance(p, a, b);
  const CorrelationSeries corr(p, 10, 1000, values);
  const auto curve = correlation_entropy_curve(corr, 10, FluctuationCorrection::off);
  for (const auto& pt : curve.points) EXPECT_EQ(pt.h, curve.h0);
  EXPECT_FALSE(curve.has_correction());
}

TEST(CorrelationCurve, BinaryStepCorrelatorIsLinearThenFlat) {
  const ProbabilityVector p({0.5, 0.5});
  std::vector<double> k(40, 0.0);
  for (std::size_t r = 0; r < 20; ++r) k[r] = 0.05;
  const auto corr = denormalize(binary_normalized_series(p, k));
  const auto curve = correlation_entropy_curve(corr, 40, FluctuationCorrection::off);
  for (std::size_t L = 1; L <= 40; ++L) {
    const double expected = 1.0 - static_cast<double>(std::min<std::size_t>(L, 20)) * 0.0025 / (2 * std::numbers::ln2);
    EXPECT_NEAR(curve.points[L - 1].h, expected, 1e-12);
  }
  EXPECT_NEAR(curve.points.back().h, 0.96393, 1e-5);
}

TEST(CorrelationCurve, IidUniformCorrectedStaysAtTwoBits) {
  const auto seq = oracle::random_sequence(4, 1'000'000, 2718);
  const auto curve = correlation_entropy_curve(correlation_series_auto(seq, 100), 100);
  for (const auto& pt : curve.points) EXPECT_NEAR(*pt.h_corrected, 2.0, 0.005) << "L=" << pt.length;
}

TEST(CorrelationCurve, CorrectionTermIsExact) {
  const auto seq = oracle::random_sequence(3, 20000, 5, {1, 2, 3});
  const auto curve = correlation_entropy_curve(correlation_series(seq, 50), 50);
  for (const auto& pt : curve.points) {
    const double expected = 4.0 * static_cast<double>(pt.length) / (2 * std::numbers::ln2 * 20000.0);
    EXPECT_NEAR(*pt.h_corrected - pt.h, expected, 1e-12);
    EXPECT_NEAR(pt.fluctuation_term, 4.0 * static_cast<double>(pt.length) / 20000.0, 1e-15);
  }
}

TEST(CorrelationCurve, MonotoneAndBelowH0) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto seq = oracle::random_sequence(2 + seed % 4, 5000, seed);
    const auto curve = correlation_entropy_curve(correlation_series(seq, 200), 200);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      EXPECT_LE(curve.points[i].h, curve.h0);
      if (i) {
        EXPECT_LE(curve.points[i].h, curve.points[i - 1].h);
        EXPECT_GE(curve.points[i].correlation_sum, curve.points[i - 1].correlation_sum);
      }
    }
  }
}

TEST(CorrelationCurve, LengthBoundValidated) {
  const auto corr = correlation_series(oracle::random_sequence(2, 100, 1), 10);
  EXPECT_THROW(correlation_entropy_curve(corr, 11), InvalidLag);
  EXPECT_THROW(correlation_entropy_curve(corr, 0), InvalidLag);
}

TEST(CorrelationCurve, UnobservedSymbolsLeftOut) {
  const auto full = oracle::random_sequence(3, 5000, 42, {1, 0, 2});
  std::vector<SymbolIndex> squeezed(full.size());
  for (std::size_t i = 0; i < full.size(); ++i) squeezed[i] = full[i] == 2 ? 1 : 0;
  const auto a = correlation_entropy_curve(correlation_series(full, 30), 30);
  const auto b = correlation_entropy_curve(correlation_series(oracle::from_indices(2, squeezed), 30), 30);
  EXPECT_EQ(a.support_size, 2u);
  for (std::size_t i = 0; i < 30; ++i) {
    EXPECT_NEAR(a.points[i].h, b.points[i].h, 1e-12);
    EXPECT_NEAR(*a.points[i].h_corrected, *b.points[i].h_corrected, 1e-12);
  }
}

TEST(CorrelationCurve, CorrectedAboveH0IsFlaggedNotClamped) {
  const auto seq = oracle::random_sequence(2, 2000, 3);
  const auto curve = correlation_entropy_curve(correlation_series(seq, 500), 500);
  EXPECT_TRUE(curve.corrected_exceeds_h0());
  bool above = false;
  for (const auto& pt : curve.points) above |= *pt.h_corrected > curve.h0;
  EXPECT_TRUE(above);
}

TEST(BinaryCurve, ZeroCorrelator) {
  const std::vector<double> k(10, 0.0);
  for (const auto& pt : binary_entropy_curve(k, 10, 1.0).points) EXPECT_EQ(pt.h, 1.0);
}

TEST(BinaryCurve, DeterministicAlternation) {
  const std::vector<double> k{1.0};
  EXPECT_NEAR(binary_entropy_curve(k, 1, 1.0).points[0].h, 1.0 - 1.0 / (2 * std::numbers::ln2), 1e-15);
  EXPECT_NEAR(binary_entropy_curve(k, 1, 1.0).points[0].h, 0.2787, 1e-4);
}

TEST(BinaryCurve, RejectsOutOfRange) {
  const std::vector<double> k{1.5};
  EXPECT_THROW(binary_entropy_curve(k, 1, 1.0), std::invalid_argument);
  const std::vector<double> ok{0.1};
  EXPECT_THROW(binary_entropy_curve(ok, 2, 1.0), InvalidLag);
}

TEST(BinaryCurve, AgreesWithGeneralFormula) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto seq = oracle::random_sequence(2, 10000, seed, {1.0, 0.3 + 0.1 * static_cast<double>(seed)});
    const auto corr = correlation_series(seq, 64);
    const auto norm = normalize(corr);
    std::vector<double> k(64);
    for (std::size_t r = 1; r <= 64; ++r) k[r - 1] = norm.value_or_zero(r, 1, 1);
    const auto general = correlation_entropy_curve(corr, 64);
    const auto binary = binary_entropy_curve(k, 64, general.h0, seq.size());
    for (std::size_t i = 0; i < 64; ++i) {
      EXPECT_NEAR(general.points[i].h, binary.points[i].h, 1e-12);
      EXPECT_NEAR(*general.points[i].h_corrected, *binary.points[i].h_corrected, 1e-12);
    }
  }
}

TEST(BlockCurve, Alternating) {
  const auto curve = block_entropy_curve(alternating(10000), 4);
  EXPECT_NEAR(curve.points[0].block_entropy, 1.0, 1e-12);
  EXPECT_NEAR(curve.points[1].block_entropy, 1.0, 1e-7);
  EXPECT_NEAR(curve.points[0].differential, 0.0, 1e-7);
  EXPECT_EQ(curve.points[1].word_count, 2u);
}

TEST(BlockCurve, ConstantIsZero) {
  const auto curve = block_entropy_curve(oracle::from_indices(2, std::vector<SymbolIndex>(100, 1)), 10);
  for (const auto& pt : curve.points) {
    EXPECT_EQ(pt.block_entropy, 0.0);
    EXPECT_EQ(pt.word_count, 1u);
  }
}

TEST(BlockCurve, ValidityFlagForTextScaleAlphabet) {
  const auto seq = oracle::random_sequence(27, 1'000'000, 6);
  const auto curve = block_entropy_curve(seq, 6);
  for (const auto& pt : curve.points) EXPECT_EQ(pt.valid, pt.length <= 4) << "L=" << pt.length;
}

TEST(BlockCurve, LengthBoundValidated) {
  const auto seq = oracle::random_sequence(2, 10, 1);
  EXPECT_THROW(block_entropy_curve(seq, 10), InvalidLength);
  EXPECT_THROW(block_entropy_curve(seq, 0), InvalidLength);
  EXPECT_NO_THROW(block_entropy_curve(seq, 9));
}

TEST(BlockCurve, MatchesCountingOracle) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const std::size_t m = 2 + seed;
    const auto seq = oracle::random_sequence(m, 3000, seed);
    const auto curve = block_entropy_curve(seq, 6);
    for (std::size_t L = 1; L <= 6; ++L) {
      EXPECT_NEAR(curve.points[L - 1].block_entropy, oracle::block_entropy(seq, L), 1e-12);
      EXPECT_EQ(curve.points[L - 1].word_count, oracle::block_counts(seq, L).size());
    }
  }
}

TEST(BlockCurve, LongWordsUseFallbackKeys) {
  const auto seq = oracle::random_sequence(27, 4000, 13);
  const auto curve = block_entropy_curve(seq, 14);
  for (std::size_t L : {12, 13, 14})
    EXPECT_NEAR(curve.points[L - 1].block_entropy, oracle::block_entropy(seq, L), 1e-12);
}

TEST(BlockCurve, BoundsAndMonotonicity) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const std::size_t m = 2 + seed % 3;
    const auto seq = oracle::random_sequence(m, 4000, seed * 3);
    const auto curve = block_entropy_curve(seq, 10);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      const auto& pt = curve.points[i];
      EXPECT_GE(pt.block_entropy, 0.0);
      EXPECT_LE(pt.block_entropy, static_cast<double>(pt.length) * std::log2(static_cast<double>(m)) + 1e-12);
      if (i) {
        EXPECT_GE(pt.block_entropy, curve.points[i - 1].block_entropy - 1e-12);
      }
    }
  }
}

TEST(ValidityLimit, Examples) {
  EXPECT_EQ(validity_limit(2, 1'000'000), 19u);
  EXPECT_EQ(validity_limit(27, 1'000'000), 4u);
  EXPECT_EQ(validity_limit(2, 10), 3u);
  EXPECT_EQ(validity_limit(2, 2), 1u);
  EXPECT_EQ(validity_limit(2, 1024), 10u);
  EXPECT_THROW(validity_limit(1, 10), std::invalid_argument);
  EXPECT_THROW(validity_limit(5, 4), std::invalid_argument);
}

TEST(StationarityLength, IidMostlyOne) {
  int ones = 0;
  for (std::uint64_t seed = 1; seed <= 21; ++seed) {
    const auto corr = correlation_series(oracle::random_sequence(4, 100000, seed), 50);
    const auto rs = stationarity_length(corr);
    ones += rs && *rs == 1;
  }
  EXPECT_GT(ones, 10);
}

TEST(StationarityLength, ZeroCorrelationIsOne) {
  const ProbabilityVector p({0.5, 0.5});
  const std::vector<double> k(5, 0.0);
  EXPECT_EQ(stationarity_length(denormalize(binary_normalized_series(p, k), 1000)), 1u);
}

TEST(StationarityLength, NotReachedForStrongCorrelation) {
  const auto corr = correlation_series(alternating(1000), 50);
  EXPECT_FALSE(stationarity_length(corr).has_value());
}

TEST(CorrelationLength, ConstantCurveIsOne) {
  const std::vector<double> h(30, 1.0);
  EXPECT_EQ(correlation_length(h, 1e-4, 10), 1u);
}

TEST(CorrelationLength, StrictlyDecreasingIsUndetected) {
  std::vector<double> h(50);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = 1.0 - 0.001 * static_cast<double>(i);
  EXPECT_FALSE(correlation_length(h, 1e-4, 10).has_value());
}

TEST(CorrelationLength, PlateauOnsetAtStepEnd) {
  // h(1..20) drops each step, flat from h(20) on
  std::vector<double> h(40);
  for (std::size_t L = 1; L <= 40; ++L) h[L - 1] = 1.0 - 0.001 * static_cast<double>(std::min<std::size_t>(L, 20));
  EXPECT_EQ(correlation_length(h, 1e-4, 10), 20u);
  EXPECT_EQ(correlation_length(std::span<const double>(h).first(29), 1e-4, 10), std::nullopt);
  EXPECT_EQ(correlation_length(std::span<const double>(h).first(30), 1e-4, 10), 20u);
  EXPECT_THROW(correlation_length(h, 1e-4, 0), std::invalid_argument);
}

TEST(CorrelationLength, ShortCurveIsUndetected) {
  const std::vector<double> h(5, 1.0);
  EXPECT_FALSE(correlation_length(h, 1e-4, 10).has_value());
}

TEST(CorrelationCurve, IidBracketCancelsOverSeeds) {
  for (std::size_t m : {2u, 4u}) {
    std::vector<double> bracket;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const auto seq = oracle::random_sequence(m, 1'000'000, seed * 7919 + m);
      const auto curve = correlation_entropy_curve(correlation_series(seq, 100), 100);
      const auto& pt = curve.points.back();
      bracket.push_back(pt.correlation_sum - pt.fluctuation_term);
    }
    double mean = 0.0;
    for (double b : bracket) mean += b;
    mean /= static_cast<double>(bracket.size());
    double var = 0.0;
    for (double b : bracket) var += (b - mean) * (b - mean);
    var /= static_cast<double>(bracket.size() - 1);
    const double se = std::sqrt(var / static_cast<double>(bracket.size()));
    EXPECT_LT(std::abs(mean), 3.0 * se) << "m=" << m << " mean=" << mean << " se=" << se;
  }
}
