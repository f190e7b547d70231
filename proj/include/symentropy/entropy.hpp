#pragma once

// Entropy estimators in bits: the uncorrelated baseline, the differential
// entropy from pair correlations (optionally with the finite-length
// fluctuation correction), its binary closed form, plug-in block entropies,
// and the correlation / stationarity length estimates.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "symentropy/correlation.hpp"
#include "symentropy/detail/word_map.hpp"
#include "symentropy/error.hpp"
#include "symentropy/sequence.hpp"

namespace symentropy {

/// 1 / (2 ln 2): converts the squared-correlation sum to bits.
inline constexpr double kHalfInvLn2 = 1.0 / (2.0 * std::numbers::ln2);

/// Shannon entropy of p in bits, with 0 log 0 = 0.
inline double uncorrelated_entropy(const ProbabilityVector& p) {
  double h = 0.0;
  for (double v : p.values())
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

enum class FluctuationCorrection { off, on };

struct EntropyCurvePoint {
  std::size_t length = 0;
  /// S(L) = sum_{r<=L} sum_ab C_ab(r)^2 / (p_a p_b) over the support.
  double correlation_sum = 0.0;
  /// (m_eff - 1)^2 L / M; zero when M is unknown.
  double fluctuation_term = 0.0;
  double h = 0.0;
  std::optional<double> h_corrected;
};

struct EntropyCurve {
  double h0 = 0.0;
  std::size_t sequence_length = 0;
  std::size_t support_size = 0;
  std::vector<EntropyCurvePoint> points;

  /// True when the fluctuation term outweighs the correlation sum somewhere,
  /// i.e. the corrected estimate rises above h0.
  bool corrected_exceeds_h0() const {
    return std::any_of(points.begin(), points.end(),
                       [&](const EntropyCurvePoint& p) { return p.h_corrected && *p.h_corrected > h0; });
  }

  bool has_correction() const { return !points.empty() && points.front().h_corrected.has_value(); }

  /// h(L) for L = 1..L_max, the corrected values when available and requested.
  std::vector<double> values(bool prefer_corrected = true) const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(prefer_corrected && p.h_corrected ? *p.h_corrected : p.h);
    return out;
  }
};

namespace detail {

inline double squared_correlation_term(const CorrelationSeries& corr, std::size_t lag) {
  const std::size_t m = corr.alphabet_size();
  const auto& p = corr.probabilities();
  double sum = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    if (p[a] <= 0.0) continue;
    for (std::size_t b = 0; b < m; ++b) {
      if (p[b] <= 0.0) continue;
      const double c = corr(lag, a, b);
      sum += c * c / (p[a] * p[b]);
    }
  }
  return sum;
}

inline double fluctuation_slope(std::size_t support, std::size_t length) {
  if (length == 0 || support == 0) return 0.0;
  const double k = static_cast<double>(support) - 1.0;
  return k * k / static_cast<double>(length);
}

}  // namespace detail

/// h(L) = h0 - S(L) / (2 ln 2), and with the correction
/// h(L) = h0 - [S(L) - (m_eff - 1)^2 L / M] / (2 ln 2).
/// Symbols with p_a = 0 are left out of S and of m_eff.
inline EntropyCurve correlation_entropy_curve(const CorrelationSeries& corr, std::size_t max_length,
                                              FluctuationCorrection correction = FluctuationCorrection::on) {
  if (max_length < 1 || max_length > corr.max_lag())
    throw InvalidLag("curve length " + std::to_string(max_length) + " outside [1, " +
                     std::to_string(corr.max_lag()) + "]");
  EntropyCurve curve;
  curve.h0 = uncorrelated_entropy(corr.probabilities());
  curve.sequence_length = corr.sequence_length();
  curve.support_size = corr.probabilities().support_size();
  const double slope = detail::fluctuation_slope(curve.support_size, curve.sequence_length);
  curve.points.reserve(max_length);
  double s = 0.0;
  for (std::size_t L = 1; L <= max_length; ++L) {
    s += detail::squared_correlation_term(corr, L);
    EntropyCurvePoint point;
    point.length = L;
    point.correlation_sum = s;
    point.fluctuation_term = slope * static_cast<double>(L);
    point.h = curve.h0 - kHalfInvLn2 * s;
    if (correction == FluctuationCorrection::on)
      point.h_corrected = curve.h0 - kHalfInvLn2 * (s - point.fluctuation_term);
    curve.points.push_back(point);
  }
  return curve;
}

/// Binary closed form h(L) = h0 - sum_{r<=L} K(r)^2 / (2 ln 2), where
/// normalized[r-1] holds K(r). With a sequence length the corrected column
/// uses the binary fluctuation term L / M.
inline EntropyCurve binary_entropy_curve(std::span<const double> normalized, std::size_t max_length,
                                         double h0, std::optional<std::size_t> sequence_length = std::nullopt) {
  if (max_length > normalized.size())
    throw InvalidLag("curve length exceeds the number of correlator values");
  for (double k : normalized)
    if (!(std::abs(k) <= 1.0)) throw std::invalid_argument("normalized correlator outside [-1, 1]");
  EntropyCurve curve;
  curve.h0 = h0;
  curve.sequence_length = sequence_length.value_or(0);
  curve.support_size = 2;
  const double slope = detail::fluctuation_slope(2, curve.sequence_length);
  double s = 0.0;
  for (std::size_t L = 1; L <= max_length; ++L) {
    s += normalized[L - 1] * normalized[L - 1];
    EntropyCurvePoint point;
    point.length = L;
    point.correlation_sum = s;
    point.fluctuation_term = slope * static_cast<double>(L);
    point.h = h0 - kHalfInvLn2 * s;
    if (sequence_length) point.h_corrected = h0 - kHalfInvLn2 * (s - point.fluctuation_term);
    curve.points.push_back(point);
  }
  return curve;
}

/// Largest L >= 1 with m^L <= M.
inline std::size_t validity_limit(std::size_t alphabet_size, std::size_t length) {
  if (alphabet_size < 2 || length < alphabet_size)
    throw std::invalid_argument("validity limit needs m >= 2 and M >= m");
  std::size_t L = 0;
  std::size_t words = 1;
  while (words <= length / alphabet_size) {
    words *= alphabet_size;
    ++L;
  }
  return L;
}

struct BlockEntropyPoint {
  std::size_t length = 0;
  /// H_L in bits.
  double block_entropy = 0.0;
  /// h_L = H_{L+1} - H_L.
  double differential = 0.0;
  std::size_t word_count = 0;
  /// m^L <= M.
  bool valid = false;
};

struct BlockEntropyCurve {
  std::size_t alphabet_size = 0;
  std::size_t sequence_length = 0;
  std::vector<BlockEntropyPoint> points;
};

namespace detail {

/// Sorted occurrence counts of the distinct L-words over all M-L+1 windows.
inline std::vector<std::uint64_t> word_occurrences(std::span<const SymbolIndex> data,
                                                   std::size_t alphabet_size, std::size_t word_length) {
  WordMap<std::uint64_t> words(alphabet_size, word_length);
  const std::size_t windows = data.size() - word_length + 1;
  for (std::size_t i = 0; i < windows; ++i) ++words[data.subspan(i, word_length)];
  std::vector<std::uint64_t> counts;
  counts.reserve(words.size());
  words.for_each([&](std::uint64_t n) { counts.push_back(n); });
  std::sort(counts.begin(), counts.end());
  return counts;
}

inline double plugin_entropy(std::span<const std::uint64_t> counts, std::uint64_t total) {
  const double t = static_cast<double>(total);
  double h = 0.0;
  for (std::uint64_t n : counts) {
    const double q = static_cast<double>(n) / t;
    h -= q * std::log2(q);
  }
  return h;
}

}  // namespace detail

/// Plug-in block entropies with P(word) = n(word) / (M - L + 1), for
/// L = 1..max_length + 1, and h_L = H_{L+1} - H_L for L = 1..max_length.
inline BlockEntropyCurve block_entropy_curve(const SymbolSequence& seq, std::size_t max_length) {
  const std::size_t length = seq.size();
  if (max_length < 1 || max_length + 1 > length)
    throw InvalidLength("block length " + std::to_string(max_length) + " needs M >= L + 1, M = " +
                        std::to_string(length));
  const std::size_t m = seq.alphabet_size();
  const std::size_t limit =
      m < 2 ? std::numeric_limits<std::size_t>::max() : (length >= m ? validity_limit(m, length) : 0);
  std::vector<double> H(max_length + 2, 0.0);
  std::vector<std::size_t> distinct(max_length + 2, 0);
  for (std::size_t L = 1; L <= max_length + 1; ++L) {
    const auto counts = detail::word_occurrences(seq.indices(), m, L);
    H[L] = detail::plugin_entropy(counts, length - L + 1);
    distinct[L] = counts.size();
  }
  BlockEntropyCurve curve;
  curve.alphabet_size = m;
  curve.sequence_length = length;
  for (std::size_t L = 1; L <= max_length; ++L) {
    curve.points.push_back({L, H[L], H[L + 1] - H[L], distinct[L], L <= limit});
  }
  return curve;
}

struct LengthReport {
  std::optional<std::size_t> correlation_length;
  std::optional<std::size_t> stationarity_length;
};

/// Smallest L with S(L) <= (m_eff - 1)^2 L / M, or nullopt if the fluctuation
/// line is not reached within the series.
inline std::optional<std::size_t> stationarity_length(const CorrelationSeries& corr) {
  const std::size_t support = corr.probabilities().support_size();
  const double slope = detail::fluctuation_slope(support, corr.sequence_length());
  double s = 0.0;
  for (std::size_t L = 1; L <= corr.max_lag(); ++L) {
    s += detail::squared_correlation_term(corr, L);
    if (s <= slope * static_cast<double>(L)) return L;
  }
  return std::nullopt;
}

/// Plateau onset: the smallest L with |h(L') - h(L'+1)| < tol for every L' in
/// [L, L + window). values[i] holds h(i + 1).
inline std::optional<std::size_t> correlation_length(std::span<const double> values, double tol,
                                                     std::size_t window) {
  if (window == 0) throw std::invalid_argument("plateau window must be positive");
  if (values.size() < window + 1) return std::nullopt;
  std::size_t run = 0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    // step i is |h(i+1) - h(i+2)|, i.e. L' = i + 1
    if (std::abs(values[i] - values[i + 1]) < tol) {
      if (++run == window) return i + 2 - window;
    } else {
      run = 0;
    }
  }
  return std::nullopt;
}

inline std::optional<std::size_t> correlation_length(const EntropyCurve& curve, double tol = 1e-4,
                                                     std::size_t window = 10) {
  const auto values = curve.values(true);
  return correlation_length(values, tol, window);
}

}  // namespace symentropy
