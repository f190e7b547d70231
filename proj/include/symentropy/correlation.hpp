#pragma once

// Symbolic pair-correlation estimation for finite sequences.
//
// For a sequence a_0..a_{M-1} with symbol frequencies p over the whole
// sequence, the lag-r estimator is
//
//   C_ab(r) = 1/(M-r) * sum_{i=0}^{M-r-1} [d(a_i,a) - p_a][d(a_{i+r},b) - p_b].
//
// Two routes compute it: exact integer pair counting per lag, and an FFT
// cross-correlation of centered indicator tracks. Both return the same
// CorrelationSeries up to rounding.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "symentropy/detail/fft.hpp"
#include "symentropy/detail/parallel.hpp"
#include "symentropy/error.hpp"
#include "symentropy/sequence.hpp"

namespace symentropy {

struct CorrelationOptions {
  unsigned threads = 1;
};

/// C_ab(r) = p_a d(a,b) - p_a p_b, the zero-lag value implied by p.
inline double zero_lag_covariance(const ProbabilityVector& p, std::size_t a, std::size_t b) {
  return (a == b ? p[a] : 0.0) - p[a] * p[b];
}

/// Per-lag m x m matrices C_ab(r) for r = 0..max_lag.
class CorrelationSeries {
 public:
  CorrelationSeries(ProbabilityVector p, std::size_t max_lag, std::size_t sequence_length,
                    std::vector<double> values)
      : p_(std::move(p)), m_(p_.size()), max_lag_(max_lag), length_(sequence_length),
        values_(std::move(values)) {
    if (values_.size() != (max_lag_ + 1) * m_ * m_)
      throw std::invalid_argument("correlation values do not match (max_lag + 1) * m * m");
  }

  std::size_t alphabet_size() const noexcept { return m_; }
  std::size_t max_lag() const noexcept { return max_lag_; }
  std::size_t sequence_length() const noexcept { return length_; }
  const ProbabilityVector& probabilities() const noexcept { return p_; }

  double operator()(std::size_t lag, std::size_t a, std::size_t b) const {
    return values_[(lag * m_ + a) * m_ + b];
  }

  /// Row-major m x m block for one lag.
  std::span<const double> matrix(std::size_t lag) const {
    return std::span<const double>(values_).subspan(lag * m_ * m_, m_ * m_);
  }

  std::span<const double> values() const noexcept { return values_; }

 private:
  ProbabilityVector p_;
  std::size_t m_;
  std::size_t max_lag_;
  std::size_t length_;
  std::vector<double> values_;
};

namespace detail {

inline void check_lag_range(std::size_t length, std::size_t max_lag) {
  if (max_lag < 1 || length < 3 || max_lag > length - 2)
    throw InvalidLag("lag bound " + std::to_string(max_lag) + " outside [1, M-2] for M = " +
                     std::to_string(length));
}

}  // namespace detail

/// Default lag bound min(M/10, 1e5), at least 1.
inline std::size_t default_max_lag(std::size_t length) {
  return std::max<std::size_t>(1, std::min<std::size_t>(length / 10, 100000));
}

/// Direct estimator: counts symbol pairs (a_i, a_{i+r}) exactly for every lag
/// and expands the centered product in closed form, so no rounding drift
/// accumulates over long sequences.
inline CorrelationSeries correlation_series(const SymbolSequence& seq, std::size_t max_lag,
                                            CorrelationOptions options = {}) {
  const std::size_t length = seq.size();
  detail::check_lag_range(length, max_lag);
  const std::size_t m = seq.alphabet_size();
  auto p = symbol_probabilities(seq);
  const auto data = seq.indices();
  std::vector<double> values((max_lag + 1) * m * m, 0.0);

  detail::parallel_chunks(0, max_lag + 1, options.threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<std::uint64_t> pairs(m * m);
    std::vector<std::uint64_t> head(m), tail(m);
    for (std::size_t r = lo; r < hi; ++r) {
      std::fill(pairs.begin(), pairs.end(), 0);
      const std::size_t windows = length - r;
      const SymbolIndex* x = data.data();
      const SymbolIndex* y = data.data() + r;
      for (std::size_t i = 0; i < windows; ++i) ++pairs[x[i] * m + y[i]];
      std::fill(head.begin(), head.end(), 0);
      std::fill(tail.begin(), tail.end(), 0);
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
          head[a] += pairs[a * m + b];
          tail[b] += pairs[a * m + b];
        }
      const double w = static_cast<double>(windows);
      double* out = values.data() + r * m * m;
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
          const double n_ab = static_cast<double>(pairs[a * m + b]);
          out[a * m + b] =
              (n_ab - p[b] * static_cast<double>(head[a]) - p[a] * static_cast<double>(tail[b])) / w +
              p[a] * p[b];
        }
    }
  });
  return CorrelationSeries(std::move(p), max_lag, length, std::move(values));
}

/// Transform route: one forward FFT per indicator track, one inverse FFT per
/// unordered symbol pair (the negative-lag half of the inverse yields the
/// transposed pair).
inline CorrelationSeries correlation_series_fast(const SymbolSequence& seq, std::size_t max_lag,
                                                 CorrelationOptions options = {}) {
  const std::size_t length = seq.size();
  detail::check_lag_range(length, max_lag);
  const std::size_t m = seq.alphabet_size();
  auto p = symbol_probabilities(seq);
  const auto data = seq.indices();
  std::vector<double> values((max_lag + 1) * m * m, 0.0);

  std::vector<std::size_t> support;
  for (std::size_t a = 0; a < m; ++a)
    if (p[a] > 0.0) support.push_back(a);

  // Linear (non-wrapping) correlation up to max_lag needs n >= M + max_lag.
  const std::size_t n = std::bit_ceil(length + max_lag);
  const detail::RealFftPlans plans(n);
  const std::size_t k = plans.spectrum_size();

  std::vector<detail::FftwBuffer<fftw_complex>> spectra;
  spectra.reserve(support.size());
  {
    auto track = detail::fftw_buffer<double>(n);
    for (std::size_t a : support) {
      const double pa = p[a];
      for (std::size_t i = 0; i < length; ++i) track[i] = (data[i] == a ? 1.0 : 0.0) - pa;
      std::fill(track.get() + length, track.get() + n, 0.0);
      auto spectrum = detail::fftw_buffer<fftw_complex>(k);
      plans.forward(track.get(), spectrum.get());
      spectra.push_back(std::move(spectrum));
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < support.size(); ++i)
    for (std::size_t j = i; j < support.size(); ++j) pairs.emplace_back(i, j);

  const double scale = 1.0 / static_cast<double>(n);
  detail::parallel_chunks(0, pairs.size(), options.threads, [&](std::size_t lo, std::size_t hi) {
    auto product = detail::fftw_buffer<fftw_complex>(k);
    auto result = detail::fftw_buffer<double>(n);
    for (std::size_t q = lo; q < hi; ++q) {
      const auto [i, j] = pairs[q];
      const fftw_complex* xa = spectra[i].get();
      const fftw_complex* xb = spectra[j].get();
      for (std::size_t f = 0; f < k; ++f) {
        // conj(xa) * xb
        product[f][0] = xa[f][0] * xb[f][0] + xa[f][1] * xb[f][1];
        product[f][1] = xa[f][0] * xb[f][1] - xa[f][1] * xb[f][0];
      }
      plans.inverse(product.get(), result.get());
      const std::size_t a = support[i];
      const std::size_t b = support[j];
      for (std::size_t r = 0; r <= max_lag; ++r) {
        const double norm = scale / static_cast<double>(length - r);
        values[(r * m + a) * m + b] = result[r] * norm;
        if (a != b) values[(r * m + b) * m + a] = result[r == 0 ? 0 : n - r] * norm;
      }
    }
  });
  return CorrelationSeries(std::move(p), max_lag, length, std::move(values));
}

/// Picks the cheaper of the two estimators for the given size.
inline CorrelationSeries correlation_series_auto(const SymbolSequence& seq, std::size_t max_lag,
                                                 CorrelationOptions options = {}) {
  const double length = static_cast<double>(seq.size());
  const double support = static_cast<double>(symbol_probabilities(seq).support_size());
  const double n = static_cast<double>(std::bit_ceil(seq.size() + max_lag));
  const double direct_cost = length * static_cast<double>(max_lag + 1);
  const double fft_cost = 4.0 * (support + support * (support + 1) / 2) * n * std::log2(n);
  return direct_cost <= fft_cost ? correlation_series(seq, max_lag, options)
                                 : correlation_series_fast(seq, max_lag, options);
}

/// K_ab(r) = C_ab(r) / C_ab(0) for r = 0..max_lag, defined only where the
/// zero-lag covariance implied by p is non-zero.
class NormalizedSeries {
 public:
  NormalizedSeries(ProbabilityVector p, std::size_t max_lag, std::vector<double> values)
      : p_(std::move(p)), m_(p_.size()), max_lag_(max_lag), values_(std::move(values)),
        defined_(m_ * m_) {
    if (values_.size() != (max_lag_ + 1) * m_ * m_)
      throw std::invalid_argument("normalized values do not match (max_lag + 1) * m * m");
    for (std::size_t a = 0; a < m_; ++a)
      for (std::size_t b = 0; b < m_; ++b) defined_[a * m_ + b] = zero_lag_covariance(p_, a, b) != 0.0;
    for (std::size_t r = 0; r <= max_lag_; ++r)
      for (std::size_t e = 0; e < m_ * m_; ++e)
        if (!defined_[e]) values_[r * m_ * m_ + e] = 0.0;
  }

  std::size_t alphabet_size() const noexcept { return m_; }
  std::size_t max_lag() const noexcept { return max_lag_; }
  const ProbabilityVector& probabilities() const noexcept { return p_; }

  bool defined(std::size_t a, std::size_t b) const { return defined_[a * m_ + b] != 0; }

  std::optional<double> operator()(std::size_t lag, std::size_t a, std::size_t b) const {
    if (!defined(a, b)) return std::nullopt;
    return values_[(lag * m_ + a) * m_ + b];
  }

  /// Stored value with absent entries reading as zero.
  double value_or_zero(std::size_t lag, std::size_t a, std::size_t b) const {
    return values_[(lag * m_ + a) * m_ + b];
  }

 private:
  ProbabilityVector p_;
  std::size_t m_;
  std::size_t max_lag_;
  std::vector<double> values_;
  std::vector<unsigned char> defined_;
};

inline NormalizedSeries normalize(const CorrelationSeries& corr) {
  const std::size_t m = corr.alphabet_size();
  const auto& p = corr.probabilities();
  std::vector<double> values((corr.max_lag() + 1) * m * m, 0.0);
  for (std::size_t r = 0; r <= corr.max_lag(); ++r)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) {
        const double c0 = zero_lag_covariance(p, a, b);
        if (c0 != 0.0) values[(r * m + a) * m + b] = corr(r, a, b) / c0;
      }
  return NormalizedSeries(p, corr.max_lag(), std::move(values));
}

/// C_ab(r) = K_ab(r) C_ab(0), e.g. to turn a prescribed target into the input
/// of the memory-function solvers. `sequence_length` is recorded as is.
inline CorrelationSeries denormalize(const NormalizedSeries& norm, std::size_t sequence_length = 0) {
  const std::size_t m = norm.alphabet_size();
  const auto& p = norm.probabilities();
  std::vector<double> values((norm.max_lag() + 1) * m * m, 0.0);
  for (std::size_t r = 0; r <= norm.max_lag(); ++r)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        values[(r * m + a) * m + b] =
            r == 0 ? zero_lag_covariance(p, a, b) : norm.value_or_zero(r, a, b) * zero_lag_covariance(p, a, b);
  return CorrelationSeries(p, norm.max_lag(), sequence_length, std::move(values));
}

/// Binary target with all four K_ab(r) equal to k[r-1], the only
/// configuration consistent with vanishing row and column sums.
inline NormalizedSeries binary_normalized_series(const ProbabilityVector& p, std::span<const double> k) {
  if (p.size() != 2) throw std::invalid_argument("binary target needs a two-symbol distribution");
  std::vector<double> values((k.size() + 1) * 4, 1.0);
  for (std::size_t r = 1; r <= k.size(); ++r) std::fill_n(values.begin() + static_cast<std::ptrdiff_t>(r * 4), 4, k[r - 1]);
  return NormalizedSeries(p, k.size(), std::move(values));
}

/// Numeric values assigned to the symbols, one per alphabet entry.
struct NumericMapping {
  std::vector<double> values;
};

/// C_e(r) = sum_ab e_a e_b C_ab(r) for r = 0..max_lag.
inline std::vector<double> numeric_correlator(const CorrelationSeries& corr, const NumericMapping& map) {
  const std::size_t m = corr.alphabet_size();
  if (map.values.size() != m)
    throw std::invalid_argument("numeric mapping size does not match the alphabet");
  std::vector<double> out(corr.max_lag() + 1, 0.0);
  for (std::size_t r = 0; r <= corr.max_lag(); ++r) {
    double sum = 0.0;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) sum += map.values[a] * map.values[b] * corr(r, a, b);
    out[r] = sum;
  }
  return out;
}

/// D = max_a sum_{r=1}^{R} sum_b |K_ba(r)| max(p_b, 1 - p_b): an upper bound on
/// the first-order shift of the conditional probability of any symbol. R is
/// `max_lag` when given (clipped to the series), else the whole series.
inline double weak_correlation_diagnostic(const NormalizedSeries& norm,
                                          std::optional<std::size_t> max_lag = std::nullopt) {
  const std::size_t m = norm.alphabet_size();
  const std::size_t lags = std::min(norm.max_lag(), max_lag.value_or(norm.max_lag()));
  const auto& p = norm.probabilities();
  double worst = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    double sum = 0.0;
    for (std::size_t r = 1; r <= lags; ++r)
      for (std::size_t b = 0; b < m; ++b)
        if (norm.defined(b, a)) sum += std::abs(norm.value_or_zero(r, b, a)) * std::max(p[b], 1.0 - p[b]);
    worst = std::max(worst, sum);
  }
  return worst;
}

}  // namespace symentropy
