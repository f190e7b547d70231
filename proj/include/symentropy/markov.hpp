#pragma once

// Additive high-order Markov chains.
//
// The conditional probability of symbol a after history ..., a_{i-2}, a_{i-1} is
//
//   P(a | history) = p_a + sum_{r=1}^{N} sum_b F_ab(r) [d(a_{i-r}, b) - p_b],
//
// with memory function F. Adding phi_a(r) to every F_ab(r) leaves P unchanged,
// so solvers return the representative with sum_b F_ab(r) p_b = 0.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "symentropy/correlation.hpp"
#include "symentropy/detail/word_map.hpp"
#include "symentropy/error.hpp"
#include "symentropy/sequence.hpp"

namespace symentropy {

/// F_ab(r) for r = 1..N: a is the predicted symbol, b the symbol r steps back.
class MemoryFunction {
 public:
  MemoryFunction(std::size_t alphabet_size, std::size_t order)
      : m_(alphabet_size), order_(order), values_(order * alphabet_size * alphabet_size, 0.0) {}

  MemoryFunction(std::size_t alphabet_size, std::size_t order, std::vector<double> values)
      : m_(alphabet_size), order_(order), values_(std::move(values)) {
    if (values_.size() != order_ * m_ * m_)
      throw std::invalid_argument("memory function values do not match N * m * m");
  }

  std::size_t alphabet_size() const noexcept { return m_; }
  std::size_t order() const noexcept { return order_; }
  std::span<const double> values() const noexcept { return values_; }

  double operator()(std::size_t lag, std::size_t a, std::size_t b) const {
    return values_[((lag - 1) * m_ + a) * m_ + b];
  }
  double& at(std::size_t lag, std::size_t a, std::size_t b) {
    return values_[((lag - 1) * m_ + a) * m_ + b];
  }

  /// Adds shift[(r-1)*m + a] to every F_ab(r).
  MemoryFunction with_gauge_shift(std::span<const double> shift) const {
    if (shift.size() != order_ * m_) throw std::invalid_argument("gauge shift must hold N * m values");
    MemoryFunction out = *this;
    for (std::size_t r = 1; r <= order_; ++r)
      for (std::size_t a = 0; a < m_; ++a)
        for (std::size_t b = 0; b < m_; ++b) out.at(r, a, b) += shift[(r - 1) * m_ + a];
    return out;
  }

  /// Representative with sum_b F_ab(r) p_b = 0 for every a and r.
  MemoryFunction gauge_fixed(const ProbabilityVector& p) const {
    std::vector<double> shift(order_ * m_, 0.0);
    for (std::size_t r = 1; r <= order_; ++r)
      for (std::size_t a = 0; a < m_; ++a) {
        double mean = 0.0;
        for (std::size_t b = 0; b < m_; ++b) mean += (*this)(r, a, b) * p[b];
        shift[(r - 1) * m_ + a] = -mean;
      }
    return with_gauge_shift(shift);
  }

 private:
  std::size_t m_;
  std::size_t order_;
  std::vector<double> values_;
};

/// Binary chain P(1 | .) = p_1 + sum_r f(r) (a_{i-r} - p_1) written in the
/// symmetric matrix form, F_ab(r) = f(r) (d(a,b) - p_a).
inline MemoryFunction binary_memory_function(std::span<const double> f, const ProbabilityVector& p) {
  if (p.size() != 2) throw std::invalid_argument("binary memory function needs a binary alphabet");
  MemoryFunction F(2, f.size());
  for (std::size_t r = 1; r <= f.size(); ++r)
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b) F.at(r, a, b) = f[r - 1] * ((a == b ? 1.0 : 0.0) - p[a]);
  return F;
}

struct AdditiveCpf {
  ProbabilityVector p;
  MemoryFunction memory;
};

/// Lower clamp applied to every supported symbol's conditional probability.
inline constexpr double kClampEpsilon = 1e-6;

namespace detail {

/// C_ab(s) for any integer s, using C_ab(-s) = C_ba(s).
inline double signed_lag_correlation(const CorrelationSeries& corr, std::ptrdiff_t lag, std::size_t a,
                                     std::size_t b) {
  return lag >= 0 ? corr(static_cast<std::size_t>(lag), a, b) : corr(static_cast<std::size_t>(-lag), b, a);
}

inline std::vector<std::size_t> support_of(const ProbabilityVector& p) {
  std::vector<std::size_t> s;
  for (std::size_t a = 0; a < p.size(); ++a)
    if (p[a] > 0.0) s.push_back(a);
  return s;
}

/// Clamps supported entries into [eps, 1 - eps], zeroes unsupported ones and
/// renormalizes. Returns true when any entry had to be clamped.
inline bool clamp_distribution(std::span<double> out, const ProbabilityVector& p) {
  bool clamped = false;
  double total = 0.0;
  for (std::size_t a = 0; a < out.size(); ++a) {
    if (p[a] <= 0.0) {
      out[a] = 0.0;
      continue;
    }
    if (!(out[a] >= kClampEpsilon)) {
      out[a] = kClampEpsilon;
      clamped = true;
    } else if (out[a] > 1.0 - kClampEpsilon) {
      out[a] = 1.0 - kClampEpsilon;
      clamped = true;
    }
    total += out[a];
  }
  for (double& v : out) v /= total;
  return clamped;
}

/// Per-lag, per-past-symbol increments F_ab(r) - sum_c F_ac(r) p_c laid out
/// as table[((r-1) m + b) m + a] so the inner loop runs over predicted a.
inline std::vector<double> centered_increments(const AdditiveCpf& cpf) {
  const std::size_t m = cpf.p.size();
  const std::size_t N = cpf.memory.order();
  std::vector<double> table(N * m * m);
  for (std::size_t r = 1; r <= N; ++r)
    for (std::size_t a = 0; a < m; ++a) {
      double mean = 0.0;
      for (std::size_t c = 0; c < m; ++c) mean += cpf.memory(r, a, c) * cpf.p[c];
      for (std::size_t b = 0; b < m; ++b) table[((r - 1) * m + b) * m + a] = cpf.memory(r, a, b) - mean;
    }
  return table;
}

inline void check_cpf(const AdditiveCpf& cpf) {
  if (cpf.memory.alphabet_size() != cpf.p.size())
    throw std::invalid_argument("memory function and probabilities disagree on alphabet size");
}

}  // namespace detail

/// Conditional distribution after `history` (oldest first, most recent last).
/// Histories shorter than N use the lags that are available.
inline ProbabilityVector cpf_eval(const AdditiveCpf& cpf, std::span<const SymbolIndex> history) {
  detail::check_cpf(cpf);
  const std::size_t m = cpf.p.size();
  const std::size_t lags = std::min(cpf.memory.order(), history.size());
  std::vector<double> out(cpf.p.values().begin(), cpf.p.values().end());
  for (std::size_t r = 1; r <= lags; ++r) {
    const SymbolIndex b = history[history.size() - r];
    if (b >= m) throw std::out_of_range("history symbol outside the alphabet");
    for (std::size_t a = 0; a < m; ++a) {
      double mean = 0.0;
      for (std::size_t c = 0; c < m; ++c) mean += cpf.memory(r, a, c) * cpf.p[c];
      out[a] += cpf.memory(r, a, b) - mean;
    }
  }
  detail::clamp_distribution(out, cpf.p);
  return ProbabilityVector(std::move(out));
}

/// Digits, then lower- and upper-case letters; "s<i>" beyond 62 symbols.
inline Alphabet default_alphabet(std::size_t size) {
  static constexpr std::string_view kChars =
      "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::vector<std::string> symbols;
  for (std::size_t i = 0; i < size; ++i)
    symbols.push_back(size <= kChars.size() ? std::string(1, kChars[i]) : "s" + std::to_string(i));
  return Alphabet(std::move(symbols));
}

inline constexpr std::string_view kRngId = "mt19937_64";

struct GenerationOptions {
  /// Symbols generated and discarded before output; 10 N when unset.
  std::optional<std::size_t> burn_in;
  /// Symbol names for the output; default_alphabet(m) when unset.
  std::shared_ptr<const Alphabet> alphabet;
};

struct GeneratedChain {
  SymbolSequence sequence;
  std::uint64_t seed = 0;
  std::size_t burn_in = 0;
  std::size_t clamp_events = 0;
  std::string rng{kRngId};
};

/// Samples a chain: N i.i.d. symbols from p, then sequential draws from the
/// conditional distribution; the first burn_in symbols are dropped. The
/// stream is a pure function of (cpf, length, seed, burn_in).
inline GeneratedChain generate(const AdditiveCpf& cpf, std::size_t length, std::uint64_t seed,
                               const GenerationOptions& options = {}) {
  detail::check_cpf(cpf);
  const std::size_t m = cpf.p.size();
  const std::size_t N = cpf.memory.order();
  const std::size_t burn_in = options.burn_in.value_or(10 * N);
  auto alphabet = options.alphabet ? options.alphabet : std::make_shared<const Alphabet>(default_alphabet(m));
  if (alphabet->size() != m) throw std::invalid_argument("output alphabet size does not match the chain");

  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto draw = [&](std::span<const double> dist) -> SymbolIndex {
    const double u = uniform();
    double cumulative = 0.0;
    std::size_t last = 0;
    for (std::size_t a = 0; a < m; ++a) {
      if (dist[a] <= 0.0) continue;
      last = a;
      cumulative += dist[a];
      if (u < cumulative) return static_cast<SymbolIndex>(a);
    }
    return static_cast<SymbolIndex>(last);
  };

  const std::size_t total = burn_in + length;
  std::vector<SymbolIndex> stream;
  stream.reserve(total);
  const auto increments = detail::centered_increments(cpf);
  std::vector<double> dist(m);
  std::size_t clamps = 0;
  for (std::size_t i = 0; i < total; ++i) {
    if (i < N) {
      stream.push_back(draw(cpf.p.values()));
      continue;
    }
    std::copy(cpf.p.values().begin(), cpf.p.values().end(), dist.begin());
    for (std::size_t r = 1; r <= N; ++r) {
      const double* inc = increments.data() + ((r - 1) * m + stream[i - r]) * m;
      for (std::size_t a = 0; a < m; ++a) dist[a] += inc[a];
    }
    if (detail::clamp_distribution(dist, cpf.p)) ++clamps;
    stream.push_back(draw(dist));
  }
  stream.erase(stream.begin(), stream.begin() + static_cast<std::ptrdiff_t>(std::min(burn_in, stream.size())));
  return GeneratedChain{SymbolSequence(std::move(alphabet), std::move(stream)), seed, burn_in, clamps,
                        std::string(kRngId)};
}

/// Solves C_ab(r) = sum_{r'=1}^{N} sum_c C_ac(r - r') F_bc(r') for r = 1..N.
///
/// Row and column sums of C vanish, so the full system is singular. One
/// reference symbol is removed from both the equations and the unknowns (its
/// memory entries are fixed at zero), the resulting (m_eff - 1) N square system
/// is solved by LU, and the result is mapped to the gauge-fixed representative.
inline MemoryFunction memory_function_exact(const CorrelationSeries& corr, std::size_t order) {
  if (order < 1 || order > corr.max_lag())
    throw InvalidLag("memory order " + std::to_string(order) + " outside [1, " +
                     std::to_string(corr.max_lag()) + "]");
  const auto& p = corr.probabilities();
  const std::size_t m = corr.alphabet_size();
  const auto support = detail::support_of(p);
  if (support.size() < 2) throw DegenerateCorrelations("memory function needs at least two observed symbols");
  const std::size_t q = support.size() - 1;
  const auto dim = static_cast<Eigen::Index>(q * order);

  Eigen::MatrixXd A(dim, dim);
  Eigen::MatrixXd B(dim, static_cast<Eigen::Index>(support.size()));
  for (std::size_t r = 1; r <= order; ++r)
    for (std::size_t i = 0; i < q; ++i) {
      const auto row = static_cast<Eigen::Index>((r - 1) * q + i);
      for (std::size_t rp = 1; rp <= order; ++rp)
        for (std::size_t j = 0; j < q; ++j)
          A(row, static_cast<Eigen::Index>((rp - 1) * q + j)) = detail::signed_lag_correlation(
              corr, static_cast<std::ptrdiff_t>(r) - static_cast<std::ptrdiff_t>(rp), support[i], support[j]);
      for (std::size_t k = 0; k < support.size(); ++k)
        B(row, static_cast<Eigen::Index>(k)) = corr(r, support[i], support[k]);
    }

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-13)) throw DegenerateCorrelations("reduced correlation system is singular (rcond " +
                                                     std::to_string(rcond) + ")");
  const Eigen::MatrixXd X = lu.solve(B);
  if (!X.allFinite()) throw DegenerateCorrelations("memory function solve produced non-finite values");

  MemoryFunction F(m, order);
  for (std::size_t k = 0; k < support.size(); ++k)
    for (std::size_t rp = 1; rp <= order; ++rp)
      for (std::size_t j = 0; j < q; ++j)
        F.at(rp, support[k], support[j]) =
            X(static_cast<Eigen::Index>((rp - 1) * q + j), static_cast<Eigen::Index>(k));
  F = F.gauge_fixed(p);
  for (std::size_t r = 1; r <= order; ++r)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        if (p[a] == 0.0 || p[b] == 0.0) F.at(r, a, b) = 0.0;
  return F;
}

/// max over a, b, r of |C_ab(r) - sum_{r'} sum_c C_ac(r - r') F_bc(r')|.
inline double memory_function_residual(const CorrelationSeries& corr, const MemoryFunction& F) {
  const std::size_t m = corr.alphabet_size();
  const std::size_t N = F.order();
  if (N > corr.max_lag() || F.alphabet_size() != m)
    throw std::invalid_argument("memory function does not fit the correlation series");
  double worst = 0.0;
  for (std::size_t r = 1; r <= N; ++r)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) {
        double rhs = 0.0;
        for (std::size_t rp = 1; rp <= N; ++rp)
          for (std::size_t c = 0; c < m; ++c)
            rhs += detail::signed_lag_correlation(
                       corr, static_cast<std::ptrdiff_t>(r) - static_cast<std::ptrdiff_t>(rp), a, c) *
                   F(rp, b, c);
        worst = std::max(worst, std::abs(corr(r, a, b) - rhs));
      }
  return worst;
}

/// Weak-correlation expansion of the exact solution.
///
/// Order 1: F_ab(r) = C_ba(r) / p_b = K_ba(r) (d(a,b) - p_a).
/// Order 2 subtracts (1 / p_b) sum_{r' != r} sum_c C_bc(r - r') C_ca(r') / p_c.
/// Both orders are already gauge-fixed.
inline MemoryFunction memory_function_series(const NormalizedSeries& norm, std::size_t order, int terms = 1) {
  if (terms != 1 && terms != 2) throw std::invalid_argument("series order must be 1 or 2");
  if (order < 1 || order > norm.max_lag())
    throw InvalidLag("memory order " + std::to_string(order) + " outside [1, " +
                     std::to_string(norm.max_lag()) + "]");
  const auto& p = norm.probabilities();
  const std::size_t m = norm.alphabet_size();
  const auto support = detail::support_of(p);
  if (support.size() < 2) throw DegenerateCorrelations("memory series needs at least two observed symbols");
  for (std::size_t a : support)
    for (std::size_t b : support)
      if (!norm.defined(a, b)) throw DegenerateCorrelations("normalized correlator absent on the support");

  // C_ab(r) = K_ab(r) C_ab(0), r = 0..N
  std::vector<double> c((order + 1) * m * m, 0.0);
  auto C = [&](std::ptrdiff_t lag, std::size_t a, std::size_t b) {
    return lag >= 0 ? c[(static_cast<std::size_t>(lag) * m + a) * m + b]
                    : c[(static_cast<std::size_t>(-lag) * m + b) * m + a];
  };
  for (std::size_t r = 0; r <= order; ++r)
    for (std::size_t a : support)
      for (std::size_t b : support)
        c[(r * m + a) * m + b] = norm.value_or_zero(r, a, b) * zero_lag_covariance(p, a, b);

  MemoryFunction F(m, order);
  for (std::size_t r = 1; r <= order; ++r)
    for (std::size_t a : support)
      for (std::size_t b : support) {
        double value = C(static_cast<std::ptrdiff_t>(r), b, a) / p[b];
        if (terms == 2) {
          double correction = 0.0;
          for (std::size_t rp = 1; rp <= order; ++rp) {
            if (rp == r) continue;
            const auto shift = static_cast<std::ptrdiff_t>(r) - static_cast<std::ptrdiff_t>(rp);
            for (std::size_t g : support)
              correction += C(shift, b, g) * C(static_cast<std::ptrdiff_t>(rp), g, a) / p[g];
          }
          value -= correction / p[b];
        }
        F.at(r, a, b) = value;
      }
  return F;
}

/// Upper bound on |P(a | history) - p_a| over all histories:
/// max_a sum_r sum_b |F_ab(r) - sum_c F_ac(r) p_c| max(p_b, 1 - p_b).
inline double memory_deviation_bound(const AdditiveCpf& cpf) {
  detail::check_cpf(cpf);
  const std::size_t m = cpf.p.size();
  const auto fixed = cpf.memory.gauge_fixed(cpf.p);
  double worst = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    double sum = 0.0;
    for (std::size_t r = 1; r <= fixed.order(); ++r)
      for (std::size_t b = 0; b < m; ++b) sum += std::abs(fixed(r, a, b)) * std::max(cpf.p[b], 1.0 - cpf.p[b]);
    worst = std::max(worst, sum);
  }
  return worst;
}

/// Plug-in conditional distributions for every context length 0..N, each
/// counted over the M - L windows of length L + 1.
class EmpiricalCpf {
 public:
  EmpiricalCpf(std::size_t alphabet_size, std::size_t order, std::size_t sequence_length)
      : m_(alphabet_size), order_(order), length_(sequence_length) {
    for (std::size_t L = 0; L <= order; ++L) tables_.emplace_back(alphabet_size, L);
  }

  std::size_t alphabet_size() const noexcept { return m_; }
  std::size_t order() const noexcept { return order_; }
  std::size_t sequence_length() const noexcept { return length_; }

  /// P(. | context) for a context of length <= N (oldest first); nullopt when
  /// the context never occurs.
  std::optional<ProbabilityVector> distribution(std::span<const SymbolIndex> context) const {
    const auto* counts = find(context);
    if (!counts) return std::nullopt;
    std::uint64_t total = 0;
    for (auto n : *counts) total += n;
    std::vector<double> p(m_);
    for (std::size_t a = 0; a < m_; ++a) p[a] = static_cast<double>((*counts)[a]) / static_cast<double>(total);
    return ProbabilityVector(std::move(p));
  }

  /// n(context *), zero for unseen contexts.
  std::uint64_t observations(std::span<const SymbolIndex> context) const {
    const auto* counts = find(context);
    if (!counts) return 0;
    std::uint64_t total = 0;
    for (auto n : *counts) total += n;
    return total;
  }

  /// Calls f(span of next-symbol counts) for every observed context of the given length.
  template <class F>
  void for_each_context(std::size_t context_length, F&& f) const {
    tables_.at(context_length).for_each([&](const std::vector<std::uint64_t>& counts) {
      f(std::span<const std::uint64_t>(counts));
    });
  }

  void add(std::span<const SymbolIndex> context, SymbolIndex next) {
    auto& counts = tables_.at(context.size())[context];
    if (counts.empty()) counts.assign(m_, 0);
    ++counts[next];
  }

 private:
  const std::vector<std::uint64_t>* find(std::span<const SymbolIndex> context) const {
    if (context.size() > order_) throw std::invalid_argument("context longer than the table order");
    return tables_[context.size()].find(context);
  }

  std::size_t m_;
  std::size_t order_;
  std::size_t length_;
  std::vector<detail::WordMap<std::vector<std::uint64_t>>> tables_;
};

inline EmpiricalCpf empirical_cpf(const SymbolSequence& seq, std::size_t order) {
  if (order >= seq.size())
    throw InvalidLength("context order " + std::to_string(order) + " needs M > N, M = " +
                        std::to_string(seq.size()));
  EmpiricalCpf cpf(seq.alphabet_size(), order, seq.size());
  const auto data = seq.indices();
  for (std::size_t L = 0; L <= order; ++L)
    for (std::size_t i = 0; i + L < data.size(); ++i) cpf.add(data.subspan(i, L), data[i + L]);
  return cpf;
}

/// h_L = sum_context P(context) h(. | context) in bits from the length-L
/// table, P(context) = n(context *) / (M - L).
inline double conditional_entropy(const SymbolSequence& seq, const EmpiricalCpf& cpf, std::size_t context_length) {
  if (context_length > cpf.order()) throw std::invalid_argument("context length exceeds the table order");
  if (seq.size() != cpf.sequence_length() || seq.alphabet_size() != cpf.alphabet_size())
    throw std::invalid_argument("table was not built from this sequence");
  const double windows = static_cast<double>(seq.size() - context_length);
  std::vector<double> terms;
  cpf.for_each_context(context_length, [&](std::span<const std::uint64_t> counts) {
    std::uint64_t total = 0;
    for (auto n : counts) total += n;
    double term = 0.0;
    for (auto n : counts) {
      if (n == 0) continue;
      const double q = static_cast<double>(n) / static_cast<double>(total);
      term -= static_cast<double>(n) / windows * std::log2(q);
    }
    terms.push_back(term);
  });
  std::sort(terms.begin(), terms.end());
  double h = 0.0;
  for (double t : terms) h += t;
  return h;
}

}  // namespace symentropy
