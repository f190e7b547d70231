#pragma once

// Alphabets, encoded symbol sequences and single-symbol statistics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "symentropy/error.hpp"

namespace symentropy {

using SymbolIndex = std::uint8_t;

inline constexpr std::size_t kMaxAlphabetSize = 256;

/// Bijection between external symbols (arbitrary byte strings) and the dense
/// indices 0..m-1 used everywhere else.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw AlphabetError("alphabet must contain at least one symbol");
    if (symbols_.size() > kMaxAlphabetSize)
      throw AlphabetError("alphabet has " + std::to_string(symbols_.size()) +
                          " symbols; at most 256 are supported");
    index_.reserve(symbols_.size());
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      if (!index_.emplace(symbols_[i], static_cast<SymbolIndex>(i)).second)
        throw AlphabetError("duplicate symbol '" + symbols_[i] + "'");
    }
  }

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::string& symbol(std::size_t i) const { return symbols_.at(i); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }

  std::optional<SymbolIndex> index(std::string_view symbol) const {
    auto it = index_.find(std::string(symbol));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(std::string_view symbol) const { return index(symbol).has_value(); }

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.symbols_ == b.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, SymbolIndex> index_;
};

/// Immutable index array over a shared alphabet.
class SymbolSequence {
 public:
  SymbolSequence(std::shared_ptr<const Alphabet> alphabet, std::vector<SymbolIndex> data)
      : alphabet_(std::move(alphabet)), data_(std::move(data)) {
    if (!alphabet_) throw AlphabetError("sequence requires an alphabet");
    const std::size_t m = alphabet_->size();
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (data_[i] >= m)
        throw UnknownSymbol(i, "#" + std::to_string(static_cast<unsigned>(data_[i])));
    }
  }

  SymbolSequence(const Alphabet& alphabet, std::vector<SymbolIndex> data)
      : SymbolSequence(std::make_shared<const Alphabet>(alphabet), std::move(data)) {}

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  SymbolIndex operator[](std::size_t i) const { return data_[i]; }
  std::span<const SymbolIndex> indices() const noexcept { return data_; }

  const Alphabet& alphabet() const noexcept { return *alphabet_; }
  const std::shared_ptr<const Alphabet>& shared_alphabet() const noexcept { return alphabet_; }
  std::size_t alphabet_size() const noexcept { return alphabet_->size(); }

  SymbolSequence prefix(std::size_t length) const {
    length = std::min(length, data_.size());
    return SymbolSequence(alphabet_, std::vector<SymbolIndex>(data_.begin(), data_.begin() + length));
  }

  SymbolSequence reversed() const {
    return SymbolSequence(alphabet_, std::vector<SymbolIndex>(data_.rbegin(), data_.rend()));
  }

 private:
  std::shared_ptr<const Alphabet> alphabet_;
  std::vector<SymbolIndex> data_;
};

/// Probabilities p_a of the alphabet symbols.
class ProbabilityVector {
 public:
  ProbabilityVector() = default;

  /// Accepts values summing to one within 1e-9 and rescales them so the sum is
  /// one to rounding.
  explicit ProbabilityVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("probability vector must be non-empty");
    double total = 0.0;
    for (double v : values_) {
      if (!(v >= 0.0 && v <= 1.0 + 1e-12))
        throw std::invalid_argument("probabilities must lie in [0, 1]");
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("probabilities must sum to 1");
    if (total != 1.0)
      for (double& v : values_) v /= total;
  }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  /// Number of symbols with non-zero probability.
  std::size_t support_size() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(values_.begin(), values_.end(), [](double v) { return v > 0.0; }));
  }

 private:
  std::vector<double> values_;
};

/// Splits a character string into one-character tokens.
inline std::vector<std::string> char_tokens(std::string_view text) {
  std::vector<std::string> out;
  out.reserve(text.size());
  for (char c : text) out.emplace_back(1, c);
  return out;
}

/// Distinct symbols in first-appearance order.
inline Alphabet alphabet_from_sequence(std::span<const std::string> tokens) {
  if (tokens.empty()) throw EmptyInput("cannot build an alphabet from an empty stream");
  std::vector<std::string> symbols;
  std::unordered_map<std::string_view, bool> seen;
  for (const auto& t : tokens) {
    if (seen.emplace(t, true).second) {
      symbols.push_back(t);
      if (symbols.size() > kMaxAlphabetSize)
        throw AlphabetError("more than 256 distinct symbols in input");
    }
  }
  return Alphabet(std::move(symbols));
}

inline SymbolSequence encode(std::span<const std::string> tokens, const Alphabet& alphabet) {
  auto shared = std::make_shared<const Alphabet>(alphabet);
  std::vector<SymbolIndex> data;
  data.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto idx = shared->index(tokens[i]);
    if (!idx) throw UnknownSymbol(i, tokens[i]);
    data.push_back(*idx);
  }
  return SymbolSequence(std::move(shared), std::move(data));
}

inline std::vector<std::string> decode(const SymbolSequence& seq) {
  std::vector<std::string> out;
  out.reserve(seq.size());
  for (SymbolIndex i : seq.indices()) out.push_back(seq.alphabet().symbol(i));
  return out;
}

inline std::vector<std::size_t> symbol_counts(const SymbolSequence& seq) {
  std::vector<std::size_t> counts(seq.alphabet_size(), 0);
  for (SymbolIndex i : seq.indices()) ++counts[i];
  return counts;
}

/// p_a = count(a) / M.
inline ProbabilityVector symbol_probabilities(const SymbolSequence& seq) {
  if (seq.empty()) throw EmptyInput("symbol probabilities of an empty sequence");
  const auto counts = symbol_counts(seq);
  const double total = static_cast<double>(seq.size());
  std::vector<double> p(counts.size());
  for (std::size_t a = 0; a < counts.size(); ++a) p[a] = static_cast<double>(counts[a]) / total;
  return ProbabilityVector(std::move(p));
}

}  // namespace symentropy
