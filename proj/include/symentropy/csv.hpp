#pragma once

// CSV export of curves, correlation series and memory functions. Numbers
// use the shortest round-trip representation so output is byte-stable.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>

#include "symentropy/correlation.hpp"
#include "symentropy/entropy.hpp"
#include "symentropy/markov.hpp"
#include "symentropy/sequence.hpp"

namespace symentropy {

inline std::string format_number(double value) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

/// Quotes fields holding separators, quotes, line breaks or blanks.
inline std::string csv_field(std::string_view text) {
  const bool quote = text.empty() || text.find_first_of(",\"\r\n \t") != std::string_view::npos;
  if (!quote) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// One row per L = 1..max(curve lengths); cells without a value stay empty.
inline void write_entropy_csv(std::ostream& out, const EntropyCurve* corr, const BlockEntropyCurve* block) {
  out << "L,h_corr,h_corr_corrected,S,fluct_term,H_block,h_block,valid_block\n";
  const std::size_t rows = std::max(corr ? corr->points.size() : 0, block ? block->points.size() : 0);
  for (std::size_t i = 0; i < rows; ++i) {
    out << i + 1 << ',';
    if (corr && i < corr->points.size()) {
      const auto& p = corr->points[i];
      out << format_number(p.h) << ',' << (p.h_corrected ? format_number(*p.h_corrected) : "") << ','
          << format_number(p.correlation_sum) << ',' << format_number(p.fluctuation_term) << ',';
    } else {
      out << ",,,,";
    }
    if (block && i < block->points.size()) {
      const auto& p = block->points[i];
      out << format_number(p.block_entropy) << ',' << format_number(p.differential) << ','
          << (p.valid ? "true" : "false");
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

inline void write_correlation_csv(std::ostream& out, const CorrelationSeries& corr, const Alphabet& alphabet) {
  out << "r,alpha,beta,C\n";
  const std::size_t m = corr.alphabet_size();
  for (std::size_t r = 0; r <= corr.max_lag(); ++r)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        out << r << ',' << csv_field(alphabet.symbol(a)) << ',' << csv_field(alphabet.symbol(b)) << ','
            << format_number(corr(r, a, b)) << '\n';
}

inline void write_memory_csv(std::ostream& out, const MemoryFunction& F, const Alphabet& alphabet) {
  out << "r,alpha,beta,F\n";
  const std::size_t m = F.alphabet_size();
  for (std::size_t r = 1; r <= F.order(); ++r)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        out << r << ',' << csv_field(alphabet.symbol(a)) << ',' << csv_field(alphabet.symbol(b)) << ','
            << format_number(F(r, a, b)) << '\n';
}

}  // namespace symentropy
