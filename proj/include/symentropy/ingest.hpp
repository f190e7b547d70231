#pragma once

// Readers that turn text, FASTA and raw symbol files into sequences.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "symentropy/error.hpp"
#include "symentropy/sequence.hpp"

namespace symentropy {

struct CorpusStats {
  std::size_t input_bytes = 0;
  /// Characters, nucleotides or tokens examined.
  std::size_t input_tokens = 0;
  std::size_t emitted = 0;
  std::size_t dropped = 0;
  std::vector<std::string> alphabet;
};

struct IngestResult {
  SymbolSequence sequence;
  CorpusStats stats;
};

/// a..z followed by the blank.
inline std::shared_ptr<const Alphabet> text_alphabet() {
  static const auto alphabet = [] {
    std::vector<std::string> symbols;
    for (char c = 'a'; c <= 'z'; ++c) symbols.emplace_back(1, c);
    symbols.emplace_back(" ");
    return std::make_shared<const Alphabet>(std::move(symbols));
  }();
  return alphabet;
}

inline std::shared_ptr<const Alphabet> nucleotide_alphabet() {
  static const auto alphabet = std::make_shared<const Alphabet>(std::vector<std::string>{"A", "C", "G", "T"});
  return alphabet;
}

inline std::shared_ptr<const Alphabet> binary_alphabet() {
  static const auto alphabet = std::make_shared<const Alphabet>(std::vector<std::string>{"0", "1"});
  return alphabet;
}

struct TextOptions {
  /// Emit one blank per non-letter character instead of one per run.
  bool keep_blank_runs = false;
};

/// Lower-cases ASCII letters and turns non-letter characters into blanks,
/// collapsing runs unless asked not to; leading and trailing blanks are
/// trimmed. Each UTF-8 encoded character counts once.
inline IngestResult coarse_grain_text(std::string_view text, TextOptions options = {}) {
  constexpr SymbolIndex kBlank = 26;
  CorpusStats stats;
  stats.input_bytes = text.size();
  std::vector<SymbolIndex> out;
  out.reserve(text.size());
  std::size_t pending = 0;
  std::size_t separators = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) == 0x80) continue;
    ++stats.input_tokens;
    if (c < 0x80 && std::isalpha(c)) {
      if (!out.empty()) {
        const std::size_t blanks = options.keep_blank_runs ? pending : std::min<std::size_t>(pending, 1);
        out.insert(out.end(), blanks, kBlank);
      }
      pending = 0;
      out.push_back(static_cast<SymbolIndex>(std::tolower(c) - 'a'));
    } else {
      ++pending;
      ++separators;
    }
  }
  if (out.empty()) throw EmptyInput("no letters in text input");
  const auto blanks = static_cast<std::size_t>(std::count(out.begin(), out.end(), kBlank));
  stats.emitted = out.size();
  stats.dropped = separators - blanks;
  auto alphabet = text_alphabet();
  stats.alphabet = alphabet->symbols();
  return {SymbolSequence(std::move(alphabet), std::move(out)), stats};
}

/// Concatenates the sequence lines of every record; characters outside ACGT
/// (after upper-casing) are dropped and counted.
inline IngestResult parse_fasta(std::string_view bytes) {
  CorpusStats stats;
  stats.input_bytes = bytes.size();
  std::vector<SymbolIndex> out;
  bool seen_header = false;
  std::size_t pos = 0;
  while (pos <= bytes.size()) {
    const std::size_t end = std::min(bytes.find('\n', pos), bytes.size());
    const std::string_view line = bytes.substr(pos, end - pos);
    pos = end + 1;
    const auto first = line.find_first_not_of(" \t\r\v\f");
    if (first == std::string_view::npos) continue;
    if (line[first] == '>') {
      seen_header = true;
      continue;
    }
    if (!seen_header) throw MalformedFasta("first non-empty line is not a '>' header");
    for (unsigned char c : line) {
      if (std::isspace(c)) continue;
      ++stats.input_tokens;
      switch (std::toupper(c)) {
        case 'A': out.push_back(0); break;
        case 'C': out.push_back(1); break;
        case 'G': out.push_back(2); break;
        case 'T': out.push_back(3); break;
        default: ++stats.dropped;
      }
    }
  }
  if (out.empty()) throw EmptyInput("no nucleotides in FASTA input");
  stats.emitted = out.size();
  auto alphabet = nucleotide_alphabet();
  stats.alphabet = alphabet->symbols();
  return {SymbolSequence(std::move(alphabet), std::move(out)), stats};
}

/// Symbols named in one_set become "1", all others "0".
inline SymbolSequence binary_map(const SymbolSequence& seq, std::span<const std::string> one_set) {
  const Alphabet& alphabet = seq.alphabet();
  std::vector<SymbolIndex> is_one(alphabet.size(), 0);
  std::size_t selected = 0;
  for (const auto& name : one_set) {
    const auto index = alphabet.index(name);
    if (!index) throw InvalidPartition("symbol '" + name + "' is not in the alphabet");
    if (!is_one[*index]) ++selected;
    is_one[*index] = 1;
  }
  if (selected == 0 || selected == alphabet.size())
    throw InvalidPartition("one-set must be a non-empty proper subset of the alphabet");
  std::vector<SymbolIndex> out(seq.size());
  const auto data = seq.indices();
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = is_one[data[i]];
  return SymbolSequence(binary_alphabet(), std::move(out));
}

enum class RawMode { bytes, tokens };

/// Every byte (or whitespace-separated token) is a symbol. The alphabet is
/// the set of distinct symbols in byte order.
inline IngestResult read_raw_symbols(std::string_view bytes, RawMode mode) {
  CorpusStats stats;
  stats.input_bytes = bytes.size();
  std::vector<std::string_view> tokens;
  if (mode == RawMode::bytes) {
    tokens.reserve(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) tokens.push_back(bytes.substr(i, 1));
  } else {
    std::size_t i = 0;
    while (i < bytes.size()) {
      while (i < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[i]))) ++i;
      const std::size_t start = i;
      while (i < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[i]))) ++i;
      if (i > start) tokens.push_back(bytes.substr(start, i - start));
    }
  }
  if (tokens.empty()) throw EmptyInput("no symbols in raw input");

  std::set<std::string_view> distinct(tokens.begin(), tokens.end());
  if (distinct.size() > kMaxAlphabetSize)
    throw AlphabetError("raw input has " + std::to_string(distinct.size()) + " distinct symbols; at most 256");
  std::unordered_map<std::string_view, SymbolIndex> index;
  std::vector<std::string> symbols;
  for (auto t : distinct) {
    index.emplace(t, static_cast<SymbolIndex>(symbols.size()));
    symbols.emplace_back(t);
  }
  std::vector<SymbolIndex> out(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) out[i] = index[tokens[i]];

  stats.input_tokens = tokens.size();
  stats.emitted = tokens.size();
  stats.alphabet = symbols;
  return {SymbolSequence(std::make_shared<const Alphabet>(std::move(symbols)), std::move(out)), stats};
}

}  // namespace symentropy
