#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>

#include "symentropy/sequence.hpp"

namespace symentropy::detail {

inline unsigned bits_per_symbol(std::size_t alphabet_size) {
  return alphabet_size <= 1 ? 1u : static_cast<unsigned>(std::bit_width(alphabet_size - 1));
}

/// Hash map keyed by fixed-length words over a small alphabet. Words pack into
/// a 64-bit key when they fit, otherwise the raw index bytes are the key.
template <class Mapped>
class WordMap {
 public:
  WordMap(std::size_t alphabet_size, std::size_t word_length)
      : bits_(bits_per_symbol(alphabet_size)), length_(word_length),
        packed_(word_length * bits_ <= 64) {}

  std::size_t word_length() const noexcept { return length_; }
  std::size_t size() const noexcept { return packed_ ? packed_map_.size() : string_map_.size(); }

  Mapped& operator[](std::span<const SymbolIndex> word) {
    if (packed_) return packed_map_[pack(word)];
    return string_map_[to_string(word)];
  }

  const Mapped* find(std::span<const SymbolIndex> word) const {
    if (word.size() != length_) return nullptr;
    if (packed_) {
      auto it = packed_map_.find(pack(word));
      return it == packed_map_.end() ? nullptr : &it->second;
    }
    auto it = string_map_.find(to_string(word));
    return it == string_map_.end() ? nullptr : &it->second;
  }

  template <class F>
  void for_each(F&& f) const {
    if (packed_)
      for (const auto& [key, value] : packed_map_) f(value);
    else
      for (const auto& [key, value] : string_map_) f(value);
  }

 private:
  std::uint64_t pack(std::span<const SymbolIndex> word) const {
    std::uint64_t key = 0;
    for (SymbolIndex s : word) key = (key << bits_) | s;
    return key;
  }

  static std::string to_string(std::span<const SymbolIndex> word) {
    return std::string(reinterpret_cast<const char*>(word.data()), word.size());
  }

  unsigned bits_;
  std::size_t length_;
  bool packed_;
  std::unordered_map<std::uint64_t, Mapped> packed_map_;
  std::unordered_map<std::string, Mapped> string_map_;
};

}  // namespace symentropy::detail
