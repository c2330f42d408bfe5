#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "ktl/text/normalize.hpp"

namespace ktl::text {

using Tokens = std::vector<std::string>;

namespace detail {

// Word characters: ASCII alphanumerics and any non-ASCII byte (so
// multi-byte UTF-8 letters stay inside their word).
inline bool is_word_byte(unsigned char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

inline bool is_letter(unsigned char c) noexcept { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

// Length of an English clitic ("'s", "'re", ...) starting at s[i], or 0.
inline std::size_t clitic_length(std::string_view s, std::size_t i) noexcept {
  static constexpr std::array<std::string_view, 7> kClitics = {"s", "t", "d", "m", "re", "ve", "ll"};
  if (s[i] != '\'') return 0;
  std::size_t j = i + 1;
  while (j < s.size() && is_letter(static_cast<unsigned char>(s[j]))) ++j;
  if (j < s.size() && is_word_byte(static_cast<unsigned char>(s[j]))) return 0;
  const std::string_view tail = s.substr(i + 1, j - i - 1);
  for (auto c : kClitics) {
    if (tail == c) return j - i;
  }
  return 0;
}

}  // namespace detail

// Normalizes, splits on whitespace, and detaches every punctuation byte
// as its own token. Apostrophe clitics stay attached to the apostrophe:
// "PersonX's" -> "personx", "'s".
inline Tokens tokenize(std::string_view raw) {
  const std::string s = normalize(raw);
  Tokens out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c == ' ') {
      ++i;
    } else if (detail::is_word_byte(c)) {
      std::size_t j = i;
      while (j < s.size() && detail::is_word_byte(static_cast<unsigned char>(s[j]))) ++j;
      out.emplace_back(s.substr(i, j - i));
      i = j;
    } else if (const std::size_t n = detail::clitic_length(s, i); n > 0) {
      out.emplace_back(s.substr(i, n));
      i += n;
    } else {
      out.emplace_back(1, s[i]);
      ++i;
    }
  }
  return out;
}

inline std::string detokenize(const Tokens& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

// True when the token carries no word characters (pure punctuation).
inline bool is_punctuation(std::string_view token) noexcept {
  for (unsigned char c : token) {
    if (detail::is_word_byte(c)) return false;
  }
  return true;
}

}  // namespace ktl::text
