#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ktl/text/lexicon.hpp"
#include "ktl/text/tokenizer.hpp"

namespace ktl::text {

// Normalized concept strings, ordered lexicographically.
using ChunkSet = std::set<std::string>;

inline constexpr std::size_t kMaxChunkTokens = 4;

namespace detail {

inline std::string join_tokens(const Tokens& tokens, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

inline void flush_span(const Tokens& tokens, std::size_t begin, std::size_t end, ChunkSet& out) {
  for (std::size_t start = begin; start < end; start += kMaxChunkTokens) {
    const std::size_t stop = std::min(end, start + kMaxChunkTokens);
    out.insert(join_tokens(tokens, start, stop));
    // Spans of three or more tokens also contribute their final token, the
    // head word of the phrase ("low stratus clouds" -> "clouds").
    if (stop - start >= 3) out.insert(tokens[stop - 1]);
  }
}

}  // namespace detail

// Lexicon-driven noun/verb chunker. Content spans are maximal runs of
// tokens that are neither stopwords, verbs nor punctuation. Verbs become
// single-token chunks. Spans longer than kMaxChunkTokens are cut into
// consecutive pieces of at most that length.
inline ChunkSet extract_chunks(std::string_view sentence, const Lexicon& lexicon = Lexicon::bundled()) {
  const Tokens tokens = tokenize(sentence);
  ChunkSet out;
  std::size_t span_begin = 0;
  for (std::size_t i = 0; i <= tokens.size(); ++i) {
    const bool at_end = i == tokens.size();
    bool boundary = at_end;
    if (!at_end) {
      const std::string& tok = tokens[i];
      if (is_punctuation(tok) || lexicon.is_stopword(tok)) {
        boundary = true;
      } else if (lexicon.is_verb(tok)) {
        boundary = true;
        detail::flush_span(tokens, span_begin, i, out);
        out.insert(tok);
        span_begin = i + 1;
        continue;
      }
    }
    if (boundary) {
      detail::flush_span(tokens, span_begin, i, out);
      span_begin = i + 1;
    }
  }
  return out;
}

}  // namespace ktl::text
