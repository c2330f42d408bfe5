#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ktl/retrieval/bm25.hpp"
#include "ktl/text/lexicon.hpp"
#include "ktl/util/error.hpp"

namespace ktl::retrieval {

struct IrAnswer {
  std::size_t chosen = 0;
  std::vector<double> confidence;  // per option, >= 0
};

namespace detail {

inline std::set<std::string> content_terms(std::string_view s, const text::Lexicon& lexicon) {
  std::set<std::string> out;
  for (auto& t : index_terms(s)) {
    if (!lexicon.is_stopword(t)) out.insert(std::move(t));
  }
  return out;
}

inline bool overlaps(const std::set<std::string>& a, const std::set<std::string>& b) {
  for (const auto& x : a) {
    if (b.count(x)) return true;
  }
  return false;
}

}  // namespace detail

// Lexical-overlap baseline: each option is scored by the retrieval score of
// the best-ranked sentence that shares a content word with the question and
// with the option. Highest confidence wins; ties go to the lowest index.
inline IrAnswer ir_solver_answer(const InvertedIndex& index, const std::optional<std::string>& context,
                                 const std::string& question, const std::vector<std::string>& options,
                                 std::size_t top_k = 5, const text::Lexicon& lexicon = text::Lexicon::bundled()) {
  if (options.size() < 2) fail(ErrorKind::kValidation, "ir_solver_answer: need at least 2 options");
  const auto question_terms = detail::content_terms(question, lexicon);
  IrAnswer out;
  out.confidence.assign(options.size(), 0.0);
  for (std::size_t i = 0; i < options.size(); ++i) {
    const auto option_terms = detail::content_terms(options[i], lexicon);
    std::string query = context.value_or("");
    query += " " + question + " " + options[i];
    for (const auto& hit : index.retrieve(query, top_k)) {
      const auto doc_terms = detail::content_terms(index.document(hit.doc), lexicon);
      if (detail::overlaps(doc_terms, question_terms) && detail::overlaps(doc_terms, option_terms)) {
        out.confidence[i] = hit.score;
        break;
      }
    }
  }
  for (std::size_t i = 1; i < options.size(); ++i) {
    if (out.confidence[i] > out.confidence[out.chosen]) out.chosen = i;
  }
  return out;
}

}  // namespace ktl::retrieval
