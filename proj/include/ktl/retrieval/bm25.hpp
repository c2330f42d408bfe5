#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "ktl/text/tokenizer.hpp"
#include "ktl/util/error.hpp"
#include "ktl/util/io.hpp"

namespace ktl::retrieval {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct Posting {
  std::size_t doc;
  std::size_t tf;
};

struct ScoredDoc {
  std::size_t doc;
  double score;
};

// Index terms are tokenizer tokens minus pure punctuation.
inline text::Tokens index_terms(std::string_view s) {
  text::Tokens out;
  for (auto& t : text::tokenize(s)) {
    if (!text::is_punctuation(t)) out.push_back(std::move(t));
  }
  return out;
}

class InvertedIndex {
 public:
  static constexpr int kFormatVersion = 1;

  InvertedIndex() = default;

  // Doc ids are 0-based positions in `documents`.
  explicit InvertedIndex(std::vector<std::string> documents, Bm25Params params = {})
      : documents_(std::move(documents)), params_(params) {
    lengths_.reserve(documents_.size());
    double total = 0.0;
    for (std::size_t d = 0; d < documents_.size(); ++d) {
      const auto terms = index_terms(documents_[d]);
      lengths_.push_back(terms.size());
      total += static_cast<double>(terms.size());
      std::map<std::string, std::size_t> tf;
      for (const auto& t : terms) ++tf[t];
      for (const auto& [term, n] : tf) postings_[term].push_back({d, n});
    }
    avg_length_ = documents_.empty() ? 0.0 : total / static_cast<double>(documents_.size());
  }

  std::size_t size() const noexcept { return documents_.size(); }
  const std::string& document(std::size_t id) const { return documents_.at(id); }
  std::size_t doc_length(std::size_t id) const { return lengths_.at(id); }
  double average_length() const noexcept { return avg_length_; }
  const Bm25Params& params() const noexcept { return params_; }

  const std::vector<Posting>& postings(const std::string& term) const {
    static const std::vector<Posting> kEmpty;
    auto it = postings_.find(term);
    return it == postings_.end() ? kEmpty : it->second;
  }

  // max(0, ln((N - n + 0.5) / (n + 0.5)))
  double idf(const std::string& term) const {
    const double n = static_cast<double>(postings(term).size());
    const double total = static_cast<double>(documents_.size());
    return std::max(0.0, std::log((total - n + 0.5) / (n + 0.5)));
  }

  double term_weight(std::size_t tf, std::size_t doc_len) const {
    const double f = static_cast<double>(tf);
    const double norm = avg_length_ > 0.0 ? static_cast<double>(doc_len) / avg_length_ : 0.0;
    return f * (params_.k1 + 1.0) / (f + params_.k1 * (1.0 - params_.b + params_.b * norm));
  }

  // BM25 over the distinct query terms. Only positive scores are returned;
  // ties go to the lower doc id.
  std::vector<ScoredDoc> retrieve(std::string_view query, std::size_t top_k = 5) const {
    if (top_k < 1) fail(ErrorKind::kValidation, "retrieve: top_k must be >= 1");
    const auto raw = index_terms(query);
    const std::set<std::string> terms(raw.begin(), raw.end());
    std::unordered_map<std::size_t, double> acc;
    for (const auto& term : terms) {
      const double w = idf(term);
      if (w <= 0.0) continue;
      for (const auto& p : postings(term)) acc[p.doc] += w * term_weight(p.tf, lengths_[p.doc]);
    }
    std::vector<ScoredDoc> ranked;
    for (const auto& [doc, score] : acc) {
      if (score > 0.0) ranked.push_back({doc, score});
    }
    std::sort(ranked.begin(), ranked.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
      return a.score != b.score ? a.score > b.score : a.doc < b.doc;
    });
    if (ranked.size() > top_k) ranked.resize(top_k);
    return ranked;
  }

  // JSONL sidecar: a header line, then one {"id","text"} line per document.
  // Postings are rebuilt on load.
  void save(std::ostream& out) const {
    nlohmann::ordered_json header;
    header["format"] = "ktl-bm25-index";
    header["version"] = kFormatVersion;
    header["k1"] = params_.k1;
    header["b"] = params_.b;
    header["documents"] = documents_.size();
    out << header.dump() << '\n';
    for (std::size_t d = 0; d < documents_.size(); ++d) {
      nlohmann::ordered_json j;
      j["id"] = d;
      j["text"] = documents_[d];
      out << j.dump() << '\n';
    }
  }

  static InvertedIndex load(std::istream& in) {
    std::vector<std::string> docs;
    Bm25Params params;
    std::size_t expected = 0;
    bool header_seen = false;
    for_each_line(in, [&](std::string_view line, std::size_t n) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception&) {
        fail(ErrorKind::kParse, "index line " + std::to_string(n) + ": malformed JSON");
      }
      if (!header_seen) {
        if (j.value("format", "") != "ktl-bm25-index" || j.value("version", 0) != kFormatVersion) {
          fail(ErrorKind::kSchema, "index: unsupported format or version");
        }
        params.k1 = j.at("k1").get<double>();
        params.b = j.at("b").get<double>();
        expected = j.at("documents").get<std::size_t>();
        header_seen = true;
        return;
      }
      if (j.at("id").get<std::size_t>() != docs.size()) fail(ErrorKind::kSchema, "index: non-contiguous doc ids");
      docs.push_back(j.at("text").get<std::string>());
    });
    if (!header_seen || docs.size() != expected) fail(ErrorKind::kSchema, "index: truncated or missing header");
    return InvertedIndex(std::move(docs), params);
  }

 private:
  std::vector<std::string> documents_;
  std::vector<std::size_t> lengths_;
  double avg_length_ = 0.0;
  Bm25Params params_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
};

}  // namespace ktl::retrieval
