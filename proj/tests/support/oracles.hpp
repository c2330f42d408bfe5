#pragma once

// Independent brute-force reimplementations used as test oracles. They
// share only the tokenizer/chunker with the library and deliberately use
// the most direct formulation.

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ktl/core/fact_set.hpp"
#include "ktl/qa/qa_item.hpp"
#include "ktl/text/chunker.hpp"

namespace oracle {

using Key = std::tuple<std::string, std::string, std::string>;

inline Key key(const ktl::Triple& t) { return {t.h.text(), t.r.text(), t.t.text()}; }

inline std::vector<Key> keys(const std::vector<ktl::Triple>& ts) {
  std::vector<Key> out;
  for (const auto& t : ts) out.push_back(key(t));
  return out;
}

// Every sentence pair, every shared chunk.
inline std::vector<Key> ccg(const std::vector<std::string>& corpus) {
  std::vector<std::set<std::string>> chunks;
  for (const auto& s : corpus) {
    const auto c = ktl::text::extract_chunks(s);
    chunks.emplace_back(c.begin(), c.end());
  }
  std::vector<Key> out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (std::size_t j = i + 1; j < corpus.size(); ++j) {
      std::vector<std::string> shared;
      std::set_intersection(chunks[i].begin(), chunks[i].end(), chunks[j].begin(), chunks[j].end(),
                            std::back_inserter(shared));
      for (const auto& c : shared) {
        out.emplace_back(ktl::Phrase(corpus[i]).text(), ktl::Phrase(corpus[j]).text(), c);
      }
    }
  }
  return out;
}

// Every directed path a -> b -> c in the forward-edge story DAG, found by
// enumerating all ordered index triples and keeping those with edges.
inline std::vector<Key> dsg(const std::vector<std::vector<std::string>>& stories) {
  std::vector<Key> out;
  for (const auto& story : stories) {
    const std::size_t n = story.size();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c) {
          if (a < b && b < c) {
            out.emplace_back(ktl::Phrase(story[a]).text(), ktl::Phrase(story[b]).text(), ktl::Phrase(story[c]).text());
          }
        }
  }
  return out;
}

inline std::size_t choose3(std::size_t k) { return k < 3 ? 0 : k * (k - 1) * (k - 2) / 6; }

// Keep iff chunks(h) u chunks(r) u chunks(t) meets the union of QA chunks.
inline std::vector<Key> curriculum(const std::vector<ktl::Triple>& triples, const std::vector<ktl::qa::QAItem>& items) {
  std::set<std::string> target;
  for (const auto& it : items) {
    std::vector<std::string> texts{it.question};
    if (it.context) texts.push_back(*it.context);
    texts.insert(texts.end(), it.options.begin(), it.options.end());
    for (const auto& s : texts) {
      const auto c = ktl::text::extract_chunks(s);
      target.insert(c.begin(), c.end());
    }
  }
  std::vector<Key> out;
  for (const auto& t : triples) {
    std::set<std::string> mine;
    for (const auto* p : {&t.h, &t.r, &t.t}) {
      const auto c = ktl::text::extract_chunks(p->text());
      mine.insert(c.begin(), c.end());
    }
    std::vector<std::string> both;
    std::set_intersection(mine.begin(), mine.end(), target.begin(), target.end(), std::back_inserter(both));
    if (!both.empty()) out.push_back(key(t));
  }
  return out;
}

// Every returned phrase must produce a non-member when substituted, and
// none may equal the true value.
inline bool negatives_valid(const ktl::FactSet& facts, const ktl::Triple& triple, ktl::Direction d,
                            const std::vector<ktl::Phrase>& negatives) {
  std::set<std::string> seen;
  for (const auto& n : negatives) {
    if (n == triple.field(d)) return false;
    if (!seen.insert(n.text()).second) return false;
    bool member = false;
    for (const auto& f : facts.triples()) {
      ktl::Triple sub = triple;
      sub.field(d) = n;
      if (f.h.text() == sub.h.text() && f.r.text() == sub.r.text() && f.t.text() == sub.t.text()) member = true;
    }
    if (member) return false;
  }
  return true;
}

// BM25 from its textbook definition over whitespace-split lowercase
// documents without punctuation.
struct Bm25Hand {
  std::vector<std::vector<std::string>> docs;
  double k1 = 1.2;
  double b = 0.75;

  double score(const std::vector<std::string>& query, std::size_t d) const {
    double avg = 0.0;
    for (const auto& doc : docs) avg += static_cast<double>(doc.size());
    avg /= static_cast<double>(docs.size());
    const std::set<std::string> terms(query.begin(), query.end());
    double s = 0.0;
    for (const auto& term : terms) {
      double n = 0.0;
      for (const auto& doc : docs) n += std::count(doc.begin(), doc.end(), term) > 0 ? 1.0 : 0.0;
      const double N = static_cast<double>(docs.size());
      const double idf = std::max(0.0, std::log((N - n + 0.5) / (n + 0.5)));
      const double tf = static_cast<double>(std::count(docs[d].begin(), docs[d].end(), term));
      const double len = static_cast<double>(docs[d].size());
      s += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len / avg));
    }
    return s;
  }
};

}  // namespace oracle
