#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ktl/core/triple.hpp"
#include "ktl/text/chunker.hpp"
#include "ktl/util/error.hpp"
#include "ktl/util/parallel.hpp"

namespace ktl::graph {

// Common Concept Graph: chunks are vertices, sentences are edges.
struct ConceptGraph {
  std::vector<std::string> sentences;
  std::vector<text::ChunkSet> chunks;                          // per sentence id
  std::map<std::string, std::vector<std::size_t>> incidence;  // chunk -> ascending sentence ids
  std::size_t empty_sentences = 0;                            // edges with no incident vertex

  std::size_t vertex_count() const noexcept { return incidence.size(); }
  std::size_t edge_count() const noexcept { return sentences.size(); }
};

inline ConceptGraph build_concept_graph(const std::vector<std::string>& corpus,
                                        const text::Lexicon& lexicon = text::Lexicon::bundled()) {
  if (corpus.empty()) fail(ErrorKind::kValidation, "build_concept_graph: empty corpus");
  ConceptGraph g;
  g.sentences = corpus;
  g.chunks.resize(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t i) { g.chunks[i] = text::extract_chunks(corpus[i], lexicon); });
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (g.chunks[i].empty()) ++g.empty_sentences;
    for (const auto& c : g.chunks[i]) g.incidence[c].push_back(i);
  }
  return g;
}

// Emits (h = earlier sentence, r = later sentence, t = shared chunk) for
// every sentence pair sharing a chunk. Order: h id, then r id, then chunk.
template <class Sink>
void generate_ccg_triples(const ConceptGraph& g, Sink&& sink) {
  std::map<std::size_t, std::vector<const std::string*>> partners;
  for (std::size_t i = 0; i < g.sentences.size(); ++i) {
    partners.clear();
    for (const auto& c : g.chunks[i]) {
      const auto& ids = g.incidence.at(c);
      for (auto it = std::upper_bound(ids.begin(), ids.end(), i); it != ids.end(); ++it) {
        partners[*it].push_back(&c);
      }
    }
    if (partners.empty()) continue;
    const Phrase head(g.sentences[i]);
    for (const auto& [j, shared] : partners) {
      const Phrase relation(g.sentences[j]);
      for (const std::string* c : shared) sink(Triple(head, relation, Phrase(*c)));
    }
  }
}

inline std::vector<Triple> ccg_triples(const ConceptGraph& g) {
  std::vector<Triple> out;
  generate_ccg_triples(g, [&](Triple t) { out.push_back(std::move(t)); });
  return out;
}

}  // namespace ktl::graph
