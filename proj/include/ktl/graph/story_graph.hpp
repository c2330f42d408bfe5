#pragma once

#include <cstddef>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "ktl/core/triple.hpp"
#include "ktl/util/error.hpp"
#include "ktl/util/io.hpp"

namespace ktl::graph {

// Directed Story Graph: each story is its own component, with an edge
// s_i -> s_j for every i < j.
struct StoryGraph {
  std::vector<std::vector<std::string>> stories;

  static bool has_edge(std::size_t from, std::size_t to) noexcept { return from < to; }
};

// Emits (s_i, s_j, s_k) for every i < j < k inside each story, in story
// order and then lexicographic index order.
template <class Sink>
void generate_dsg_triples(const StoryGraph& g, Sink&& sink) {
  for (const auto& story : g.stories) {
    const std::size_t n = story.size();
    if (n < 3) continue;
    std::vector<Phrase> phrases;
    phrases.reserve(n);
    for (const auto& s : story) phrases.emplace_back(s);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) sink(Triple(phrases[i], phrases[j], phrases[k]));
      }
    }
  }
}

inline std::vector<Triple> dsg_triples(const StoryGraph& g) {
  std::vector<Triple> out;
  generate_dsg_triples(g, [&](Triple t) { out.push_back(std::move(t)); });
  return out;
}

// Story JSONL: {"sentences": [...]} per line.
inline StoryGraph read_stories_file(const std::string& path) {
  StoryGraph g;
  for_each_line_in_file(path, [&](std::string_view line, std::size_t n) {
    if (line.find_first_not_of(" \t") == std::string_view::npos) return;
    const std::string where = "line " + std::to_string(n) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::kParse, where + "malformed JSON (" + e.what() + ")");
    }
    if (!j.is_object() || !j.contains("sentences") || !j["sentences"].is_array()) {
      fail(ErrorKind::kParse, where + "expected {\"sentences\": [...]}");
    }
    std::vector<std::string> story;
    for (const auto& s : j["sentences"]) {
      if (!s.is_string()) fail(ErrorKind::kParse, where + "sentences must be strings");
      story.push_back(s.get<std::string>());
    }
    g.stories.push_back(std::move(story));
  });
  return g;
}

}  // namespace ktl::graph
