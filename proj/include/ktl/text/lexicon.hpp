#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ktl/text/lexicon_data.hpp"
#include "ktl/text/normalize.hpp"
#include "ktl/util/digest.hpp"

namespace ktl::text {

// Non-empty, non-comment lines of a one-entry-per-line resource.
inline std::vector<std::string> resource_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (!line.empty() && line.front() != '#') lines.emplace_back(line);
    pos = end + 1;
  }
  return lines;
}

namespace detail {

inline bool is_vowel(char c) noexcept { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

inline bool ends_with(std::string_view s, std::string_view suffix) noexcept {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace detail

// Base form plus regular -s, -ed and -ing inflections.
inline std::vector<std::string> inflect_verb(const std::string& base) {
  using detail::ends_with;
  std::vector<std::string> forms{base};
  if (base.size() < 2) return forms;
  const char last = base.back();
  const bool consonant_y = last == 'y' && !detail::is_vowel(base[base.size() - 2]);
  const std::string stem = base.substr(0, base.size() - 1);

  if (consonant_y) {
    forms.push_back(stem + "ies");
  } else if (ends_with(base, "s") || ends_with(base, "x") || ends_with(base, "z") || ends_with(base, "ch") ||
             ends_with(base, "sh") || ends_with(base, "o")) {
    forms.push_back(base + "es");
  } else {
    forms.push_back(base + "s");
  }

  if (consonant_y) {
    forms.push_back(stem + "ied");
  } else if (last == 'e') {
    forms.push_back(base + "d");
  } else {
    forms.push_back(base + "ed");
  }

  if (last == 'e' && !ends_with(base, "ee")) {
    forms.push_back(stem + "ing");
  } else {
    forms.push_back(base + "ing");
  }
  return forms;
}

// Word lists driving the chunker: stopwords delimit concept spans; verbs
// delimit spans and form one-token chunks of their own.
struct Lexicon {
  std::unordered_set<std::string> stopwords;
  std::unordered_set<std::string> verbs;

  bool is_stopword(const std::string& token) const { return stopwords.count(token) > 0; }
  bool is_verb(const std::string& token) const { return verbs.count(token) > 0; }

  static Lexicon from_text(std::string_view stopword_text, std::string_view verb_text) {
    Lexicon lex;
    for (auto& w : resource_lines(stopword_text)) lex.stopwords.insert(normalize(w));
    for (auto& v : resource_lines(verb_text)) {
      for (auto& form : inflect_verb(normalize(v))) lex.verbs.insert(form);
    }
    return lex;
  }

  static Lexicon from_files(const std::string& stopword_path, const std::string& verb_path) {
    const std::string stop = stopword_path.empty() ? std::string(bundled::kStopwords) : read_file(stopword_path);
    const std::string verbs = verb_path.empty() ? std::string(bundled::kVerbs) : read_file(verb_path);
    return from_text(stop, verbs);
  }

  static const Lexicon& bundled() {
    static const Lexicon lex = from_text(bundled::kStopwords, bundled::kVerbs);
    return lex;
  }
};

}  // namespace ktl::text
