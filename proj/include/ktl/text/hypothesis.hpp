#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "ktl/text/lexicon.hpp"
#include "ktl/text/normalize.hpp"
#include "ktl/util/error.hpp"

namespace ktl::text {

struct WhRule {
  std::vector<std::string> pattern;  // literal words or "*"
  std::string templ;
};

class WhRuleTable {
 public:
  static WhRuleTable from_text(std::string_view text) {
    WhRuleTable table;
    for (const auto& line : resource_lines(text)) {
      const auto sep = line.find("|||");
      if (sep == std::string::npos) fail(ErrorKind::kParse, "wh rule without '|||': " + line);
      WhRule rule;
      rule.pattern = split_words(normalize(line.substr(0, sep)));
      rule.templ = normalize(line.substr(sep + 3));
      if (rule.pattern.empty()) fail(ErrorKind::kParse, "wh rule with empty pattern: " + line);
      table.rules_.push_back(std::move(rule));
    }
    std::stable_sort(table.rules_.begin(), table.rules_.end(),
                     [](const WhRule& a, const WhRule& b) { return a.pattern.size() > b.pattern.size(); });
    return table;
  }

  static WhRuleTable from_file(const std::string& path) {
    return from_text(path.empty() ? std::string(bundled::kWhRules) : read_file(path));
  }

  static const WhRuleTable& bundled() {
    static const WhRuleTable table = from_text(bundled::kWhRules);
    return table;
  }

  const std::vector<WhRule>& rules() const noexcept { return rules_; }

  static std::vector<std::string> split_words(const std::string& s) {
    std::vector<std::string> words;
    std::size_t pos = 0;
    while (pos < s.size()) {
      std::size_t end = s.find(' ', pos);
      if (end == std::string::npos) end = s.size();
      if (end > pos) words.push_back(s.substr(pos, end - pos));
      pos = end + 1;
    }
    return words;
  }

 private:
  std::vector<WhRule> rules_;
};

inline constexpr std::array<std::string_view, 7> kWhWords = {"what", "which", "who", "where", "when", "why", "how"};

namespace detail {

inline std::string join_words(const std::vector<std::string>& words, std::size_t begin) {
  std::string out;
  for (std::size_t i = begin; i < words.size(); ++i) {
    if (!out.empty()) out.push_back(' ');
    out += words[i];
  }
  return out;
}

inline std::string fill_template(const std::string& templ, const std::vector<std::string>& captures,
                                 const std::string& rest, const std::string& option) {
  std::string out;
  std::size_t i = 0;
  while (i < templ.size()) {
    if (templ[i] == '{') {
      const auto close = templ.find('}', i);
      if (close != std::string::npos) {
        const std::string key = templ.substr(i + 1, close - i - 1);
        if (key == "rest") {
          out += rest;
        } else if (key == "option") {
          out += option;
        } else if (!key.empty() && std::all_of(key.begin(), key.end(), [](char c) { return c >= '0' && c <= '9'; })) {
          const std::size_t idx = std::stoul(key);
          if (idx >= 1 && idx <= captures.size()) out += captures[idx - 1];
        }
        i = close + 1;
        continue;
      }
    }
    out.push_back(templ[i++]);
  }
  return normalize(out);
}

inline std::string strip_question_mark(std::string s) {
  while (!s.empty() && (s.back() == '?' || s.back() == ' ')) s.pop_back();
  return s;
}

}  // namespace detail

// Rewrites a question plus one answer option into a declarative statement.
// Blank-fill first, then the wh-rule table, then plain concatenation.
// Output is normalized (lowercase, collapsed whitespace); a terminal "?"
// becomes ".". Agreement is not repaired.
inline std::string question_to_hypothesis(std::string_view question, std::string_view option,
                                          const WhRuleTable& rules = WhRuleTable::bundled()) {
  const std::string q = normalize(question);
  const std::string opt = normalize(option);
  if (q.empty()) fail(ErrorKind::kValidation, "question_to_hypothesis: empty question");

  if (const auto blank = q.find('_'); blank != std::string::npos) {
    auto end = blank;
    while (end < q.size() && q[end] == '_') ++end;
    return normalize(q.substr(0, blank) + opt + q.substr(end));
  }

  const bool is_question = q.back() == '?';
  const std::string body = detail::strip_question_mark(q);
  const auto words = WhRuleTable::split_words(body);
  if (!words.empty() && std::find(kWhWords.begin(), kWhWords.end(), words.front()) != kWhWords.end()) {
    for (const auto& rule : rules.rules()) {
      if (rule.pattern.size() > words.size()) continue;
      std::vector<std::string> captures;
      bool matched = true;
      for (std::size_t i = 0; i < rule.pattern.size(); ++i) {
        if (rule.pattern[i] == "*") {
          captures.push_back(words[i]);
        } else if (rule.pattern[i] != words[i]) {
          matched = false;
          break;
        }
      }
      if (!matched) continue;
      const std::string rest = detail::join_words(words, rule.pattern.size());
      std::string out = detail::fill_template(rule.templ, captures, rest, opt);
      if (!out.empty()) return out + ".";
    }
  }

  std::string head = is_question ? body + "." : q;
  return opt.empty() ? head : head + " " + opt;
}

}  // namespace ktl::text
