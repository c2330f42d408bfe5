#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <utility>

#include "ktl/text/normalize.hpp"
#include "ktl/text/tokenizer.hpp"
#include "ktl/util/error.hpp"

namespace ktl {

// Normalized free-text phrase with its tokenization.
class Phrase {
 public:
  Phrase() = default;
  explicit Phrase(std::string_view raw) : text_(text::normalize(raw)), tokens_(text::tokenize(text_)) {}

  const std::string& text() const noexcept { return text_; }
  const text::Tokens& tokens() const noexcept { return tokens_; }
  bool empty() const noexcept { return text_.empty(); }

  friend bool operator==(const Phrase& a, const Phrase& b) { return a.text_ == b.text_; }
  friend bool operator<(const Phrase& a, const Phrase& b) { return a.text_ < b.text_; }

 private:
  std::string text_;
  text::Tokens tokens_;
};

enum class Direction { kGenerateHead = 0, kGenerateRelation = 1, kGenerateTail = 2 };

inline constexpr std::array<Direction, 3> kAllDirections = {Direction::kGenerateHead, Direction::kGenerateRelation,
                                                            Direction::kGenerateTail};

inline constexpr std::size_t index_of(Direction d) noexcept { return static_cast<std::size_t>(d); }

inline std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::kGenerateHead:
      return "head";
    case Direction::kGenerateRelation:
      return "relation";
    case Direction::kGenerateTail:
      return "tail";
  }
  return "?";
}

struct Triple {
  Phrase h;
  Phrase r;
  Phrase t;

  Triple() = default;
  Triple(std::string_view head, std::string_view relation, std::string_view tail)
      : h(head), r(relation), t(tail) {}
  Triple(Phrase head, Phrase relation, Phrase tail) : h(std::move(head)), r(std::move(relation)), t(std::move(tail)) {}

  // The field produced in the given direction.
  const Phrase& field(Direction d) const noexcept {
    switch (d) {
      case Direction::kGenerateHead:
        return h;
      case Direction::kGenerateRelation:
        return r;
      case Direction::kGenerateTail:
        return t;
    }
    return t;
  }

  Phrase& field(Direction d) noexcept { return const_cast<Phrase&>(std::as_const(*this).field(d)); }

  Triple with_field(Direction d, Phrase value) const {
    Triple copy = *this;
    copy.field(d) = std::move(value);
    return copy;
  }

  void validate() const {
    if (h.empty() || r.empty() || t.empty()) {
      fail(ErrorKind::kValidation, "triple has an empty field: (" + h.text() + ", " + r.text() + ", " + t.text() + ")");
    }
  }

  friend bool operator==(const Triple& a, const Triple& b) { return a.h == b.h && a.r == b.r && a.t == b.t; }
};

struct TripleHash {
  std::size_t operator()(const Triple& x) const noexcept {
    std::hash<std::string> hs;
    std::size_t seed = hs(x.h.text());
    seed ^= hs(x.r.text()) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    seed ^= hs(x.t.text()) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    return seed;
  }
};

}  // namespace ktl
