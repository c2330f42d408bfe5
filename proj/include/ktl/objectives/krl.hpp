#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>

#include "ktl/core/triple.hpp"
#include "ktl/nn/encoder.hpp"
#include "ktl/objectives/losses.hpp"
#include "ktl/text/vocabulary.hpp"

namespace ktl::objectives {

using nn::EncoderParams;
using nn::FeedForward;
using nn::Linear;

// Projection heads for one direction: each input representation goes
// through its own feedforward map, the target through a linear map, and
// the combiner maps the concatenated projected inputs to the generated
// representation.
struct KrlDirectionHeads {
  FeedForward first_input;
  FeedForward second_input;
  Linear output;
  FeedForward combiner;

  // The maps that emit the compared vectors start at out_std.
  static KrlDirectionHeads make(std::size_t dim, double std_dev, double out_std, Rng& rng) {
    KrlDirectionHeads h;
    h.first_input = FeedForward::make(dim, dim, dim, std_dev, rng);
    h.second_input = FeedForward::make(dim, dim, dim, std_dev, rng);
    h.output = Linear::make(dim, dim, out_std, rng);
    h.combiner.first = Linear::make(2 * dim, dim, std_dev, rng);
    h.combiner.second = Linear::make(dim, dim, out_std, rng);
    return h;
  }

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    FeedForward::visit(self.first_input, prefix + ".first_input", f);
    FeedForward::visit(self.second_input, prefix + ".second_input", f);
    Linear::visit(self.output, prefix + ".output", f);
    FeedForward::visit(self.combiner, prefix + ".combiner", f);
  }
};

struct KrlHeads {
  std::array<KrlDirectionHeads, 3> directions;

  static KrlHeads make(std::size_t dim, double std_dev, double out_std, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x4B524C));
    KrlHeads heads;
    for (auto d : kAllDirections) heads.directions[index_of(d)] = KrlDirectionHeads::make(dim, std_dev, out_std, rng);
    return heads;
  }

  const KrlDirectionHeads& operator[](Direction d) const { return directions[index_of(d)]; }

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    for (auto d : kAllDirections) {
      KrlDirectionHeads::visit(self.directions[index_of(d)], prefix + std::string(to_string(d)), f);
    }
  }
};

// The two input fields for a direction, in slot order.
inline std::pair<Direction, Direction> input_fields(Direction d) noexcept {
  switch (d) {
    case Direction::kGenerateHead:
      return {Direction::kGenerateRelation, Direction::kGenerateTail};
    case Direction::kGenerateRelation:
      return {Direction::kGenerateHead, Direction::kGenerateTail};
    case Direction::kGenerateTail:
      break;
  }
  return {Direction::kGenerateHead, Direction::kGenerateRelation};
}

struct KrlOutput {
  Var generated;  // combiner output
  Var target;     // projected encoding of the true field
};

// Combines two pooled inputs and projects a pooled target. The maps are
// callables so tests can substitute stubs.
template <class FirstMap, class SecondMap, class OutputMap, class Combiner>
KrlOutput krl_project(Var first, Var second, Var target, FirstMap&& first_map, SecondMap&& second_map,
                      OutputMap&& output_map, Combiner&& combiner) {
  return {combiner(nn::concat_cols({first_map(first), second_map(second)})), output_map(target)};
}

inline KrlOutput krl_project(const KrlDirectionHeads& heads, Var first, Var second, Var target) {
  return krl_project(first, second, target, heads.first_input, heads.second_input, heads.output, heads.combiner);
}

// Pooled [cls] representation of a phrase encoded as [cls] tokens [sep].
inline Var encode_phrase(Tape& tape, const EncoderParams& encoder, const text::Vocabulary& vocab,
                         const Phrase& phrase, std::string_view field_name = "phrase") {
  const text::TokenIds ids = nn::phrase_ids(vocab, phrase.tokens());
  if (ids.size() > encoder.config.max_length) {
    fail(ErrorKind::kLength, std::string(field_name) + " has " + std::to_string(phrase.tokens().size()) +
                                 " tokens; the encoder accepts at most " +
                                 std::to_string(encoder.config.max_length - 2));
  }
  return nn::encode(tape, encoder, ids).pooled;
}

inline std::string_view field_name(Direction d) noexcept {
  switch (d) {
    case Direction::kGenerateHead:
      return "head (context)";
    case Direction::kGenerateRelation:
      return "relation (question)";
    case Direction::kGenerateTail:
      return "tail (option)";
  }
  return "?";
}

inline KrlOutput krl_forward(Tape& tape, const EncoderParams& encoder, const text::Vocabulary& vocab,
                             const KrlHeads& heads, Direction direction, const Triple& triple) {
  const auto [a, b] = input_fields(direction);
  Var first = encode_phrase(tape, encoder, vocab, triple.field(a), field_name(a));
  Var second = encode_phrase(tape, encoder, vocab, triple.field(b), field_name(b));
  Var target = encode_phrase(tape, encoder, vocab, triple.field(direction), field_name(direction));
  return krl_project(heads[direction], first, second, target);
}

}  // namespace ktl::objectives
