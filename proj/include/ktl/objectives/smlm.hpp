#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ktl/core/triple.hpp"
#include "ktl/nn/encoder.hpp"
#include "ktl/objectives/krl.hpp"
#include "ktl/objectives/losses.hpp"
#include "ktl/text/vocabulary.hpp"

namespace ktl::objectives {

struct MaskedInput {
  text::TokenIds ids;                   // [cls] h [sep] r [sep] t [sep] with one field masked
  std::vector<std::size_t> targets;     // original ids at the masked positions
  std::vector<std::size_t> positions;   // ascending, contiguous
};

inline std::size_t layout_length(const Triple& triple) {
  return triple.h.tokens().size() + triple.r.tokens().size() + triple.t.tokens().size() + 4;
}

// Replaces every token of the generated field by [mask].
inline MaskedInput smlm_mask(const text::Vocabulary& vocab, const Triple& triple, Direction direction,
                             std::size_t max_length) {
  const std::size_t length = layout_length(triple);
  if (length > max_length) {
    Direction longest = Direction::kGenerateHead;
    for (auto d : kAllDirections) {
      if (triple.field(d).tokens().size() > triple.field(longest).tokens().size()) longest = d;
    }
    fail(ErrorKind::kLength, "masked input has " + std::to_string(length) + " positions, over max_length " +
                                 std::to_string(max_length) + " (longest field " +
                                 std::string(field_name(longest)) + ")");
  }
  MaskedInput out;
  out.ids.reserve(length);
  out.ids.push_back(text::kClsId);
  for (auto d : kAllDirections) {
    for (auto id : vocab.encode(triple.field(d).tokens())) {
      if (d == direction) {
        out.positions.push_back(out.ids.size());
        out.targets.push_back(static_cast<std::size_t>(id));
        out.ids.push_back(text::kMaskId);
      } else {
        out.ids.push_back(id);
      }
    }
    out.ids.push_back(text::kSepId);
  }
  return out;
}

struct SmlmHead {
  Linear projection;  // dim x vocab

  static SmlmHead make(std::size_t dim, std::size_t vocab_size, double std_dev, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x534D4C4D));
    return {Linear::make(dim, vocab_size, std_dev, rng)};
  }

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    Linear::visit(self.projection, prefix + "projection", f);
  }
};

// Unmasking logits for every masked position, predicted jointly from a
// single forward pass.
inline Var smlm_logits(Tape& tape, const EncoderParams& encoder, const SmlmHead& head, const MaskedInput& input) {
  if (input.positions.empty()) fail(ErrorKind::kValidation, "smlm: no masked positions");
  const nn::EncodedSequence enc = nn::encode(tape, encoder, input.ids);
  return head.projection(nn::gather_rows(enc.per_token, input.positions));
}

inline Var smlm_forward_loss(Tape& tape, const EncoderParams& encoder, const SmlmHead& head,
                             const MaskedInput& input) {
  return smlm_loss(smlm_logits(tape, encoder, head, input), input.targets);
}

}  // namespace ktl::objectives
