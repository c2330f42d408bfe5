#pragma once

#include <vector>

#include "ktl/core/triple.hpp"
#include "ktl/qa/qa_item.hpp"
#include "ktl/text/chunker.hpp"
#include "ktl/util/error.hpp"

namespace ktl::graph {

// Union of chunks over every context, question and option.
inline text::ChunkSet target_chunks(const std::vector<qa::QAItem>& items,
                                    const text::Lexicon& lexicon = text::Lexicon::bundled()) {
  text::ChunkSet target;
  auto add = [&](const std::string& s) {
    for (auto& c : text::extract_chunks(s, lexicon)) target.insert(c);
  };
  for (const auto& item : items) {
    if (item.context) add(*item.context);
    add(item.question);
    for (const auto& o : item.options) add(o);
  }
  return target;
}

// Keeps triples sharing at least one chunk with the target set; input
// order is preserved.
class CurriculumFilter {
 public:
  CurriculumFilter(text::ChunkSet target, const text::Lexicon& lexicon = text::Lexicon::bundled())
      : target_(std::move(target)), lexicon_(&lexicon) {
    if (target_.empty()) fail(ErrorKind::kEmptyTarget, "curriculum filter: empty target chunk set");
  }

  bool keep(const Triple& t) const {
    for (const Phrase* p : {&t.h, &t.r, &t.t}) {
      for (const auto& c : text::extract_chunks(p->text(), *lexicon_)) {
        if (target_.count(c)) return true;
      }
    }
    return false;
  }

  const text::ChunkSet& target() const noexcept { return target_; }

 private:
  text::ChunkSet target_;
  const text::Lexicon* lexicon_;
};

inline std::vector<Triple> curriculum_filter(const std::vector<Triple>& triples, const std::vector<qa::QAItem>& items,
                                             const text::Lexicon& lexicon = text::Lexicon::bundled()) {
  if (items.empty()) fail(ErrorKind::kValidation, "curriculum_filter: no QA items");
  const CurriculumFilter filter(target_chunks(items, lexicon), lexicon);
  std::vector<Triple> out;
  for (const auto& t : triples) {
    if (filter.keep(t)) out.push_back(t);
  }
  return out;
}

}  // namespace ktl::graph
