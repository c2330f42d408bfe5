#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "ktl/core/fact_set.hpp"
#include "ktl/qa/qa_item.hpp"
#include "ktl/text/lexicon.hpp"
#include "ktl/util/rng.hpp"

namespace ktl::qa {

// Planted-knowledge benchmark: an entity is "<modifier> <kind>", a relation
// is "<attribute> <linker>", every attribute has a small closed set of
// values, and the value of an (entity, attribute) pair depends only on the
// entity's kind. Training facts cover every (kind, attribute) cell;
// evaluation asks about (entity, attribute) pairs that never occur in
// training.
struct FixtureConfig {
  std::size_t vocabulary_words = 200;
  std::size_t kinds = 4;
  std::size_t attributes = 3;
  std::size_t relation_forms = 4;  // linker words; relation pool = attributes * relation_forms
  std::size_t values_per_attribute = 4;
  std::size_t train_facts = 300;
  std::size_t eval_items = 100;
  std::uint64_t seed = 0;

  std::size_t modifiers() const noexcept {
    const std::size_t used = kinds + attributes + relation_forms + attributes * values_per_attribute;
    return vocabulary_words > used ? vocabulary_words - used : 0;
  }

  void validate() const {
    if (kinds < 2 || attributes < 2 || values_per_attribute < 2 || relation_forms < 1) {
      fail(ErrorKind::kConfig, "fixture: need at least 2 kinds, attributes and values, and 1 relation form");
    }
    if (kinds > values_per_attribute) fail(ErrorKind::kConfig, "fixture: need at least as many values per attribute as kinds");
    if (modifiers() < 2) fail(ErrorKind::kConfig, "fixture: vocabulary too small for the requested layout");
    const std::size_t cells = kinds * attributes;
    if (train_facts % cells != 0) fail(ErrorKind::kConfig, "fixture: train_facts must be a multiple of kinds*attributes");
    if (train_facts / cells + 1 > modifiers()) fail(ErrorKind::kConfig, "fixture: not enough modifiers per cell");
  }
};

struct Fixture {
  std::vector<std::string> words;     // the full word inventory
  std::vector<Triple> train;          // (entity, attribute phrase, value)
  std::vector<QAItem> eval;           // held-out pairs, distractors = other values of the attribute
  std::vector<QAItem> train_qa;       // the training facts posed as QA items
};

// Pronounceable pseudo-words, distinct and outside the bundled lexicons.
inline std::vector<std::string> pseudo_words(std::size_t count, std::uint64_t seed) {
  static constexpr std::string_view kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
                                                 "br", "dr", "gl", "kr", "pl", "sk", "st", "tr"};
  static constexpr std::string_view kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
  static constexpr std::string_view kCodas[] = {"", "", "n", "r", "l", "k", "s", "x"};
  const text::Lexicon& lex = text::Lexicon::bundled();
  Rng rng(derive_seed(seed, 0x30BD5));
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < count) {
    std::string w;
    const std::size_t syllables = 2 + uniform_index(rng, 2);
    for (std::size_t s = 0; s < syllables; ++s) {
      w += kOnsets[uniform_index(rng, std::size(kOnsets))];
      w += kVowels[uniform_index(rng, std::size(kVowels))];
    }
    w += kCodas[uniform_index(rng, std::size(kCodas))];
    if (lex.is_stopword(w) || lex.is_verb(w) || !seen.insert(w).second) continue;
    out.push_back(w);
  }
  return out;
}

inline QAItem attribute_question(const std::string& entity, const std::string& relation,
                                 const std::vector<std::string>& values, std::size_t gold, Rng& rng) {
  QAItem item;
  item.context = entity;
  item.question = relation;
  item.options = values;
  for (std::size_t i = item.options.size(); i > 1; --i) std::swap(item.options[i - 1], item.options[uniform_index(rng, i)]);
  for (std::size_t i = 0; i < item.options.size(); ++i) {
    if (item.options[i] == values[gold]) item.label = i;
  }
  return item;
}

inline Fixture make_fixture(const FixtureConfig& config) {
  config.validate();
  Fixture fx;
  fx.words = pseudo_words(config.vocabulary_words, config.seed);
  std::size_t next = 0;
  auto take = [&](std::size_t n) {
    std::vector<std::string> out(fx.words.begin() + static_cast<std::ptrdiff_t>(next),
                                 fx.words.begin() + static_cast<std::ptrdiff_t>(next + n));
    next += n;
    return out;
  };
  const auto kinds = take(config.kinds);
  const auto attribute_words = take(config.attributes);
  const auto linkers = take(config.relation_forms);
  auto relation = [&](std::size_t a, std::size_t form) { return attribute_words[a] + " " + linkers[form]; };
  std::vector<std::vector<std::string>> values;
  for (std::size_t a = 0; a < config.attributes; ++a) values.push_back(take(config.values_per_attribute));
  const auto modifiers = take(config.modifiers());

  Rng rng(derive_seed(config.seed, 0xF1C7));
  // value index of each (kind, attribute) cell; within an attribute,
  // distinct kinds get distinct values
  std::vector<std::vector<std::size_t>> truth(config.kinds, std::vector<std::size_t>(config.attributes));
  for (std::size_t a = 0; a < config.attributes; ++a) {
    std::vector<std::size_t> perm(config.values_per_attribute);
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
    for (std::size_t k = 0; k < config.kinds; ++k) truth[k][a] = perm[k];
  }
  auto entity = [&](std::size_t m, std::size_t k) { return modifiers[m] + " " + kinds[k]; };

  // Per cell: a random set of modifiers, the first ones for training and
  // one more for the held-out pool.
  const std::size_t per_cell = config.train_facts / (config.kinds * config.attributes);
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  std::vector<std::size_t> held_out_modifier;
  for (std::size_t k = 0; k < config.kinds; ++k) {
    for (std::size_t a = 0; a < config.attributes; ++a) {
      std::vector<std::size_t> mods(modifiers.size());
      for (std::size_t i = 0; i < mods.size(); ++i) mods[i] = i;
      for (std::size_t i = 0; i <= per_cell; ++i) std::swap(mods[i], mods[i + uniform_index(rng, mods.size() - i)]);
      for (std::size_t i = 0; i < per_cell; ++i) {
        const std::string e = entity(mods[i], k);
        const std::string r = relation(a, uniform_index(rng, config.relation_forms));
        fx.train.emplace_back(e, r, values[a][truth[k][a]]);
        fx.train_qa.push_back(attribute_question(e, r, values[a], truth[k][a], rng));
      }
      cells.emplace_back(k, a);
      held_out_modifier.push_back(mods[per_cell]);
    }
  }
  // Held-out items: cycle through the cells in a shuffled order so every
  // cell is asked about before any repeats, drawing fresh modifiers.
  std::vector<std::size_t> order(cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
  FactSet train_set;
  for (const auto& t : fx.train) train_set.insert(t);
  std::set<std::pair<std::size_t, std::size_t>> asked;  // (modifier, cell)
  for (std::size_t q = 0; fx.eval.size() < config.eval_items; ++q) {
    const std::size_t c = order[q % order.size()];
    const auto [k, a] = cells[c];
    std::size_t m = q < order.size() ? held_out_modifier[c] : uniform_index(rng, modifiers.size());
    const std::string r = relation(a, uniform_index(rng, config.relation_forms));
    const Triple fact(entity(m, k), r, values[a][truth[k][a]]);
    if (train_set.contains(fact) || !asked.emplace(m, c).second) continue;
    fx.eval.push_back(attribute_question(fact.h.text(), r, values[a], truth[k][a], rng));
  }
  return fx;
}

// Items for calibrating chance-level baselines: n_options generic options,
// uniformly random gold index.
inline std::vector<QAItem> calibration_items(std::size_t count, std::size_t n_options, std::uint64_t seed) {
  if (n_options < 2) fail(ErrorKind::kValidation, "calibration items need at least 2 options");
  Rng rng(derive_seed(seed, 0xCA11B));
  std::vector<QAItem> items;
  items.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    QAItem item;
    item.context = "calibration context " + std::to_string(i);
    item.question = "calibration question " + std::to_string(i);
    for (std::size_t o = 0; o < n_options; ++o) item.options.push_back("option " + std::to_string(o));
    item.label = uniform_index(rng, n_options);
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace ktl::qa
