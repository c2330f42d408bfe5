#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "ktl/text/chunker.hpp"
#include "ktl/text/hypothesis.hpp"
#include "ktl/text/lexicon_data.hpp"
#include "ktl/text/tokenizer.hpp"
#include "ktl/text/vocabulary.hpp"

using namespace ktl;
using namespace ktl::text;

TEST(Tokenize, DetachesTrailingPunctuation) {
  EXPECT_EQ(tokenize("Clouds regulate."), (Tokens{"clouds", "regulate", "."}));
}

TEST(Tokenize, EmptyInput) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, PossessiveClitic) { EXPECT_EQ(tokenize("PersonX's trust"), (Tokens{"personx", "'s", "trust"})); }

TEST(Tokenize, IdempotentOnDetokenizedOutput) {
  for (const char* s : {"PersonX puts PersonX's trust in PersonY.", "How is PersonX seen as?", "a,b;c  (d)!",
                        "Warm moist air, from the Pacific Ocean... brings fog"}) {
    const Tokens once = tokenize(s);
    EXPECT_EQ(tokenize(detokenize(once)), once) << s;
  }
}

TEST(Normalize, CollapsesWhitespaceAndLowercases) {
  EXPECT_EQ(normalize("  Hello \t  World \n"), "hello world");
  EXPECT_EQ(normalize("ÉCOLE Café"), "école café");
}

TEST(Normalize, ComposesToNfc) {
  // "e" + combining acute accent composes to U+00E9.
  EXPECT_EQ(normalize("caf\x65\xCC\x81"), "caf\xC3\xA9");
}

TEST(Chunker, WorkedExampleReproducesExactly) {
  const ChunkSet expected{"clouds", "global engine", "atmosphere", "ocean", "regulate"};
  EXPECT_EQ(extract_chunks("Clouds regulate the global engine of atmosphere and ocean."), expected);
}

TEST(Chunker, AllStopwordsGiveNothing) { EXPECT_TRUE(extract_chunks("the of and").empty()); }

TEST(Chunker, HandDerivedSpans) {
  // "warm moist air" is a content span; "brings" is a verb; "fog" is a span.
  // The three-token span also contributes its head word.
  const ChunkSet expected{"warm moist air", "air", "brings", "fog"};
  EXPECT_EQ(extract_chunks("warm moist air brings fog"), expected);
}

TEST(Chunker, SharedConceptAcrossTheTwoSentences) {
  const auto first = extract_chunks(
      "Warm moist air from the Pacific Ocean brings fog and low stratus clouds to the maritime zone.");
  EXPECT_TRUE(first.count("clouds"));
  EXPECT_TRUE(extract_chunks("Clouds regulate the global engine of atmosphere and ocean.").count("clouds"));
}

TEST(Chunker, LongSpansAreSplitAtFourTokens) {
  const auto chunks = extract_chunks("alpha beta gamma delta epsilon zeta");
  EXPECT_TRUE(chunks.count("alpha beta gamma delta"));
  EXPECT_TRUE(chunks.count("epsilon zeta"));
  for (const auto& c : chunks) EXPECT_LE(tokenize(c).size(), kMaxChunkTokens);
}

TEST(Chunker, InvariantToCaseAndOuterWhitespace) {
  const std::string s = "Clouds regulate the global engine of atmosphere and ocean.";
  EXPECT_EQ(extract_chunks("   " + s + "\t "), extract_chunks(s));
  std::string upper = s;
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  EXPECT_EQ(extract_chunks(upper), extract_chunks(s));
}

TEST(Chunker, ChunksAreTokenSubsequencesWithoutStopwordBoundaries) {
  const Lexicon& lex = Lexicon::bundled();
  for (const char* s : {"Warm moist air from the Pacific Ocean brings fog and low stratus clouds to the maritime zone.",
                        "The quick brown fox jumps over the lazy dog near the old river bank.",
                        "Plants need sunlight, water and carbon dioxide to make food."}) {
    const Tokens toks = tokenize(s);
    for (const auto& chunk : extract_chunks(s)) {
      const Tokens ct = tokenize(chunk);
      ASSERT_FALSE(ct.empty());
      EXPECT_FALSE(lex.is_stopword(ct.front())) << chunk;
      EXPECT_FALSE(lex.is_stopword(ct.back())) << chunk;
      EXPECT_NE(std::search(toks.begin(), toks.end(), ct.begin(), ct.end()), toks.end()) << chunk;
    }
  }
}

TEST(Hypothesis, BlankFill) {
  EXPECT_EQ(question_to_hypothesis("Clouds regulate the global engine of ___ and ocean.", "atmosphere"),
            "clouds regulate the global engine of atmosphere and ocean.");
}

TEST(Hypothesis, WhRuleWithoutAgreementRepair) {
  EXPECT_EQ(question_to_hypothesis("What regulates the global engine of atmosphere and ocean?", "clouds"),
            "clouds regulates the global engine of atmosphere and ocean.");
}

TEST(Hypothesis, ConcatenationFallback) {
  EXPECT_EQ(question_to_hypothesis("It was sunny.", "so we walked"), "it was sunny. so we walked");
}

TEST(Hypothesis, CaptureRule) {
  EXPECT_EQ(question_to_hypothesis("How is PersonX seen as?", "faithful"), "personx is seen as faithful.");
}

TEST(Hypothesis, NeverEmptyForNonEmptyQuestion) {
  for (const char* q : {"?", "what?", "why", "_", "how is?"}) {
    EXPECT_FALSE(question_to_hypothesis(q, "x").empty()) << q;
  }
  EXPECT_THROW(question_to_hypothesis("", "x"), Error);
}

TEST(Vocabulary, ReservedIdsAndOrdering) {
  const std::vector<Tokens> corpus{{"b", "a", "c"}, {"a", "b"}, {"a", "d"}};
  const Vocabulary v = Vocabulary::build(corpus, 2);
  EXPECT_EQ(v.token(kClsId), "[cls]");
  EXPECT_EQ(v.token(kSepId), "[sep]");
  EXPECT_EQ(v.token(kMaskId), "[mask]");
  EXPECT_EQ(v.token(kUnkId), "[unk]");
  EXPECT_EQ(v.token(kPadId), "[pad]");
  ASSERT_EQ(v.size(), 7u);
  EXPECT_EQ(v.token(5), "a");  // count 3
  EXPECT_EQ(v.token(6), "b");  // count 2
  EXPECT_EQ(v.id("c"), kUnkId);
  EXPECT_EQ(v, Vocabulary::build(corpus, 2));
  EXPECT_EQ(Vocabulary::from_json(v.to_json()), v);
}

TEST(Vocabulary, CountTiesBreakLexicographically) {
  const Vocabulary v = Vocabulary::build(std::vector<Tokens>{{"zeta", "alpha", "mid"}}, 1);
  EXPECT_EQ(v.token(5), "alpha");
  EXPECT_EQ(v.token(6), "mid");
  EXPECT_EQ(v.token(7), "zeta");
}

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST(Lexicon, EmbeddedCopiesMatchResourceFiles) {
  EXPECT_EQ(slurp(KTL_RESOURCE_DIR "/stopwords.txt"), bundled::kStopwords);
  EXPECT_EQ(slurp(KTL_RESOURCE_DIR "/verbs.txt"), bundled::kVerbs);
  EXPECT_EQ(slurp(KTL_RESOURCE_DIR "/wh_rules.txt"), bundled::kWhRules);
}

TEST(Lexicon, VerbInflections) {
  const Lexicon& lex = Lexicon::bundled();
  EXPECT_TRUE(lex.is_verb("regulate"));
  EXPECT_TRUE(lex.is_verb("regulates"));
  EXPECT_TRUE(lex.is_verb("regulated"));
  EXPECT_TRUE(lex.is_verb("regulating"));
  EXPECT_FALSE(lex.is_verb("clouds"));
}
