#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ktl/retrieval/ir_solver.hpp"
#include "support/oracles.hpp"

using namespace ktl;
using namespace ktl::retrieval;

namespace {

const std::vector<std::string> kDocs = {"clouds regulate the atmosphere", "rocks sit on the ground",
                                        "clouds bring rain and clouds bring shade"};

std::vector<std::vector<std::string>> tokenized(const std::vector<std::string>& docs) {
  std::vector<std::vector<std::string>> out;
  for (const auto& d : docs) out.push_back(index_terms(d));
  return out;
}

}  // namespace

TEST(Bm25, SingleTermByHand) {
  const InvertedIndex index(kDocs);
  // "rocks": one of three docs, tf 1 in a 5-term doc, average length 16/3.
  const double idf = std::log((3.0 - 1.0 + 0.5) / (1.0 + 0.5));
  const double expected = idf * 1.0 * 2.2 / (1.0 + 1.2 * (0.25 + 0.75 * 5.0 / (16.0 / 3.0)));
  const auto hits = index.retrieve("rocks");
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].doc, 1u);
  EXPECT_NEAR(hits[0].score, expected, 1e-9);
}

TEST(Bm25, MultiTermAgainstOracle) {
  const InvertedIndex index(kDocs);
  const oracle::Bm25Hand hand{tokenized(kDocs)};
  for (const std::string q : {"rain shade", "atmosphere ground rain", "clouds bring rain", "the ground rocks rocks"}) {
    const auto hits = index.retrieve(q, 10);
    for (const auto& h : hits) EXPECT_NEAR(h.score, hand.score(index_terms(q), h.doc), 1e-9) << q;
    for (std::size_t d = 0; d < kDocs.size(); ++d) {
      const double s = hand.score(index_terms(q), d);
      const bool listed = std::any_of(hits.begin(), hits.end(), [&](const ScoredDoc& h) { return h.doc == d; });
      EXPECT_EQ(listed, s > 0.0) << q << " doc " << d;
    }
  }
}

TEST(Bm25, AbsentTermAndEmptyCorpus) {
  EXPECT_TRUE(InvertedIndex(kDocs).retrieve("volcano").empty());
  EXPECT_TRUE(InvertedIndex(std::vector<std::string>{}).retrieve("clouds").empty());
}

TEST(Bm25, IdenticalDocsTieToLowerId) {
  const InvertedIndex index({"a cat", "the dog barks", "the dog barks", "a bird", "a fish", "a frog"});
  const auto hits = index.retrieve("dog");
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].score, hits[1].score);
  EXPECT_EQ(hits[0].doc, 1u);
  EXPECT_EQ(hits[1].doc, 2u);
}

TEST(Bm25, MonotoneInTermFrequency) {
  const InvertedIndex index({"x y z w", "pad one", "pad two", "pad three"});
  double last = 0.0;
  for (std::size_t tf = 1; tf <= 40; ++tf) {
    const double w = index.term_weight(tf, 4);
    EXPECT_GE(w, last);
    last = w;
  }
}

TEST(Bm25, QueryOrderInvariant) {
  const InvertedIndex index(kDocs);
  const auto a = index.retrieve("ground rain atmosphere", 10);
  const auto b = index.retrieve("atmosphere ground rain", 10);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].doc, b[i].doc);
    EXPECT_EQ(a[i].score, b[i].score);
  }
}

TEST(Bm25, TopKAndValidation) {
  const InvertedIndex index({"sun a", "sun b", "sun c", "x", "y", "z", "w"});
  EXPECT_EQ(index.retrieve("sun", 2).size(), 2u);
  EXPECT_THROW(index.retrieve("sun", 0), Error);
}

TEST(Bm25, SaveLoadRoundTrip) {
  const InvertedIndex index(kDocs, {1.5, 0.5});
  std::stringstream ss;
  index.save(ss);
  const InvertedIndex back = InvertedIndex::load(ss);
  EXPECT_EQ(back.size(), index.size());
  EXPECT_EQ(back.params().k1, 1.5);
  const auto a = index.retrieve("rocks rain", 10);
  const auto b = back.retrieve("rocks rain", 10);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].score, b[i].score);
  std::stringstream bad("{\"format\":\"other\"}\n");
  EXPECT_THROW(InvertedIndex::load(bad), Error);
}

TEST(IrSolver, WorkedExample) {
  // The floored idf zeroes any term found in half the corpus, so the toy corpus is padded.
  const InvertedIndex index({"clouds regulate the atmosphere", "rocks are hard and grey", "owls hunt mice",
                             "rivers carve valleys"});
  const auto ans = ir_solver_answer(index, std::nullopt, "what regulates the atmosphere?", {"clouds", "rocks"});
  EXPECT_EQ(ans.chosen, 0u);
  EXPECT_GT(ans.confidence[0], 0.0);
  EXPECT_EQ(ans.confidence[1], 0.0);
}

TEST(IrSolver, EmptyCorpusAndTies) {
  const auto empty = ir_solver_answer(InvertedIndex(std::vector<std::string>{}), std::nullopt, "why?", {"a", "b", "c"});
  EXPECT_EQ(empty.chosen, 0u);
  const InvertedIndex index({"lamps glow with light", "candles glow with light"});
  const auto tie = ir_solver_answer(index, std::string("night"), "what can glow?", {"lamps", "candles"});
  EXPECT_EQ(tie.confidence[0], tie.confidence[1]);
  EXPECT_EQ(tie.chosen, 0u);
  for (double c : tie.confidence) EXPECT_TRUE(std::isfinite(c) && c >= 0.0);
  EXPECT_THROW(ir_solver_answer(index, std::nullopt, "q", {"only"}), Error);
}
