#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "ktl/cli/run_config.hpp"
#include "ktl/objectives/training.hpp"
#include "ktl/qa/evaluate.hpp"
#include "ktl/qa/fixture.hpp"

using namespace ktl;
using namespace ktl::objectives;

namespace {

struct Planted {
  qa::Fixture fixture;
  FactSet facts;

  Planted() : fixture(qa::make_fixture(qa::FixtureConfig{})) {
    for (const auto& t : fixture.train) facts.insert(t);
  }

  KtlModel fresh(Method method) const {
    const auto config = cli::fixture_run_config(method);
    return KtlModel::init(method, build_vocabulary(facts.triples(), config.tokenizer.min_count), config.encoder, 0);
  }
};

const Planted& planted() {
  static const Planted p;
  return p;
}

Triple fact_for(const qa::QAItem& item, std::size_t option) {
  return Triple{*item.context, item.question, item.options[option]};
}

// One SMLM model trained once for the whole suite.
class PlantedSmlm : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const auto& p = planted();
    model_ = std::make_unique<KtlModel>(p.fresh(Method::kSmlm));
    history_ = train_model(*model_, p.facts, cli::fixture_run_config(Method::kSmlm).train_config(0));
  }
  static void TearDownTestSuite() { model_.reset(); }

  static std::unique_ptr<KtlModel> model_;
  static nn::TrainHistory history_;
};

std::unique_ptr<KtlModel> PlantedSmlm::model_;
nn::TrainHistory PlantedSmlm::history_;

}  // namespace

TEST(PlantedInit, SmlmLossNearLogTwoOfVocabulary) {
  const auto& p = planted();
  const KtlModel model = p.fresh(Method::kSmlm);
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < p.fixture.train.size(); i += 5) {
    for (auto d : kAllDirections) {
      total += model.distance(d, p.fixture.train[i]);
      ++n;
    }
  }
  const double expected = std::log2(static_cast<double>(model.vocab.size()));
  EXPECT_NEAR(total / static_cast<double>(n), expected, 0.10 * expected);
}

TEST(PlantedInit, NceLossNearLogOfCandidates) {
  const auto& p = planted();
  for (Method m : {Method::kKrlNceCos, Method::kKrlNceL2}) {
    const KtlModel model = p.fresh(m);
    double total = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < p.fixture.train.size(); i += 5) {
      for (auto d : kAllDirections) {
        nn::Tape tape(false);
        total += krl_example_loss(tape, model, p.facts, p.fixture.train[i], d, 10, i).scalar();
        ++n;
      }
    }
    EXPECT_NEAR(total / static_cast<double>(n), std::log(11.0), 0.20 * std::log(11.0)) << to_string(m);
  }
}

TEST_F(PlantedSmlm, LossHistoryNonIncreasing) {
  ASSERT_EQ(history_.epoch_loss.size(), 3u);
  for (std::size_t e = 1; e < history_.epoch_loss.size(); ++e) {
    EXPECT_LE(history_.epoch_loss[e], 1.05 * history_.epoch_loss[e - 1]) << "epoch " << e;
  }
}

TEST_F(PlantedSmlm, TrueTailCloserThanCorruptions) {
  std::size_t separated = 0;
  const auto& eval = planted().fixture.eval;
  for (const auto& item : eval) {
    const double truth = model_->distance(Direction::kGenerateTail, fact_for(item, *item.label));
    bool all = true;
    for (std::size_t j = 0; j < item.options.size(); ++j) {
      if (j != *item.label) all = all && truth < model_->distance(Direction::kGenerateTail, fact_for(item, j));
    }
    separated += all ? 1 : 0;
  }
  EXPECT_GE(static_cast<double>(separated), 0.90 * static_cast<double>(eval.size()));
}

TEST_F(PlantedSmlm, ProductRanksTrueOptionFirst) {
  const qa::ModelScorer scorer(*model_);
  const auto report = qa::evaluate(scorer, planted().fixture.eval);
  EXPECT_GE(report.accuracy, 0.80);
  const auto ablations = qa::ablate(scorer, planted().fixture.eval);
  EXPECT_GE(ablations.at("A").accuracy, 0.25);
  double best_single = 0.0;
  for (const char* k : {"A", "Q", "C"}) best_single = std::max(best_single, ablations.at(k).accuracy);
  EXPECT_GE(ablations.at("A*Q*C").accuracy, best_single - 0.05);
}
