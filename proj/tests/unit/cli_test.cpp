#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "ktl/core/triple_io.hpp"
#include "ktl/util/digest.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
  std::map<std::string, std::string> kv;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ktl_cli_test_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  CliRun run(const std::string& args) const {
    const std::string err = path("stderr.txt");
    const std::string cmd = std::string(KTL_CLI_PATH) + " " + args + " 2>" + err;
    CliRun r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) r.out += buf.data();
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = ktl::read_file(err);
    std::istringstream lines(r.out);
    std::string line;
    while (std::getline(lines, line)) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) r.kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return r;
  }

  std::size_t line_count(const std::string& file) const {
    std::ifstream in(file);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
  }

  fs::path dir_;
};

const char* kCorpus =
    "Warm moist air from the ocean brings fog and low clouds.\n"
    "Clouds regulate the global engine of atmosphere and ocean.\n"
    "Fog forms when warm air cools over the ocean.\n";

}  // namespace

TEST_F(CliTest, NoArgumentsIsUsageError) { EXPECT_EQ(run("").code, 2); }

TEST_F(CliTest, CcgMatchesEnumeration) {
  const auto corpus = write("corpus.txt", kCorpus);
  const auto r = run("build-graph --type ccg --corpus " + corpus + " --out " + path("t.jsonl"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.kv.at("sentences"), "3");
  std::ifstream in(path("t.jsonl"));
  const auto triples = ktl::read_triples(in);
  EXPECT_EQ(oracle::keys(triples),
            oracle::ccg({"Warm moist air from the ocean brings fog and low clouds.",
                         "Clouds regulate the global engine of atmosphere and ocean.",
                         "Fog forms when warm air cools over the ocean."}));
  EXPECT_EQ(r.kv.at("sampled"), std::to_string(triples.size()));
  EXPECT_TRUE(fs::exists(path("t.jsonl.manifest.json")));
}

TEST_F(CliTest, DsgSingleStoryAndCap) {
  const auto one = write("one.jsonl", R"({"sentences": ["A came.", "B left.", "C slept."]})" "\n");
  auto r = run("build-graph --type dsg --stories " + one + " --out " + path("one_out.jsonl"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(path("one_out.jsonl")), 1u);
  const auto big = write("big.jsonl", R"({"sentences": ["s1.", "s2.", "s3.", "s4.", "s5.", "s6.", "s7."]})" "\n");
  r = run("build-graph --type dsg --stories " + big + " --out " + path("big_out.jsonl") + " --cap 10");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.kv.at("emitted"), "35");
  EXPECT_EQ(line_count(path("big_out.jsonl")), 10u);
}

TEST_F(CliTest, MissingFileExitsTwo) {
  const auto r = run("build-graph --type dsg --stories " + path("nope.jsonl") + " --out " + path("x.jsonl"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nope.jsonl"), std::string::npos);
}

TEST_F(CliTest, MalformedLineExitsThreeNamingLine) {
  const auto stories = write("bad.jsonl", R"({"sentences": ["a.", "b.", "c."]})" "\n{oops\n");
  const auto r = run("build-graph --type dsg --stories " + stories + " --out " + path("x.jsonl"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
}

TEST_F(CliTest, FilterAndIdempotence) {
  const auto corpus = write("corpus.txt", kCorpus);
  ASSERT_EQ(run("build-graph --type ccg --corpus " + corpus + " --out " + path("t.jsonl")).code, 0);
  const auto qa = write("qa.jsonl", R"({"question": "What brings fog?", "options": ["warm air", "rocks"], "label": 0})" "\n");
  auto r = run("filter --triples " + path("t.jsonl") + " --qa " + qa + " --out " + path("f1.jsonl"));
  ASSERT_EQ(r.code, 0) << r.err;
  r = run("filter --triples " + path("f1.jsonl") + " --qa " + qa + " --out " + path("f2.jsonl"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.kv.at("dropped"), "0");
  EXPECT_EQ(ktl::read_file(path("f1.jsonl")), ktl::read_file(path("f2.jsonl")));
}

TEST_F(CliTest, EmptyTargetExitsFour) {
  const auto triples = write("t.jsonl", R"({"h": "warm air", "r": "brings", "t": "fog"})" "\n");
  const auto qa = write("qa.jsonl", R"({"question": "the of?", "options": ["and", "the"]})" "\n");
  EXPECT_EQ(run("filter --triples " + triples + " --qa " + qa + " --out " + path("f.jsonl")).code, 4);
}

TEST_F(CliTest, BadMethodListsValidOnes) {
  const auto triples = write("t.jsonl", R"({"h": "warm air", "r": "brings", "t": "fog"})" "\n");
  const auto r = run("train --method bert --triples " + triples + " --out " + path("m.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("krl-nce-cos"), std::string::npos);
  EXPECT_NE(r.err.find("smlm"), std::string::npos);
}

TEST_F(CliTest, UnknownConfigKeyRejected) {
  const auto triples = write("t.jsonl", R"({"h": "warm air", "r": "brings", "t": "fog"})" "\n");
  const auto config = write("c.json", R"({"optimizer": {"learning_rat": 0.1}})");
  const auto r = run("train --triples " + triples + " --config " + config + " --out " + path("m.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("optimizer.learning_rat"), std::string::npos);
}

TEST_F(CliTest, DivergenceExitsFive) {
  std::string lines;
  for (int i = 0; i < 6; ++i) lines += R"({"h": "thing )" + std::to_string(i) + R"(", "r": "has", "t": "value )" + std::to_string(i) + "\"}\n";
  const auto triples = write("t.jsonl", lines);
  const auto config = write("c.json", R"({"tokenizer": {"min_count": 1},
    "encoder": {"dim": 8, "layers": 1, "heads": 2, "ff_dim": 16, "max_length": 16},
    "optimizer": {"learning_rate": 1e300, "epochs": 3, "batch_size": 1, "clip_norm": 0}})");
  const auto r = run("train --triples " + triples + " --config " + config + " --out " + path("m.json"));
  EXPECT_EQ(r.code, 5);
  EXPECT_NE(r.err.find("finite"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("m.json")));
}

TEST_F(CliTest, TrainEvalAblateAnswer) {
  std::string lines;
  for (int i = 0; i < 12; ++i) {
    lines += R"({"h": "animal )" + std::to_string(i % 4) + R"(", "r": "likes", "t": "food )" + std::to_string(i % 3) + "\"}\n";
  }
  const auto triples = write("t.jsonl", lines);
  const auto config = write("c.json", R"({"tokenizer": {"min_count": 1},
    "encoder": {"dim": 8, "layers": 1, "heads": 2, "ff_dim": 16, "max_length": 16},
    "optimizer": {"epochs": 1, "batch_size": 2}})");
  auto r = run("train --method smlm --triples " + triples + " --config " + config + " --out " + path("m.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.kv.at("checkpoint_sha256"), ktl::file_sha256(path("m.json")));
  EXPECT_TRUE(fs::exists(path("m.json.history.json")));

  const auto qa = write("qa.jsonl", R"({"context": "animal 1", "question": "likes", "options": ["food 1", "food 2"], "label": 0})" "\n"
                                    R"({"question": "likes", "options": ["food 0", "food 1", "food 2"], "label": 2})" "\n");
  r = run("eval --model " + path("m.json") + " --qa " + qa + " --out " + path("report.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.kv.count("accuracy"));
  EXPECT_NE(r.err.find("warning"), std::string::npos);  // second item has no context
  EXPECT_EQ(line_count(path("report.json.predictions.jsonl")), 2u);
  const auto report = nlohmann::json::parse(ktl::read_file(path("report.json")));
  EXPECT_EQ(report.at("manifest").at("inputs").at("model").at("sha256"), ktl::file_sha256(path("m.json")));
  EXPECT_EQ(report.at("tie_break"), "lowest-index");

  r = run("ablate --model " + path("m.json") + " --qa " + qa + " --out " + path("ablate.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(ktl::read_file(path("ablate.json"))).at("reports").size(), 4u);

  r = run("answer --model " + path("m.json") + " --qa " + qa + " --out " + path("answers.jsonl"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(path("answers.jsonl")), 2u);

  // A QA file is not a checkpoint.
  EXPECT_EQ(run("eval --model " + qa + " --qa " + qa + " --out " + path("x.json")).code, 3);
  // A checkpoint is not a QA file.
  EXPECT_EQ(run("eval --model " + path("m.json") + " --qa " + path("m.json") + " --out " + path("x.json")).code, 3);
}

TEST_F(CliTest, RandomScorerOnCalibrationItems) {
  ASSERT_EQ(run("make-fixture --out " + path("fx")).code, 0);
  const auto r = run("eval --scorer random --qa " + path("fx/calibration_4.jsonl") + " --out " + path("r.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const double acc = std::stod(r.kv.at("accuracy"));
  EXPECT_GE(acc, 0.21);
  EXPECT_LE(acc, 0.29);
}

TEST_F(CliTest, IrScorerNeedsCorpus) {
  const auto qa = write("qa.jsonl", R"({"question": "what regulates the atmosphere?", "options": ["clouds", "rocks"], "label": 0})" "\n");
  EXPECT_EQ(run("eval --scorer ir --qa " + qa + " --out " + path("r.json")).code, 2);
  const auto corpus = write("c.txt", "clouds regulate the atmosphere\nrocks are hard and grey\n");
  const auto r = run("eval --scorer ir --qa " + qa + " --retrieval-corpus " + corpus + " --out " + path("r.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.kv.at("accuracy"), "1.000000");
}

TEST_F(CliTest, GradcheckPassesAndCorruptionFails) {
  auto r = run("gradcheck --seeds 2");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.kv.size(), 5u);
  r = run("gradcheck --seeds 1 --method krl-nce-cos --corrupt 0.01");
  EXPECT_EQ(r.code, 6);
  EXPECT_NE(r.err.find("krl-nce-cos"), std::string::npos);
}
