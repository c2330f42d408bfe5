// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exit status is nonzero when any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <fstream>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "ktl/core/fact_set.hpp"
#include "ktl/graph/concept_graph.hpp"
#include "ktl/graph/curriculum.hpp"
#include "ktl/graph/story_graph.hpp"
#include "ktl/nn/tape.hpp"
#include "ktl/objectives/losses.hpp"
#include "ktl/retrieval/ir_solver.hpp"
#include "ktl/util/digest.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace ktl;

namespace {

struct RunResult {
  int exit_code = -1;
  std::map<std::string, std::string> values;  // key=value lines from stdout
  double seconds = 0.0;
};

class Workspace {
 public:
  Workspace() : dir_(fs::temp_directory_path() / ("ktl_acceptance_" + std::to_string(::getpid()))) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Workspace() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  RunResult cli(const std::string& args) const {
    const std::string cmd = std::string(KTL_CLI_PATH) + " " + args + " 2>>" + path("stderr.log");
    RunResult r;
    const auto start = std::chrono::steady_clock::now();
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    std::array<char, 4096> buf{};
    std::string out;
    while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) out += buf.data();
    const int status = ::pclose(pipe);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::istringstream lines(out);
    std::string line;
    while (std::getline(lines, line)) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) r.values[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return r;
  }

 private:
  fs::path dir_;
};

double number(const RunResult& r, const std::string& key) {
  auto it = r.values.find(key);
  return it == r.values.end() ? std::nan("") : std::stod(it->second);
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

const std::array<const char*, 4> kMethods = {"smlm", "krl-nce-cos", "krl-nce-l2", "krl-l2"};

// Shared state: the fixture and one trained model per method.
struct Trained {
  std::map<std::string, double> accuracy;
  std::map<std::string, double> train_seconds;
  bool ok = true;
  std::string problem;
};

Trained train_all(const Workspace& ws) {
  Trained t;
  const auto fx = ws.cli("make-fixture --out " + ws.path("fixture") + " --seed 0");
  if (fx.exit_code != 0) {
    t.ok = false;
    t.problem = "make-fixture exited " + std::to_string(fx.exit_code);
    return t;
  }
  for (const char* m : kMethods) {
    const std::string ckpt = ws.path(std::string(m) + ".ckpt.json");
    const auto tr = ws.cli("train --method " + std::string(m) + " --triples " + ws.path("fixture/train.jsonl") +
                           " --config " + ws.path("fixture/config." + std::string(m) + ".json") + " --out " + ckpt + " --seed 0");
    t.train_seconds[m] = tr.seconds;
    if (tr.exit_code != 0) {
      t.ok = false;
      t.problem = std::string("train ") + m + " exited " + std::to_string(tr.exit_code);
      return t;
    }
    const auto ev = ws.cli("eval --model " + ckpt + " --qa " + ws.path("fixture/eval.jsonl") + " --out " +
                           ws.path(std::string(m) + ".report.json"));
    if (ev.exit_code != 0) {
      t.ok = false;
      t.problem = std::string("eval ") + m + " exited " + std::to_string(ev.exit_code);
      return t;
    }
    t.accuracy[m] = number(ev, "accuracy");
  }
  return t;
}

Outcome planted_zero_shot(const Trained& t) {
  if (!t.ok) return {false, t.problem};
  const auto& a = t.accuracy;
  const bool smlm = a.at("smlm") >= 0.80;
  const bool cos = a.at("krl-nce-cos") >= 0.60;
  const bool order = a.at("smlm") > a.at("krl-nce-cos") && a.at("krl-nce-cos") > a.at("krl-nce-l2") &&
                     a.at("krl-nce-l2") > a.at("krl-l2");
  double slowest = 0.0;
  for (const auto& [m, s] : t.train_seconds) slowest = std::max(slowest, s);
  const bool fast = slowest <= 600.0;
  std::string d;
  for (const char* m : kMethods) d += std::string(m) + "=" + fmt(a.at(m)) + " ";
  d += "slowest_train_s=" + fmt(slowest);
  return {smlm && cos && order && fast, d};
}

Outcome random_calibration(const Workspace& ws) {
  bool pass = true;
  std::string d;
  for (int n : {4, 5, 8}) {
    const auto r = ws.cli("eval --scorer random --qa " + ws.path("fixture/calibration_" + std::to_string(n) + ".jsonl") +
                          " --out " + ws.path("random_" + std::to_string(n) + ".json") + " --seed 0");
    const double p = 1.0 / n;
    const double sigma = std::sqrt(p * (1.0 - p) / 1000.0);
    const double acc = number(r, "accuracy");
    pass = pass && r.exit_code == 0 && std::fabs(acc - p) <= 2.0 * sigma;
    d += "n=" + std::to_string(n) + ":" + fmt(acc) + " ";
  }
  return {pass, d};
}

Outcome gradient_contract(const Workspace& ws) {
  const auto ok = ws.cli("gradcheck --seeds 10");
  const auto bad = ws.cli("gradcheck --seeds 1 --method smlm --corrupt 0.01");
  std::string d;
  for (const char* m : kMethods) {
    const auto it = ok.values.find("max_relative_error[" + std::string(m) + "]");
    d += std::string(m) + "=" + (it == ok.values.end() ? "?" : it->second) + " ";
  }
  d += "corrupted_exit=" + std::to_string(bad.exit_code);
  return {ok.exit_code == 0 && ok.values.size() == 5 && bad.exit_code == 6, d};
}

Outcome sampler_oracles() {
  const std::vector<std::string> corpus = {
      "Warm moist air from the ocean brings fog and low clouds.",
      "Clouds regulate the global engine of atmosphere and ocean.",
      "Fog forms when warm air cools over the ocean.",
      "Plants need sunlight and water.",
      "Sunlight warms the ocean surface.",
      "Water vapor rises into the atmosphere.",
      "Clouds form when water vapor condenses.",
      "Mild winters favor many plants.",
      "The sun drives the global engine of climate.",
      "Rain falls from clouds onto plants."};
  const bool ccg = oracle::keys(graph::ccg_triples(graph::build_concept_graph(corpus))) == oracle::ccg(corpus);

  bool dsg = true;
  graph::StoryGraph g;
  for (std::size_t k = 3; k <= 6; ++k) {
    std::vector<std::string> story;
    for (std::size_t i = 0; i < k; ++i) story.push_back("story " + std::to_string(k) + " sentence " + std::to_string(i));
    graph::StoryGraph single{{story}};
    dsg = dsg && graph::dsg_triples(single).size() == oracle::choose3(k);
    g.stories.push_back(story);
  }
  dsg = dsg && oracle::keys(graph::dsg_triples(g)) == oracle::dsg(g.stories);

  const auto triples = graph::ccg_triples(graph::build_concept_graph(corpus));
  qa::QAItem item;
  item.question = "What forms fog?";
  item.options = {"warm air", "rocks"};
  const bool curriculum =
      oracle::keys(graph::curriculum_filter(triples, {item})) == oracle::curriculum(triples, {item});

  FactSet facts;
  for (const auto& t : triples) facts.insert(t);
  bool negatives = true;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < facts.size(); ++i) {
    for (auto d : kAllDirections) {
      const Triple& t = facts.triples()[i];
      try {
        const auto negs = sample_negatives(facts, t, d, 3, i * 3 + index_of(d));
        negatives = negatives && oracle::negatives_valid(facts, t, d, negs);
        ++checked;
      } catch (const Error& e) {
        negatives = negatives && e.kind() == ErrorKind::kInsufficientNegatives;
      }
    }
  }
  return {ccg && dsg && curriculum && negatives && checked > 0,
          "ccg=" + std::to_string(ccg) + " dsg=" + std::to_string(dsg) + " curriculum=" + std::to_string(curriculum) +
              " negatives=" + std::to_string(negatives) + " samples_checked=" + std::to_string(checked)};
}

Outcome loss_identities() {
  nn::Tape tape;
  nn::Matrix v(1, 6);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.1 * static_cast<double>(i) - 0.2;
  const std::vector<nn::Var> negs(10, tape.constant(v));
  const double nce = objectives::nce_loss(tape.constant(v), tape.constant(v), negs, objectives::SimKind::kCosine).scalar();
  const double smlm = objectives::smlm_loss(tape.constant(nn::Matrix(3, 256, 1.5)), {0, 17, 255}).scalar();
  const bool pass = std::fabs(nce - std::log(11.0)) <= 1e-6 && std::fabs(nce - 2.3979) <= 1e-4 && smlm == 8.0;
  return {pass, "nce=" + fmt(nce) + " smlm_uniform_256=" + fmt(smlm)};
}

Outcome ablation_machinery(const Workspace& ws, const Trained& t) {
  if (!t.ok) return {false, t.problem};
  const auto ab = ws.cli("ablate --model " + ws.path("smlm.ckpt.json") + " --qa " + ws.path("fixture/eval.jsonl") +
                         " --out " + ws.path("ablate.json") + " --predictions " + ws.path("ablate.predictions.jsonl"));
  if (ab.exit_code != 0) return {false, "ablate exited " + std::to_string(ab.exit_code)};
  // Predictions of the full product must match eval item by item.
  const bool agree = read_file(ws.path("ablate.predictions.jsonl")) == read_file(ws.path("smlm.report.json.predictions.jsonl"));
  const double full = number(ab, "accuracy[A*Q*C]");
  const double best_single = std::max({number(ab, "accuracy[A]"), number(ab, "accuracy[Q]"), number(ab, "accuracy[C]")});
  const bool same_as_eval = std::fabs(full - t.accuracy.at("smlm")) < 1e-12;
  return {agree && same_as_eval && ab.values.size() == 4 && full >= best_single - 0.05,
          "A*Q*C=" + fmt(full) + " best_single=" + fmt(best_single) + " agrees_with_eval=" + std::to_string(agree && same_as_eval)};
}

Outcome few_shot_direction(const Workspace& ws, const Trained& t) {
  if (!t.ok) return {false, t.problem};
  const auto r = ws.cli("few-shot --model " + ws.path("smlm.ckpt.json") + " --train-qa " +
                        ws.path("fixture/train_qa.jsonl") + " --qa " + ws.path("fixture/eval.jsonl") + " --config " +
                        ws.path("fixture/config.smlm.json") + " --out " + ws.path("few_shot.json") + " --baseline");
  const double gap = number(r, "gap");
  return {r.exit_code == 0 && gap >= 0.10,
          "pretrained=" + fmt(number(r, "pretrained_accuracy")) + " random_init=" + fmt(number(r, "random_accuracy")) +
              " gap=" + fmt(gap)};
}

Outcome bm25_oracle() {
  const std::vector<std::string> docs = {"clouds regulate the atmosphere", "rocks sit on the ground",
                                         "clouds bring rain and clouds bring shade"};
  const retrieval::InvertedIndex index(docs);
  std::vector<std::vector<std::string>> tokenized;
  for (const auto& d : docs) tokenized.push_back(retrieval::index_terms(d));
  const oracle::Bm25Hand hand{tokenized};
  bool match = true;
  for (const std::string q : {"rocks", "rain shade", "atmosphere ground rain", "the ground"}) {
    for (const auto& hit : index.retrieve(q, 10)) {
      match = match && std::fabs(hit.score - hand.score(retrieval::index_terms(q), hit.doc)) <= 1e-9;
    }
  }
  const retrieval::InvertedIndex toy({"clouds regulate the atmosphere", "rocks are hard and grey", "owls hunt mice",
                                      "rivers carve valleys"});
  const auto ans = retrieval::ir_solver_answer(toy, std::nullopt, "what regulates the atmosphere?", {"clouds", "rocks"});
  const bool toy_ok = ans.chosen == 0 && ans.confidence[0] > 0.0 && ans.confidence[1] == 0.0;
  return {match && toy_ok, "scores_match=" + std::to_string(match) + " toy_choice=" + std::to_string(ans.chosen) +
                               " toy_confidence=" + fmt(ans.confidence[0])};
}

Outcome determinism(const Workspace& ws, const Trained& t) {
  if (!t.ok) return {false, t.problem};
  std::vector<std::pair<std::string, std::string>> pairs;
  const auto again = ws.cli("make-fixture --out " + ws.path("fixture2") + " --seed 0");
  for (const char* f :
       {"train.jsonl", "eval.jsonl", "train_qa.jsonl", "calibration_4.jsonl", "config.smlm.json", "config.krl-l2.json"}) {
    pairs.emplace_back(ws.path(std::string("fixture/") + f), ws.path(std::string("fixture2/") + f));
  }
  const auto retrain = ws.cli("train --method smlm --triples " + ws.path("fixture/train.jsonl") + " --config " +
                              ws.path("fixture/config.smlm.json") + " --out " + ws.path("smlm.ckpt.json.again") + " --seed 0");
  pairs.emplace_back(ws.path("smlm.ckpt.json"), ws.path("smlm.ckpt.json.again"));
  const auto answer1 = ws.cli("answer --model " + ws.path("smlm.ckpt.json") + " --qa " + ws.path("fixture/eval.jsonl") +
                              " --out " + ws.path("answers1.jsonl"));
  const auto answer2 = ws.cli("answer --model " + ws.path("smlm.ckpt.json.again") + " --qa " +
                              ws.path("fixture/eval.jsonl") + " --out " + ws.path("answers2.jsonl"));
  pairs.emplace_back(ws.path("answers1.jsonl"), ws.path("answers2.jsonl"));
  const std::string corpus = ws.path("corpus.txt");
  {
    std::ofstream out(corpus);
    out << "Warm air rises over the ocean.\nThe ocean stores heat.\nWarm air carries water vapor.\n"
           "Water vapor forms clouds.\nClouds bring rain to the land.\n";
  }
  const auto g1 = ws.cli("build-graph --type ccg --corpus " + corpus + " --out " + ws.path("g1.jsonl") + " --cap 3 --seed 4");
  const auto g2 = ws.cli("build-graph --type ccg --corpus " + corpus + " --out " + ws.path("g2.jsonl") + " --cap 3 --seed 4");
  pairs.emplace_back(ws.path("g1.jsonl"), ws.path("g2.jsonl"));

  bool ok = again.exit_code == 0 && retrain.exit_code == 0 && answer1.exit_code == 0 && answer2.exit_code == 0 &&
            g1.exit_code == 0 && g2.exit_code == 0;
  std::size_t identical = 0;
  for (const auto& [a, b] : pairs) {
    if (fs::exists(a) && fs::exists(b) && file_sha256(a) == file_sha256(b)) ++identical;
  }
  ok = ok && identical == pairs.size();
  return {ok, std::to_string(identical) + "/" + std::to_string(pairs.size()) + " outputs byte-identical"};
}

}  // namespace

int main() {
  Workspace ws;
  std::cerr << "training the four objectives on the planted fixture...\n";
  const Trained trained = train_all(ws);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"planted-knowledge zero-shot QA", [&] { return planted_zero_shot(trained); }},
      {"random-baseline calibration", [&] { return random_calibration(ws); }},
      {"gradient contract", [&] { return gradient_contract(ws); }},
      {"sampler oracle equivalence", [] { return sampler_oracles(); }},
      {"loss identities", [] { return loss_identities(); }},
      {"ablation machinery", [&] { return ablation_machinery(ws, trained); }},
      {"few-shot direction", [&] { return few_shot_direction(ws, trained); }},
      {"BM25 oracle", [] { return bm25_oracle(); }},
      {"determinism", [&] { return determinism(ws, trained); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): " << o.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
