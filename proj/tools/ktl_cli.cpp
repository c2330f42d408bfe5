#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ktl/cli/run_config.hpp"
#include "ktl/core/triple_io.hpp"
#include "ktl/graph/concept_graph.hpp"
#include "ktl/graph/curriculum.hpp"
#include "ktl/graph/sampling.hpp"
#include "ktl/graph/story_graph.hpp"
#include "ktl/objectives/gradcheck_suite.hpp"
#include "ktl/objectives/training.hpp"
#include "ktl/qa/evaluate.hpp"
#include "ktl/qa/few_shot.hpp"
#include "ktl/qa/fixture.hpp"
#include "ktl/retrieval/ir_solver.hpp"
#include "ktl/util/digest.hpp"
#include "ktl/util/io.hpp"

namespace {

using namespace ktl;
using nlohmann::ordered_json;

enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kUsage = 2,
  kBadInput = 3,
  kEmptyTargetExit = 4,
  kDivergedExit = 5,
  kGradcheckExit = 6,
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse:
    case ErrorKind::kSchema:
      return kBadInput;
    case ErrorKind::kEmptyTarget:
      return kEmptyTargetExit;
    case ErrorKind::kDivergence:
      return kDivergedExit;
    case ErrorKind::kGradcheck:
      return kGradcheckExit;
    case ErrorKind::kIo:
    case ErrorKind::kConfig:
    case ErrorKind::kValidation:
    case ErrorKind::kLength:
    case ErrorKind::kInsufficientNegatives:
      return kUsage;
  }
  return kUnexpected;
}

// stdout carries key=value lines only.
template <class T>
void emit(const std::string& key, const T& value) {
  std::cout << key << '=' << value << '\n';
}

void emit_double(const std::string& key, double value) {
  std::ostringstream s;
  s.precision(6);
  s << std::fixed << value;
  std::cout << key << '=' << s.str() << '\n';
}

std::string sidecar(const std::string& path, const std::string& suffix) { return path + suffix; }

void write_json(const std::string& path, const ordered_json& j) { write_text_atomically(path, j.dump(2) + "\n"); }

std::vector<std::string> read_sentences(const std::string& path) {
  std::vector<std::string> out;
  for_each_line_in_file(path, [&](std::string_view line, std::size_t) {
    if (line.find_first_not_of(" \t") != std::string_view::npos) out.emplace_back(line);
  });
  return out;
}

// Options shared by every subcommand.
struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  CLI::Option* seed_option = nullptr;

  void attach(CLI::App* app, bool with_config = true) {
    if (with_config) app->add_option("--config", config_path, "Run configuration (JSON)")->check(CLI::ExistingFile);
    seed_option = app->add_option("--seed", seed, "Random seed")->capture_default_str();
  }

  cli::RunConfig config() const { return config_path.empty() ? cli::RunConfig{} : cli::load_run_config(config_path); }

  cli::Manifest manifest(const std::string& command, const cli::RunConfig& c) const {
    cli::Manifest m(command, seed);
    if (!config_path.empty()) m.add_input("config", config_path);
    m.set_config(cli::to_json(c));
    return m;
  }
};

// ---------------------------------------------------------------------------
// build-graph

struct BuildGraphArgs {
  Common common;
  std::string type;
  std::string corpus;
  std::string stories;
  std::string out;
  std::optional<std::size_t> cap;
};

int run_build_graph(const BuildGraphArgs& a) {
  const cli::RunConfig config = a.common.config();
  graph::SampleConfig sample;
  sample.cap = a.cap.value_or(config.sampling.cap);
  sample.seed = a.common.seed_option->count() > 0 ? a.common.seed : config.sampling.seed;
  graph::ReservoirSampler<Triple> sampler(sample);
  cli::Manifest manifest = a.common.manifest("build-graph", config);

  std::size_t sentences = 0, vertices = 0;
  if (a.type == "ccg") {
    if (a.corpus.empty()) fail(ErrorKind::kConfig, "build-graph --type ccg needs --corpus");
    manifest.add_input("corpus", a.corpus);
    const auto g = graph::build_concept_graph(read_sentences(a.corpus));
    sentences = g.edge_count();
    vertices = g.vertex_count();
    graph::generate_ccg_triples(g, [&](Triple t) { sampler.observe(std::move(t)); });
  } else {
    if (a.stories.empty()) fail(ErrorKind::kConfig, "build-graph --type dsg needs --stories");
    manifest.add_input("stories", a.stories);
    const auto g = graph::read_stories_file(a.stories);
    for (const auto& s : g.stories) sentences += s.size();
    vertices = sentences;
    graph::generate_dsg_triples(g, [&](Triple t) { sampler.observe(std::move(t)); });
  }
  const std::size_t emitted = sampler.seen();
  const auto sampled = std::move(sampler).take();
  write_atomically(a.out, [&](std::ostream& os) { write_triples(os, sampled); });
  ordered_json side = manifest.to_json();
  side["counts"] = {{"sentences", sentences}, {"vertices", vertices}, {"emitted", emitted}, {"sampled", sampled.size()}};
  write_json(sidecar(a.out, ".manifest.json"), side);
  emit("sentences", sentences);
  emit("vertices", vertices);
  emit("emitted", emitted);
  emit("sampled", sampled.size());
  return kOk;
}

// ---------------------------------------------------------------------------
// filter

struct FilterArgs {
  Common common;
  std::string triples;
  std::string qa;
  std::string out;
};

int run_filter(const FilterArgs& a) {
  const cli::RunConfig config = a.common.config();
  cli::Manifest manifest = a.common.manifest("filter", config);
  manifest.add_input("triples", a.triples);
  manifest.add_input("qa", a.qa);
  const auto triples = read_triples_file(a.triples);
  const auto items = qa::read_qa_file(a.qa);
  const graph::CurriculumFilter filter(graph::target_chunks(items));
  std::vector<Triple> kept;
  for (const auto& t : triples) {
    if (filter.keep(t)) kept.push_back(t);
  }
  write_atomically(a.out, [&](std::ostream& os) { write_triples(os, kept); });
  ordered_json summary = manifest.to_json();
  summary["kept"] = kept.size();
  summary["dropped"] = triples.size() - kept.size();
  summary["target_chunks"] = filter.target().size();
  write_json(sidecar(a.out, ".summary.json"), summary);
  emit("kept", kept.size());
  emit("dropped", triples.size() - kept.size());
  emit("target_chunks", filter.target().size());
  return kOk;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  Common common;
  std::string method;
  std::string triples;
  std::string out;
};

int run_train(const TrainArgs& a) {
  cli::RunConfig config = a.common.config();
  if (!a.method.empty()) config.objective.method = objectives::method_from_string(a.method);
  cli::Manifest manifest = a.common.manifest("train", config);
  manifest.add_input("triples", a.triples);

  FactSet facts;
  for (const auto& t : read_triples_file(a.triples)) facts.insert(t);
  if (facts.empty()) fail(ErrorKind::kValidation, "train: no triples in " + a.triples);
  auto vocab = objectives::build_vocabulary(facts.triples(), config.tokenizer.min_count);
  auto model = objectives::KtlModel::init(config.objective.method, std::move(vocab), config.encoder, a.common.seed);
  std::cerr << "training " << objectives::to_string(config.objective.method) << " on " << facts.size()
            << " triples, vocabulary " << model.vocab.size() << "\n";
  const auto history =
      objectives::train_model(model, facts, config.train_config(a.common.seed), config.objective.k,
                              [](std::size_t epoch, double loss) {
                                std::cerr << "epoch " << epoch + 1 << " loss " << loss << "\n";
                              });
  if (history.skipped > 0) std::cerr << "skipped " << history.skipped << " over-length examples\n";

  ordered_json hist;
  hist["epoch_loss"] = history.epoch_loss;
  hist["steps"] = history.steps;
  hist["skipped"] = history.skipped;
  ordered_json run = manifest.to_json();
  run["history"] = hist;
  objectives::save_checkpoint(a.out, model, run);
  write_json(sidecar(a.out, ".history.json"), run);

  emit("method", objectives::to_string(config.objective.method));
  emit("triples", facts.size());
  emit("vocabulary", model.vocab.size());
  emit("steps", history.steps);
  emit("skipped", history.skipped);
  if (!history.epoch_loss.empty()) emit_double("final_loss", history.epoch_loss.back());
  emit("checkpoint_sha256", file_sha256(a.out));
  return kOk;
}

// ---------------------------------------------------------------------------
// answer / eval / ablate

struct ScoreArgs {
  Common common;
  std::string model;
  std::string scorer = "model";
  std::string qa;
  std::string corpus;
  std::string out;
  std::string predictions;
  bool hypothesis = false;
  std::vector<std::string> configurations = qa::default_ablations();
};

std::vector<qa::ItemResult> ir_results(const std::vector<qa::QAItem>& items, const retrieval::InvertedIndex& index,
                                       std::size_t top_k) {
  std::vector<qa::ItemResult> out(items.size());
  parallel_for(items.size(), [&](std::size_t i) {
    const auto& it = items[i];
    it.validate();
    const auto ans = retrieval::ir_solver_answer(index, it.context, it.question, it.options, top_k);
    out[i].label = it.label;
    // Higher confidence is better; map to a positive distance.
    for (double c : ans.confidence) {
      objectives::FieldDistances d;
      d.d_t = 1.0 / (1.0 + c);
      out[i].scores.push_back(qa::OptionScore::from_contexts({d}));
    }
    out[i].chosen = ans.chosen;
  });
  return out;
}

int run_scoring(const std::string& command, const ScoreArgs& a) {
  const cli::RunConfig config = a.common.config();
  cli::Manifest manifest = a.common.manifest(command, config);
  manifest.add_input("qa", a.qa);
  const auto items = qa::read_qa_file(a.qa);
  if (items.empty()) fail(ErrorKind::kValidation, command + ": no QA items in " + a.qa);

  std::optional<retrieval::InvertedIndex> index;
  if (!a.corpus.empty()) {
    manifest.add_input("retrieval_corpus", a.corpus);
    index.emplace(read_sentences(a.corpus));
  }
  qa::AnswerOptions options;
  options.hypothesis = a.hypothesis || config.evaluation.hypothesis;
  options.top_k = config.evaluation.top_k;
  options.index = index ? &*index : nullptr;

  std::optional<objectives::KtlModel> model;
  std::unique_ptr<qa::Scorer> scorer;
  std::vector<qa::Answer> answers;
  if (a.scorer == "ir") {
    if (!index) fail(ErrorKind::kConfig, "--scorer ir needs --retrieval-corpus");
  } else if (a.scorer == "random") {
    scorer = std::make_unique<qa::RandomScorer>(a.common.seed);
  } else {
    if (a.model.empty()) fail(ErrorKind::kConfig, command + ": --model is required unless --scorer is random or ir");
    manifest.add_input("model", a.model);
    model.emplace(objectives::load_checkpoint(a.model));
    scorer = std::make_unique<qa::ModelScorer>(*model);
  }

  // Per-item results (full product choice) plus one report per configuration.
  std::vector<qa::ItemResult> results;
  std::vector<std::string> warnings;
  std::map<std::string, qa::EvalReport> reports;
  const bool labeled = std::all_of(items.begin(), items.end(), [](const qa::QAItem& i) { return i.label.has_value(); });
  const std::vector<std::string> keys = command == "ablate" ? a.configurations : std::vector<std::string>{"A*Q*C"};
  for (const auto& key : keys) {
    if (qa::Components::parse(key).empty()) fail(ErrorKind::kValidation, "empty component set");
  }
  if (scorer) {
    answers = qa::answer_all(*scorer, items, options);
    std::size_t contextless = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      results.push_back({answers[i].chosen, items[i].label, answers[i].scores});
      if (answers[i].warning) ++contextless;
    }
    if (contextless > 0) {
      warnings.push_back(std::to_string(contextless) +
                         " item(s) had no context and no retrieval corpus; scored with an empty context");
    }
  } else {
    results = ir_results(items, *index, options.top_k);
  }
  if (command != "answer") {
    if (!labeled) fail(ErrorKind::kValidation, command + ": every QA item needs a label");
    for (const auto& key : keys) {
      auto r = qa::summarize(results, qa::Components::parse(key), a.common.seed);
      r.warnings = warnings;
      reports[key] = std::move(r);
    }
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

  const std::string predictions_path =
      command == "answer" ? a.out : (a.predictions.empty() ? sidecar(a.out, ".predictions.jsonl") : a.predictions);
  write_atomically(predictions_path, [&](std::ostream& os) {
    for (std::size_t i = 0; i < results.size(); ++i) os << qa::prediction_json(i + 1, results[i]).dump() << '\n';
  });
  if (command == "answer") {
    write_json(sidecar(a.out, ".manifest.json"), manifest.to_json());
    emit("items", items.size());
    return kOk;
  }
  ordered_json report;
  report["manifest"] = manifest.to_json();
  report["scorer"] = a.scorer;
  if (command == "eval") {
    const auto& r = reports.at("A*Q*C");
    ordered_json body = qa::to_json(r);
    for (auto it = body.begin(); it != body.end(); ++it) report[it.key()] = it.value();
    write_json(a.out, report);
    emit_double("accuracy", r.accuracy);
    emit("labeled", r.labeled);
    emit("correct", r.correct);
    return kOk;
  }
  report["reports"] = ordered_json::object();
  for (const auto& key : keys) {
    report["reports"][key] = qa::to_json(reports.at(key), false);
    emit_double("accuracy[" + key + "]", reports.at(key).accuracy);
  }
  write_json(a.out, report);
  return kOk;
}

// ---------------------------------------------------------------------------
// gradcheck

struct GradcheckArgs {
  Common common;
  std::size_t seeds = 10;
  double corrupt = 0.0;
  std::string method;
};

int run_gradcheck(const GradcheckArgs& a) {
  constexpr double kTolerance = 1e-4;
  std::vector<objectives::Method> methods(objectives::kAllMethods.begin(), objectives::kAllMethods.end());
  if (!a.method.empty()) methods = {objectives::method_from_string(a.method)};
  std::string failed;
  for (auto m : methods) {
    double worst = 0.0;
    std::string worst_tensor;
    for (std::size_t s = 0; s < a.seeds; ++s) {
      objectives::GradcheckInstance inst;
      inst.method = m;
      inst.seed = derive_seed(a.common.seed, s);
      inst.dim = s % 2 == 0 ? 8 : 16;
      inst.layers = (s / 2) % 2 == 0 ? 1 : 2;
      const auto report = objectives::gradcheck_instance(inst, a.corrupt);
      if (report.max_relative_error >= worst) {
        worst = report.max_relative_error;
        worst_tensor = report.worst;
      }
    }
    std::ostringstream value;
    value.precision(3);
    value << std::scientific << worst;
    emit("max_relative_error[" + std::string(objectives::to_string(m)) + "]", value.str());
    std::cerr << objectives::to_string(m) << ": worst tensor " << worst_tensor << "\n";
    if (!(worst < kTolerance) && failed.empty()) failed = std::string(objectives::to_string(m));
  }
  if (!failed.empty()) fail(ErrorKind::kGradcheck, "gradcheck failed for variant " + failed);
  emit("status", "pass");
  return kOk;
}

// ---------------------------------------------------------------------------
// make-fixture

struct FixtureArgs {
  Common common;
  std::string out;
};

int run_make_fixture(const FixtureArgs& a) {
  namespace fs = std::filesystem;
  qa::FixtureConfig fc;
  fc.seed = a.common.seed;
  const auto fx = qa::make_fixture(fc);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  auto path = [&](const std::string& name) { return (dir / name).string(); };

  std::vector<std::pair<std::string, std::string>> files;
  auto write_items = [&](const std::string& name, const std::vector<qa::QAItem>& items) {
    write_atomically(path(name), [&](std::ostream& os) { qa::write_qa_items(os, items); });
    files.emplace_back(name, path(name));
  };
  write_atomically(path("train.jsonl"), [&](std::ostream& os) { write_triples(os, fx.train); });
  files.emplace_back("train.jsonl", path("train.jsonl"));
  write_items("eval.jsonl", fx.eval);
  write_items("train_qa.jsonl", fx.train_qa);
  for (std::size_t n : {4u, 5u, 8u}) {
    write_items("calibration_" + std::to_string(n) + ".jsonl", qa::calibration_items(1000, n, a.common.seed));
  }
  for (auto m : objectives::kAllMethods) {
    const std::string name = "config." + std::string(objectives::to_string(m)) + ".json";
    write_json(path(name), cli::to_json(cli::fixture_run_config(m)));
    files.emplace_back(name, path(name));
  }

  ordered_json manifest;
  manifest["command"] = "make-fixture";
  manifest["seed"] = a.common.seed;
  manifest["fixture"] = {{"vocabulary_words", fc.vocabulary_words},
                         {"kinds", fc.kinds},
                         {"attributes", fc.attributes},
                         {"relation_forms", fc.relation_forms},
                         {"values_per_attribute", fc.values_per_attribute},
                         {"train_facts", fc.train_facts},
                         {"eval_items", fc.eval_items}};
  manifest["outputs"] = ordered_json::object();
  for (const auto& [name, p] : files) manifest["outputs"][name] = file_sha256(p);
  write_json(path("manifest.json"), manifest);

  emit("words", fx.words.size());
  emit("train_facts", fx.train.size());
  emit("eval_items", fx.eval.size());
  emit("train_qa_items", fx.train_qa.size());
  emit("out", a.out);
  return kOk;
}

// ---------------------------------------------------------------------------
// few-shot

struct FewShotArgs {
  Common common;
  std::string model;
  std::string train_qa;
  std::string qa;
  std::string out;
  bool baseline = false;
};

ordered_json few_shot_json(const qa::FewShotResult& r) {
  ordered_json j;
  j["mean_accuracy"] = r.mean_accuracy;
  j["std_accuracy"] = r.std_accuracy;
  j["splits"] = ordered_json::array();
  for (const auto& s : r.splits) {
    j["splits"].push_back({{"train_items", s.train_indices.size()},
                           {"epoch_loss", s.history.epoch_loss},
                           {"accuracy", s.dev.accuracy}});
  }
  return j;
}

int run_few_shot(const FewShotArgs& a) {
  cli::RunConfig config = a.common.config();
  config.few_shot.seed = a.common.seed;
  cli::Manifest manifest = a.common.manifest("few-shot", config);
  manifest.add_input("model", a.model);
  manifest.add_input("train_qa", a.train_qa);
  manifest.add_input("qa", a.qa);
  const auto model = objectives::load_checkpoint(a.model);
  const auto train_items = qa::read_qa_file(a.train_qa);
  const auto dev_items = qa::read_qa_file(a.qa);

  std::cerr << "fine-tuning the pretrained encoder\n";
  const auto pretrained = qa::few_shot_finetune(model.encoder, model.vocab, train_items, dev_items, config.few_shot);
  ordered_json report;
  report["manifest"] = manifest.to_json();
  report["pretrained"] = few_shot_json(pretrained);
  emit_double("pretrained_accuracy", pretrained.mean_accuracy);
  if (a.baseline) {
    std::cerr << "fine-tuning a randomly initialized encoder\n";
    const auto fresh = nn::EncoderParams::init(model.encoder.config, derive_seed(a.common.seed, 0xBA5E));
    const auto random = qa::few_shot_finetune(fresh, model.vocab, train_items, dev_items, config.few_shot);
    report["random_init"] = few_shot_json(random);
    report["gap"] = pretrained.mean_accuracy - random.mean_accuracy;
    emit_double("random_accuracy", random.mean_accuracy);
    emit_double("gap", pretrained.mean_accuracy - random.mean_accuracy);
  }
  write_json(a.out, report);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge triplet learning toolkit"};
  app.require_subcommand(1);

  BuildGraphArgs build;
  auto* build_cmd = app.add_subcommand("build-graph", "Generate triples from a concept graph or story graph");
  build.common.attach(build_cmd);
  build_cmd->add_option("--type", build.type, "ccg or dsg")->required()->check(CLI::IsMember({"ccg", "dsg"}));
  build_cmd->add_option("--corpus", build.corpus, "Sentence corpus, one sentence per line");
  build_cmd->add_option("--stories", build.stories, "Story JSONL");
  build_cmd->add_option("--out", build.out, "Output triple JSONL")->required();
  build_cmd->add_option("--cap", build.cap, "Maximum number of sampled triples");

  FilterArgs filter;
  auto* filter_cmd = app.add_subcommand("filter", "Keep triples sharing a chunk with the QA items");
  filter.common.attach(filter_cmd);
  filter_cmd->add_option("--triples", filter.triples)->required();
  filter_cmd->add_option("--qa", filter.qa)->required();
  filter_cmd->add_option("--out", filter.out)->required();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a model on triples");
  train.common.attach(train_cmd);
  train_cmd->add_option("--method", train.method, "smlm, krl-l2, krl-nce-l2 or krl-nce-cos");
  train_cmd->add_option("--triples", train.triples)->required();
  train_cmd->add_option("--out", train.out, "Checkpoint path")->required();

  ScoreArgs answer, eval, ablate;
  auto add_scoring = [&](const std::string& name, const std::string& help, ScoreArgs& s) {
    auto* cmd = app.add_subcommand(name, help);
    s.common.attach(cmd);
    cmd->add_option("--model", s.model, "Checkpoint");
    cmd->add_option("--scorer", s.scorer, "model, random or ir")
        ->capture_default_str()
        ->check(CLI::IsMember({"model", "random", "ir"}));
    cmd->add_option("--qa", s.qa, "QA JSONL")->required();
    cmd->add_option("--retrieval-corpus", s.corpus, "Sentences to retrieve contexts from");
    cmd->add_flag("--hypothesis", s.hypothesis, "Rewrite question + option into a hypothesis");
    cmd->add_option("--out", s.out, name == "answer" ? "Predictions JSONL" : "Report JSON")->required();
    if (name != "answer") cmd->add_option("--predictions", s.predictions, "Predictions JSONL");
    return cmd;
  };
  auto* answer_cmd = add_scoring("answer", "Answer QA items", answer);
  auto* eval_cmd = add_scoring("eval", "Answer and score labeled QA items", eval);
  auto* ablate_cmd = add_scoring("ablate", "Evaluate with subsets of the distance components", ablate);
  ablate_cmd->add_option("--components", ablate.configurations, "Component sets, e.g. A Q C A*Q*C")->expected(1, -1);

  GradcheckArgs grad;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference check of every objective");
  grad.common.attach(grad_cmd);
  grad_cmd->add_option("--seeds", grad.seeds, "Random instances per variant")->capture_default_str();
  grad_cmd->add_option("--method", grad.method, "Restrict to one variant");
  grad_cmd->add_option("--corrupt", grad.corrupt, "Test hook: offset added to analytic gradients")
      ->group("");

  FixtureArgs fixture;
  auto* fixture_cmd = app.add_subcommand("make-fixture", "Write the planted-knowledge benchmark");
  fixture.common.attach(fixture_cmd, false);
  fixture_cmd->add_option("--out", fixture.out, "Output directory")->required();

  FewShotArgs few;
  auto* few_cmd = app.add_subcommand("few-shot", "Fine-tune an encoder on a fraction of labeled items");
  few.common.attach(few_cmd);
  few_cmd->add_option("--model", few.model, "Checkpoint providing the encoder")->required();
  few_cmd->add_option("--train-qa", few.train_qa, "Labeled QA items to sample training splits from")->required();
  few_cmd->add_option("--qa", few.qa, "Labeled QA items to evaluate on")->required();
  few_cmd->add_option("--out", few.out, "Report JSON")->required();
  few_cmd->add_flag("--baseline", few.baseline, "Also fine-tune a randomly initialized encoder");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*build_cmd) return run_build_graph(build);
    if (*filter_cmd) return run_filter(filter);
    if (*train_cmd) return run_train(train);
    if (*answer_cmd) return run_scoring("answer", answer);
    if (*eval_cmd) return run_scoring("eval", eval);
    if (*ablate_cmd) return run_scoring("ablate", ablate);
    if (*grad_cmd) return run_gradcheck(grad);
    if (*fixture_cmd) return run_make_fixture(fixture);
    if (*few_cmd) return run_few_shot(few);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnexpected;
  }
  return kUsage;
}
