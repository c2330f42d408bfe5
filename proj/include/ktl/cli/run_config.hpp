#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <vector>

#include "ktl/nn/adam.hpp"
#include "ktl/nn/encoder.hpp"
#include "ktl/objectives/model.hpp"
#include "ktl/qa/few_shot.hpp"
#include "ktl/text/vocabulary.hpp"
#include "ktl/util/digest.hpp"
#include "ktl/util/error.hpp"

namespace ktl::cli {

struct TokenizerSection {
  std::size_t min_count = text::kDefaultMinCount;
};

struct ObjectiveSection {
  objectives::Method method = objectives::Method::kSmlm;
  std::size_t k = 10;  // NCE negatives per example
};

struct OptimizerSection {
  nn::AdamConfig adam;
  std::size_t epochs = 3;
  std::size_t batch_size = 8;
};

struct SamplingSection {
  std::size_t cap = 1'000'000;
  std::uint64_t seed = 0;
};

struct EvaluationSection {
  bool hypothesis = false;
  std::size_t top_k = 5;
};

// Every field has a default; a config file only overrides what it names.
struct RunConfig {
  TokenizerSection tokenizer;
  nn::EncoderConfig encoder;  // vocab_size is filled from the data
  ObjectiveSection objective;
  OptimizerSection optimizer;
  SamplingSection sampling;
  EvaluationSection evaluation;
  qa::FewShotConfig few_shot;

  nn::TrainConfig train_config(std::uint64_t seed) const {
    nn::TrainConfig t;
    t.epochs = optimizer.epochs;
    t.batch_size = optimizer.batch_size;
    t.adam = optimizer.adam;
    t.seed = seed;
    return t;
  }

  void validate() const {
    encoder.validate_shape();
    optimizer.adam.validate();
    if (optimizer.batch_size == 0) fail(ErrorKind::kConfig, "optimizer.batch_size must be >= 1");
    if (objective.k == 0) fail(ErrorKind::kConfig, "objective.k must be >= 1");
    if (sampling.cap == 0) fail(ErrorKind::kConfig, "sampling.cap must be >= 1");
    if (evaluation.top_k == 0) fail(ErrorKind::kConfig, "evaluation.top_k must be >= 1");
    few_shot.validate();
  }
};

namespace detail {

class SectionReader {
 public:
  SectionReader(const nlohmann::json& root, std::string name) : name_(std::move(name)) {
    if (!root.contains(name_)) return;
    node_ = &root.at(name_);
    if (!node_->is_object()) fail(ErrorKind::kConfig, "config: section '" + name_ + "' must be an object");
  }

  template <class T>
  void read(const std::string& key, T& out) {
    known_.insert(key);
    if (node_ == nullptr || !node_->contains(key)) return;
    const auto& v = node_->at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("expected a boolean");
      } else if constexpr (std::is_unsigned_v<T>) {
        if (!v.is_number_unsigned()) throw std::invalid_argument("expected a non-negative integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw std::invalid_argument("expected a number");
      } else {
        if (!v.is_string()) throw std::invalid_argument("expected a string");
      }
      out = v.get<T>();
    } catch (const std::exception& e) {
      fail(ErrorKind::kConfig, "config: " + name_ + "." + key + ": " + e.what());
    }
  }

  // Unknown keys are errors, so a typo never silently falls back to a default.
  void finish() const {
    if (node_ == nullptr) return;
    for (const auto& [key, value] : node_->items()) {
      if (!known_.count(key)) fail(ErrorKind::kConfig, "config: unknown key '" + name_ + "." + key + "'");
    }
  }

 private:
  std::string name_;
  const nlohmann::json* node_ = nullptr;
  std::set<std::string> known_;
};

}  // namespace detail

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorKind::kConfig, "config: top level must be an object");
  static const std::set<std::string> kSections = {"tokenizer", "encoder",    "objective", "optimizer",
                                                  "sampling",  "evaluation", "few_shot"};
  for (const auto& [key, value] : j.items()) {
    if (!kSections.count(key)) fail(ErrorKind::kConfig, "config: unknown section '" + key + "'");
  }
  RunConfig c;
  {
    detail::SectionReader r(j, "tokenizer");
    r.read("min_count", c.tokenizer.min_count);
    r.finish();
  }
  {
    detail::SectionReader r(j, "encoder");
    r.read("dim", c.encoder.dim);
    r.read("layers", c.encoder.layers);
    r.read("heads", c.encoder.heads);
    r.read("ff_dim", c.encoder.ff_dim);
    r.read("max_length", c.encoder.max_length);
    r.read("dropout", c.encoder.dropout);
    r.read("init_std", c.encoder.init_std);
    r.read("head_init_std", c.encoder.head_init_std);
    r.finish();
  }
  {
    detail::SectionReader r(j, "objective");
    std::string method(objectives::to_string(c.objective.method));
    r.read("method", method);
    c.objective.method = objectives::method_from_string(method);
    r.read("k", c.objective.k);
    r.finish();
  }
  {
    detail::SectionReader r(j, "optimizer");
    auto& a = c.optimizer.adam;
    r.read("learning_rate", a.learning_rate);
    r.read("beta1", a.beta1);
    r.read("beta2", a.beta2);
    r.read("epsilon", a.epsilon);
    r.read("weight_decay", a.weight_decay);
    r.read("warmup_fraction", a.warmup_fraction);
    r.read("clip_norm", a.clip_norm);
    r.read("epochs", c.optimizer.epochs);
    r.read("batch_size", c.optimizer.batch_size);
    r.finish();
  }
  {
    detail::SectionReader r(j, "sampling");
    r.read("cap", c.sampling.cap);
    r.read("seed", c.sampling.seed);
    r.finish();
  }
  {
    detail::SectionReader r(j, "evaluation");
    r.read("hypothesis", c.evaluation.hypothesis);
    r.read("top_k", c.evaluation.top_k);
    r.finish();
  }
  {
    detail::SectionReader r(j, "few_shot");
    auto& f = c.few_shot;
    r.read("fraction", f.fraction);
    r.read("splits", f.splits);
    r.read("hidden", f.hidden);
    r.read("epochs", f.epochs);
    r.read("batch_size", f.batch_size);
    r.read("learning_rate", f.learning_rate);
    r.finish();
  }
  c.validate();
  return c;
}

// Hyperparameters the planted fixture is meant to be trained with. The
// KRL variants stall at the SMLM learning rate, so each objective has its own.
inline RunConfig fixture_run_config(objectives::Method method) {
  RunConfig c;
  c.objective.method = method;
  c.encoder.dim = 64;
  c.encoder.layers = 2;
  c.encoder.heads = 4;
  c.encoder.ff_dim = 256;
  c.encoder.max_length = 32;
  c.encoder.init_std = 0.3;
  c.optimizer.adam.learning_rate = method == objectives::Method::kSmlm ? 1e-3 : 3e-4;
  c.optimizer.adam.warmup_fraction = 0.05;
  c.optimizer.epochs = 3;
  c.optimizer.batch_size = 1;
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  nlohmann::json j;
  const std::string text = read_file(path);
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kConfig, "config " + path + ": malformed JSON (" + e.what() + ")");
  }
  return run_config_from_json(j);
}

inline nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["tokenizer"]["min_count"] = c.tokenizer.min_count;
  auto enc = nn::to_json(c.encoder);
  enc.erase("vocab_size");
  j["encoder"] = enc;
  j["objective"]["method"] = objectives::to_string(c.objective.method);
  j["objective"]["k"] = c.objective.k;
  auto opt = nn::to_json(c.optimizer.adam);
  opt["epochs"] = c.optimizer.epochs;
  opt["batch_size"] = c.optimizer.batch_size;
  j["optimizer"] = opt;
  j["sampling"]["cap"] = c.sampling.cap;
  j["sampling"]["seed"] = c.sampling.seed;
  j["evaluation"]["hypothesis"] = c.evaluation.hypothesis;
  j["evaluation"]["top_k"] = c.evaluation.top_k;
  j["few_shot"] = qa::to_json(c.few_shot);
  return j;
}

// Provenance block embedded in every output: command, seed, resolved
// config and the SHA-256 of each input file.
class Manifest {
 public:
  Manifest(std::string command, std::uint64_t seed) : command_(std::move(command)), seed_(seed) {}

  void add_input(const std::string& role, const std::string& path) { inputs_[role] = {path, file_sha256(path)}; }
  void set_config(nlohmann::ordered_json config) { config_ = std::move(config); }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command_;
    j["seed"] = seed_;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    for (const auto& [role, entry] : inputs_) {
      inputs[role] = {{"path", entry.first}, {"sha256", entry.second}};
    }
    j["inputs"] = inputs;
    if (!config_.is_null()) j["config"] = config_;
    return j;
  }

 private:
  std::string command_;
  std::uint64_t seed_;
  std::map<std::string, std::pair<std::string, std::string>> inputs_;
  nlohmann::ordered_json config_;
};

}  // namespace ktl::cli
