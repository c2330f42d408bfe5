#pragma once

#include <array>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

#include "ktl/core/triple.hpp"
#include "ktl/nn/encoder.hpp"
#include "ktl/objectives/krl.hpp"
#include "ktl/objectives/losses.hpp"
#include "ktl/objectives/smlm.hpp"
#include "ktl/text/vocabulary.hpp"
#include "ktl/util/digest.hpp"
#include "ktl/util/io.hpp"

namespace ktl::objectives {

enum class Method { kSmlm, kKrlL2, kKrlNceL2, kKrlNceCos };

inline constexpr std::array<Method, 4> kAllMethods = {Method::kSmlm, Method::kKrlL2, Method::kKrlNceL2,
                                                      Method::kKrlNceCos};

inline std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::kSmlm:
      return "smlm";
    case Method::kKrlL2:
      return "krl-l2";
    case Method::kKrlNceL2:
      return "krl-nce-l2";
    case Method::kKrlNceCos:
      return "krl-nce-cos";
  }
  return "?";
}

inline Method method_from_string(std::string_view s) {
  for (auto m : kAllMethods) {
    if (to_string(m) == s) return m;
  }
  fail(ErrorKind::kConfig, "unknown method '" + std::string(s) + "'; valid methods: smlm, krl-l2, krl-nce-l2, krl-nce-cos");
}

inline DistanceSemantics semantics_of(Method m) noexcept {
  switch (m) {
    case Method::kSmlm:
      return DistanceSemantics::kSmlm;
    case Method::kKrlL2:
      return DistanceSemantics::kL2;
    case Method::kKrlNceL2:
      return DistanceSemantics::kNceL2;
    case Method::kKrlNceCos:
      return DistanceSemantics::kNceCos;
  }
  return DistanceSemantics::kSmlm;
}

inline SimKind sim_kind_of(Method m) noexcept { return m == Method::kKrlNceCos ? SimKind::kCosine : SimKind::kNegL2; }

struct FieldDistances {
  double d_h = 1.0;
  double d_r = 1.0;
  double d_t = 1.0;

  double& operator[](Direction d) noexcept {
    return d == Direction::kGenerateHead ? d_h : d == Direction::kGenerateRelation ? d_r : d_t;
  }
};

// Encoder plus the heads of one objective. Immutable once trained; all
// distance queries run on non-recording tapes and are safe to call from
// several threads.
struct KtlModel {
  Method method = Method::kSmlm;
  text::Vocabulary vocab;
  nn::EncoderParams encoder;
  KrlHeads krl;
  SmlmHead smlm;

  static KtlModel init(Method method, text::Vocabulary vocab, nn::EncoderConfig config, std::uint64_t seed) {
    config.vocab_size = vocab.size();
    KtlModel m;
    m.method = method;
    m.vocab = std::move(vocab);
    m.encoder = nn::EncoderParams::init(config, seed);
    if (m.is_krl()) {
      m.krl = KrlHeads::make(config.dim, config.init_std, config.head_init_std, seed);
    } else {
      m.smlm = SmlmHead::make(config.dim, config.vocab_size, config.head_init_std, seed);
    }
    return m;
  }

  bool is_krl() const noexcept { return method != Method::kSmlm; }
  DistanceSemantics semantics() const noexcept { return semantics_of(method); }

  template <class Self, class F>
  static void visit(Self& self, F&& f) {
    self.encoder.visit_params(f);
    if (self.is_krl()) {
      KrlHeads::visit(self.krl, "krl.", f);
    } else {
      SmlmHead::visit(self.smlm, "smlm.", f);
    }
  }
  template <class F>
  void visit_params(F&& f) {
    visit(*this, f);
  }
  template <class F>
  void visit_params(F&& f) const {
    visit(*this, f);
  }

  // Distance of the true field value given the other two. A field that is
  // empty (no context, say) carries no evidence and contributes 1.
  double distance(Direction direction, const Triple& triple) const {
    if (triple.field(direction).empty()) return 1.0;
    nn::Tape tape(false);
    if (!is_krl()) {
      const MaskedInput input = smlm_mask(vocab, triple, direction, encoder.config.max_length);
      return smlm_loss_value(smlm_logits(tape, encoder, smlm, input).value(), input.targets);
    }
    const KrlOutput out = krl_forward(tape, encoder, vocab, krl, direction, triple);
    return vector_distance(semantics(), out.generated.value().values(), out.target.value().values());
  }

  FieldDistances distances(const Triple& triple) const {
    FieldDistances d;
    if (!is_krl()) {
      for (auto dir : kAllDirections) d[dir] = distance(dir, triple);
      return d;
    }
    // Each field is encoded once and shared by the three heads.
    nn::Tape tape(false);
    std::array<Var, 3> pooled;
    for (auto dir : kAllDirections) {
      pooled[index_of(dir)] = encode_phrase(tape, encoder, vocab, triple.field(dir), field_name(dir));
    }
    for (auto dir : kAllDirections) {
      if (triple.field(dir).empty()) continue;
      const auto [a, b] = input_fields(dir);
      const KrlOutput out = krl_project(krl[dir], pooled[index_of(a)], pooled[index_of(b)], pooled[index_of(dir)]);
      d[dir] = vector_distance(semantics(), out.generated.value().values(), out.target.value().values());
    }
    return d;
  }
};

// ---------------------------------------------------------------------------
// Checkpoint: one JSON document.

inline constexpr int kCheckpointVersion = 1;

inline nlohmann::ordered_json checkpoint_json(const KtlModel& model, const nlohmann::ordered_json& run = {}) {
  nlohmann::ordered_json j;
  j["format"] = "ktl-checkpoint";
  j["format_version"] = kCheckpointVersion;
  j["method"] = std::string(to_string(model.method));
  j["distance_semantics"] = std::string(to_string(model.semantics()));
  j["encoder"] = nn::to_json(model.encoder.config);
  j["vocabulary"] = model.vocab.to_json();
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  model.visit_params([&](const std::string& name, const nn::Param& p) { params[name] = p.value.to_json(); });
  j["parameters"] = std::move(params);
  if (!run.is_null()) j["run"] = run;
  return j;
}

inline void save_checkpoint(const std::string& path, const KtlModel& model, const nlohmann::ordered_json& run = {}) {
  const std::string text = checkpoint_json(model, run).dump() + "\n";
  write_text_atomically(path, text);
}

inline KtlModel model_from_checkpoint(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "ktl-checkpoint") fail(ErrorKind::kSchema, "not a ktl checkpoint");
    if (j.at("format_version").get<int>() != kCheckpointVersion) {
      fail(ErrorKind::kSchema, "unsupported checkpoint format_version");
    }
    const Method method = method_from_string(j.at("method").get<std::string>());
    if (distance_semantics_from_string(j.at("distance_semantics").get<std::string>()) != semantics_of(method)) {
      fail(ErrorKind::kSchema, "checkpoint distance_semantics does not match its method");
    }
    text::Vocabulary vocab = text::Vocabulary::from_json(j.at("vocabulary"));
    nn::EncoderConfig config = nn::encoder_config_from_json(j.at("encoder"));
    if (config.vocab_size != vocab.size()) fail(ErrorKind::kSchema, "checkpoint vocabulary size mismatch");
    KtlModel model = KtlModel::init(method, std::move(vocab), config, 0);
    const auto& params = j.at("parameters");
    std::size_t seen = 0;
    model.visit_params([&](const std::string& name, nn::Param& p) {
      if (!params.contains(name)) fail(ErrorKind::kSchema, "checkpoint is missing parameter " + name);
      nn::Matrix m = nn::Matrix::from_json(params.at(name));
      if (!m.same_shape(p.value)) fail(ErrorKind::kSchema, "checkpoint parameter " + name + " has the wrong shape");
      if (!m.all_finite()) fail(ErrorKind::kSchema, "checkpoint parameter " + name + " is not finite");
      p = nn::Param(std::move(m));
      ++seen;
    });
    if (seen != params.size()) fail(ErrorKind::kSchema, "checkpoint has unexpected parameters");
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kSchema, std::string("malformed checkpoint: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kSchema) throw;
    fail(ErrorKind::kSchema, std::string("malformed checkpoint: ") + e.what());
  }
}

inline KtlModel load_checkpoint(const std::string& path) {
  const std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kSchema, path + ": not a JSON checkpoint (" + e.what() + ")");
  }
  return model_from_checkpoint(j);
}

}  // namespace ktl::objectives
