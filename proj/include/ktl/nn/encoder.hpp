#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ktl/nn/tape.hpp"
#include "ktl/text/vocabulary.hpp"
#include "ktl/util/error.hpp"
#include "ktl/util/rng.hpp"

namespace ktl::nn {

struct EncoderConfig {
  std::size_t vocab_size = 0;
  std::size_t dim = 64;
  std::size_t layers = 2;
  std::size_t heads = 4;
  std::size_t ff_dim = 256;
  std::size_t max_length = 128;
  double dropout = 0.0;
  double init_std = 0.02;
  double head_init_std = 0.02;  // final layers of the objective heads

  void validate() const {
    if (vocab_size == 0) fail(ErrorKind::kConfig, "encoder: vocab_size must be positive");
    validate_shape();
  }

  // Everything except vocab_size, which is only known once data is read.
  void validate_shape() const {
    if (dim == 0 || heads == 0 || dim % heads != 0) fail(ErrorKind::kConfig, "encoder: dim must be divisible by heads");
    if (max_length < 8) fail(ErrorKind::kConfig, "encoder: max_length must be >= 8");
    if (ff_dim == 0) fail(ErrorKind::kConfig, "encoder: ff_dim must be positive");
    if (dropout < 0.0 || dropout >= 1.0) fail(ErrorKind::kConfig, "encoder: dropout must be in [0, 1)");
    if (!(init_std > 0.0) || !(head_init_std > 0.0)) fail(ErrorKind::kConfig, "encoder: init_std and head_init_std must be positive");
  }

  std::size_t head_dim() const noexcept { return dim / heads; }

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

inline nlohmann::ordered_json to_json(const EncoderConfig& c) {
  nlohmann::ordered_json j;
  j["vocab_size"] = c.vocab_size;
  j["dim"] = c.dim;
  j["layers"] = c.layers;
  j["heads"] = c.heads;
  j["ff_dim"] = c.ff_dim;
  j["max_length"] = c.max_length;
  j["dropout"] = c.dropout;
  j["init_std"] = c.init_std;
  j["head_init_std"] = c.head_init_std;
  return j;
}

inline EncoderConfig encoder_config_from_json(const nlohmann::json& j) {
  EncoderConfig c;
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.dim = j.at("dim").get<std::size_t>();
  c.layers = j.at("layers").get<std::size_t>();
  c.heads = j.at("heads").get<std::size_t>();
  c.ff_dim = j.at("ff_dim").get<std::size_t>();
  c.max_length = j.at("max_length").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.init_std = j.at("init_std").get<double>();
  c.head_init_std = j.at("head_init_std").get<double>();
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Parameter blocks

inline Matrix random_matrix(std::size_t rows, std::size_t cols, double std_dev, Rng& rng) {
  Matrix m(rows, cols);
  std::normal_distribution<double> normal(0.0, std_dev);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = normal(rng);
  return m;
}

struct Linear {
  Param weight;  // in x out
  Param bias;    // 1 x out; empty when the layer has no bias

  static Linear make(std::size_t in, std::size_t out, double std_dev, Rng& rng, bool with_bias = true) {
    Linear l;
    l.weight = Param(random_matrix(in, out, std_dev, rng));
    if (with_bias) l.bias = Param(Matrix(1, out));
    return l;
  }

  bool has_bias() const noexcept { return !bias.value.empty(); }

  Var operator()(Var x) const {
    Tape& t = x.tape();
    Var y = matmul(x, t.param(weight));
    return has_bias() ? add_row(y, t.param(bias)) : y;
  }

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    f(prefix + ".weight", self.weight);
    if (self.has_bias()) f(prefix + ".bias", self.bias);
  }
};

struct LayerNormParams {
  Param gain;
  Param bias;

  static LayerNormParams make(std::size_t dim) { return {Param(Matrix(1, dim, 1.0)), Param(Matrix(1, dim))}; }

  Var operator()(Var x) const {
    Tape& t = x.tape();
    return layer_norm(x, t.param(gain), t.param(bias));
  }

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    f(prefix + ".gain", self.gain);
    f(prefix + ".bias", self.bias);
  }
};

// Two-layer feedforward map: second(gelu(first(x))).
struct FeedForward {
  Linear first;
  Linear second;

  static FeedForward make(std::size_t in, std::size_t hidden, std::size_t out, double std_dev, Rng& rng) {
    FeedForward f;
    f.first = Linear::make(in, hidden, std_dev, rng);
    f.second = Linear::make(hidden, out, std_dev, rng);
    return f;
  }

  Var operator()(Var x) const { return second(gelu(first(x))); }

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    Linear::visit(self.first, prefix + ".first", f);
    Linear::visit(self.second, prefix + ".second", f);
  }
};

struct EncoderLayer {
  LayerNormParams attention_norm;
  Linear query;
  Linear key;  // no bias: a key bias shifts every score in a row equally
  Linear value;
  Linear output;
  LayerNormParams ff_norm;
  FeedForward ff;

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    LayerNormParams::visit(self.attention_norm, prefix + ".attention_norm", f);
    Linear::visit(self.query, prefix + ".query", f);
    Linear::visit(self.key, prefix + ".key", f);
    Linear::visit(self.value, prefix + ".value", f);
    Linear::visit(self.output, prefix + ".output", f);
    LayerNormParams::visit(self.ff_norm, prefix + ".ff_norm", f);
    FeedForward::visit(self.ff, prefix + ".ff", f);
  }
};

struct EncoderParams {
  EncoderConfig config;
  Param token_embedding;     // vocab x dim
  Param position_embedding;  // max_length x dim
  std::vector<EncoderLayer> layers;
  LayerNormParams final_norm;

  static EncoderParams init(const EncoderConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(derive_seed(seed, 0xE1C0DE));
    const double s = config.init_std;
    EncoderParams p;
    p.config = config;
    p.token_embedding = Param(random_matrix(config.vocab_size, config.dim, s, rng));
    p.position_embedding = Param(random_matrix(config.max_length, config.dim, s, rng));
    for (std::size_t l = 0; l < config.layers; ++l) {
      EncoderLayer layer;
      layer.attention_norm = LayerNormParams::make(config.dim);
      layer.query = Linear::make(config.dim, config.dim, s, rng);
      layer.key = Linear::make(config.dim, config.dim, s, rng, /*with_bias=*/false);
      layer.value = Linear::make(config.dim, config.dim, s, rng);
      layer.output = Linear::make(config.dim, config.dim, s, rng);
      layer.ff_norm = LayerNormParams::make(config.dim);
      layer.ff = FeedForward::make(config.dim, config.ff_dim, config.dim, s, rng);
      p.layers.push_back(std::move(layer));
    }
    p.final_norm = LayerNormParams::make(config.dim);
    return p;
  }

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    f(prefix + "token_embedding", self.token_embedding);
    f(prefix + "position_embedding", self.position_embedding);
    for (std::size_t l = 0; l < self.layers.size(); ++l) {
      EncoderLayer::visit(self.layers[l], prefix + "layer" + std::to_string(l), f);
    }
    LayerNormParams::visit(self.final_norm, prefix + "final_norm", f);
  }

  template <class F>
  void visit_params(F&& f) {
    visit(*this, "encoder.", f);
  }
  template <class F>
  void visit_params(F&& f) const {
    visit(*this, "encoder.", f);
  }
};

struct EncodedSequence {
  Var pooled;     // 1 x dim, the position-0 ([cls]) output
  Var per_token;  // n x dim
};

struct EncodeOptions {
  std::vector<bool> attention_mask;  // per position; false = padding, never attended to
  Rng* dropout_rng = nullptr;        // dropout is active only when set
};

// Pre-norm transformer encoder: token + learned position embeddings, then
// `layers` blocks of (LN -> multi-head self-attention -> residual, LN ->
// feedforward -> residual), then a final LN.
inline EncodedSequence encode(Tape& tape, const EncoderParams& params, const text::TokenIds& ids,
                              const EncodeOptions& options = {}) {
  const EncoderConfig& c = params.config;
  if (ids.empty()) fail(ErrorKind::kValidation, "encode: empty input");
  if (ids.size() > c.max_length) {
    fail(ErrorKind::kLength, "encode: input of length " + std::to_string(ids.size()) + " exceeds max_length " +
                                 std::to_string(c.max_length));
  }
  if (!options.attention_mask.empty() && options.attention_mask.size() != ids.size()) {
    fail(ErrorKind::kValidation, "encode: attention mask length differs from input length");
  }
  std::vector<std::size_t> token_rows, position_rows;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= c.vocab_size) {
      fail(ErrorKind::kValidation, "encode: token id out of range");
    }
    token_rows.push_back(static_cast<std::size_t>(ids[i]));
    position_rows.push_back(i);
  }
  const bool train = options.dropout_rng != nullptr && c.dropout > 0.0;
  auto drop = [&](Var v) { return train ? dropout(v, c.dropout, *options.dropout_rng) : v; };

  Var x = add(gather_rows(tape.param(params.token_embedding), token_rows),
              gather_rows(tape.param(params.position_embedding), position_rows));
  const std::size_t hd = c.head_dim();
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(hd));
  for (const auto& layer : params.layers) {
    Var h = layer.attention_norm(x);
    Var q = layer.query(h);
    Var k = layer.key(h);
    Var v = layer.value(h);
    std::vector<Var> heads;
    heads.reserve(c.heads);
    for (std::size_t a = 0; a < c.heads; ++a) {
      Var qa = slice_cols(q, a * hd, hd);
      Var ka = slice_cols(k, a * hd, hd);
      Var va = slice_cols(v, a * hd, hd);
      Var weights = softmax_rows(scale(matmul_bt(qa, ka), inv_sqrt), options.attention_mask);
      heads.push_back(matmul(weights, va));
    }
    x = add(x, drop(layer.output(concat_cols(heads))));
    x = add(x, drop(layer.ff(layer.ff_norm(x))));
  }
  Var out = params.final_norm(x);
  return {take_row(out, 0), out};
}

// [cls] tokens [sep]
inline text::TokenIds phrase_ids(const text::Vocabulary& vocab, const text::Tokens& tokens) {
  text::TokenIds ids{text::kClsId};
  for (auto id : vocab.encode(tokens)) ids.push_back(id);
  ids.push_back(text::kSepId);
  return ids;
}

}  // namespace ktl::nn
