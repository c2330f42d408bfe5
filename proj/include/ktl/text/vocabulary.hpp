#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <unordered_map>
#include <vector>

#include "ktl/text/tokenizer.hpp"
#include "ktl/util/error.hpp"

namespace ktl::text {

using TokenId = std::int32_t;
using TokenIds = std::vector<TokenId>;

inline constexpr TokenId kClsId = 0;
inline constexpr TokenId kSepId = 1;
inline constexpr TokenId kMaskId = 2;
inline constexpr TokenId kUnkId = 3;
inline constexpr TokenId kPadId = 4;
inline constexpr TokenId kNumReserved = 5;
inline constexpr std::size_t kDefaultMinCount = 2;

class Vocabulary {
 public:
  Vocabulary() : tokens_{"[cls]", "[sep]", "[mask]", "[unk]", "[pad]"} { reindex(); }

  // Ids ordered by descending count, ties lexicographic; tokens below
  // min_count are dropped and encode to [unk].
  template <class Range>
  static Vocabulary build(const Range& token_sequences, std::size_t min_count = kDefaultMinCount) {
    std::map<std::string, std::size_t> counts;
    for (const auto& seq : token_sequences) {
      for (const auto& tok : seq) ++counts[tok];
    }
    std::vector<std::pair<std::string, std::size_t>> kept;
    for (auto& [tok, n] : counts) {
      if (n >= min_count && !is_reserved_name(tok)) kept.emplace_back(tok, n);
    }
    std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    Vocabulary v;
    v.min_count_ = min_count;
    for (auto& [tok, n] : kept) v.tokens_.push_back(tok);
    v.reindex();
    return v;
  }

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t min_count() const noexcept { return min_count_; }
  const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }

  TokenId id(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnkId : it->second;
  }

  TokenIds encode(const Tokens& tokens) const {
    TokenIds ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(id(t));
    return ids;
  }

  TokenIds encode_text(std::string_view text) const { return encode(tokenize(text)); }

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_ && min_count_ == other.min_count_; }

  nlohmann::json to_json() const { return {{"min_count", min_count_}, {"tokens", tokens_}}; }

  static Vocabulary from_json(const nlohmann::json& j) {
    Vocabulary v;
    v.min_count_ = j.at("min_count").get<std::size_t>();
    v.tokens_ = j.at("tokens").get<std::vector<std::string>>();
    if (v.tokens_.size() < static_cast<std::size_t>(kNumReserved) || v.tokens_[0] != "[cls]" ||
        v.tokens_[1] != "[sep]" || v.tokens_[2] != "[mask]" || v.tokens_[3] != "[unk]" || v.tokens_[4] != "[pad]") {
      fail(ErrorKind::kSchema, "vocabulary: reserved tokens missing or out of order");
    }
    v.reindex();
    return v;
  }

 private:
  static bool is_reserved_name(const std::string& t) {
    return t == "[cls]" || t == "[sep]" || t == "[mask]" || t == "[unk]" || t == "[pad]";
  }

  void reindex() {
    index_.clear();
    for (std::size_t i = 0; i < tokens_.size(); ++i) index_[tokens_[i]] = static_cast<TokenId>(i);
  }

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  std::size_t min_count_ = kDefaultMinCount;
};

}  // namespace ktl::text
