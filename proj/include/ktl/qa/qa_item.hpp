#pragma once

#include <cstddef>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ktl/util/error.hpp"
#include "ktl/util/io.hpp"

namespace ktl::qa {

struct QAItem {
  std::optional<std::string> context;
  std::string question;
  std::vector<std::string> options;
  std::optional<std::size_t> label;

  void validate() const {
    if (question.empty()) fail(ErrorKind::kValidation, "QA item has an empty question");
    if (options.size() < 2) fail(ErrorKind::kValidation, "QA item needs at least 2 options");
    if (label && *label >= options.size()) fail(ErrorKind::kValidation, "QA label out of range");
  }
};

inline nlohmann::ordered_json to_json(const QAItem& item) {
  nlohmann::ordered_json j;
  if (item.context) j["context"] = *item.context;
  j["question"] = item.question;
  j["options"] = item.options;
  if (item.label) j["label"] = *item.label;
  return j;
}

inline QAItem qa_item_from_json_line(std::string_view line, std::size_t line_number) {
  const std::string where = "line " + std::to_string(line_number) + ": ";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, where + "malformed JSON (" + e.what() + ")");
  }
  if (!j.is_object()) fail(ErrorKind::kParse, where + "expected an object");
  QAItem item;
  if (j.contains("context") && !j["context"].is_null()) {
    if (!j["context"].is_string()) fail(ErrorKind::kParse, where + "\"context\" must be a string");
    item.context = j["context"].get<std::string>();
  }
  if (!j.contains("question") || !j["question"].is_string()) fail(ErrorKind::kParse, where + "missing \"question\"");
  item.question = j["question"].get<std::string>();
  if (!j.contains("options") || !j["options"].is_array()) fail(ErrorKind::kParse, where + "missing \"options\"");
  for (const auto& o : j["options"]) {
    if (!o.is_string()) fail(ErrorKind::kParse, where + "options must be strings");
    item.options.push_back(o.get<std::string>());
  }
  if (j.contains("label") && !j["label"].is_null()) {
    if (!j["label"].is_number_integer() || j["label"].get<long long>() < 0) {
      fail(ErrorKind::kParse, where + "\"label\" must be a non-negative integer");
    }
    item.label = j["label"].get<std::size_t>();
  }
  try {
    item.validate();
  } catch (const Error& e) {
    fail(ErrorKind::kParse, where + e.what());
  }
  return item;
}

inline std::vector<QAItem> read_qa_file(const std::string& path) {
  std::vector<QAItem> items;
  for_each_line_in_file(path, [&](std::string_view line, std::size_t n) {
    if (line.find_first_not_of(" \t") == std::string_view::npos) return;
    items.push_back(qa_item_from_json_line(line, n));
  });
  return items;
}

inline void write_qa_items(std::ostream& out, const std::vector<QAItem>& items) {
  for (const auto& item : items) out << to_json(item).dump() << '\n';
}

}  // namespace ktl::qa
