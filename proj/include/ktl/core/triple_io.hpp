#pragma once

#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "ktl/core/fact_set.hpp"
#include "ktl/core/triple.hpp"
#include "ktl/util/error.hpp"
#include "ktl/util/io.hpp"

namespace ktl {

// Triple JSONL: one {"h","r","t"} object per line.
inline std::string triple_to_jsonl(const Triple& t) {
  nlohmann::ordered_json j;
  j["h"] = t.h.text();
  j["r"] = t.r.text();
  j["t"] = t.t.text();
  return j.dump();
}

inline Triple triple_from_json_line(std::string_view line, std::size_t line_number) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, "line " + std::to_string(line_number) + ": malformed JSON (" + e.what() + ")");
  }
  if (!j.is_object()) fail(ErrorKind::kParse, "line " + std::to_string(line_number) + ": expected an object");
  for (const char* key : {"h", "r", "t"}) {
    if (!j.contains(key) || !j[key].is_string()) {
      fail(ErrorKind::kParse, "line " + std::to_string(line_number) + ": missing string field \"" + key + "\"");
    }
  }
  Triple t(j["h"].get<std::string>(), j["r"].get<std::string>(), j["t"].get<std::string>());
  if (t.h.empty() || t.r.empty() || t.t.empty()) {
    fail(ErrorKind::kParse, "line " + std::to_string(line_number) + ": empty triple field");
  }
  return t;
}

inline void write_triples(std::ostream& out, const std::vector<Triple>& triples) {
  for (const auto& t : triples) out << triple_to_jsonl(t) << '\n';
}

inline std::vector<Triple> read_triples(std::istream& in) {
  std::vector<Triple> out;
  for_each_line(in, [&](std::string_view line, std::size_t n) {
    if (line.find_first_not_of(" \t") == std::string_view::npos) return;
    out.push_back(triple_from_json_line(line, n));
  });
  return out;
}

inline std::vector<Triple> read_triples_file(const std::string& path) {
  std::vector<Triple> out;
  for_each_line_in_file(path, [&](std::string_view line, std::size_t n) {
    if (line.find_first_not_of(" \t") == std::string_view::npos) return;
    out.push_back(triple_from_json_line(line, n));
  });
  return out;
}

inline void write_fact_set(std::ostream& out, const FactSet& facts) { write_triples(out, facts.triples()); }

inline FactSet read_fact_set(std::istream& in) {
  FactSet facts;
  for (const auto& t : read_triples(in)) facts.insert(t);
  return facts;
}

}  // namespace ktl
