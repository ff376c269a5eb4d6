#pragma once

// Corpus persistence. JSON Lines, one EvaluationRecord per line.

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "biaslens/types.hpp"

namespace biaslens {

namespace detail {

inline EvaluationRecord record_from_json(const nlohmann::json& j, size_t line_no) {
  auto fail = [&](const std::string& what) -> ParseError {
    return ParseError("corpus line " + std::to_string(line_no) + ": " + what);
  };
  for (const char* field : {"record_id", "prompt_id", "instructor_name", "gender", "subject",
                            "iteration", "text", "model_name", "temperature", "created_at"}) {
    if (!j.contains(field)) throw fail(std::string("missing field '") + field + "'");
  }
  EvaluationRecord r;
  try {
    r.record_id = j.at("record_id").get<std::string>();
    r.prompt_id = j.at("prompt_id").get<std::string>();
    r.instructor_name = j.at("instructor_name").get<std::string>();
    r.gender = gender_from_string(j.at("gender").get<std::string>());
    r.subject = subject_from_string(j.at("subject").get<std::string>());
    r.iteration = j.at("iteration").get<int>();
    r.text = j.at("text").get<std::string>();
    r.model_name = j.at("model_name").get<std::string>();
    if (!j.at("temperature").is_null()) r.temperature = j.at("temperature").get<double>();
    r.created_at = j.at("created_at").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  } catch (const ParseError& e) {
    throw fail(e.what());
  }
  if (r.text.empty()) throw fail("empty text");
  if (r.iteration < 1) throw fail("iteration must be >= 1");
  return r;
}

inline nlohmann::ordered_json record_to_json(const EvaluationRecord& r) {
  nlohmann::ordered_json j;
  j["record_id"] = r.record_id;
  j["prompt_id"] = r.prompt_id;
  j["instructor_name"] = r.instructor_name;
  j["gender"] = to_string(r.gender);
  j["subject"] = to_string(r.subject);
  j["iteration"] = r.iteration;
  j["text"] = r.text;
  j["model_name"] = r.model_name;
  if (r.temperature)
    j["temperature"] = *r.temperature;
  else
    j["temperature"] = nullptr;
  j["created_at"] = r.created_at;
  return j;
}

}  // namespace detail

inline std::vector<EvaluationRecord> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path);
  std::vector<EvaluationRecord> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw ParseError("corpus line " + std::to_string(line_no) + ": invalid JSON");
    records.push_back(detail::record_from_json(j, line_no));
  }
  // Duplicate (prompt_id, iteration) pairs violate the corpus contract.
  std::vector<std::pair<std::string, int>> keys;
  keys.reserve(records.size());
  for (const auto& r : records) keys.emplace_back(r.prompt_id, r.iteration);
  std::sort(keys.begin(), keys.end());
  auto dup = std::adjacent_find(keys.begin(), keys.end());
  if (dup != keys.end())
    throw ParseError("corpus " + path + ": duplicate (prompt_id, iteration) = (" + dup->first +
                     ", " + std::to_string(dup->second) + ")");
  return records;
}

/// Writes records sorted by (prompt_id, iteration); load(save(x)) == sort(x).
inline void save_corpus(std::vector<EvaluationRecord> records, const std::string& path) {
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.prompt_id, a.iteration) < std::tie(b.prompt_id, b.iteration);
  });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open corpus file for writing: " + path);
  for (const auto& r : records) out << detail::record_to_json(r).dump() << "\n";
  if (!out) throw Error("short write to " + path);
}

/// Grid file: JSON array of prompt specs. `template` and `repetitions` are
/// optional (default template, 1 repetition).
inline std::vector<PromptSpec> load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open grid file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("grid file " + path + ": " + e.what());
  }
  if (!j.is_array()) throw ParseError("grid file " + path + ": expected a JSON array");
  std::vector<PromptSpec> grid;
  for (size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    PromptSpec s;
    try {
      s.id = e.at("id").get<std::string>();
      s.instructor_name = e.at("instructor_name").get<std::string>();
      s.gender = gender_from_string(e.at("gender").get<std::string>());
      s.subject = subject_from_string(e.at("subject").get<std::string>());
      s.repetitions = e.value("repetitions", 1);
      s.template_text = e.value("template", std::string(kDefaultPromptTemplate));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError("grid entry " + std::to_string(i) + ": " + ex.what());
    }
    s.validate();
    grid.push_back(std::move(s));
  }
  return grid;
}

}  // namespace biaslens
