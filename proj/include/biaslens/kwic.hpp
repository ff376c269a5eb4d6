#pragma once

// Keyword-in-context extraction. One hit per token occurrence of a target
// word (token-boundary match after case-folding: "available" never matches
// "availability"), with the containing sentence captured verbatim.
// Contextual meaning is supplied by a human sidecar annotation file, keyed
// by (record_id, sentence_index, word); the tool never classifies meaning.

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "biaslens/tokenize.hpp"
#include "biaslens/types.hpp"

namespace biaslens {

enum class KwicAnnotation { Approachability, Timeliness, TeachingSkill, Intellect, Commitment, Other };

inline std::string to_string(KwicAnnotation a) {
  switch (a) {
    case KwicAnnotation::Approachability: return "approachability";
    case KwicAnnotation::Timeliness: return "timeliness";
    case KwicAnnotation::TeachingSkill: return "teaching_skill";
    case KwicAnnotation::Intellect: return "intellect";
    case KwicAnnotation::Commitment: return "commitment";
    case KwicAnnotation::Other: return "other";
  }
  return "other";
}

inline KwicAnnotation kwic_annotation_from_string(std::string_view s) {
  if (s == "approachability") return KwicAnnotation::Approachability;
  if (s == "timeliness") return KwicAnnotation::Timeliness;
  if (s == "teaching_skill") return KwicAnnotation::TeachingSkill;
  if (s == "intellect") return KwicAnnotation::Intellect;
  if (s == "commitment") return KwicAnnotation::Commitment;
  if (s == "other") return KwicAnnotation::Other;
  throw ParseError("unknown kwic annotation: '" + std::string(s) + "'");
}

struct KwicHit {
  std::string word;  // the matched target, case-folded
  std::string record_id;
  Gender gender = Gender::Female;
  Subject subject = Subject::Engineering;
  std::string sentence;
  int sentence_index = 0;  // 0-based within the record
  std::optional<KwicAnnotation> annotation;
};

/// Scans docs in (record_id, sentence_index) order; requires every doc's
/// record to exist in the corpus.
inline std::vector<KwicHit> kwic(const std::vector<EvaluationRecord>& corpus,
                                 const std::vector<TokenizedDoc>& docs,
                                 const std::vector<std::string>& targets) {
  std::set<std::string> target_set;
  for (const auto& t : targets) target_set.insert(textdetail::ascii_lower(t));

  std::unordered_map<std::string, const EvaluationRecord*> by_id;
  by_id.reserve(corpus.size());
  for (const auto& r : corpus) by_id[r.record_id] = &r;

  std::vector<const TokenizedDoc*> ordered;
  ordered.reserve(docs.size());
  for (const auto& d : docs) ordered.push_back(&d);
  std::sort(ordered.begin(), ordered.end(),
            [](const TokenizedDoc* a, const TokenizedDoc* b) { return a->record_id < b->record_id; });

  std::vector<KwicHit> hits;
  for (const auto* doc : ordered) {
    auto it = by_id.find(doc->record_id);
    if (it == by_id.end())
      throw Error("kwic: doc record '" + doc->record_id + "' is not in the corpus");
    const EvaluationRecord& rec = *it->second;
    for (size_t si = 0; si < doc->sentences.size(); ++si) {
      for (const auto& tok : doc->sentences[si].tokens) {
        if (!target_set.count(tok.lower)) continue;
        KwicHit h;
        h.word = tok.lower;
        h.record_id = rec.record_id;
        h.gender = rec.gender;
        h.subject = rec.subject;
        h.sentence = doc->sentences[si].raw;
        h.sentence_index = int(si);
        hits.push_back(std::move(h));
      }
    }
  }
  return hits;
}

/// Sidecar CSV: record_id,sentence_index,word,annotation  (header optional).
inline void apply_kwic_annotations(std::vector<KwicHit>& hits, const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw Error("cannot open annotation file: " + csv_path);
  std::map<std::tuple<std::string, int, std::string>, KwicAnnotation> ann;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 4)
      throw ParseError(csv_path + " line " + std::to_string(line_no) + ": expected 4 fields");
    if (line_no == 1 && fields[0] == "record_id") continue;  // header
    int sidx = 0;
    try {
      sidx = std::stoi(fields[1]);
    } catch (const std::exception&) {
      throw ParseError(csv_path + " line " + std::to_string(line_no) + ": bad sentence_index");
    }
    auto key = std::make_tuple(fields[0], sidx, textdetail::ascii_lower(fields[2]));
    KwicAnnotation a = kwic_annotation_from_string(fields[3]);
    auto [it, inserted] = ann.emplace(key, a);
    if (!inserted && it->second != a)
      throw ValidationError(csv_path + " line " + std::to_string(line_no) +
                            ": conflicting annotation for (" + fields[0] + ", " + fields[1] +
                            ", " + fields[2] + ")");
  }
  for (auto& h : hits) {
    auto it = ann.find(std::make_tuple(h.record_id, h.sentence_index, h.word));
    if (it != ann.end()) h.annotation = it->second;
  }
}

struct KwicTabulation {
  std::map<std::pair<std::string, Gender>, int> by_word_gender;
  std::map<std::pair<std::string, KwicAnnotation>, int> by_word_annotation;
};

inline KwicTabulation tabulate(const std::vector<KwicHit>& hits) {
  KwicTabulation t;
  for (const auto& h : hits) {
    ++t.by_word_gender[{h.word, h.gender}];
    if (h.annotation) ++t.by_word_annotation[{h.word, *h.annotation}];
  }
  return t;
}

// --- hits.jsonl --------------------------------------------------------------

inline void save_hits(const std::vector<KwicHit>& hits, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open hits file for writing: " + path);
  for (const auto& h : hits) {
    nlohmann::ordered_json j;
    j["word"] = h.word;
    j["record_id"] = h.record_id;
    j["gender"] = to_string(h.gender);
    j["subject"] = to_string(h.subject);
    j["sentence"] = h.sentence;
    j["sentence_index"] = h.sentence_index;
    if (h.annotation)
      j["annotation"] = to_string(*h.annotation);
    else
      j["annotation"] = nullptr;
    out << j.dump() << "\n";
  }
}

}  // namespace biaslens
