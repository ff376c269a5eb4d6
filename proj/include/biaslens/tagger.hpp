#pragma once

// Adjective tagging strategies over tokenized docs, plus per-record
// adjective profiles. Strategies are data-driven and swappable: a curated
// adjective lexicon, or an averaged-perceptron POS tagger.

#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "biaslens/perceptron.hpp"
#include "biaslens/tokenize.hpp"
#include "biaslens/types.hpp"

namespace biaslens {

enum class TagStrategy { Lexicon, Perceptron };

inline TagStrategy tag_strategy_from_string(std::string_view s) {
  if (s == "lexicon") return TagStrategy::Lexicon;
  if (s == "perceptron") return TagStrategy::Perceptron;
  throw ConfigError("unknown tagging strategy: '" + std::string(s) + "'");
}

struct AdjectiveProfile {
  std::string record_id;
  std::map<std::string, int> counts;  // lowercased adjective -> count

  friend bool operator==(const AdjectiveProfile&, const AdjectiveProfile&) = default;
};

class Tagger {
 public:
  virtual ~Tagger() = default;
  /// One flag per token of the sentence.
  virtual std::vector<bool> adjective_mask(const Sentence& sentence) const = 0;
};

/// Word-list strategy. A hyphenated compound counts as an adjective when the
/// full form or its final segment is in the list ("thought-provoking").
class LexiconTagger : public Tagger {
 public:
  explicit LexiconTagger(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("missing adjective lexicon file: " + path);
    std::string line;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
        line.pop_back();
      size_t b = line.find_first_not_of(" \t");
      if (b == std::string::npos) continue;
      words_.insert(textdetail::ascii_lower(line.substr(b)));
    }
    if (words_.empty()) throw ConfigError("adjective lexicon is empty: " + path);
  }

  std::vector<bool> adjective_mask(const Sentence& sentence) const override {
    std::vector<bool> mask(sentence.tokens.size(), false);
    for (size_t i = 0; i < sentence.tokens.size(); ++i) {
      const std::string& w = sentence.tokens[i].lower;
      if (words_.count(w)) {
        mask[i] = true;
        continue;
      }
      auto dash = w.rfind('-');
      if (dash != std::string::npos && dash + 1 < w.size())
        mask[i] = words_.count(w.substr(dash + 1)) > 0;
    }
    return mask;
  }

  size_t size() const { return words_.size(); }

 private:
  std::set<std::string> words_;
};

class PerceptronTagger : public Tagger {
 public:
  explicit PerceptronTagger(const std::string& model_path)
      : model_(AveragedPerceptron::load(model_path)) {}
  explicit PerceptronTagger(AveragedPerceptron model) : model_(std::move(model)) {}

  std::vector<bool> adjective_mask(const Sentence& sentence) const override {
    std::vector<std::string> words;
    words.reserve(sentence.tokens.size());
    for (const auto& t : sentence.tokens) words.push_back(t.surface);
    auto tags = model_.predict(words);
    std::vector<bool> mask(tags.size());
    for (size_t i = 0; i < tags.size(); ++i) mask[i] = tags[i] == "ADJ";
    return mask;
  }

 private:
  AveragedPerceptron model_;
};

inline std::unique_ptr<Tagger> make_tagger(TagStrategy strategy, const std::string& resource_path) {
  if (strategy == TagStrategy::Lexicon) return std::make_unique<LexiconTagger>(resource_path);
  return std::make_unique<PerceptronTagger>(resource_path);
}

/// Pure: returns a copy with every token tagged; never adds or drops tokens.
inline TokenizedDoc tag_adjectives(const TokenizedDoc& doc, const Tagger& tagger) {
  TokenizedDoc out = doc;
  for (auto& sent : out.sentences) {
    auto mask = tagger.adjective_mask(sent);
    for (size_t i = 0; i < sent.tokens.size(); ++i)
      sent.tokens[i].tag = mask[i] ? Tag::Adjective : Tag::Other;
  }
  out.tagged = true;
  return out;
}

/// Multiset of lowercased adjective tokens.
inline AdjectiveProfile profile(const TokenizedDoc& doc) {
  if (!doc.tagged) throw StateError("profile: doc has not been tagged");
  AdjectiveProfile p;
  p.record_id = doc.record_id;
  for (const auto& sent : doc.sentences)
    for (const auto& tok : sent.tokens)
      if (tok.tag == Tag::Adjective) ++p.counts[tok.lower];
  return p;
}

// --- profiles.jsonl ---------------------------------------------------------

inline void save_profiles(const std::vector<AdjectiveProfile>& profiles, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open profiles file for writing: " + path);
  for (const auto& p : profiles) {
    nlohmann::ordered_json j;
    j["record_id"] = p.record_id;
    nlohmann::ordered_json c = nlohmann::ordered_json::object();
    for (const auto& [w, n] : p.counts) c[w] = n;
    j["counts"] = std::move(c);
    out << j.dump() << "\n";
  }
}

inline std::vector<AdjectiveProfile> load_profiles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open profiles file: " + path);
  std::vector<AdjectiveProfile> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("record_id") || !j.contains("counts"))
      throw ParseError("profiles line " + std::to_string(line_no) + ": malformed entry");
    AdjectiveProfile p;
    p.record_id = j["record_id"].get<std::string>();
    for (const auto& [w, n] : j["counts"].items()) p.counts[w] = n.get<int>();
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace biaslens
