#pragma once

// Averaged-perceptron part-of-speech tagger. Greedy left-to-right decoding
// with the usual word/affix/context features; weights are averaged over all
// update steps. Models are trained offline (tools/train_tagger) and shipped
// as a version-stamped JSON file.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "biaslens/types.hpp"
#include "biaslens/version.hpp"

namespace biaslens {

struct TaggedWord {
  std::string word;
  std::string tag;
};
using TaggedSentence = std::vector<TaggedWord>;

class AveragedPerceptron {
 public:
  const std::vector<std::string>& tags() const { return tags_; }

  std::vector<std::string> predict(const std::vector<std::string>& words) const {
    std::vector<std::string> out;
    out.reserve(words.size());
    std::string prev = kStart, prev2 = kStart2;
    for (size_t i = 0; i < words.size(); ++i) {
      auto feats = features(words, i, prev, prev2);
      int best = score_argmax(feats);
      const std::string& tag = tags_.at(size_t(best));
      out.push_back(tag);
      prev2 = prev;
      prev = tag;
    }
    return out;
  }

  /// Trains from scratch. Deterministic for a fixed seed.
  static AveragedPerceptron train(const std::vector<TaggedSentence>& sentences, int epochs,
                                  uint64_t seed) {
    AveragedPerceptron model;
    std::map<std::string, int> tag_ids;
    for (const auto& s : sentences)
      for (const auto& tw : s)
        if (tag_ids.emplace(tw.tag, int(tag_ids.size())).second) model.tags_.push_back(tw.tag);
    // tag ids follow sorted order for determinism
    model.tags_.clear();
    for (auto& [t, id] : tag_ids) model.tags_.push_back(t);
    int next_id = 0;
    for (auto& [t, id] : tag_ids) id = next_id++;

    std::unordered_map<std::string, std::vector<double>> totals;   // accumulated weight
    std::unordered_map<std::string, std::vector<uint64_t>> stamps; // last update step
    uint64_t step = 0;
    auto upd = [&](const std::string& feat, int tag, double delta) {
      auto& w = model.weights_[feat];
      auto& tot = totals[feat];
      auto& ts = stamps[feat];
      if (w.empty()) {
        w.assign(model.tags_.size(), 0.0);
        tot.assign(model.tags_.size(), 0.0);
        ts.assign(model.tags_.size(), 0);
      }
      tot[size_t(tag)] += double(step - ts[size_t(tag)]) * w[size_t(tag)];
      ts[size_t(tag)] = step;
      w[size_t(tag)] += delta;
    };

    std::vector<size_t> order(sentences.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);

    for (int epoch = 0; epoch < epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (size_t si : order) {
        const auto& sent = sentences[si];
        std::vector<std::string> words;
        words.reserve(sent.size());
        for (const auto& tw : sent) words.push_back(tw.word);
        std::string prev = kStart, prev2 = kStart2;
        for (size_t i = 0; i < sent.size(); ++i) {
          ++step;
          auto feats = model.features(words, i, prev, prev2);
          int guess = model.score_argmax(feats);
          int truth = tag_ids.at(sent[i].tag);
          if (guess != truth) {
            for (const auto& f : feats) {
              upd(f, truth, +1.0);
              upd(f, guess, -1.0);
            }
          }
          // gold tags feed the history during training
          prev2 = prev;
          prev = sent[i].tag;
        }
      }
    }
    // finalize averages
    for (auto& [feat, w] : model.weights_) {
      auto& tot = totals[feat];
      auto& ts = stamps[feat];
      for (size_t t = 0; t < w.size(); ++t) {
        tot[t] += double(step - ts[t]) * w[t];
        w[t] = step ? tot[t] / double(step) : 0.0;
      }
    }
    return model;
  }

  void save(const std::string& path) const {
    nlohmann::ordered_json j;
    j["format"] = "biaslens-perceptron";
    j["version"] = kTaggerModelVersion;
    j["tags"] = tags_;
    nlohmann::ordered_json w = nlohmann::ordered_json::object();
    std::vector<std::string> feats;
    feats.reserve(weights_.size());
    for (const auto& [f, _] : weights_) feats.push_back(f);
    std::sort(feats.begin(), feats.end());
    for (const auto& f : feats) {
      nlohmann::ordered_json per_tag = nlohmann::ordered_json::object();
      const auto& row = weights_.at(f);
      for (size_t t = 0; t < row.size(); ++t) {
        if (row[t] == 0.0) continue;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", row[t]);
        per_tag[tags_[t]] = std::stod(buf);
      }
      if (!per_tag.empty()) w[f] = std::move(per_tag);
    }
    j["weights"] = std::move(w);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write tagger model: " + path);
    out << j.dump();
  }

  static AveragedPerceptron load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("missing tagger model file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseError("tagger model is not valid JSON: " + path);
    if (j.value("format", "") != "biaslens-perceptron")
      throw ConfigError("not a tagger model file: " + path);
    if (j.value("version", -1) != kTaggerModelVersion)
      throw ConfigError("tagger model version mismatch in " + path + ": expected " +
                        std::to_string(kTaggerModelVersion) + ", got " +
                        std::to_string(j.value("version", -1)));
    AveragedPerceptron model;
    model.tags_ = j.at("tags").get<std::vector<std::string>>();
    std::map<std::string, int> tag_ids;
    for (size_t t = 0; t < model.tags_.size(); ++t) tag_ids[model.tags_[t]] = int(t);
    for (const auto& [feat, row] : j.at("weights").items()) {
      auto& w = model.weights_[feat];
      w.assign(model.tags_.size(), 0.0);
      for (const auto& [tag, val] : row.items()) {
        auto it = tag_ids.find(tag);
        if (it == tag_ids.end()) throw ParseError("tagger model references unknown tag: " + tag);
        w[size_t(it->second)] = val.get<double>();
      }
    }
    return model;
  }

 private:
  static constexpr const char* kStart = "-START-";
  static constexpr const char* kStart2 = "-START2-";

  static std::string lower_ascii(const std::string& s) {
    std::string o = s;
    for (char& c : o)
      if (c >= 'A' && c <= 'Z') c = char(c - 'A' + 'a');
    return o;
  }

  static std::string suffix(const std::string& s, size_t n) {
    return s.size() <= n ? s : s.substr(s.size() - n);
  }

  std::vector<std::string> features(const std::vector<std::string>& words, size_t i,
                                    const std::string& prev, const std::string& prev2) const {
    const std::string w = lower_ascii(words[i]);
    const std::string pw = i >= 1 ? lower_ascii(words[i - 1]) : std::string(kStart);
    const std::string nw = i + 1 < words.size() ? lower_ascii(words[i + 1]) : std::string("-END-");
    bool cap = !words[i].empty() && words[i][0] >= 'A' && words[i][0] <= 'Z';
    bool hyph = w.find('-') != std::string::npos;

    std::vector<std::string> f;
    f.reserve(14);
    f.push_back("bias");
    f.push_back("w=" + w);
    f.push_back("suf3=" + suffix(w, 3));
    f.push_back("suf2=" + suffix(w, 2));
    f.push_back("pre1=" + (w.empty() ? std::string() : w.substr(0, 1)));
    f.push_back("t-1=" + prev);
    f.push_back("t-2=" + prev2);
    f.push_back("t-1,t-2=" + prev + "|" + prev2);
    f.push_back("t-1,w=" + prev + "|" + w);
    f.push_back("w-1=" + pw);
    f.push_back("suf3-1=" + suffix(pw, 3));
    f.push_back("w+1=" + nw);
    f.push_back("suf3+1=" + suffix(nw, 3));
    f.push_back(std::string("shape=") + (cap ? "X" : "x") + (hyph ? "-" : ""));
    return f;
  }

  int score_argmax(const std::vector<std::string>& feats) const {
    std::vector<double> scores(tags_.size(), 0.0);
    for (const auto& f : feats) {
      auto it = weights_.find(f);
      if (it == weights_.end()) continue;
      const auto& row = it->second;
      for (size_t t = 0; t < row.size(); ++t) scores[t] += row[t];
    }
    // ties resolve to the lowest tag id (sorted tag names), deterministically
    int best = 0;
    for (size_t t = 1; t < scores.size(); ++t)
      if (scores[t] > scores[size_t(best)]) best = int(t);
    return best;
  }

  std::vector<std::string> tags_;
  std::unordered_map<std::string, std::vector<double>> weights_;
};

/// TSV: `word<TAB>tag` per line, blank line between sentences, '#' comments.
inline std::vector<TaggedSentence> read_tagged_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open tagged file: " + path);
  std::vector<TaggedSentence> sentences;
  TaggedSentence cur;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line[0] == '#') continue;
    if (line.empty()) {
      if (!cur.empty()) {
        sentences.push_back(std::move(cur));
        cur.clear();
      }
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(path + " line " + std::to_string(line_no) + ": expected word<TAB>tag");
    cur.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  if (!cur.empty()) sentences.push_back(std::move(cur));
  return sentences;
}

}  // namespace biaslens
