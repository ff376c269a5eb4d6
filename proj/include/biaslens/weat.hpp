#pragma once

// Word Embedding Association Test.
//
//   s(w, A, B) = mean_{a in A} cos(w, a) - mean_{b in B} cos(w, b)
//   s(X, Y, A, B) = sum_{x in X} s(x, A, B) - sum_{y in Y} s(y, A, B)
//
// X/Y are the salient adjective sets for male/female evaluations; A/B are
// attribute sets (names, or career/family words). A positive statistic means
// X is more associated with A than Y is. Target words missing from the
// embedding vocabulary are skipped and reported, never imputed; when more
// than half of either target set is missing the result is flagged invalid.

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biaslens/embedding.hpp"
#include "biaslens/types.hpp"

namespace biaslens {

struct WordSetPair {
  std::string label;
  std::vector<std::string> set_a;
  std::vector<std::string> set_b;

  void validate() const {
    if (set_a.empty() || set_b.empty())
      throw ConfigError("word set pair '" + label + "': both sets must be nonempty");
    for (const auto& a : set_a)
      for (const auto& b : set_b)
        if (a == b)
          throw ConfigError("word set pair '" + label + "': sets overlap on '" + a + "'");
  }
};

enum class AttributePairing { MaleFemaleNames, CareerFamily };

inline std::string to_string(AttributePairing p) {
  return p == AttributePairing::MaleFemaleNames ? "male_female_names" : "career_family";
}

/// The published attribute sets, verbatim.
inline WordSetPair default_name_sets() {
  return {"male_female_names",
          {"john", "paul", "mike", "kevin", "steve", "greg", "jeff", "bill"},
          {"amy", "joan", "lisa", "sarah", "diana", "kate", "ann", "donna"}};
}

inline WordSetPair default_career_family_sets() {
  return {"career_family",
          {"executive", "management", "professional", "corporation", "salary", "office",
           "business", "career"},
          {"home", "parents", "children", "family", "cousins", "marriage", "wedding",
           "relatives"}};
}

struct SkippedWord {
  std::string word;
  std::string reason;
};

struct WeatResult {
  std::optional<Subject> subject;
  std::string attribute_label;
  double statistic = 0.0;
  std::map<std::string, double> per_word;  // s(w, A, B) for each scored target word
  std::vector<SkippedWord> skipped_words;
  bool invalid = false;  // >50% of X or Y out of vocabulary
};

inline double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw DomainError("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                      std::to_string(v.size()) + ")");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    dot += double(u[i]) * double(v[i]);
    nu += double(u[i]) * double(u[i]);
    nv += double(v[i]) * double(v[i]);
  }
  if (nu == 0.0 || nv == 0.0) throw DomainError("cosine: zero-norm vector");
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

namespace weatdetail {

/// Verbatim lookup, then with hyphens stripped; null when absent.
inline const std::vector<double>* lookup(const EmbeddingStore& store, const std::string& word) {
  if (const auto* v = store.find(word)) return v;
  if (word.find('-') != std::string::npos) {
    std::string dehyph;
    dehyph.reserve(word.size());
    for (char c : word)
      if (c != '-') dehyph += c;
    if (const auto* v = store.find(dehyph)) return v;
  }
  return nullptr;
}

/// Present attribute vectors; configuration error if all are missing.
inline std::vector<const std::vector<double>*> attribute_vectors(const EmbeddingStore& store,
                                                                const std::vector<std::string>& ws,
                                                                const std::string& which,
                                                                std::vector<SkippedWord>* skipped) {
  std::vector<const std::vector<double>*> out;
  for (const auto& w : ws) {
    if (const auto* v = lookup(store, w))
      out.push_back(v);
    else if (skipped)
      skipped->push_back({w, "attribute word missing from embeddings (" + which + ")"});
  }
  if (out.empty())
    throw ConfigError("WEAT: attribute set " + which + " entirely missing from embeddings");
  return out;
}

inline double mean_cos(const std::vector<double>& w,
                       const std::vector<const std::vector<double>*>& attrs) {
  double sum = 0.0;
  for (const auto* a : attrs) sum += cosine(w, *a);
  return sum / double(attrs.size());
}

}  // namespace weatdetail

/// s(w, A, B); nullopt when w itself is out of vocabulary (skip signal).
inline std::optional<double> weat_word(const std::string& w, const std::vector<std::string>& A,
                                       const std::vector<std::string>& B,
                                       const EmbeddingStore& store) {
  auto a_vecs = weatdetail::attribute_vectors(store, A, "A", nullptr);
  auto b_vecs = weatdetail::attribute_vectors(store, B, "B", nullptr);
  const auto* wv = weatdetail::lookup(store, w);
  if (!wv) return std::nullopt;
  return weatdetail::mean_cos(*wv, a_vecs) - weatdetail::mean_cos(*wv, b_vecs);
}

inline WeatResult weat(const std::vector<std::string>& X, const std::vector<std::string>& Y,
                       const WordSetPair& attributes, const EmbeddingStore& store,
                       std::optional<Subject> subject = std::nullopt) {
  attributes.validate();
  WeatResult res;
  res.subject = subject;
  res.attribute_label = attributes.label;

  auto a_vecs = weatdetail::attribute_vectors(store, attributes.set_a, "A", &res.skipped_words);
  auto b_vecs = weatdetail::attribute_vectors(store, attributes.set_b, "B", &res.skipped_words);

  size_t x_hit = 0, y_hit = 0;
  auto side = [&](const std::vector<std::string>& words, double sign, size_t& hits,
                  const char* which) {
    double sum = 0.0;
    for (const auto& w : words) {
      const auto* wv = weatdetail::lookup(store, w);
      if (!wv) {
        res.skipped_words.push_back({w, std::string("target word missing from embeddings (") +
                                            which + ")"});
        continue;
      }
      double s = weatdetail::mean_cos(*wv, a_vecs) - weatdetail::mean_cos(*wv, b_vecs);
      res.per_word[w] = s;
      sum += sign * s;
      ++hits;
    }
    return sum;
  };
  double stat = side(X, +1.0, x_hit, "X");
  stat += side(Y, -1.0, y_hit, "Y");

  if (x_hit == 0)
    throw ConfigError("WEAT: target set X entirely missing from embeddings");
  if (y_hit == 0)
    throw ConfigError("WEAT: target set Y entirely missing from embeddings");
  res.statistic = stat;
  res.invalid = 2 * x_hit < X.size() || 2 * y_hit < Y.size();
  return res;
}

}  // namespace biaslens
