#pragma once

// Report-side data products: box-plot summaries of log OR distributions and
// thematic annotation of salient adjective tables.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "biaslens/odds_ratio.hpp"
#include "biaslens/tokenize.hpp"
#include "biaslens/types.hpp"

namespace biaslens {

enum class ThematicCategory { ApproachabilitySupport, Entertainment, ExcellenceDistinction, None };

inline std::string to_string(ThematicCategory c) {
  switch (c) {
    case ThematicCategory::ApproachabilitySupport: return "approachability_support";
    case ThematicCategory::Entertainment: return "entertainment";
    case ThematicCategory::ExcellenceDistinction: return "excellence_distinction";
    case ThematicCategory::None: return "none";
  }
  return "none";
}

inline ThematicCategory thematic_category_from_string(std::string_view s) {
  if (s == "approachability_support") return ThematicCategory::ApproachabilitySupport;
  if (s == "entertainment") return ThematicCategory::Entertainment;
  if (s == "excellence_distinction") return ThematicCategory::ExcellenceDistinction;
  if (s == "none") return ThematicCategory::None;
  throw ParseError("unknown thematic category: '" + std::string(s) + "'");
}

struct ThematicAnnotation {
  std::string word;
  ThematicCategory category = ThematicCategory::None;
};

/// CSV: word,category ('#' comments, header optional). Conflicting duplicate
/// rows for one word are a validation error.
inline std::vector<ThematicAnnotation> load_thematic_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open thematic annotation file: " + path);
  std::map<std::string, ThematicCategory> seen;
  std::vector<ThematicAnnotation> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError(path + " line " + std::to_string(line_no) + ": expected word,category");
    std::string word = textdetail::ascii_lower(line.substr(0, comma));
    std::string cat = line.substr(comma + 1);
    if (line_no == 1 && word == "word") continue;  // header
    ThematicCategory c = thematic_category_from_string(cat);
    auto [it, inserted] = seen.emplace(word, c);
    if (!inserted && it->second != c)
      throw ValidationError(path + " line " + std::to_string(line_no) +
                            ": conflicting category for '" + word + "'");
    if (inserted) out.push_back({word, c});
  }
  return out;
}

struct AnnotatedSalientWord {
  std::string word;
  double log_odds_ratio = 0.0;
  double odds_ratio = 0.0;
  Gender gender = Gender::Female;
  ThematicCategory category = ThematicCategory::None;
};

struct AnnotatedSalientSet {
  Subject subject = Subject::Engineering;
  std::vector<AnnotatedSalientWord> words;  // male set first (log OR desc), then female
};

/// Every salient word ends up with exactly one category; unannotated words
/// default to none.
inline AnnotatedSalientSet apply_annotations(const SalientSet& salient,
                                             const std::vector<ThematicAnnotation>& annotations) {
  std::map<std::string, ThematicCategory> by_word;
  for (const auto& a : annotations) {
    auto [it, inserted] = by_word.emplace(a.word, a.category);
    if (!inserted && it->second != a.category)
      throw ValidationError("conflicting thematic annotations for '" + a.word + "'");
  }
  AnnotatedSalientSet out;
  out.subject = salient.subject;
  auto category_of = [&](const std::string& w) {
    auto it = by_word.find(w);
    return it == by_word.end() ? ThematicCategory::None : it->second;
  };
  for (const auto& sw : salient.male_salient)
    out.words.push_back({sw.word, sw.log_odds_ratio, sw.odds_ratio, Gender::Male,
                         category_of(sw.word)});
  for (const auto& sw : salient.female_salient)
    out.words.push_back({sw.word, sw.log_odds_ratio, sw.odds_ratio, Gender::Female,
                         category_of(sw.word)});
  return out;
}

struct DistributionSummary {
  Subject subject = Subject::Engineering;
  double median = 0.0, q1 = 0.0, q3 = 0.0, iqr = 0.0;
  double lower_whisker = 0.0, upper_whisker = 0.0;
  std::vector<std::pair<std::string, double>> outliers;  // (word, log OR)
  bool degenerate = false;  // fewer than 4 unfiltered entries
};

namespace reportdetail {

/// Linear-interpolation quantile with inclusive endpoints (spreadsheet
/// QUARTILE.INC / R type 7) over sorted values.
inline double quantile_inclusive(const std::vector<double>& sorted, double p) {
  const size_t n = sorted.size();
  if (n == 1) return sorted[0];
  double pos = p * double(n - 1);
  size_t lo = size_t(std::floor(pos));
  size_t hi = std::min(lo + 1, n - 1);
  double frac = pos - double(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace reportdetail

/// Box-plot statistics of the unfiltered entries' log OR values: inclusive
/// quartiles, Tukey 1.5*IQR whiskers clamped to observed values, outliers
/// listed with their words.
inline DistributionSummary summarize_distribution(const std::vector<OddsRatioEntry>& entries) {
  DistributionSummary s;
  std::vector<std::pair<double, std::string>> vals;  // (log OR, word)
  for (const auto& e : entries) {
    if (e.filtered) continue;
    s.subject = e.subject;
    vals.emplace_back(e.log_odds_ratio, e.word);
  }
  if (!entries.empty()) s.subject = entries.front().subject;
  if (vals.size() < 4) {
    s.degenerate = true;
    return s;
  }
  std::sort(vals.begin(), vals.end());
  std::vector<double> xs;
  xs.reserve(vals.size());
  for (const auto& [v, w] : vals) xs.push_back(v);

  s.q1 = reportdetail::quantile_inclusive(xs, 0.25);
  s.median = reportdetail::quantile_inclusive(xs, 0.5);
  s.q3 = reportdetail::quantile_inclusive(xs, 0.75);
  s.iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * s.iqr;
  const double hi_fence = s.q3 + 1.5 * s.iqr;
  s.lower_whisker = s.q3;  // overwritten below; smallest value inside the fence
  s.upper_whisker = s.q1;
  for (double x : xs) {
    if (x >= lo_fence) {
      s.lower_whisker = x;
      break;
    }
  }
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) {
    if (*it <= hi_fence) {
      s.upper_whisker = *it;
      break;
    }
  }
  for (const auto& [v, w] : vals)
    if (v < lo_fence || v > hi_fence) s.outliers.emplace_back(w, v);
  return s;
}

}  // namespace biaslens
