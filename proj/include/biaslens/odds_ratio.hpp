#pragma once

// Per-subject odds ratios of adjective use across genders.
//
// For a word w with male count em and female count ef, against gender totals
// M and F over the same subject:
//
//     OR(w) = (em / (M - em)) / (ef / (F - ef))
//
// i.e. leave-self-out denominators: each side is the word's frequency over
// the summed frequencies of all *other* words in that gender's evaluations.
// Words with fewer than `min_count` total mentions, or with OR outside
// [or_min, or_max] (bounds inclusive), are filtered. The log transform is the
// natural logarithm; anti-logs are carried alongside for reporting.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "biaslens/tagger.hpp"
#include "biaslens/types.hpp"

namespace biaslens {

struct GenderCounts {
  long male = 0;
  long female = 0;
};

struct GenderedFrequencyTable {
  Subject subject = Subject::Engineering;
  std::map<std::string, GenderCounts> counts;
};

enum class FilterReason { None, BelowMinCount, OutOfRange, ZeroDenominator };

inline std::string to_string(FilterReason r) {
  switch (r) {
    case FilterReason::None: return "";
    case FilterReason::BelowMinCount: return "below_min_count";
    case FilterReason::OutOfRange: return "out_of_range";
    case FilterReason::ZeroDenominator: return "zero_denominator";
  }
  return "";
}

struct OddsRatioEntry {
  std::string word;
  Subject subject = Subject::Engineering;
  long count_male = 0;
  long count_female = 0;
  double odds_ratio = 0.0;      // may be +inf
  double log_odds_ratio = 0.0;  // natural log; +/-inf at the extremes
  bool filtered = false;
  FilterReason reason = FilterReason::None;
};

struct SalientWord {
  std::string word;
  double log_odds_ratio = 0.0;
  double odds_ratio = 0.0;
};

struct SalientSet {
  Subject subject = Subject::Engineering;
  std::vector<SalientWord> male_salient;    // log OR descending, all > 0
  std::vector<SalientWord> female_salient;  // log OR ascending, all < 0
};

/// Sums the adjective profiles of all records with the given subject, split
/// by the record's gender. A subject absent from the corpus yields an empty
/// table (callers treat that as a warning, not an error).
inline GenderedFrequencyTable build_frequency_table(const std::vector<AdjectiveProfile>& profiles,
                                                    const std::vector<EvaluationRecord>& corpus,
                                                    Subject subject) {
  std::unordered_map<std::string, const EvaluationRecord*> by_id;
  by_id.reserve(corpus.size());
  for (const auto& r : corpus) by_id[r.record_id] = &r;

  GenderedFrequencyTable table;
  table.subject = subject;
  for (const auto& p : profiles) {
    auto it = by_id.find(p.record_id);
    if (it == by_id.end())
      throw Error("build_frequency_table: profile record '" + p.record_id +
                  "' is not in the corpus");
    const EvaluationRecord& rec = *it->second;
    if (rec.subject != subject) continue;
    for (const auto& [word, n] : p.counts) {
      auto& c = table.counts[word];
      if (rec.gender == Gender::Male)
        c.male += n;
      else
        c.female += n;
    }
  }
  return table;
}

inline std::vector<OddsRatioEntry> compute_odds_ratios(const GenderedFrequencyTable& table,
                                                       long min_count = 3, double or_min = 0.1,
                                                       double or_max = 10.0) {
  if (table.counts.size() == 1)
    throw DomainError("compute_odds_ratios: single-word table (all leave-self-out sums are 0)");
  long total_male = 0, total_female = 0;
  for (const auto& [w, c] : table.counts) {
    total_male += c.male;
    total_female += c.female;
  }
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<OddsRatioEntry> entries;
  entries.reserve(table.counts.size());
  for (const auto& [word, c] : table.counts) {
    OddsRatioEntry e;
    e.word = word;
    e.subject = table.subject;
    e.count_male = c.male;
    e.count_female = c.female;
    const double em = double(c.male), ef = double(c.female);
    const double den_m = double(total_male - c.male);
    const double den_f = double(total_female - c.female);

    bool zero_den = false;
    if (em == 0.0) {
      e.odds_ratio = 0.0;  // empty numerator dominates, even if ef is also 0
    } else if (den_m == 0.0 || ef == 0.0 || den_f == 0.0) {
      e.odds_ratio = inf;
      zero_den = true;
    } else {
      // single division of exact integer products: keeps OR == 1 exact and
      // gender-swapped ratios exact reciprocals in sign
      e.odds_ratio = (em * den_f) / (ef * den_m);
    }
    e.log_odds_ratio = e.odds_ratio == 0.0 ? -inf : std::log(e.odds_ratio);

    if (c.male + c.female < min_count) {
      e.filtered = true;
      e.reason = FilterReason::BelowMinCount;
    } else if (zero_den) {
      e.filtered = true;
      e.reason = FilterReason::ZeroDenominator;
    } else if (e.odds_ratio < or_min || e.odds_ratio > or_max) {
      e.filtered = true;
      e.reason = FilterReason::OutOfRange;
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

/// Top-k male-leaning (log OR > 0, descending) and bottom-k female-leaning
/// (log OR < 0, ascending) among unfiltered entries. Ties break
/// lexicographically; words at log OR exactly 0 lean to neither gender and
/// appear in neither list. Lists come up short when candidates are scarce.
inline SalientSet select_salient(const std::vector<OddsRatioEntry>& entries, int k = 10) {
  SalientSet set;
  if (!entries.empty()) set.subject = entries.front().subject;
  std::vector<const OddsRatioEntry*> male, female;
  for (const auto& e : entries) {
    if (e.filtered) continue;
    if (e.subject != set.subject)
      throw Error("select_salient: entries span multiple subjects");
    if (e.log_odds_ratio > 0.0)
      male.push_back(&e);
    else if (e.log_odds_ratio < 0.0)
      female.push_back(&e);
  }
  std::sort(male.begin(), male.end(), [](const OddsRatioEntry* a, const OddsRatioEntry* b) {
    if (a->log_odds_ratio != b->log_odds_ratio) return a->log_odds_ratio > b->log_odds_ratio;
    return a->word < b->word;
  });
  std::sort(female.begin(), female.end(), [](const OddsRatioEntry* a, const OddsRatioEntry* b) {
    if (a->log_odds_ratio != b->log_odds_ratio) return a->log_odds_ratio < b->log_odds_ratio;
    return a->word < b->word;
  });
  if (int(male.size()) > k) male.resize(size_t(k));
  if (int(female.size()) > k) female.resize(size_t(k));
  for (const auto* e : male)
    set.male_salient.push_back({e->word, e->log_odds_ratio, e->odds_ratio});
  for (const auto* e : female)
    set.female_salient.push_back({e->word, e->log_odds_ratio, e->odds_ratio});
  return set;
}

}  // namespace biaslens
