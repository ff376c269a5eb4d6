#pragma once

// Lexicon-based polarity scoring over salient adjective sets. Polarities
// live in [-1, 1]; a word absent from the lexicon is "not covered", which is
// a value rather than an error. Cell means are taken over covered words only.

#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "biaslens/odds_ratio.hpp"
#include "biaslens/tokenize.hpp"
#include "biaslens/types.hpp"

namespace biaslens {

class SentimentLexicon {
 public:
  SentimentLexicon() = default;

  /// TSV: word<TAB>polarity per line; '#' comments.
  static SentimentLexicon load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("missing sentiment lexicon file: " + path);
    SentimentLexicon lex;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw ParseError(path + " line " + std::to_string(line_no) +
                         ": expected word<TAB>polarity");
      std::string word = textdetail::ascii_lower(line.substr(0, tab));
      double polarity = 0.0;
      try {
        polarity = std::stod(line.substr(tab + 1));
      } catch (const std::exception&) {
        throw ParseError(path + " line " + std::to_string(line_no) + ": bad polarity value");
      }
      if (polarity < -1.0 || polarity > 1.0)
        throw ParseError(path + " line " + std::to_string(line_no) +
                         ": polarity outside [-1, 1]");
      lex.entries_[word] = polarity;
    }
    if (lex.entries_.empty()) throw ConfigError("sentiment lexicon is empty: " + path);
    return lex;
  }

  static SentimentLexicon from_entries(std::unordered_map<std::string, double> entries) {
    for (const auto& [w, p] : entries)
      if (p < -1.0 || p > 1.0) throw ConfigError("lexicon polarity outside [-1, 1]: " + w);
    SentimentLexicon lex;
    lex.entries_ = std::move(entries);
    return lex;
  }

  std::optional<double> score(const std::string& word) const {
    auto it = entries_.find(textdetail::ascii_lower(word));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, double> entries_;
};

inline std::optional<double> score_word(const std::string& word, const SentimentLexicon& lexicon) {
  return lexicon.score(word);
}

struct SentimentSummary {
  Subject subject = Subject::Engineering;
  Gender gender = Gender::Female;
  double mean_polarity = 0.0;
  int covered_words = 0;
  int total_words = 0;
};

struct SetScore {
  double mean_polarity = 0.0;
  int covered_words = 0;
  int total_words = 0;
};

inline SetScore score_set(const std::vector<std::string>& words, const SentimentLexicon& lexicon) {
  if (words.empty()) throw DomainError("score_set: empty word list");
  SetScore s;
  s.total_words = int(words.size());
  double sum = 0.0;
  for (const auto& w : words) {
    if (auto p = lexicon.score(w)) {
      sum += *p;
      ++s.covered_words;
    }
  }
  if (s.covered_words == 0)
    throw CoverageError("score_set: no word of the set is covered by the lexicon");
  s.mean_polarity = sum / double(s.covered_words);
  return s;
}

struct SentimentCellIssue {
  Subject subject = Subject::Engineering;
  Gender gender = Gender::Female;
  std::string reason;
};

struct SummarizeResult {
  std::vector<SentimentSummary> rows;        // one per (subject, gender) cell scored
  std::vector<SentimentCellIssue> skipped;  // cells with zero coverage or no salient words
};

/// Full-text mode: mean polarity over all lexicon-covered tokens of each
/// (subject, gender) cell's evaluation texts. Off the default path; the
/// standard analysis scores salient adjective sets.
inline SummarizeResult summarize_full_text(const std::vector<EvaluationRecord>& corpus,
                                           const SentimentLexicon& lexicon) {
  struct Cell {
    double sum = 0.0;
    int covered = 0;
    int total = 0;
  };
  std::map<std::pair<int, int>, Cell> cells;  // (subject, gender) -> cell
  for (const auto& r : corpus) {
    auto& cell = cells[{int(r.subject), int(r.gender)}];
    for (const auto& sent : tokenize(r.text).sentences) {
      for (const auto& tok : sent.tokens) {
        ++cell.total;
        if (auto p = lexicon.score(tok.lower)) {
          cell.sum += *p;
          ++cell.covered;
        }
      }
    }
  }
  SummarizeResult out;
  for (Subject s : kAllSubjects) {
    for (Gender g : kAllGenders) {
      auto it = cells.find({int(s), int(g)});
      if (it == cells.end()) continue;
      const Cell& cell = it->second;
      if (cell.covered == 0) {
        out.skipped.push_back({s, g, "zero lexicon coverage"});
        continue;
      }
      out.rows.push_back({s, g, cell.sum / cell.covered, cell.covered, cell.total});
    }
  }
  return out;
}

/// Mean polarity of each gender's salient adjectives, per subject.
inline SummarizeResult summarize(const std::vector<SalientSet>& salient_sets,
                                 const SentimentLexicon& lexicon) {
  SummarizeResult out;
  for (const auto& set : salient_sets) {
    struct Cell {
      Gender gender;
      const std::vector<SalientWord>* words;
    };
    for (const Cell& cell : {Cell{Gender::Female, &set.female_salient},
                             Cell{Gender::Male, &set.male_salient}}) {
      if (cell.words->empty()) {
        out.skipped.push_back({set.subject, cell.gender, "no salient words"});
        continue;
      }
      std::vector<std::string> words;
      words.reserve(cell.words->size());
      for (const auto& sw : *cell.words) words.push_back(sw.word);
      try {
        SetScore s = score_set(words, lexicon);
        out.rows.push_back({set.subject, cell.gender, s.mean_polarity, s.covered_words,
                            s.total_words});
      } catch (const CoverageError&) {
        out.skipped.push_back({set.subject, cell.gender, "zero lexicon coverage"});
      }
    }
  }
  return out;
}

}  // namespace biaslens
