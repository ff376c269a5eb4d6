#pragma once

// End-to-end pipeline: corpus -> adjective profiles -> odds ratios/salient
// sets -> WEAT + sentiment + stats + KWIC, emitted as a deterministic report
// bundle with a content manifest.
//
// Stages are content-addressed: each stage's key hashes its inputs, its
// parameters and its version; outputs of a matching previous run are reused
// from the .stage/ directory, so e.g. the embedding file is only loaded when
// the WEAT inputs actually changed. All files are written atomically.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "biaslens/corpus.hpp"
#include "biaslens/csv.hpp"
#include "biaslens/embedding.hpp"
#include "biaslens/generate.hpp"
#include "biaslens/kwic.hpp"
#include "biaslens/odds_ratio.hpp"
#include "biaslens/report.hpp"
#include "biaslens/sentiment.hpp"
#include "biaslens/sha256.hpp"
#include "biaslens/stats.hpp"
#include "biaslens/tagger.hpp"
#include "biaslens/tokenize.hpp"
#include "biaslens/types.hpp"
#include "biaslens/version.hpp"
#include "biaslens/weat.hpp"

namespace biaslens {

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

struct PipelineConfig {
  // corpus source: exactly one of corpus_path / grid_path
  std::string corpus_path;
  std::string grid_path;
  bool offline = false;
  GenerationConfig generation;

  // extraction
  TagStrategy strategy = TagStrategy::Lexicon;
  std::string adjective_lexicon_path;
  std::string tagger_model_path;

  // odds ratio
  long min_count = 3;
  double or_min = 0.1;
  double or_max = 10.0;
  int top_k = 10;

  // weat
  std::string embeddings_path;
  std::string wordsets_path;  // optional; defaults to the published sets

  // sentiment
  std::string sentiment_lexicon_path;

  // kwic
  std::vector<std::string> kwic_targets;
  std::string kwic_annotations_path;  // optional

  // report
  std::string thematic_annotations_path;  // optional
  std::string out_dir;
};

namespace pipedetail {

inline std::string expand_env(const std::string& value, const std::string& context) {
  std::string out;
  size_t i = 0;
  while (i < value.size()) {
    if (value[i] == '$' && i + 1 < value.size() && value[i + 1] == '{') {
      auto close = value.find('}', i + 2);
      if (close == std::string::npos)
        throw ConfigError(context + ": unterminated ${ in value");
      std::string name = value.substr(i + 2, close - i - 2);
      const char* v = std::getenv(name.c_str());
      if (!v) throw ConfigError(context + ": environment variable " + name + " is not set");
      out += v;
      i = close + 1;
    } else {
      out += value[i++];
    }
  }
  return out;
}

inline std::string resolve_path(const std::string& value, const std::filesystem::path& base) {
  if (value.empty()) return value;
  std::filesystem::path p(value);
  if (p.is_absolute()) return p.lexically_normal().string();
  return (base / p).lexically_normal().string();
}

}  // namespace pipedetail

/// Key-value config: `key = value` lines, '#' comments. Values may reference
/// ${ENV_VAR} (intended for secret material only — API keys themselves are
/// read from BIASLENS_API_KEY and never belong in a config file). Relative
/// paths resolve against the config file's directory.
inline PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open pipeline config: " + path);
  const std::filesystem::path base = std::filesystem::absolute(path).parent_path();

  std::map<std::string, std::string> kv;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      size_t b = s.find_first_not_of(" \t");
      if (b == std::string::npos) return std::string();
      size_t e = s.find_last_not_of(" \t");
      return s.substr(b, e - b + 1);
    };
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + " line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = pipedetail::expand_env(trim(t.substr(eq + 1)),
                                               path + " line " + std::to_string(line_no));
    if (!kv.emplace(key, value).second)
      throw ConfigError(path + " line " + std::to_string(line_no) + ": duplicate key " + key);
  }

  PipelineConfig c;
  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto take_path = [&](const char* key) {
    auto v = take(key);
    return v ? pipedetail::resolve_path(*v, base) : std::string();
  };
  auto parse_bool = [&](const std::string& v, const char* key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(std::string("config key ") + key + ": expected boolean, got '" + v + "'");
  };

  c.corpus_path = take_path("corpus");
  c.grid_path = take_path("grid");
  if (auto v = take("offline")) c.offline = parse_bool(*v, "offline");
  if (auto v = take("endpoint")) c.generation.endpoint_url = *v;
  if (auto v = take("model")) c.generation.model_name = *v;
  if (auto v = take("temperature")) c.generation.temperature = std::stod(*v);
  if (auto v = take("max_concurrent")) c.generation.max_concurrent_requests = std::stoi(*v);
  if (auto v = take("retry_limit")) c.generation.retry_limit = std::stoi(*v);
  c.generation.cache_dir = take_path("cache_dir");
  if (auto v = take("strategy")) c.strategy = tag_strategy_from_string(*v);
  c.adjective_lexicon_path = take_path("adjective_lexicon");
  c.tagger_model_path = take_path("tagger_model");
  if (auto v = take("min_count")) c.min_count = std::stol(*v);
  if (auto v = take("or_min")) c.or_min = std::stod(*v);
  if (auto v = take("or_max")) c.or_max = std::stod(*v);
  if (auto v = take("top_k")) c.top_k = std::stoi(*v);
  c.embeddings_path = take_path("embeddings");
  c.wordsets_path = take_path("wordsets");
  c.sentiment_lexicon_path = take_path("sentiment_lexicon");
  if (auto v = take("targets")) {
    std::stringstream ss(*v);
    std::string t;
    while (std::getline(ss, t, ','))
      if (!t.empty()) c.kwic_targets.push_back(textdetail::ascii_lower(t));
  }
  c.kwic_annotations_path = take_path("kwic_annotations");
  c.thematic_annotations_path = take_path("thematic_annotations");
  c.out_dir = take_path("out_dir");

  if (!kv.empty()) throw ConfigError(path + ": unknown config key '" + kv.begin()->first + "'");
  if (c.corpus_path.empty() == c.grid_path.empty())
    throw ConfigError(path + ": exactly one of 'corpus' or 'grid' must be set");
  return c;
}

/// Word-set config file: {"male_female_names": {"a": [...], "b": [...]},
/// "career_family": {...}}. Missing pairings fall back to the defaults.
inline std::pair<WordSetPair, WordSetPair> load_wordsets(const std::string& path) {
  std::pair<WordSetPair, WordSetPair> out{default_name_sets(), default_career_family_sets()};
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open word-set file: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError("word-set file is not valid JSON: " + path);
  auto read_pair = [&](const char* label, WordSetPair& dst) {
    if (!j.contains(label)) return;
    dst.label = label;
    dst.set_a = j[label].at("a").get<std::vector<std::string>>();
    dst.set_b = j[label].at("b").get<std::vector<std::string>>();
    dst.validate();
  };
  read_pair("male_female_names", out.first);
  read_pair("career_family", out.second);
  return out;
}

// ---------------------------------------------------------------------------
// Bundle serialization
// ---------------------------------------------------------------------------

namespace pipedetail {

inline nlohmann::ordered_json rounded(double v) {
  std::string s = format_number(v);
  if (s == "inf" || s == "-inf" || s == "nan") return nullptr;
  return nlohmann::ordered_json::parse(s);
}

inline std::string or_csv(const std::vector<OddsRatioEntry>& entries) {
  CsvWriter w({"subject", "word", "count_male", "count_female", "odds_ratio", "log_odds_ratio",
               "filtered", "filter_reason"});
  for (const auto& e : entries) {
    w.append_row({to_string(e.subject), e.word, std::to_string(e.count_male),
                  std::to_string(e.count_female), format_number(e.odds_ratio),
                  format_number(e.log_odds_ratio), e.filtered ? "true" : "false",
                  to_string(e.reason)});
  }
  return w.str();
}

inline nlohmann::ordered_json salient_word_json(const AnnotatedSalientWord& sw) {
  nlohmann::ordered_json j;
  j["word"] = sw.word;
  j["log_odds_ratio"] = rounded(sw.log_odds_ratio);
  j["odds_ratio"] = rounded(sw.odds_ratio);
  j["category"] = to_string(sw.category);
  return j;
}

inline std::string salient_json(const std::vector<AnnotatedSalientSet>& sets, int top_k) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& s : sets) {
    nlohmann::ordered_json e;
    e["subject"] = to_string(s.subject);
    nlohmann::ordered_json male = nlohmann::ordered_json::array();
    nlohmann::ordered_json female = nlohmann::ordered_json::array();
    int n_male = 0, n_female = 0;
    for (const auto& w : s.words) {
      if (w.gender == Gender::Male) {
        male.push_back(salient_word_json(w));
        ++n_male;
      } else {
        female.push_back(salient_word_json(w));
        ++n_female;
      }
    }
    e["male_salient"] = std::move(male);
    e["female_salient"] = std::move(female);
    e["short_male_list"] = n_male < top_k;
    e["short_female_list"] = n_female < top_k;
    arr.push_back(std::move(e));
  }
  return arr.dump(2) + "\n";
}

inline std::vector<SalientSet> parse_salient_json(const std::string& content) {
  nlohmann::json arr = nlohmann::json::parse(content);
  std::vector<SalientSet> sets;
  for (const auto& e : arr) {
    SalientSet s;
    s.subject = subject_from_string(e.at("subject").get<std::string>());
    for (const auto& w : e.at("male_salient"))
      s.male_salient.push_back({w.at("word").get<std::string>(),
                                w.at("log_odds_ratio").get<double>(),
                                w.at("odds_ratio").get<double>()});
    for (const auto& w : e.at("female_salient"))
      s.female_salient.push_back({w.at("word").get<std::string>(),
                                  w.at("log_odds_ratio").get<double>(),
                                  w.at("odds_ratio").get<double>()});
    sets.push_back(std::move(s));
  }
  return sets;
}

inline std::string distribution_json(const std::vector<DistributionSummary>& summaries) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& s : summaries) {
    nlohmann::ordered_json e;
    e["subject"] = to_string(s.subject);
    e["degenerate"] = s.degenerate;
    if (!s.degenerate) {
      e["median"] = rounded(s.median);
      e["q1"] = rounded(s.q1);
      e["q3"] = rounded(s.q3);
      e["iqr"] = rounded(s.iqr);
      e["lower_whisker"] = rounded(s.lower_whisker);
      e["upper_whisker"] = rounded(s.upper_whisker);
      nlohmann::ordered_json outs = nlohmann::ordered_json::array();
      for (const auto& [word, v] : s.outliers) {
        nlohmann::ordered_json o;
        o["word"] = word;
        o["log_odds_ratio"] = rounded(v);
        outs.push_back(std::move(o));
      }
      e["outliers"] = std::move(outs);
    }
    arr.push_back(std::move(e));
  }
  return arr.dump(2) + "\n";
}

inline std::string weat_csv(const std::vector<WeatResult>& results) {
  CsvWriter w({"subject", "pairing", "statistic", "skipped_words", "invalid"});
  for (const auto& r : results) {
    std::string skipped;
    for (const auto& s : r.skipped_words) {
      if (!skipped.empty()) skipped += ';';
      skipped += s.word;
    }
    w.append_row({r.subject ? to_string(*r.subject) : "", r.attribute_label,
                  format_number(r.statistic), skipped, r.invalid ? "true" : "false"});
  }
  return w.str();
}

inline std::string sentiment_csv(const SummarizeResult& result) {
  CsvWriter w({"subject", "gender", "mean_polarity", "covered_words", "total_words", "note"});
  for (const auto& r : result.rows) {
    w.append_row({to_string(r.subject), to_string(r.gender), format_number(r.mean_polarity),
                  std::to_string(r.covered_words), std::to_string(r.total_words), ""});
  }
  for (const auto& s : result.skipped)
    w.append_row({to_string(s.subject), to_string(s.gender), "", "", "", s.reason});
  return w.str();
}

struct SentimentRow {
  Subject subject;
  Gender gender;
  double mean_polarity;
};

inline std::vector<SentimentRow> parse_sentiment_csv(const std::string& content) {
  std::vector<SentimentRow> rows;
  std::stringstream ss(content);
  std::string line;
  bool first = true;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) f.push_back(field);
    if (f.size() < 5) throw ParseError("sentiment csv: malformed row: " + line);
    if (f[2].empty()) continue;  // skipped cell
    rows.push_back({subject_from_string(f[0]), gender_from_string(f[1]), std::stod(f[2])});
  }
  return rows;
}

inline std::string stats_csv(const std::vector<SentimentRow>& rows) {
  std::map<Gender, std::vector<double>> means;  // ordered by subject enum via row order
  for (const auto& r : rows) means[r.gender].push_back(r.mean_polarity);

  CsvWriter w({"test", "group", "statistic", "p_value", "n1", "n2", "degrees_of_freedom", "note"});
  for (Gender g : {Gender::Male, Gender::Female}) {
    const auto& v = means[g];
    try {
      StatTestResult r = shapiro_wilk(v);
      w.append_row({"shapiro_wilk", to_string(g), format_number(r.statistic),
                    format_number(r.p_value), std::to_string(r.n1), "", "", ""});
    } catch (const DomainError& e) {
      w.append_row({"shapiro_wilk", to_string(g), "", "", std::to_string(v.size()), "", "",
                    e.what()});
    }
  }
  try {
    StatTestResult t = t_test_independent(means[Gender::Female], means[Gender::Male]);
    w.append_row({"t_test", "female_vs_male", format_number(t.statistic),
                  format_number(t.p_value), std::to_string(t.n1), std::to_string(*t.n2),
                  format_number(*t.degrees_of_freedom), ""});
  } catch (const DomainError& e) {
    w.append_row({"t_test", "female_vs_male", "", "", std::to_string(means[Gender::Female].size()),
                  std::to_string(means[Gender::Male].size()), "", e.what()});
  }
  return w.str();
}

inline std::string hits_jsonl(const std::vector<KwicHit>& hits) {
  std::string out;
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
    out += j.dump();
    out += "\n";
  }
  return out;
}

inline std::string profiles_jsonl(const std::vector<AdjectiveProfile>& profiles) {
  std::string out;
  for (const auto& p : profiles) {
    nlohmann::ordered_json j;
    j["record_id"] = p.record_id;
    nlohmann::ordered_json c = nlohmann::ordered_json::object();
    for (const auto& [word, n] : p.counts) c[word] = n;
    j["counts"] = std::move(c);
    out += j.dump();
    out += "\n";
  }
  return out;
}

inline std::string hash_input(const char* stage, const std::string& path) {
  try {
    return sha256_file_hex(path);
  } catch (const std::exception& e) {
    throw Error("stage '" + std::string(stage) + "' failed: " + e.what());
  }
}

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << content;
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// Content-addressed stage cache under <out_dir>/.stage.
class Stager {
 public:
  Stager(std::filesystem::path out_dir, bool enabled)
      : out_dir_(std::move(out_dir)), stage_dir_(out_dir_ / ".stage"), enabled_(enabled) {}

  using Outputs = std::map<std::string, std::string>;  // filename -> content

  /// Runs `compute` unless outputs for this key are already staged. Either
  /// way the outputs are written into out_dir and returned.
  Outputs run(const std::string& name, int version, const std::string& key_material,
              const std::vector<std::string>& output_names, const std::function<Outputs()>& compute) {
    const std::string key =
        sha256_hex(name + "\x1f" + std::to_string(version) + "\x1f" + key_material);
    records_.push_back({name, version, key});
    Outputs outputs;
    const auto key_dir = stage_dir_ / key;
    bool reused = false;
    if (enabled_ && std::filesystem::exists(key_dir / ".done")) {
      reused = true;
      for (const auto& f : output_names) {
        std::ifstream in(key_dir / f, std::ios::binary);
        if (!in) {
          reused = false;
          break;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        outputs[f] = ss.str();
      }
    }
    if (!reused) {
      try {
        outputs = compute();
      } catch (const std::exception& e) {
        throw Error("stage '" + name + "' failed: " + std::string(e.what()));
      }
      for (const auto& f : output_names)
        if (!outputs.count(f)) throw Error("stage '" + name + "' did not produce " + f);
      if (enabled_) {
        std::filesystem::create_directories(key_dir);
        for (const auto& [f, content] : outputs) atomic_write(key_dir / f, content);
        atomic_write(key_dir / ".done", "");
      }
    }
    for (const auto& [f, content] : outputs) atomic_write(out_dir_ / f, content);
    return outputs;
  }

  struct StageRecord {
    std::string name;
    int version;
    std::string key;
  };
  const std::vector<StageRecord>& records() const { return records_; }

 private:
  std::filesystem::path out_dir_;
  std::filesystem::path stage_dir_;
  bool enabled_;
  std::vector<StageRecord> records_;
};

}  // namespace pipedetail

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

struct PipelineResult {
  std::string out_dir;
  std::vector<std::string> files;  // bundle files, manifest last
};

inline PipelineResult run_pipeline(const PipelineConfig& config, ChatClient* client = nullptr,
                                   bool enable_staging = true) {
  namespace fs = std::filesystem;
  namespace pd = pipedetail;
  if (config.out_dir.empty()) throw ConfigError("pipeline: out_dir must be set");

  // every referenced file must exist at run start
  {
    const std::pair<const char*, const std::string*> inputs[] = {
        {"corpus", &config.corpus_path},
        {"corpus", &config.grid_path},
        {"extract", config.strategy == TagStrategy::Lexicon ? &config.adjective_lexicon_path
                                                            : &config.tagger_model_path},
        {"weat", &config.embeddings_path},
        {"weat", &config.wordsets_path},
        {"sentiment", &config.sentiment_lexicon_path},
        {"kwic", &config.kwic_annotations_path},
        {"odds_ratio", &config.thematic_annotations_path},
    };
    for (const auto& [stage, path] : inputs) {
      if (!path->empty() && !fs::exists(*path))
        throw Error("stage '" + std::string(stage) + "' failed: missing input file: " + *path);
    }
  }

  fs::create_directories(config.out_dir);
  pd::Stager stager(config.out_dir, enable_staging);

  char params[256];

  // --- corpus ---------------------------------------------------------------
  std::vector<EvaluationRecord> corpus;
  try {
    if (!config.corpus_path.empty()) {
      corpus = load_corpus(config.corpus_path);
    } else {
      auto grid = load_grid(config.grid_path);
      corpus = generate_corpus(grid, config.generation, client, config.offline);
    }
  } catch (const std::exception& e) {
    throw Error("stage 'corpus' failed: " + std::string(e.what()));
  }
  if (corpus.empty()) throw Error("stage 'corpus' failed: corpus is empty");
  std::string corpus_bytes;
  {
    std::stringstream ss;
    for (const auto& r : corpus) ss << detail::record_to_json(r).dump() << "\n";
    corpus_bytes = ss.str();
  }
  const std::string corpus_hash = sha256_hex(corpus_bytes);

  // --- extract ----------------------------------------------------------------
  const std::string tag_resource = config.strategy == TagStrategy::Lexicon
                                       ? config.adjective_lexicon_path
                                       : config.tagger_model_path;
  if (tag_resource.empty())
    throw Error("stage 'extract' failed: no resource file for the tagging strategy");
  auto extract_out = stager.run(
      "extract", 1,
      corpus_hash + "\x1f" + (config.strategy == TagStrategy::Lexicon ? "lexicon" : "perceptron") +
          "\x1f" + pd::hash_input("extract", tag_resource),
      {"profiles.jsonl"}, [&]() -> pd::Stager::Outputs {
        auto tagger = make_tagger(config.strategy, tag_resource);
        std::vector<AdjectiveProfile> profiles;
        profiles.reserve(corpus.size());
        for (const auto& r : corpus)
          profiles.push_back(profile(tag_adjectives(tokenize(r.text, r.record_id), *tagger)));
        return {{"profiles.jsonl", pd::profiles_jsonl(profiles)}};
      });
  auto profiles = [&] {
    // reparse so staged and fresh runs share one code path
    std::vector<AdjectiveProfile> out;
    std::stringstream ss(extract_out.at("profiles.jsonl"));
    std::string line;
    while (std::getline(ss, line)) {
      if (line.empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line);
      AdjectiveProfile p;
      p.record_id = j.at("record_id").get<std::string>();
      for (const auto& [w, n] : j.at("counts").items()) p.counts[w] = n.get<int>();
      out.push_back(std::move(p));
    }
    return out;
  }();
  const std::string profiles_hash = sha256_hex(extract_out.at("profiles.jsonl"));

  // subjects present, in enum order
  std::vector<Subject> subjects;
  for (Subject s : kAllSubjects)
    for (const auto& r : corpus)
      if (r.subject == s) {
        subjects.push_back(s);
        break;
      }

  // --- odds ratio -------------------------------------------------------------
  std::snprintf(params, sizeof(params), "min_count=%ld|or_min=%.17g|or_max=%.17g|k=%d",
                config.min_count, config.or_min, config.or_max, config.top_k);
  std::string thematic_hash =
      config.thematic_annotations_path.empty() ? "none"
                                               : pd::hash_input("odds_ratio", config.thematic_annotations_path);
  auto or_out = stager.run(
      "odds_ratio", 1, corpus_hash + "\x1f" + profiles_hash + "\x1f" + params + "\x1f" + thematic_hash,
      {"or.csv", "salient.json", "distribution.json"}, [&]() -> pd::Stager::Outputs {
        std::vector<ThematicAnnotation> annotations;
        if (!config.thematic_annotations_path.empty())
          annotations = load_thematic_annotations(config.thematic_annotations_path);
        std::vector<OddsRatioEntry> all_entries;
        std::vector<AnnotatedSalientSet> annotated;
        std::vector<DistributionSummary> dists;
        for (Subject s : subjects) {
          auto table = build_frequency_table(profiles, corpus, s);
          if (table.counts.empty()) continue;
          auto entries = compute_odds_ratios(table, config.min_count, config.or_min, config.or_max);
          auto salient = select_salient(entries, config.top_k);
          annotated.push_back(apply_annotations(salient, annotations));
          dists.push_back(summarize_distribution(entries));
          for (auto& e : entries) all_entries.push_back(std::move(e));
        }
        return {{"or.csv", pd::or_csv(all_entries)},
                {"salient.json", pd::salient_json(annotated, config.top_k)},
                {"distribution.json", pd::distribution_json(dists)}};
      });
  auto salient_sets = pd::parse_salient_json(or_out.at("salient.json"));
  const std::string salient_hash = sha256_hex(or_out.at("salient.json"));

  // --- weat ---------------------------------------------------------------------
  if (config.embeddings_path.empty())
    throw Error("stage 'weat' failed: embeddings path not configured");
  std::string wordsets_hash =
      config.wordsets_path.empty() ? "default" : pd::hash_input("weat", config.wordsets_path);
  stager.run("weat", 1,
             salient_hash + "\x1f" + pd::hash_input("weat", config.embeddings_path) + "\x1f" + wordsets_hash,
             {"weat.csv"}, [&]() -> pd::Stager::Outputs {
               auto [names, career] = load_wordsets(config.wordsets_path);
               std::optional<std::set<std::string>> vocab = std::set<std::string>{};
               auto add_word = [&](const std::string& w) {
                 vocab->insert(w);
                 if (w.find('-') != std::string::npos) {
                   std::string dehyph;
                   for (char ch : w)
                     if (ch != '-') dehyph += ch;
                   vocab->insert(dehyph);
                 }
               };
               for (const auto& set : salient_sets) {
                 for (const auto& sw : set.male_salient) add_word(sw.word);
                 for (const auto& sw : set.female_salient) add_word(sw.word);
               }
               for (const auto& pair : {names, career}) {
                 for (const auto& w : pair.set_a) add_word(w);
                 for (const auto& w : pair.set_b) add_word(w);
               }
               auto store = load_embeddings(config.embeddings_path, vocab);
               std::vector<WeatResult> results;
               for (const auto& set : salient_sets) {
                 std::vector<std::string> X, Y;
                 for (const auto& sw : set.male_salient) X.push_back(sw.word);
                 for (const auto& sw : set.female_salient) Y.push_back(sw.word);
                 if (X.empty() || Y.empty()) continue;
                 for (const auto& pair : {names, career})
                   results.push_back(weat(X, Y, pair, store, set.subject));
               }
               return {{"weat.csv", pd::weat_csv(results)}};
             });

  // --- sentiment ------------------------------------------------------------------
  if (config.sentiment_lexicon_path.empty())
    throw Error("stage 'sentiment' failed: sentiment lexicon path not configured");
  auto sentiment_out = stager.run(
      "sentiment", 1, salient_hash + "\x1f" + pd::hash_input("sentiment", config.sentiment_lexicon_path),
      {"sentiment.csv"}, [&]() -> pd::Stager::Outputs {
        auto lexicon = SentimentLexicon::load(config.sentiment_lexicon_path);
        return {{"sentiment.csv", pd::sentiment_csv(summarize(salient_sets, lexicon))}};
      });

  // --- stats ------------------------------------------------------------------------
  stager.run("stats", 1, sha256_hex(sentiment_out.at("sentiment.csv")), {"stats.csv"},
             [&]() -> pd::Stager::Outputs {
               auto rows = pd::parse_sentiment_csv(sentiment_out.at("sentiment.csv"));
               return {{"stats.csv", pd::stats_csv(rows)}};
             });

  // --- kwic --------------------------------------------------------------------------
  std::string targets_joined;
  for (const auto& t : config.kwic_targets) {
    if (!targets_joined.empty()) targets_joined += ',';
    targets_joined += t;
  }
  std::string kwic_ann_hash =
      config.kwic_annotations_path.empty() ? "none" : pd::hash_input("kwic", config.kwic_annotations_path);
  stager.run("kwic", 1, corpus_hash + "\x1f" + targets_joined + "\x1f" + kwic_ann_hash,
             {"hits.jsonl"}, [&]() -> pd::Stager::Outputs {
               std::vector<TokenizedDoc> docs;
               docs.reserve(corpus.size());
               for (const auto& r : corpus) docs.push_back(tokenize(r.text, r.record_id));
               auto hits = kwic(corpus, docs, config.kwic_targets);
               if (!config.kwic_annotations_path.empty())
                 apply_kwic_annotations(hits, config.kwic_annotations_path);
               return {{"hits.jsonl", pd::hits_jsonl(hits)}};
             });

  // --- manifest -----------------------------------------------------------------------
  PipelineResult result;
  result.out_dir = config.out_dir;
  result.files = {"profiles.jsonl", "or.csv",        "salient.json", "distribution.json",
                  "weat.csv",       "sentiment.csv", "stats.csv",    "hits.jsonl"};
  // Config fingerprint covers semantic parameters and input *content* hashes
  // (never filesystem paths), so identical inputs give identical manifests
  // regardless of where the files live.
  std::string config_fingerprint;
  {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "min_count=%ld|or_min=%.17g|or_max=%.17g|k=%d|strategy=%s",
                  config.min_count, config.or_min, config.or_max, config.top_k,
                  config.strategy == TagStrategy::Lexicon ? "lexicon" : "perceptron");
    Sha256 h;
    h.update(std::string_view(buf));
    h.update(std::string_view("\x1f", 1));
    h.update(corpus_hash);
    h.update(std::string_view("\x1f", 1));
    h.update(sha256_file_hex(tag_resource));
    h.update(std::string_view("\x1f", 1));
    h.update(sha256_file_hex(config.embeddings_path));
    h.update(std::string_view("\x1f", 1));
    h.update(sha256_file_hex(config.sentiment_lexicon_path));
    h.update(std::string_view("\x1f", 1));
    h.update(targets_joined);
    config_fingerprint = h.hexdigest();
  }
  nlohmann::ordered_json manifest;
  manifest["tool_version"] = kVersion;
  manifest["config_sha256"] = config_fingerprint;
  manifest["corpus_sha256"] = corpus_hash;
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  for (const auto& rec : stager.records()) {
    nlohmann::ordered_json s;
    s["name"] = rec.name;
    s["version"] = rec.version;
    s["key"] = rec.key;
    stages.push_back(std::move(s));
  }
  manifest["stages"] = std::move(stages);
  nlohmann::ordered_json files = nlohmann::ordered_json::object();
  for (const auto& f : result.files)
    files[f] = sha256_file_hex((fs::path(config.out_dir) / f).string());
  manifest["files"] = std::move(files);
  pd::atomic_write(fs::path(config.out_dir) / "manifest.json", manifest.dump(2) + "\n");
  result.files.push_back("manifest.json");
  return result;
}

}  // namespace biaslens
