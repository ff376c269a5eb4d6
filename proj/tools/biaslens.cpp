// biaslens: audit LLM-written teacher evaluations for gendered language.
//
// Subcommands generate/extract/or/weat/sentiment/stats/kwic run one stage
// each; `pipeline` runs everything from a config file.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include "biaslens/corpus.hpp"
#include "biaslens/generate_http.hpp"
#include "biaslens/kwic.hpp"
#include "biaslens/odds_ratio.hpp"
#include "biaslens/pipeline.hpp"
#include "biaslens/report.hpp"
#include "biaslens/sentiment.hpp"
#include "biaslens/stats.hpp"
#include "biaslens/tagger.hpp"
#include "biaslens/version.hpp"
#include "biaslens/weat.hpp"

namespace {

using namespace biaslens;

void write_text(const std::string& path, const std::string& content) {
  pipedetail::atomic_write(std::filesystem::path(path), content);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string t;
  while (std::getline(ss, t, ','))
    if (!t.empty()) out.push_back(t);
  return out;
}

int cmd_generate(const std::string& grid_path, const std::string& out_path,
                 const std::string& endpoint, const std::string& model, double temperature,
                 bool has_temperature, const std::string& cache_dir, int concurrency,
                 int retry_limit, bool offline) {
  auto grid = load_grid(grid_path);
  GenerationConfig config;
  config.endpoint_url = endpoint;
  config.model_name = model;
  if (has_temperature) config.temperature = temperature;
  config.cache_dir = cache_dir;
  config.max_concurrent_requests = concurrency;
  config.retry_limit = retry_limit;
  HttpChatClient client;
  auto records = generate_corpus(grid, config, offline ? nullptr : &client, offline);
  save_corpus(records, out_path);
  std::cerr << "wrote " << records.size() << " records to " << out_path << "\n";
  return 0;
}

int cmd_extract(const std::string& corpus_path, const std::string& strategy,
                const std::string& lexicon_path, const std::string& model_path,
                const std::string& out_path) {
  auto corpus = load_corpus(corpus_path);
  TagStrategy strat = tag_strategy_from_string(strategy);
  const std::string& resource = strat == TagStrategy::Lexicon ? lexicon_path : model_path;
  if (resource.empty())
    throw ConfigError("extract: provide --lexicon for strategy lexicon, --model for perceptron");
  auto tagger = make_tagger(strat, resource);
  std::vector<AdjectiveProfile> profiles;
  profiles.reserve(corpus.size());
  for (const auto& r : corpus)
    profiles.push_back(profile(tag_adjectives(tokenize(r.text, r.record_id), *tagger)));
  save_profiles(profiles, out_path);
  std::cerr << "wrote " << profiles.size() << " profiles to " << out_path << "\n";
  return 0;
}

int cmd_or(const std::string& profiles_path, const std::string& corpus_path,
           const std::string& out_path, const std::string& salient_out, long min_count,
           double or_min, double or_max, int top_k) {
  auto corpus = load_corpus(corpus_path);
  auto profiles = load_profiles(profiles_path);
  std::vector<OddsRatioEntry> all_entries;
  std::vector<AnnotatedSalientSet> annotated;
  for (Subject s : kAllSubjects) {
    auto table = build_frequency_table(profiles, corpus, s);
    if (table.counts.empty()) continue;
    auto entries = compute_odds_ratios(table, min_count, or_min, or_max);
    auto salient = select_salient(entries, top_k);
    annotated.push_back(apply_annotations(salient, {}));
    for (auto& e : entries) all_entries.push_back(std::move(e));
  }
  write_text(out_path, pipedetail::or_csv(all_entries));
  if (!salient_out.empty())
    write_text(salient_out, pipedetail::salient_json(annotated, top_k));
  std::cerr << "wrote " << all_entries.size() << " odds-ratio rows to " << out_path << "\n";
  return 0;
}

int cmd_weat(const std::string& salient_path, const std::string& embeddings_path,
             const std::string& pairs, const std::string& wordsets_path,
             const std::string& out_path) {
  std::ifstream in(salient_path);
  if (!in) throw Error("cannot open salient file: " + salient_path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto salient_sets = pipedetail::parse_salient_json(ss.str());

  auto [names, career] = load_wordsets(wordsets_path);
  std::vector<WordSetPair> pairings;
  if (pairs == "names")
    pairings = {names};
  else if (pairs == "career")
    pairings = {career};
  else if (pairs == "both" || pairs.empty())
    pairings = {names, career};
  else
    throw ConfigError("--pairs must be names, career or both");

  std::optional<std::set<std::string>> vocab = std::set<std::string>{};
  auto add_word = [&](const std::string& w) {
    vocab->insert(w);
    if (w.find('-') != std::string::npos) {
      std::string dehyph;
      for (char c : w)
        if (c != '-') dehyph += c;
      vocab->insert(dehyph);
    }
  };
  for (const auto& set : salient_sets) {
    for (const auto& sw : set.male_salient) add_word(sw.word);
    for (const auto& sw : set.female_salient) add_word(sw.word);
  }
  for (const auto& p : pairings) {
    for (const auto& w : p.set_a) add_word(w);
    for (const auto& w : p.set_b) add_word(w);
  }
  auto store = load_embeddings(embeddings_path, vocab);

  std::vector<WeatResult> results;
  for (const auto& set : salient_sets) {
    std::vector<std::string> X, Y;
    for (const auto& sw : set.male_salient) X.push_back(sw.word);
    for (const auto& sw : set.female_salient) Y.push_back(sw.word);
    if (X.empty() || Y.empty()) continue;
    for (const auto& p : pairings) results.push_back(weat(X, Y, p, store, set.subject));
  }
  write_text(out_path, pipedetail::weat_csv(results));
  std::cerr << "wrote " << results.size() << " WEAT rows to " << out_path << "\n";
  return 0;
}

int cmd_sentiment(const std::string& salient_path, const std::string& lexicon_path,
                  const std::string& out_path, bool full_text, const std::string& corpus_path) {
  auto lexicon = SentimentLexicon::load(lexicon_path);
  SummarizeResult result;
  if (full_text) {
    if (corpus_path.empty())
      throw ConfigError("sentiment: --full-text requires --corpus");
    result = summarize_full_text(load_corpus(corpus_path), lexicon);
  } else {
    if (salient_path.empty()) throw ConfigError("sentiment: --salient is required");
    std::ifstream in(salient_path);
    if (!in) throw Error("cannot open salient file: " + salient_path);
    std::stringstream ss;
    ss << in.rdbuf();
    result = summarize(pipedetail::parse_salient_json(ss.str()), lexicon);
  }
  write_text(out_path, pipedetail::sentiment_csv(result));
  std::cerr << "wrote sentiment summary to " << out_path << "\n";
  return 0;
}

int cmd_stats(const std::string& sentiment_path, const std::string& out_path) {
  std::ifstream in(sentiment_path);
  if (!in) throw Error("cannot open sentiment file: " + sentiment_path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto rows = pipedetail::parse_sentiment_csv(ss.str());
  write_text(out_path, pipedetail::stats_csv(rows));
  std::cerr << "wrote test statistics to " << out_path << "\n";
  return 0;
}

int cmd_kwic(const std::string& corpus_path, const std::string& targets,
             const std::string& annotations_path, const std::string& out_path) {
  auto corpus = load_corpus(corpus_path);
  std::vector<TokenizedDoc> docs;
  docs.reserve(corpus.size());
  for (const auto& r : corpus) docs.push_back(tokenize(r.text, r.record_id));
  auto hits = kwic(corpus, docs, split_commas(targets));
  if (!annotations_path.empty()) apply_kwic_annotations(hits, annotations_path);
  save_hits(hits, out_path);
  std::cerr << "wrote " << hits.size() << " hits to " << out_path << "\n";
  return 0;
}

int cmd_pipeline(const std::string& config_path, const std::string& out_override) {
  auto config = load_pipeline_config(config_path);
  if (!out_override.empty()) config.out_dir = out_override;
  HttpChatClient client;
  auto result = run_pipeline(config, &client);
  for (const auto& f : result.files) std::cerr << "  " << result.out_dir << "/" << f << "\n";
  std::cerr << "pipeline complete\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gendered-language audit for LLM-written teacher evaluations"};
  app.require_subcommand(0, 1);

  bool show_version = false;
  app.add_flag("--version", show_version, "print version and data-format versions");

  // generate
  auto* gen = app.add_subcommand("generate", "render the prompt grid and generate a corpus");
  std::string gen_grid, gen_out, gen_endpoint = "https://api.openai.com/v1/chat/completions";
  std::string gen_model = "gpt-4", gen_cache = "cache";
  double gen_temp = 0.0;
  int gen_conc = 4, gen_retry = 2;
  bool gen_offline = false;
  gen->add_option("--grid", gen_grid, "grid JSON file")->required();
  gen->add_option("--out", gen_out, "output corpus.jsonl")->required();
  gen->add_option("--endpoint", gen_endpoint, "chat-completion endpoint URL");
  gen->add_option("--model", gen_model, "model name");
  auto* temp_opt = gen->add_option("--temperature", gen_temp,
                                   "sampling temperature (omit to use the model default)");
  gen->add_option("--cache-dir", gen_cache, "response cache directory");
  gen->add_option("--concurrency", gen_conc, "max in-flight requests");
  gen->add_option("--retry-limit", gen_retry, "retries per request");
  gen->add_flag("--offline", gen_offline, "replay from cache only; no network");

  // extract
  auto* ext = app.add_subcommand("extract", "tokenize and extract adjective profiles");
  std::string ext_corpus, ext_strategy = "lexicon", ext_lexicon, ext_model, ext_out;
  ext->add_option("--corpus", ext_corpus)->required();
  ext->add_option("--strategy", ext_strategy, "lexicon|perceptron");
  ext->add_option("--lexicon", ext_lexicon, "adjective lexicon file");
  ext->add_option("--model", ext_model, "perceptron tagger weights file");
  ext->add_option("--out", ext_out, "output profiles.jsonl")->required();

  // or
  auto* orc = app.add_subcommand("or", "per-subject odds ratios and salient sets");
  std::string or_profiles, or_corpus, or_out, or_salient;
  long or_min_count = 3;
  double or_lo = 0.1, or_hi = 10.0;
  int or_k = 10;
  orc->add_option("--profiles", or_profiles)->required();
  orc->add_option("--corpus", or_corpus)->required();
  orc->add_option("--out", or_out, "output or.csv")->required();
  orc->add_option("--salient-out", or_salient, "also write salient.json");
  orc->add_option("--min-count", or_min_count);
  orc->add_option("--or-min", or_lo);
  orc->add_option("--or-max", or_hi);
  orc->add_option("--top-k", or_k);

  // weat
  auto* we = app.add_subcommand("weat", "embedding association scores for salient sets");
  std::string we_salient, we_emb, we_pairs = "both", we_sets, we_out;
  we->add_option("--salient", we_salient)->required();
  we->add_option("--embeddings", we_emb)->required();
  we->add_option("--pairs", we_pairs, "names|career|both");
  we->add_option("--wordsets", we_sets, "word-set config JSON (defaults built in)");
  we->add_option("--out", we_out, "output weat.csv")->required();

  // sentiment
  auto* se = app.add_subcommand("sentiment", "polarity means over salient sets");
  std::string se_salient, se_lexicon, se_out, se_corpus;
  bool se_full_text = false;
  se->add_option("--salient", se_salient, "salient.json (default mode)");
  se->add_option("--lexicon", se_lexicon, "word<TAB>polarity lexicon")->required();
  se->add_option("--out", se_out, "output sentiment.csv")->required();
  se->add_flag("--full-text", se_full_text, "score whole evaluation texts instead");
  se->add_option("--corpus", se_corpus, "corpus.jsonl, required with --full-text");

  // stats
  auto* st = app.add_subcommand("stats", "normality and t-test over sentiment summaries");
  std::string st_sentiment, st_out;
  st->add_option("--sentiment", st_sentiment)->required();
  st->add_option("--out", st_out, "output stats.csv")->required();

  // kwic
  auto* kw = app.add_subcommand("kwic", "keyword-in-context extraction");
  std::string kw_corpus, kw_targets, kw_ann, kw_out;
  kw->add_option("--corpus", kw_corpus)->required();
  kw->add_option("--targets", kw_targets, "comma-separated target words")->required();
  kw->add_option("--annotations", kw_ann, "sidecar annotation CSV");
  kw->add_option("--out", kw_out, "output hits.jsonl")->required();

  // pipeline
  auto* pi = app.add_subcommand("pipeline", "run every stage from a config file");
  std::string pi_config, pi_out;
  pi->add_option("--config", pi_config)->required();
  pi->add_option("--out", pi_out, "override out_dir from the config");

  CLI11_PARSE(app, argc, argv);

  if (show_version) {
    std::printf("biaslens %s (tagger-model v%d, adjective-lexicon v%s, polarity-lexicon v%s)\n",
                biaslens::kVersion, biaslens::kTaggerModelVersion,
                biaslens::kAdjectiveLexiconVersion, biaslens::kPolarityLexiconVersion);
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 1;
  }

  try {
    if (gen->parsed())
      return cmd_generate(gen_grid, gen_out, gen_endpoint, gen_model, gen_temp,
                          temp_opt->count() > 0, gen_cache, gen_conc, gen_retry, gen_offline);
    if (ext->parsed()) return cmd_extract(ext_corpus, ext_strategy, ext_lexicon, ext_model, ext_out);
    if (orc->parsed())
      return cmd_or(or_profiles, or_corpus, or_out, or_salient, or_min_count, or_lo, or_hi, or_k);
    if (we->parsed()) return cmd_weat(we_salient, we_emb, we_pairs, we_sets, we_out);
    if (se->parsed()) return cmd_sentiment(se_salient, se_lexicon, se_out, se_full_text, se_corpus);
    if (st->parsed()) return cmd_stats(st_sentiment, st_out);
    if (kw->parsed()) return cmd_kwic(kw_corpus, kw_targets, kw_ann, kw_out);
    if (pi->parsed()) return cmd_pipeline(pi_config, pi_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
