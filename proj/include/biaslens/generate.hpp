#pragma once

// Prompt rendering and corpus generation against a chat-completion endpoint.
//
// Responses are cached on disk keyed by (rendered prompt, iteration, model,
// temperature), so a warm-cache rerun performs zero network calls and replays
// byte-identical texts. The bearer token comes from BIASLENS_API_KEY.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "biaslens/corpus.hpp"
#include "biaslens/sha256.hpp"
#include "biaslens/types.hpp"

namespace biaslens {

/// Substitutes {name}, {gender}, {subject} in the spec's template.
/// Any other {placeholder} is a template error.
inline std::string render_prompt(const PromptSpec& spec, int iteration) {
  if (iteration < 1 || iteration > spec.repetitions)
    throw Error("render_prompt: iteration " + std::to_string(iteration) + " out of range [1, " +
                std::to_string(spec.repetitions) + "] for prompt '" + spec.id + "'");
  const std::string& t = spec.template_text;
  std::string out;
  out.reserve(t.size() + 32);
  for (size_t i = 0; i < t.size();) {
    if (t[i] != '{') {
      out += t[i++];
      continue;
    }
    size_t close = t.find('}', i);
    if (close == std::string::npos)
      throw ParseError("template error in prompt '" + spec.id + "': unterminated '{'");
    std::string key = t.substr(i + 1, close - i - 1);
    if (key == "name")
      out += spec.instructor_name;
    else if (key == "gender")
      out += to_string(spec.gender);
    else if (key == "subject")
      out += display_name(spec.subject);
    else
      throw ParseError("template error in prompt '" + spec.id + "': unknown placeholder {" + key +
                       "}");
    i = close + 1;
  }
  return out;
}

namespace detail {

inline std::string canonical_temperature(const std::optional<double>& t) {
  if (!t) return "default";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", *t);
  return buf;
}

inline std::string cache_key(const std::string& rendered_prompt, int iteration,
                             const std::string& model, const std::optional<double>& temperature) {
  Sha256 h;
  h.update(rendered_prompt);
  h.update(std::string_view("\x1f", 1));
  h.update(std::to_string(iteration));
  h.update(std::string_view("\x1f", 1));
  h.update(model);
  h.update(std::string_view("\x1f", 1));
  h.update(canonical_temperature(temperature));
  return h.hexdigest();
}

inline std::string rfc3339_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct CacheEntry {
  std::string text;
  std::string created_at;
};

class ResponseCache {
 public:
  explicit ResponseCache(std::string dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  std::optional<CacheEntry> get(const std::string& key) const {
    std::ifstream in(path_for(key));
    if (!in) return std::nullopt;
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("text") || !j.contains("created_at"))
      throw ParseError("corrupt cache entry: " + path_for(key));
    return CacheEntry{j["text"].get<std::string>(), j["created_at"].get<std::string>()};
  }

  // Single writer: entries are written under a lock, via temp file + rename.
  void put(const std::string& key, const CacheEntry& e) {
    std::lock_guard<std::mutex> lock(mu_);
    nlohmann::ordered_json j;
    j["text"] = e.text;
    j["created_at"] = e.created_at;
    std::string final_path = path_for(key);
    std::string tmp = final_path + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      out << j.dump();
      if (!out) throw Error("cache write failed: " + tmp);
    }
    std::filesystem::rename(tmp, final_path);
  }

 private:
  std::string path_for(const std::string& key) const { return dir_ + "/" + key + ".json"; }

  std::string dir_;
  std::mutex mu_;
};

}  // namespace detail

/// HTTP transport interface; the default implementation (in generate_http.hpp)
/// POSTs to a chat-completion endpoint. Tests may substitute a stub.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  /// Returns the assistant's reply text. Throws GenerationError on transport
  /// failure and ParseError on a malformed response body.
  virtual std::string complete(const std::string& prompt, const GenerationConfig& config) = 0;
};

/// Generates one record per (spec, iteration) over the grid.
///
/// With `offline` set, only the cache is consulted; the first missing entry in
/// grid order aborts the run. `client` may be null in offline mode.
inline std::vector<EvaluationRecord> generate_corpus(const std::vector<PromptSpec>& grid,
                                                     const GenerationConfig& config,
                                                     ChatClient* client, bool offline = false) {
  config.validate();
  for (const auto& spec : grid) spec.validate();
  if (config.cache_dir.empty()) throw ConfigError("generation cache_dir must be set");
  detail::ResponseCache cache(config.cache_dir);

  struct Job {
    const PromptSpec* spec;
    int iteration;
    size_t slot;
  };
  std::vector<Job> jobs;
  size_t total = 0;
  for (const auto& spec : grid) total += size_t(spec.repetitions);
  std::vector<EvaluationRecord> records(total);
  size_t slot = 0;
  for (const auto& spec : grid)
    for (int it = 1; it <= spec.repetitions; ++it) jobs.push_back({&spec, it, slot++});

  std::mutex err_mu;
  std::string first_error;
  std::atomic<size_t> next{0};

  auto run_job = [&](const Job& job) {
    const PromptSpec& spec = *job.spec;
    std::string prompt = render_prompt(spec, job.iteration);
    std::string key = detail::cache_key(prompt, job.iteration, config.model_name,
                                        config.temperature);
    std::optional<detail::CacheEntry> entry = cache.get(key);
    if (!entry) {
      if (offline)
        throw GenerationError("offline generation: missing cache entry for (prompt_id=" + spec.id +
                              ", iteration=" + std::to_string(job.iteration) + ")");
      if (!client)
        throw ConfigError("generate_corpus: no client provided and cache is cold");
      std::string text;
      int attempts = 0;
      for (;;) {
        try {
          text = client->complete(prompt, config);
          break;
        } catch (const ParseError&) {
          throw;  // malformed response body: not retried
        } catch (const GenerationError& e) {
          if (++attempts > config.retry_limit)
            throw GenerationError("generation failed for (prompt_id=" + spec.id + ", iteration=" +
                                  std::to_string(job.iteration) + ") after " +
                                  std::to_string(attempts) + " attempt(s): " + e.what());
        }
      }
      if (text.empty())
        throw GenerationError("empty completion for (prompt_id=" + spec.id + ", iteration=" +
                              std::to_string(job.iteration) + ")");
      entry = detail::CacheEntry{text, detail::rfc3339_now()};
      cache.put(key, *entry);
    }
    EvaluationRecord r;
    char iter_buf[16];
    std::snprintf(iter_buf, sizeof(iter_buf), "%03d", job.iteration);
    r.record_id = spec.id + "-" + iter_buf;
    r.prompt_id = spec.id;
    r.instructor_name = spec.instructor_name;
    r.gender = spec.gender;
    r.subject = spec.subject;
    r.iteration = job.iteration;
    r.text = entry->text;
    r.model_name = config.model_name;
    r.temperature = config.temperature;
    r.created_at = entry->created_at;
    records[job.slot] = std::move(r);
  };

  int n_threads = std::min<int>(config.max_concurrent_requests, int(jobs.empty() ? 1 : jobs.size()));
  // Offline replay is sequential so "first missing cache entry" is grid order.
  if (offline || n_threads <= 1 || jobs.size() <= 1) {
    for (const auto& job : jobs) run_job(job);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(size_t(n_threads));
    for (int t = 0; t < n_threads; ++t) {
      workers.emplace_back([&] {
        for (;;) {
          size_t i = next.fetch_add(1);
          if (i >= jobs.size()) return;
          {
            std::lock_guard<std::mutex> lock(err_mu);
            if (!first_error.empty()) return;
          }
          try {
            run_job(jobs[i]);
          } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(err_mu);
            if (first_error.empty()) first_error = e.what();
            return;
          }
        }
      });
    }
    for (auto& w : workers) w.join();
    if (!first_error.empty()) throw GenerationError(first_error);
  }
  return records;
}

}  // namespace biaslens
