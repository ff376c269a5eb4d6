#pragma once

// httplib-backed ChatClient. Split from generate.hpp so that translation
// units which only replay cached corpora do not need the HTTP stack.

#include <cstdlib>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "biaslens/generate.hpp"

namespace biaslens {

/// POSTs {model, messages:[{role:"user", content: prompt}], temperature} and
/// reads choices[0].message.content from the reply.
class HttpChatClient : public ChatClient {
 public:
  std::string complete(const std::string& prompt, const GenerationConfig& config) override {
    auto [base, path] = split_url(config.endpoint_url);
    httplib::Client cli(base);
    cli.set_connection_timeout(30);
    cli.set_read_timeout(120);
    httplib::Headers headers;
    if (const char* key = std::getenv("BIASLENS_API_KEY"))
      headers.emplace("Authorization", std::string("Bearer ") + key);

    nlohmann::ordered_json body;
    body["model"] = config.model_name;
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
    if (config.temperature) body["temperature"] = *config.temperature;

    auto res = cli.Post(path, headers, body.dump(), "application/json");
    if (!res)
      throw GenerationError("transport failure talking to " + config.endpoint_url + ": " +
                            httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
      throw GenerationError("endpoint returned HTTP " + std::to_string(res->status));

    nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded()) throw ParseError("API response is not valid JSON");
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
      throw ParseError("API response missing 'choices'");
    const auto& msg = j["choices"][0];
    if (!msg.contains("message") || !msg["message"].contains("content") ||
        !msg["message"]["content"].is_string())
      throw ParseError("API response missing 'choices[0].message.content'");
    return msg["message"]["content"].get<std::string>();
  }

 private:
  // "http://host:port/v1/chat/completions" -> ("http://host:port", "/v1/...")
  static std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint_url missing scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
  }
};

}  // namespace biaslens
