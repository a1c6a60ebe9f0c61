#pragma once

#include <string>

#include <httplib.h>
#include <json.hpp>

#include "lambdagent/oracle.hpp"

namespace lambdagent {

/// Minimal completion-endpoint client. POSTs {model, temperature, prompt,
/// input} and expects {"output": "..."} back. Failures surface as
/// OracleError and are never retried.
class HttpOracle : public OracleProvider {
 public:
  HttpOracle(std::string url, std::string apiKey)
      : url_(std::move(url)), apiKey_(std::move(apiKey)) {}

  static HttpOracle fromEnv() {
    auto url = oracleEndpointFromEnv();
    if (!url) throw OracleError("oracle endpoint not configured (set LAMBDAGENT_ORACLE_URL)");
    const char* key = std::getenv(kOracleApiKeyEnv);
    return HttpOracle(*url, key ? key : "");
  }

  std::string complete(const std::string& prompt, const ModelParams& params,
                       const std::string& input) override {
    std::string host, path;
    splitUrl(url_, host, path);
    httplib::Client client(host.c_str());
    client.set_read_timeout(60, 0);
    httplib::Headers headers;
    if (!apiKey_.empty()) headers.emplace("Authorization", "Bearer " + apiKey_);
    nlohmann::json body = {{"model", params.modelName},
                           {"temperature", params.temperature},
                           {"prompt", prompt},
                           {"input", input}};
    auto res = client.Post(path.c_str(), headers, body.dump(), "application/json");
    if (!res) throw OracleError("oracle endpoint unreachable: " + url_);
    if (res->status != 200)
      throw OracleError("oracle endpoint returned status " + std::to_string(res->status));
    try {
      return nlohmann::json::parse(res->body).at("output").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw OracleError(std::string("malformed oracle response: ") + e.what());
    }
  }

 private:
  static void splitUrl(const std::string& url, std::string& host, std::string& path) {
    std::size_t scheme = url.find("://");
    std::size_t start = scheme == std::string::npos ? 0 : scheme + 3;
    std::size_t slash = url.find('/', start);
    if (slash == std::string::npos) {
      host = url;
      path = "/";
    } else {
      host = url.substr(0, slash);
      path = url.substr(slash);
    }
  }

  std::string url_;
  std::string apiKey_;
};

}  // namespace lambdagent
