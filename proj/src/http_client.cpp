#include "kermit/http_client.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <json.hpp>
#include <mutex>
#include <thread>

#include "kermit/errors.hpp"

namespace kermit {

ServiceConfig service_config_from_env() {
  ServiceConfig config;
  if (const char* url = std::getenv("KERMIT_SERVICE_URL")) config.url = url;
  if (const char* key = std::getenv("KERMIT_SERVICE_KEY")) config.api_key = key;
  if (const char* model = std::getenv("KERMIT_SERVICE_MODEL")) {
    config.model = model;
  }
  return config;
}

// Classic token bucket; capacity one burst-second of requests.
struct HttpChatClient::RateLimiter {
  explicit RateLimiter(double rate)
      : rate_(rate),
        capacity_(rate > 1.0 ? rate : 1.0),
        tokens_(capacity_),
        last_(std::chrono::steady_clock::now()) {}

  void acquire() {
    if (rate_ <= 0.0) return;  // unlimited
    std::unique_lock<std::mutex> lock(mutex_);
    for (;;) {
      const auto now = std::chrono::steady_clock::now();
      const double elapsed = std::chrono::duration<double>(now - last_).count();
      last_ = now;
      tokens_ = std::min(capacity_, tokens_ + elapsed * rate_);
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      const double wait = (1.0 - tokens_) / rate_;
      lock.unlock();
      std::this_thread::sleep_for(std::chrono::duration<double>(wait));
      lock.lock();
    }
  }

  double rate_;
  double capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
  std::mutex mutex_;
};

HttpChatClient::HttpChatClient(ServiceConfig config)
    : config_(std::move(config)),
      limiter_(std::make_unique<RateLimiter>(config_.requests_per_second)) {
  if (config_.url.empty()) {
    throw ConfigError("service URL is not configured (KERMIT_SERVICE_URL)");
  }
}

HttpChatClient::~HttpChatClient() = default;

std::string HttpChatClient::send(const std::string& prompt) {
  limiter_->acquire();

  // Split the URL into base (scheme://host[:port]) and path.
  const std::size_t scheme_end = config_.url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("service URL has no scheme: " + config_.url);
  }
  const std::size_t path_start = config_.url.find('/', scheme_end + 3);
  const std::string base = path_start == std::string::npos
                               ? config_.url
                               : config_.url.substr(0, path_start);
  const std::string path =
      path_start == std::string::npos ? "/" : config_.url.substr(path_start);

  // One connection per request keeps concurrent sends independent.
  httplib::Client http(base);
  const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  http.set_connection_timeout(
      std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
  http.set_read_timeout(
      std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
  http.set_write_timeout(
      std::chrono::duration_cast<std::chrono::milliseconds>(timeout));

  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }

  const nlohmann::ordered_json body = {
      {"model", config_.model},
      {"messages",
       nlohmann::ordered_json::array(
           {{{"role", "user"}, {"content", prompt}}})}};

  const httplib::Result result =
      http.Post(path, headers, body.dump(), "application/json");
  if (!result) {
    throw Error("service request failed: " + httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw Error("service returned HTTP " + std::to_string(result->status));
  }

  try {
    const nlohmann::json doc = nlohmann::json::parse(result->body);
    return doc.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const std::exception& e) {
    throw Error(std::string("unexpected service response shape: ") + e.what());
  }
}

}  // namespace kermit
