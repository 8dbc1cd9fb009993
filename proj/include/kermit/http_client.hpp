// HTTP adapter for a chat-completions style generation service. The exact
// wire schema lives entirely in this adapter; everything upstream only sees
// the GenerationClient interface.
#pragma once

#include <string>

#include "kermit/describe.hpp"

namespace kermit {

struct ServiceConfig {
  std::string url;      // e.g. https://host:443/v1/chat/completions
  std::string model;    // model identifier sent with each request
  std::string api_key;  // bearer token; empty sends no Authorization header
  double timeout_seconds = 30.0;
  int retries = 2;
  double requests_per_second = 1.0;  // token-bucket rate limit
  int max_in_flight = 4;
};

// Reads KERMIT_SERVICE_URL / KERMIT_SERVICE_KEY / KERMIT_SERVICE_MODEL from
// the environment. The credential is only ever taken from the environment.
ServiceConfig service_config_from_env();

class HttpChatClient final : public GenerationClient {
 public:
  explicit HttpChatClient(ServiceConfig config);
  ~HttpChatClient() override;

  // Rate-limited POST of {"model", "messages": [{"role": "user", ...}]};
  // returns choices[0].message.content. Throws Error on transport or schema
  // problems (the caller's retry policy decides what happens next).
  std::string send(const std::string& prompt) override;

  int retries() const override { return config_.retries; }
  const ServiceConfig& config() const { return config_; }

 private:
  struct RateLimiter;
  ServiceConfig config_;
  std::unique_ptr<RateLimiter> limiter_;
};

}  // namespace kermit
