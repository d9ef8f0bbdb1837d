#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "momentrec/ingestion/clock.hpp"
#include "momentrec/ingestion/rate_limiter.hpp"

namespace momentrec::ingestion {

struct HttpRequest {
  std::string method = "GET";
  std::string url;  // absolute, e.g. https://ws.audioscrobbler.com/2.0/?...
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  std::string content_type;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Sends one request. Throws TransportError when no response was received.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

// cpp-httplib backed transport (HTTPS via OpenSSL).
class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds{30});
  HttpResponse send(const HttpRequest& request) override;

 private:
  std::chrono::seconds timeout_;
};

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds base_delay{1000};
  double multiplier = 2.0;
};

// Rate-limited, retrying wrapper. Retries transport failures, 429 and 5xx;
// any other status is returned to the caller. After the last attempt a
// TransportError is thrown.
class ApiSession {
 public:
  ApiSession(HttpTransport& transport, RateLimiter& limiter, Clock& clock, RetryPolicy policy = {});

  HttpResponse send(const HttpRequest& request);

  std::size_t requests_sent() const { return requests_sent_; }

 private:
  HttpTransport& transport_;
  RateLimiter& limiter_;
  Clock& clock_;
  RetryPolicy policy_;
  std::size_t requests_sent_ = 0;
};

std::string url_encode(std::string_view s);

// Builds "base?k1=v1&k2=v2" with values URL-encoded.
std::string make_url(std::string_view base, const std::vector<std::pair<std::string, std::string>>& query);

std::string base64_encode(std::string_view s);

}  // namespace momentrec::ingestion
