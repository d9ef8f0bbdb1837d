#include "httplib.h"

#include "momentrec/ingestion/http.hpp"

#include <openssl/evp.h>

#include <cmath>

#include "momentrec/core/error.hpp"
#include "momentrec/core/log.hpp"

namespace momentrec::ingestion {

HttplibTransport::HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

HttpResponse HttplibTransport::send(const HttpRequest& request) {
  const auto scheme_end = request.url.find("://");
  if (scheme_end == std::string::npos) throw TransportError("URL without scheme: " + request.url);
  const auto path_start = request.url.find('/', scheme_end + 3);
  const std::string origin = request.url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : request.url.substr(path_start);

  httplib::Client client(origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_follow_location(true);

  httplib::Headers headers;
  for (const auto& [k, v] : request.headers) headers.emplace(k, v);

  httplib::Result result = request.method == "POST"
                               ? client.Post(path, headers, request.body, request.content_type)
                               : client.Get(path, headers);
  if (!result) {
    throw TransportError("request to " + origin + " failed: " + httplib::to_string(result.error()));
  }
  return HttpResponse{result->status, result->body};
}

ApiSession::ApiSession(HttpTransport& transport, RateLimiter& limiter, Clock& clock, RetryPolicy policy)
    : transport_(transport), limiter_(limiter), clock_(clock), policy_(policy) {}

HttpResponse ApiSession::send(const HttpRequest& request) {
  std::string last_error;
  for (int attempt = 0; attempt < policy_.attempts; ++attempt) {
    if (attempt > 0) {
      const double factor = std::pow(policy_.multiplier, attempt - 1);
      clock_.sleep_for(std::chrono::duration_cast<Clock::Duration>(policy_.base_delay * factor));
    }
    limiter_.acquire();
    ++requests_sent_;
    try {
      HttpResponse response = transport_.send(request);
      if (response.status == 429 || response.status >= 500) {
        last_error = "HTTP " + std::to_string(response.status);
        log::warn("retryable response from " + request.url + ": " + last_error);
        continue;
      }
      return response;
    } catch (const TransportError& e) {
      last_error = e.what();
      log::warn(std::string("transport failure: ") + e.what());
    }
  }
  throw TransportError("giving up after " + std::to_string(policy_.attempts) + " attempts: " + last_error);
}

std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

std::string make_url(std::string_view base, const std::vector<std::pair<std::string, std::string>>& query) {
  std::string url(base);
  char sep = url.find('?') == std::string::npos ? '?' : '&';
  for (const auto& [k, v] : query) {
    url.push_back(sep);
    url += url_encode(k);
    url.push_back('=');
    url += url_encode(v);
    sep = '&';
  }
  return url;
}

std::string base64_encode(std::string_view s) {
  std::string out(4 * ((s.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(s.data()), static_cast<int>(s.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

}  // namespace momentrec::ingestion
