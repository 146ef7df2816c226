#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace numclaim {

struct HttpRequest {
  std::string url;  // absolute, http:// or https://
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
  std::chrono::milliseconds timeout{30000};
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// POST-only transport used by every service client. Implementations throw
/// ServiceError when no response was obtained.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

std::unique_ptr<HttpTransport> make_http_transport();

// Installed by --offline; every call fails without touching the network.
class OfflineTransport final : public HttpTransport {
 public:
  HttpResponse post(const HttpRequest& request) override;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{250};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{8000};
  // Injectable for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int attempt);

/// Retries transport failures, 429 and 5xx with exponential backoff. Any
/// other non-2xx status fails immediately. Throws ServiceError naming
/// `service` after the last attempt.
HttpResponse post_with_retry(HttpTransport& transport, const HttpRequest& request,
                             const RetryPolicy& policy, const std::string& service);

// Joins base and path with exactly one slash.
std::string join_url(const std::string& base, const std::string& path);

}  // namespace numclaim
