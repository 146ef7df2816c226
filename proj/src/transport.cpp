#include "numclaim/transport.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <regex>
#include <thread>

#include "httplib.h"
#include "numclaim/error.hpp"

namespace numclaim {

namespace {

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ConfigError("invalid service URL: " + url);
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse post(const HttpRequest& request) override {
    const auto url = split_url(request.url);
    httplib::Client client(url.scheme_host_port);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    for (const auto& [k, v] : request.headers) headers.emplace(k, v);
    auto res = client.Post(url.path, headers, request.body, "application/json");
    if (!res) throw ServiceError("POST " + request.url + " failed: " + httplib::to_string(res.error()));
    return {res->status, res->body};
  }
};

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport() { return std::make_unique<HttplibTransport>(); }

HttpResponse OfflineTransport::post(const HttpRequest& request) {
  throw ServiceError("network access disabled (--offline): refused POST " + request.url);
}

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int attempt) {
  const double ms = static_cast<double>(policy.base_delay.count()) *
                    std::pow(policy.multiplier, std::max(0, attempt - 1));
  return std::chrono::milliseconds(
      static_cast<long long>(std::min(ms, static_cast<double>(policy.max_delay.count()))));
}

HttpResponse post_with_retry(HttpTransport& transport, const HttpRequest& request,
                             const RetryPolicy& policy, const std::string& service) {
  const int attempts = std::max(1, policy.max_attempts);
  std::string last_error;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    try {
      auto res = transport.post(request);
      if (res.status >= 200 && res.status < 300) return res;
      last_error = "HTTP " + std::to_string(res.status);
      if (res.status != 429 && res.status < 500) break;
    } catch (const ServiceError& e) {
      last_error = e.what();
    }
    if (attempt < attempts) {
      const auto delay = backoff_delay(policy, attempt);
      spdlog::warn("{}: attempt {}/{} failed ({}); retrying in {} ms", service, attempt, attempts,
                   last_error, delay.count());
      if (policy.sleep)
        policy.sleep(delay);
      else
        std::this_thread::sleep_for(delay);
    }
  }
  throw ServiceError(service + ": request failed: " + last_error);
}

std::string join_url(const std::string& base, const std::string& path) {
  if (base.empty()) return path;
  const bool base_slash = base.back() == '/';
  const bool path_slash = !path.empty() && path.front() == '/';
  if (base_slash && path_slash) return base + path.substr(1);
  if (!base_slash && !path_slash) return base + "/" + path;
  return base + path;
}

}  // namespace numclaim
