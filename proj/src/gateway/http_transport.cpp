#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "suffbench/error.hpp"
#include "suffbench/gateway/transport.hpp"

namespace suffbench::gateway {

namespace {

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("base_url lacks a scheme: " + base_url);
    auto path_begin = base_url.find('/', scheme_end + 3);
    if (path_begin == std::string::npos) {
      origin_ = base_url;
    } else {
      origin_ = base_url.substr(0, path_begin);
      prefix_ = base_url.substr(path_begin);
    }
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }

  HttpResponse post_json(std::string_view path, const std::string& body, const Headers& headers,
                         std::chrono::milliseconds timeout) override {
    // A client per request keeps concurrent callers independent.
    httplib::Client client(origin_);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(prefix_ + std::string(path), h, body, "application/json");
    if (!res) {
      throw TransportError("POST " + origin_ + prefix_ + std::string(path) + " failed: " +
                           httplib::to_string(res.error()));
    }
    return {res->status, res->body};
  }

 private:
  std::string origin_;
  std::string prefix_;
};

}  // namespace

std::unique_ptr<Transport> make_http_transport(const std::string& base_url) {
  return std::make_unique<HttpTransport>(base_url);
}

}  // namespace suffbench::gateway
