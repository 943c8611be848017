#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace suffbench::gateway {

struct HttpResponse {
  int status = 0;
  std::string body;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

/// One POST of a JSON body to `<base_url><path>`. Implementations throw
/// TransportError for connection failures and timeouts; HTTP status codes
/// are returned, not thrown.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post_json(std::string_view path, const std::string& body, const Headers& headers,
                                 std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib client for http:// and https:// base URLs, e.g.
/// "https://openrouter.ai/api/v1".
std::unique_ptr<Transport> make_http_transport(const std::string& base_url);

}  // namespace suffbench::gateway
