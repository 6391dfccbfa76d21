#include "panoworld/common/http_json.hpp"

#include "panoworld/common/error.hpp"

#include <httplib.h>

namespace panoworld::net {

UrlParts split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::Usage, "URL must include a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         std::chrono::seconds timeout) {
  const UrlParts parts = split_url(url);
  httplib::Client client(parts.origin);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  auto res = client.Post(parts.path, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorKind::Transport,
                "request to " + url + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorKind::Transport, "request to " + url + " returned HTTP " +
                                          std::to_string(res->status), res->body);
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::Protocol, "non-JSON reply from " + url, res->body);
  }
}

}  // namespace panoworld::net
