#pragma once

#include <json.hpp>

#include <chrono>
#include <string>

namespace panoworld::net {

/// POSTs a JSON document to `url` (http://host[:port]/path) and returns the
/// parsed JSON reply. Transport failures and non-2xx statuses raise
/// ErrorKind::Transport; unparseable bodies raise ErrorKind::Protocol with the
/// raw body attached as detail.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         std::chrono::seconds timeout = std::chrono::seconds(120));

struct UrlParts {
  std::string origin;  // scheme://host:port
  std::string path;    // starts with '/'
};

UrlParts split_url(const std::string& url);

}  // namespace panoworld::net
