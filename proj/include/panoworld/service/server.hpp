#pragma once

#include "panoworld/common/error.hpp"
#include "panoworld/service/jobs.hpp"
#include "panoworld/service/session_store.hpp"

#include <filesystem>
#include <memory>
#include <string>

namespace panoworld::service {

struct ServerOptions {
  std::filesystem::path root = "panoworld-data";
  int job_workers = 2;
  int http_threads = 8;
};

/// HTTP front end over the session store and the job pool. Endpoints are
/// listed in docs/openapi.yaml. Errors are {"error": {"kind", "message",
/// "detail"}} with 400/422 for bad requests, 404 for unknown ids, 409 for a
/// step racing another writer and 5xx for internal failures.
class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds without serving; port 0 picks a free port. Returns the port.
  int bind(const std::string& host = "127.0.0.1", int port = 0);
  /// Serves until stop().
  void run();
  /// run() on a background thread.
  void start();
  void stop();

  SessionStore& store();
  JobManager& jobs();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// HTTP status for an error kind.
int http_status(ErrorKind kind);

}  // namespace panoworld::service
