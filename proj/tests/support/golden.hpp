#pragma once

#include "panoworld/service/server.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace panoworld::testing {

/// In-process service on a free port over a scratch store.
class TestService {
 public:
  explicit TestService(const std::filesystem::path& root, int job_workers = 2);
  ~TestService();

  service::Server& server() { return server_; }
  int port() const { return port_; }

  struct Response {
    int status = 0;
    std::string body;
    nlohmann::json json() const { return nlohmann::json::parse(body); }
  };
  Response get(const std::string& path) const;
  Response post(const std::string& path, const nlohmann::json& body) const;
  /// Polls the job until it is terminal and returns its result document.
  nlohmann::json job_result(const nlohmann::json& job_record) const;

 private:
  service::Server server_;
  int port_ = 0;
};

/// Runs the CLI in-process; stdout and stderr are captured.
struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};
CliRun cli(const std::vector<std::string>& args);

struct ParityResult {
  std::string workflow;
  bool identical = false;
  std::string detail;  // first difference, empty when identical
};

/// The golden CLI/API workflows: scene generation plus rendering, a
/// multi-step exploration with its trajectory replayed, and an EQA run.
/// Each result compares CLI output files with service responses byte for
/// byte (JSON documents structurally).
std::vector<ParityResult> run_golden_workflows(const std::filesystem::path& workdir);

}  // namespace panoworld::testing
