#pragma once

#include <json.hpp>

#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace panoworld::service {

enum class JobStatus { Queued, Running, Succeeded, Failed };

std::string_view to_string(JobStatus status);
inline bool terminal(JobStatus s) { return s == JobStatus::Succeeded || s == JobStatus::Failed; }

struct JobRecord {
  std::string id;
  std::string kind;  // "ielc-run" | "dataset-gen" | "eqa-run"
  JobStatus status = JobStatus::Queued;
  double progress = 0.0;  // in [0, 1]
  std::optional<std::string> result;  // URL of the result document
  std::optional<nlohmann::json> error;
  int version = 0;  // bumped on every change

  nlohmann::json to_json() const;
};

using ProgressFn = std::function<void(double)>;
using JobWork = std::function<nlohmann::json(const ProgressFn&)>;

/// Bounded worker pool. Records and results are written to `dir` as
/// <id>.json and <id>.result.json. Terminal records never change again.
class JobManager {
 public:
  JobManager(std::filesystem::path dir, int workers);
  ~JobManager();
  JobManager(const JobManager&) = delete;
  JobManager& operator=(const JobManager&) = delete;

  std::string submit(const std::string& kind, JobWork work);
  /// Throws NotFound.
  JobRecord get(const std::string& id) const;
  nlohmann::json result(const std::string& id) const;
  /// Returns once the record's version exceeds `seen` or the job is
  /// terminal, or after `timeout`.
  JobRecord wait_change(const std::string& id, int seen, std::chrono::milliseconds timeout) const;
  JobRecord wait(const std::string& id, std::chrono::milliseconds timeout = std::chrono::minutes(10)) const;

 private:
  struct Entry {
    JobRecord record;
    JobWork work;
  };
  void worker();
  void persist(const JobRecord& record) const;
  /// Applies `change` unless the job is already terminal (then throws).
  void update(const std::string& id, const std::function<void(JobRecord&)>& change);

  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  std::condition_variable queued_;
  std::map<std::string, Entry> jobs_;
  std::deque<std::string> queue_;
  std::vector<std::thread> workers_;
  bool stopping_ = false;
  int next_id_ = 1;
};

}  // namespace panoworld::service
