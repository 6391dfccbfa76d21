#include "panoworld/service/jobs.hpp"

#include "panoworld/common/error.hpp"
#include "panoworld/common/image_io.hpp"
#include "panoworld/service/session_store.hpp"

#include <cstdio>

namespace panoworld::service {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(JobStatus status) {
  switch (status) {
    case JobStatus::Queued: return "queued";
    case JobStatus::Running: return "running";
    case JobStatus::Succeeded: return "succeeded";
    case JobStatus::Failed: return "failed";
  }
  return "";
}

json JobRecord::to_json() const {
  return {{"id", id},
          {"kind", kind},
          {"status", service::to_string(status)},
          {"progress", progress},
          {"result", result ? json(*result) : json(nullptr)},
          {"error", error ? *error : json(nullptr)},
          {"version", version}};
}

JobManager::JobManager(fs::path dir, int workers) : dir_(std::move(dir)) {
  if (workers < 1) throw Error(ErrorKind::Usage, "job pool needs at least one worker");
  fs::create_directories(dir_);
  while (fs::exists(dir_ / ("job-" + std::to_string(next_id_) + ".json"))) ++next_id_;
  for (int i = 0; i < workers; ++i) workers_.emplace_back([this] { worker(); });
}

JobManager::~JobManager() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  queued_.notify_all();
  for (auto& t : workers_) t.join();
}

std::string JobManager::submit(const std::string& kind, JobWork work) {
  std::string id;
  {
    std::lock_guard lock(mutex_);
    id = "job-" + std::to_string(next_id_++);
    JobRecord r;
    r.id = id;
    r.kind = kind;
    jobs_[id] = Entry{r, std::move(work)};
    queue_.push_back(id);
    persist(r);
  }
  queued_.notify_one();
  return id;
}

JobRecord JobManager::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = jobs_.find(id);
  if (it != jobs_.end()) return it->second.record;
  // Jobs from an earlier process are only on disk.
  const fs::path file = dir_ / (id + ".json");
  if (id.find('/') != std::string::npos || !fs::exists(file)) throw NotFound("no job " + id);
  const json doc = json::parse(io::read_text(file));
  JobRecord r;
  r.id = id;
  r.kind = doc.at("kind");
  const std::string s = doc.at("status");
  r.status = s == "succeeded" ? JobStatus::Succeeded : JobStatus::Failed;
  if (s != "succeeded" && s != "failed") r.error = json{{"kind", "interrupted"}, {"message", "service restarted"}};
  r.progress = doc.value("progress", 0.0);
  if (doc["result"].is_string()) r.result = doc["result"].get<std::string>();
  if (!doc["error"].is_null() && !r.error) r.error = doc["error"];
  return r;
}

json JobManager::result(const std::string& id) const {
  const JobRecord r = get(id);
  if (r.status != JobStatus::Succeeded) throw NotFound("job " + id + " has no result");
  return json::parse(io::read_text(dir_ / (id + ".result.json")));
}

JobRecord JobManager::wait_change(const std::string& id, int seen, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) {
    lock.unlock();
    return get(id);
  }
  changed_.wait_for(lock, timeout, [&] { return it->second.record.version > seen || terminal(it->second.record.status); });
  return it->second.record;
}

JobRecord JobManager::wait(const std::string& id, std::chrono::milliseconds timeout) const {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  JobRecord r = get(id);
  while (!terminal(r.status) && std::chrono::steady_clock::now() < deadline) {
    r = wait_change(id, r.version, std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now()));
  }
  return r;
}

void JobManager::persist(const JobRecord& record) const {
  io::write_text(dir_ / (record.id + ".json.tmp"), record.to_json().dump());
  fs::rename(dir_ / (record.id + ".json.tmp"), dir_ / (record.id + ".json"));
}

void JobManager::update(const std::string& id, const std::function<void(JobRecord&)>& change) {
  {
    std::lock_guard lock(mutex_);
    JobRecord& r = jobs_.at(id).record;
    if (terminal(r.status)) throw Error(ErrorKind::Domain, "job " + id + " is already " + std::string(to_string(r.status)));
    change(r);
    ++r.version;
    persist(r);
  }
  changed_.notify_all();
}

void JobManager::worker() {
  for (;;) {
    std::string id;
    JobWork work;
    {
      std::unique_lock lock(mutex_);
      queued_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      id = queue_.front();
      queue_.pop_front();
      work = jobs_.at(id).work;
    }
    update(id, [](JobRecord& r) { r.status = JobStatus::Running; });
    const ProgressFn progress = [this, id](double p) {
      update(id, [p](JobRecord& r) { r.progress = std::max(r.progress, std::min(1.0, p)); });
    };
    try {
      const json out = work(progress);
      io::write_text(dir_ / (id + ".result.json"), out.dump(1) + "\n");
      update(id, [&](JobRecord& r) {
        r.status = JobStatus::Succeeded;
        r.progress = 1.0;
        r.result = "/jobs/" + id + "/result";
      });
    } catch (const Error& e) {
      update(id, [&](JobRecord& r) {
        r.status = JobStatus::Failed;
        r.error = json{{"kind", to_string(e.kind())}, {"message", e.what()}, {"detail", e.detail()}};
      });
    } catch (const std::exception& e) {
      update(id, [&](JobRecord& r) {
        r.status = JobStatus::Failed;
        r.error = json{{"kind", "internal"}, {"message", e.what()}};
      });
    }
  }
}

}  // namespace panoworld::service
