#pragma once

#include "beaconplan/layout_opt.hpp"
#include "beaconplan/project.hpp"

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

namespace httplib
{
class Server;
}

namespace beaconplan
{

// Directory-backed project documents, one `<id>.json` per project.
// Mutations are compare-and-set on Project::version.
class ProjectStore
{
public:
  // Empty path keeps projects in memory only.
  explicit ProjectStore(std::filesystem::path data_dir);

  enum class Status
  {
    ok,
    not_found,
    conflict,
  };

  struct Outcome
  {
    Status status = Status::ok;
    Project project;
  };

  // Stores a new project at version 1. Keeps p.id if set and unused; a
  // taken id is a conflict.
  Outcome create(Project p);
  std::optional<Project> get(const std::string &id) const;
  Outcome replace_beacons(const std::string &id, std::int64_t expected_version, std::vector<Beacon> beacons);

private:
  void persist(const Project &p) const;

  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  std::map<std::string, Project> projects_;
};

enum class JobState
{
  queued,
  running,
  done,
  failed,
};

std::string job_state_name(JobState s);

// Asynchronous optimizer runs; at most one active job per project.
class JobManager
{
public:
  JobManager() = default;
  ~JobManager();
  JobManager(const JobManager &) = delete;
  JobManager &operator=(const JobManager &) = delete;

  // Returns the job id, or nullopt if a job for this project is still
  // queued or running.
  std::optional<std::string> start(const Project &project, const SaConfig &cfg);
  std::optional<nlohmann::json> snapshot(const std::string &job_id) const;

  // Blocks until the job leaves QUEUED/RUNNING. Test helper.
  void wait(const std::string &job_id) const;

private:
  struct Job
  {
    std::string id;
    std::string project_id;
    std::atomic<JobState> state{JobState::queued};
    std::atomic<int> evals_used{0};
    std::atomic<double> best_objective{0.0};
    int max_evals = 0;
    mutable std::mutex result_mutex;
    std::optional<SaResult> result;
    std::string error;
  };

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::vector<std::jthread> workers_;
};

struct ServiceOptions
{
  std::filesystem::path data_dir;
};

// JSON-over-HTTP API for the planner UI and scripts.
class Service
{
public:
  explicit Service(ServiceOptions opts);
  ~Service();
  Service(const Service &) = delete;
  Service &operator=(const Service &) = delete;

  // Binds to host:port (port 0 picks a free one) and returns the port.
  int bind(const std::string &host, int port);
  // Serves until stop(); call after bind().
  void listen();
  void stop();

  ProjectStore &store() { return store_; }
  JobManager &jobs() { return jobs_; }

private:
  void routes();

  ProjectStore store_;
  JobManager jobs_;
  std::unique_ptr<httplib::Server> server_;
};

} // namespace beaconplan
