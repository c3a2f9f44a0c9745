#include "beaconplan/service.hpp"

#include "beaconplan/errors.hpp"
#include "beaconplan/fusion.hpp"
#include "beaconplan/grid_io.hpp"

#include <iostream>
#include <regex>

#include <httplib.h>

namespace beaconplan
{

using nlohmann::json;

// ---------------------------------------------------------------------------
// ProjectStore

ProjectStore::ProjectStore(std::filesystem::path data_dir) : dir_(std::move(data_dir))
{
  if (dir_.empty())
    return;
  std::filesystem::create_directories(dir_);
  for (const auto &entry : std::filesystem::directory_iterator(dir_))
  {
    if (entry.path().extension() != ".json")
      continue;
    try
    {
      Project p = load_project_file(entry.path());
      projects_.emplace(p.id, std::move(p));
    }
    catch (const std::exception &e)
    {
      std::cerr << "beaconplan: skipping " << entry.path() << ": " << e.what() << '\n';
    }
  }
}

void ProjectStore::persist(const Project &p) const
{
  if (!dir_.empty())
    save_project_file(p, dir_ / (p.id + ".json"));
}

ProjectStore::Outcome ProjectStore::create(Project p)
{
  std::lock_guard lock(mutex_);
  if (p.id.empty())
  {
    do
      p.id = new_project_id();
    while (projects_.count(p.id));
  }
  else if (projects_.count(p.id))
  {
    return {Status::conflict, p};
  }
  p.version = 1;
  p.modified = utc_seconds_now();
  if (p.created == 0)
    p.created = p.modified;
  persist(p);
  projects_.emplace(p.id, p);
  return {Status::ok, p};
}

std::optional<Project> ProjectStore::get(const std::string &id) const
{
  std::lock_guard lock(mutex_);
  auto it = projects_.find(id);
  if (it == projects_.end())
    return std::nullopt;
  return it->second;
}

ProjectStore::Outcome ProjectStore::replace_beacons(const std::string &id, std::int64_t expected_version,
                                                    std::vector<Beacon> beacons)
{
  std::lock_guard lock(mutex_);
  auto it = projects_.find(id);
  if (it == projects_.end())
    return {Status::not_found, {}};
  if (it->second.version != expected_version)
    return {Status::conflict, it->second};

  Project next = it->second;
  next.beacons = std::move(beacons);
  next.validate();
  next.version += 1;
  next.modified = utc_seconds_now();
  persist(next);
  it->second = next;
  return {Status::ok, std::move(next)};
}

// ---------------------------------------------------------------------------
// JobManager

std::string job_state_name(JobState s)
{
  switch (s)
  {
  case JobState::queued:
    return "QUEUED";
  case JobState::running:
    return "RUNNING";
  case JobState::done:
    return "DONE";
  case JobState::failed:
    return "FAILED";
  }
  return "FAILED";
}

JobManager::~JobManager()
{
  std::vector<std::jthread> workers;
  {
    std::lock_guard lock(mutex_);
    workers.swap(workers_);
  }
  for (auto &w : workers)
    w.request_stop();
}

std::optional<std::string> JobManager::start(const Project &project, const SaConfig &cfg)
{
  std::lock_guard lock(mutex_);
  for (const auto &[id, job] : jobs_)
  {
    const JobState s = job->state.load();
    if (job->project_id == project.id && (s == JobState::queued || s == JobState::running))
      return std::nullopt;
  }

  auto job = std::make_shared<Job>();
  job->id = "job-" + new_project_id();
  job->project_id = project.id;
  job->max_evals = cfg.max_evals;
  jobs_.emplace(job->id, job);

  workers_.emplace_back([job, project, cfg](std::stop_token stop) {
    job->state = JobState::running;
    try
    {
      SaResult result = optimize_project(project, cfg,
                                         [&](const SaProgress &p) {
                                           job->evals_used.store(p.evals_used, std::memory_order_relaxed);
                                           job->best_objective.store(p.best_objective, std::memory_order_relaxed);
                                         },
                                         stop);
      {
        std::lock_guard result_lock(job->result_mutex);
        job->result = std::move(result);
      }
      job->state = JobState::done;
    }
    catch (const std::exception &e)
    {
      {
        std::lock_guard result_lock(job->result_mutex);
        job->error = e.what();
      }
      job->state = JobState::failed;
    }
    job->state.notify_all();
  });
  return job->id;
}

std::optional<json> JobManager::snapshot(const std::string &job_id) const
{
  std::shared_ptr<Job> job;
  {
    std::lock_guard lock(mutex_);
    auto it = jobs_.find(job_id);
    if (it == jobs_.end())
      return std::nullopt;
    job = it->second;
  }

  const JobState state = job->state.load();
  json out = {
      {"id", job->id},
      {"kind", "OPTIMIZE"},
      {"project_id", job->project_id},
      {"state", job_state_name(state)},
      {"progress", {{"evals_used", job->evals_used.load()}, {"max_evals", job->max_evals}}},
      {"best_objective_m", round_sig9(job->best_objective.load())},
  };
  if (state == JobState::done || state == JobState::failed)
  {
    std::lock_guard result_lock(job->result_mutex);
    if (job->result)
      out["result"] = sa_result_to_json(*job->result);
    if (!job->error.empty())
      out["error"] = job->error;
  }
  return out;
}

void JobManager::wait(const std::string &job_id) const
{
  std::shared_ptr<Job> job;
  {
    std::lock_guard lock(mutex_);
    auto it = jobs_.find(job_id);
    if (it == jobs_.end())
      return;
    job = it->second;
  }
  for (;;)
  {
    const JobState s = job->state.load();
    if (s == JobState::done || s == JobState::failed)
      return;
    job->state.wait(s);
  }
}

// ---------------------------------------------------------------------------
// Service

namespace
{

struct HttpError
{
  int status;
  std::string message;
  std::string path;
};

void send_json(httplib::Response &res, int status, const json &body)
{
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request &req)
{
  if (req.body.empty())
    return json::object();
  try
  {
    return json::parse(req.body);
  }
  catch (const json::parse_error &e)
  {
    throw HttpError{400, std::string("malformed JSON body: ") + e.what(), ""};
  }
}

const json &field(const json &body, const std::string &key)
{
  auto it = body.find(key);
  if (it == body.end())
    throw HttpError{400, "required field is missing", key};
  return *it;
}

double number_field(const json &body, const std::string &key)
{
  const json &v = field(body, key);
  if (!v.is_number())
    throw HttpError{400, "expected a number", key};
  return v.get<double>();
}

std::int64_t integer_field(const json &body, const std::string &key)
{
  const json &v = field(body, key);
  if (!v.is_number_integer())
    throw HttpError{400, "expected an integer", key};
  return v.get<std::int64_t>();
}

Project require_project(const ProjectStore &store, const std::string &id)
{
  auto p = store.get(id);
  if (!p)
    throw HttpError{404, "unknown project '" + id + "'", ""};
  return *p;
}

json grid_payload(const ErrorGrid &grid, MapKind kind, std::int64_t version)
{
  json out = grid_to_json(grid, map_kind_name(kind));
  out["project_version"] = version;
  double lo = kUnbounded;
  double hi = -kUnbounded;
  for (double v : grid.values)
  {
    if (is_unbounded(v))
      continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  json stats = json::object();
  try
  {
    const GridMean m = grid_mean(grid);
    stats = {{"min", round_sig9(lo)}, {"max", round_sig9(hi)}, {"mean", round_sig9(m.mean)},
             {"bounded_fraction", round_sig9(m.bounded_fraction)}};
  }
  catch (const NoInformation &)
  {
    stats = {{"min", nullptr}, {"max", nullptr}, {"mean", nullptr}, {"bounded_fraction", 0.0}};
  }
  out["stats"] = std::move(stats);
  return out;
}

json nullable(double v) { return is_unbounded(v) ? json(nullptr) : json(round_sig9(v)); }

// Largest map the synchronous endpoint produces.
constexpr std::size_t kMaxMapCells = 4'000'000;

bool valid_id(const std::string &id)
{
  static const std::regex pattern("[A-Za-z0-9_-]{1,64}");
  return std::regex_match(id, pattern);
}

} // namespace

Service::Service(ServiceOptions opts) : store_(std::move(opts.data_dir)), server_(std::make_unique<httplib::Server>())
{
  routes();
}

Service::~Service() { stop(); }

int Service::bind(const std::string &host, int port)
{
  if (port == 0)
    return server_->bind_to_any_port(host);
  if (!server_->bind_to_port(host, port))
    return -1;
  return port;
}

void Service::listen() { server_->listen_after_bind(); }

void Service::stop()
{
  if (server_)
    server_->stop();
}

void Service::routes()
{
  auto &srv = *server_;

  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  srv.Options(R"(/api/.*)", [](const httplib::Request &, httplib::Response &res) { res.status = 204; });

  // Wraps a handler with the error-to-status mapping.
  auto handle = [](auto fn) {
    return [fn](const httplib::Request &req, httplib::Response &res) {
      try
      {
        fn(req, res);
      }
      catch (const HttpError &e)
      {
        json body = {{"error", e.message}};
        if (!e.path.empty())
          body["path"] = e.path;
        send_json(res, e.status, body);
      }
      catch (const ValidationError &e)
      {
        send_json(res, 400, {{"error", e.what()}, {"path", e.path()}});
      }
      catch (const ParseError &e)
      {
        send_json(res, 400, {{"error", e.what()}});
      }
      catch (const std::invalid_argument &e)
      {
        send_json(res, 400, {{"error", e.what()}});
      }
      catch (const std::exception &e)
      {
        send_json(res, 500, {{"error", e.what()}});
      }
    };
  };

  srv.Get("/api/health", handle([](const httplib::Request &, httplib::Response &res) {
            send_json(res, 200, {{"status", "ok"}});
          }));

  srv.Post("/api/projects", handle([this](const httplib::Request &req, httplib::Response &res) {
             Project p = load_project(req.body);
             if (!valid_id(p.id))
               throw HttpError{400, "id must match [A-Za-z0-9_-]{1,64}", "id"};
             auto out = store_.create(std::move(p));
             if (out.status == ProjectStore::Status::conflict)
               throw HttpError{409, "project id already exists", "id"};
             send_json(res, 201, {{"id", out.project.id}, {"version", out.project.version}});
           }));

  srv.Get(R"(/api/projects/([A-Za-z0-9_-]+))", handle([this](const httplib::Request &req, httplib::Response &res) {
            send_json(res, 200, project_to_json(require_project(store_, req.matches[1])));
          }));

  srv.Get(R"(/api/projects/([A-Za-z0-9_-]+)/export)",
          handle([this](const httplib::Request &req, httplib::Response &res) {
            res.status = 200;
            res.set_content(save_project(require_project(store_, req.matches[1])), "application/json");
          }));

  srv.Put(R"(/api/projects/([A-Za-z0-9_-]+)/beacons)",
          handle([this](const httplib::Request &req, httplib::Response &res) {
            const std::string id = req.matches[1];
            const json body = parse_body(req);
            const std::int64_t version = integer_field(body, "version");
            auto beacons = beacons_from_json(field(body, "beacons"), "beacons");
            auto out = store_.replace_beacons(id, version, std::move(beacons));
            if (out.status == ProjectStore::Status::not_found)
              throw HttpError{404, "unknown project '" + id + "'", ""};
            if (out.status == ProjectStore::Status::conflict)
            {
              send_json(res, 409, {{"error", "version mismatch"}, {"version", out.project.version}});
              return;
            }
            send_json(res, 200, {{"id", id}, {"version", out.project.version}});
          }));

  srv.Post(R"(/api/projects/([A-Za-z0-9_-]+)/maps)",
           handle([this](const httplib::Request &req, httplib::Response &res) {
             const Project p = require_project(store_, req.matches[1]);
             const json body = parse_body(req);

             MapRequest mr;
             const json &kind = field(body, "kind");
             if (!kind.is_string())
               throw HttpError{400, "expected a string", "kind"};
             try
             {
               mr.kind = parse_map_kind(kind.get<std::string>());
             }
             catch (const std::invalid_argument &e)
             {
               throw HttpError{400, e.what(), "kind"};
             }
             mr.resolution = body.contains("resolution_m") ? number_field(body, "resolution_m") : p.grid.resolution;
             mr.pdr_mode = p.grid.pdr_mode;
             if (body.contains("pdr_mode"))
             {
               if (!body["pdr_mode"].is_string())
                 throw HttpError{400, "expected a string", "pdr_mode"};
               try
               {
                 mr.pdr_mode = parse_pdr_mode(body["pdr_mode"].get<std::string>());
               }
               catch (const std::invalid_argument &e)
               {
                 throw HttpError{400, e.what(), "pdr_mode"};
               }
             }
             mr.horizon_steps = body.contains("horizon_steps") ? static_cast<int>(integer_field(body, "horizon_steps"))
                                                               : p.grid.horizon_steps;
             if (!(mr.resolution > 0.0) || !std::isfinite(mr.resolution))
               throw HttpError{400, "must be a positive number", "resolution_m"};
             if (mr.horizon_steps < 1)
               throw HttpError{400, "must be >= 1", "horizon_steps"};
             const GridSpec spec(p.floorplan, mr.resolution);
             if (spec.size() > kMaxMapCells)
               throw HttpError{400, "grid too large (" + std::to_string(spec.size()) + " cells)", "resolution_m"};
             if (mr.kind == MapKind::strength && p.beacons.empty())
               throw HttpError{400, "strength map needs at least one beacon", "beacons"};

             send_json(res, 200, grid_payload(compute_map(p.channel, p.layout(), p.pdr, mr), mr.kind, p.version));
           }));

  srv.Post(R"(/api/projects/([A-Za-z0-9_-]+)/curves)",
           handle([this](const httplib::Request &req, httplib::Response &res) {
             const Project p = require_project(store_, req.matches[1]);
             const json body = parse_body(req);
             const json &start = field(body, "start");
             if (!start.is_array() || start.size() != 2 || !start[0].is_number() || !start[1].is_number())
               throw HttpError{400, "expected [x, y]", "start"};
             Trajectory traj;
             traj.start = {start[0].get<double>(), start[1].get<double>()};
             traj.heading = number_field(body, "heading");
             traj.step_count = static_cast<int>(integer_field(body, "steps"));
             CurveOptions opts;
             if (body.contains("rotate_pdr_frame"))
             {
               if (!body["rotate_pdr_frame"].is_boolean())
                 throw HttpError{400, "expected a boolean", "rotate_pdr_frame"};
               opts.rotate_pdr_frame = body["rotate_pdr_frame"].get<bool>();
             }
             if (body.contains("reset_every"))
               opts.reset_every = static_cast<int>(integer_field(body, "reset_every"));

             const auto curve = fused_curve(p.channel, p.layout(), traj, p.pdr, opts);
             json rows = json::array();
             for (const auto &c : curve)
             {
               rows.push_back({{"step", c.step},
                               {"rss_rmse_m", nullable(c.rss_rmse)},
                               {"pdr_rmse_m", nullable(c.pdr_rmse)},
                               {"fused_rmse_m", nullable(c.fused_rmse)}});
             }
             send_json(res, 200, {{"format_version", kFormatVersion}, {"project_version", p.version}, {"rows", rows}});
           }));

  srv.Post(R"(/api/projects/([A-Za-z0-9_-]+)/optimize)",
           handle([this](const httplib::Request &req, httplib::Response &res) {
             const Project p = require_project(store_, req.matches[1]);
             SaConfig cfg = p.optimize;
             apply_optimize_overrides(cfg, parse_body(req), "");
             cfg.validate();
             auto job = jobs_.start(p, cfg);
             if (!job)
               throw HttpError{409, "an optimize job is already running for this project", ""};
             send_json(res, 202, {{"job_id", *job}});
           }));

  srv.Get(R"(/api/jobs/([A-Za-z0-9_-]+))", handle([this](const httplib::Request &req, httplib::Response &res) {
            auto snap = jobs_.snapshot(req.matches[1]);
            if (!snap)
              throw HttpError{404, "unknown job '" + std::string(req.matches[1]) + "'", ""};
            send_json(res, 200, *snap);
          }));
}

} // namespace beaconplan
