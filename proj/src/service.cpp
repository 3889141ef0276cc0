// Copyright 2026 The Aerosim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aerosim/service.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <random>

#include "httplib.h"

#include "aerosim/artifacts.hpp"

namespace aerosim {
namespace fs = std::filesystem;

std::string_view to_string(JobState state) {
  switch (state) {
    case JobState::queued: return "queued";
    case JobState::running: return "running";
    case JobState::done: return "done";
    case JobState::failed: return "failed";
  }
  return "failed";
}

// Everything mutable is guarded by `m`; `frames` only grows.
struct JobRegistry::Job {
  std::string id;
  Scenario scenario;
  mutable std::mutex m;
  mutable std::condition_variable changed;
  JobState state = JobState::queued;
  double progress = 0.0;
  std::string error;
  std::string error_field;
  std::shared_ptr<const PreparedScenario> prepared;
  std::vector<std::shared_ptr<const Frame>> frames;
  std::vector<ExposureRecord> records;
  std::vector<std::string> warnings;
  double runtime_seconds = 0.0;
  fs::path archive;
  std::atomic<bool> cancel{false};
};

namespace {

Json frame_json(const Frame& f, double origin) {
  Json j;
  j["index"] = f.index;
  j["time"] = f.time;
  j["clock"] = format_clock(origin + f.time);
  j["mass"] = f.mass;
  j["values"] = f.values;
  Json agents = Json::array();
  for (const AgentSample& a : f.agents) {
    agents.push_back({{"id", a.id},
                      {"x", a.position.x},
                      {"y", a.position.y},
                      {"present", a.present},
                      {"infectious", a.infectious},
                      {"risk", a.risk}});
  }
  j["agents"] = std::move(agents);
  return j;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

JobRegistry::JobRegistry(ServiceOptions options) : options_(std::move(options)) {
  if (options_.max_running == 0) {
    throw ValidationError("max_running", "at least one job must be able to run");
  }
  if (options_.work_dir.empty()) {
    std::random_device rd;
    options_.work_dir = fs::temp_directory_path() /
                        ("aerosim-service-" + std::to_string(::getpid()) + "-" +
                         std::to_string(rd()));
    owns_work_dir_ = true;
  }
  fs::create_directories(options_.work_dir);
  std::random_device rd;
  salt_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  for (unsigned i = 0; i < options_.max_running; ++i) {
    workers_.emplace_back([this] { worker(); });
  }
}

JobRegistry::~JobRegistry() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
    for (auto& [id, job] : jobs_) job->cancel = true;
  }
  wake_.notify_all();
  for (auto& w : workers_) w.join();
  if (owns_work_dir_) {
    std::error_code ignored;
    fs::remove_all(options_.work_dir, ignored);
  }
}

std::string JobRegistry::submit(Scenario scenario) {
  auto job = std::make_shared<Job>();
  job->scenario = std::move(scenario);
  {
    std::lock_guard lock(mutex_);
    if (stopping_) throw Error("service is shutting down");
    ++counter_;
    char id[48];
    std::snprintf(id, sizeof id, "job-%06llu-%s", static_cast<unsigned long long>(counter_),
                  hex64(salt_ * 0x9E3779B97F4A7C15ull + counter_).substr(0, 8).c_str());
    job->id = id;
    jobs_[job->id] = job;
    order_.push_back(job->id);
    queue_.push_back(job);
  }
  wake_.notify_one();
  return job->id;
}

void JobRegistry::worker() {
  for (;;) {
    std::shared_ptr<Job> job;
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      job = queue_.front();
      queue_.pop_front();
    }
    run(*job);
  }
}

void JobRegistry::run(Job& job) {
  {
    std::lock_guard lock(job.m);
    job.state = JobState::running;
  }
  job.changed.notify_all();
  try {
    auto prepared = prepare(job.scenario);
    {
      std::lock_guard lock(job.m);
      job.prepared = prepared;
    }
    RunOptions run;
    run.keep_frames = true;
    run.on_frame = [&job](const Frame& f) {
      auto copy = std::make_shared<const Frame>(f);
      std::lock_guard lock(job.m);
      job.frames.push_back(std::move(copy));
    };
    run.on_progress = [&job](double fraction) {
      {
        std::lock_guard lock(job.m);
        job.progress = std::max(job.progress, std::min(fraction, 0.999));
      }
      return !job.cancel.load();
    };
    SimulationResult result = simulate(*prepared, run);
    const fs::path dir = options_.work_dir / job.id;
    write_run_artifacts(*prepared, result, dir);
    const fs::path archive = options_.work_dir / (job.id + ".tar");
    write_text_file(archive, tar_directory(dir, job.id));
    {
      std::lock_guard lock(job.m);
      job.records = std::move(result.records);
      job.warnings = std::move(result.warnings);
      job.runtime_seconds = prepared->prepare_seconds + result.runtime_seconds;
      job.archive = archive;
      job.progress = 1.0;
      job.state = JobState::done;
    }
  } catch (const ValidationError& e) {
    std::lock_guard lock(job.m);
    job.error = e.what();
    job.error_field = e.field();
    job.state = JobState::failed;
  } catch (const std::exception& e) {
    std::lock_guard lock(job.m);
    job.error = e.what();
    job.state = JobState::failed;
  }
  job.changed.notify_all();
}

std::shared_ptr<JobRegistry::Job> JobRegistry::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) throw NotFoundError("no job with id '" + id + "'");
  return it->second;
}

Json JobRegistry::status(const std::string& id) const {
  const auto job = find(id);
  std::lock_guard lock(job->m);
  Json j;
  j["version"] = kScenarioVersion;
  j["id"] = job->id;
  j["scenario"] = job->scenario.name;
  j["kind"] = to_string(job->scenario.kind);
  j["state"] = to_string(job->state);
  j["progress"] = job->progress;
  j["frames_available"] = job->frames.size();
  j["frame_every"] = job->scenario.simulation.frame_every;
  j["duration"] = job->scenario.simulation.duration;
  j["start"] = format_clock(job->scenario.simulation.clock_origin);
  if (job->prepared) j["mesh"] = hex64(job->prepared->mesh.content_hash());
  if (job->state == JobState::failed) {
    j["error"] = {{"field", job->error_field}, {"message", job->error}};
  }
  if (job->state == JobState::done) {
    Json risks = Json::object(), infected = Json::array();
    for (const ExposureRecord& r : job->records) {
      if (r.infectious) continue;
      risks[r.agent] = r.final_risk;
      if (r.infected) infected.push_back(r.agent);
    }
    j["final_risks"] = risks;
    j["infected"] = infected;
    j["warnings"] = job->warnings;
    j["runtime_seconds"] = job->runtime_seconds;
  }
  return j;
}

Json JobRegistry::frames(const std::string& id, std::size_t from, std::size_t to) const {
  const auto job = find(id);
  std::vector<std::shared_ptr<const Frame>> page;
  JobState state;
  std::size_t available;
  std::string mesh;
  {
    std::lock_guard lock(job->m);
    state = job->state;
    available = job->frames.size();
    if (job->prepared) mesh = hex64(job->prepared->mesh.content_hash());
    const std::size_t last = std::min({to, available == 0 ? 0 : available - 1,
                                       from + options_.frame_page_limit - 1});
    for (std::size_t k = from; k < available && k <= last; ++k) page.push_back(job->frames[k]);
  }
  Json j;
  j["version"] = kScenarioVersion;
  j["id"] = id;
  j["state"] = to_string(state);
  j["mesh"] = mesh;
  j["available"] = available;
  j["from"] = from;
  Json list = Json::array();
  for (const auto& f : page) list.push_back(frame_json(*f, job->scenario.simulation.clock_origin));
  j["frames"] = std::move(list);
  const std::size_t next = from + page.size();
  // "next" is where the following page starts, whenever frames exist or are
  // still coming past this one.
  const bool more =
      next < available || state == JobState::queued || state == JobState::running;
  if (more) j["next"] = next;
  return j;
}

Json JobRegistry::mesh(const std::string& id) const {
  const auto job = find(id);
  std::shared_ptr<const PreparedScenario> prepared;
  {
    std::lock_guard lock(job->m);
    prepared = job->prepared;
  }
  if (!prepared) throw ConflictError("job '" + id + "' has no mesh yet");
  const Mesh& mesh = prepared->mesh;
  Json vertices = Json::array(), triangles = Json::array();
  for (Point p : mesh.vertices) vertices.push_back({p.x, p.y});
  for (const auto& t : mesh.triangles) triangles.push_back({t[0], t[1], t[2]});
  Json j;
  j["version"] = kScenarioVersion;
  j["hash"] = hex64(mesh.content_hash());
  j["vertices"] = std::move(vertices);
  j["triangles"] = std::move(triangles);
  Json rooms = Json::array();
  for (const Room& r : prepared->scenario.floorplan.rooms) {
    rooms.push_back({{"name", r.name},
                     {"x", r.bounds.x},
                     {"y", r.bounds.y},
                     {"width", r.bounds.width},
                     {"length", r.bounds.length}});
  }
  j["rooms"] = std::move(rooms);
  return j;
}

Json JobRegistry::risks(const std::string& id) const {
  const auto job = find(id);
  std::lock_guard lock(job->m);
  if (job->state != JobState::done) {
    throw ConflictError("job '" + id + "' is " + std::string(to_string(job->state)));
  }
  Json series = Json::array();
  for (const ExposureRecord& r : job->records) {
    if (r.infectious) continue;
    series.push_back({{"id", r.agent},
                      {"times", r.times},
                      {"dose", r.dose},
                      {"risk", r.risk},
                      {"final_risk", r.final_risk},
                      {"infected", r.infected}});
  }
  Json j;
  j["version"] = kScenarioVersion;
  j["id"] = id;
  j["threshold"] = job->scenario.simulation.threshold;
  j["series"] = std::move(series);
  return j;
}

std::string JobRegistry::export_archive(const std::string& id) const {
  const auto job = find(id);
  fs::path archive;
  {
    std::lock_guard lock(job->m);
    if (job->state != JobState::done) {
      throw ConflictError("job '" + id + "' is " + std::string(to_string(job->state)));
    }
    archive = job->archive;
  }
  return read_text_file(archive);
}

Json JobRegistry::list() const {
  std::vector<std::shared_ptr<Job>> jobs;
  {
    std::lock_guard lock(mutex_);
    for (const auto& id : order_) jobs.push_back(jobs_.at(id));
  }
  Json list = Json::array();
  for (const auto& job : jobs) {
    std::lock_guard lock(job->m);
    list.push_back({{"id", job->id},
                    {"scenario", job->scenario.name},
                    {"state", to_string(job->state)},
                    {"progress", job->progress}});
  }
  return Json{{"version", kScenarioVersion}, {"jobs", std::move(list)}};
}

JobState JobRegistry::wait(const std::string& id) const {
  const auto job = find(id);
  std::unique_lock lock(job->m);
  job->changed.wait(lock, [&] {
    return job->state == JobState::done || job->state == JobState::failed;
  });
  return job->state;
}

// ------------------------------------------------------------------ HTTP

namespace {

HttpResponse json_response(int status, const Json& body) {
  return {status, "application/json", body.dump() + "\n"};
}

HttpResponse error_response(int status, const std::string& code, const std::string& message,
                            const std::string& field = "") {
  Json e{{"code", code}, {"message", message}};
  if (!field.empty()) e["field"] = field;
  return json_response(status, Json{{"version", kScenarioVersion}, {"error", e}});
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    const std::size_t j = path.find('/', i);
    const std::size_t end = j == std::string::npos ? path.size() : j;
    if (end > i) parts.push_back(path.substr(i, end - i));
    i = end;
  }
  return parts;
}

std::size_t index_param(const std::map<std::string, std::string>& query,
                        const std::string& key, std::size_t fallback) {
  const auto it = query.find(key);
  if (it == query.end() || it->second.empty()) return fallback;
  std::size_t v = 0;
  const char* b = it->second.data();
  const char* e = b + it->second.size();
  const auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) {
    throw ValidationError(key, "expected a non-negative frame index");
  }
  return v;
}

struct MethodNotAllowed {
  std::string allowed;
};

Json presets_json() {
  Json list = Json::array();
  for (const auto& name : preset_names()) {
    const Scenario s = build_preset(name);
    Json npis = Json::array();
    for (const auto& n : npi_catalog(s)) {
      npis.push_back({{"name", n.name}, {"description", n.description}});
    }
    list.push_back({{"name", name},
                    {"kind", to_string(s.kind)},
                    {"description", s.description},
                    {"start", format_clock(s.simulation.clock_origin)},
                    {"duration", s.simulation.duration},
                    {"agents", s.agents.size()},
                    {"npis", std::move(npis)}});
  }
  return Json{{"version", kScenarioVersion}, {"presets", std::move(list)}};
}

}  // namespace

Service::Service(ServiceOptions options) : registry_(std::move(options)) {}

HttpResponse Service::handle(const std::string& method, const std::string& path,
                             const std::map<std::string, std::string>& query,
                             const std::string& body) {
  const auto parts = split_path(path);
  auto only = [&](const char* allowed) {
    if (method != allowed) {
      throw MethodNotAllowed{allowed};
    }
  };
  // Browser preflight for the JSON POSTs; mount() adds the CORS headers.
  if (method == "OPTIONS") return {204, "text/plain", ""};
  try {
    if (parts.size() == 1 && parts[0] == "presets") {
      only("GET");
      return json_response(200, presets_json());
    }
    if (parts.size() == 2 && parts[0] == "presets") {
      only("GET");
      return json_response(200, scenario_to_json(build_preset(parts[1])));
    }
    if (parts.size() == 1 && parts[0] == "validate") {
      only("POST");
      const Scenario s = resolve_document(parse_json(body));
      return json_response(200, Json{{"version", kScenarioVersion},
                                     {"valid", true},
                                     {"scenario", s.name},
                                     {"agents", s.agents.size()}});
    }
    if (parts.size() == 1 && parts[0] == "jobs") {
      if (method == "GET") return json_response(200, registry_.list());
      only("POST");
      const std::string id = registry_.submit(resolve_document(parse_json(body)));
      return json_response(202, Json{{"version", kScenarioVersion},
                                     {"id", id},
                                     {"state", "queued"}});
    }
    if (parts.size() >= 2 && parts[0] == "jobs") {
      only("GET");
      const std::string& id = parts[1];
      if (parts.size() == 2) return json_response(200, registry_.status(id));
      if (parts.size() == 3 && parts[2] == "frames") {
        const std::size_t from = index_param(query, "from", 0);
        const std::size_t to =
            index_param(query, "to", from + registry_.options().frame_page_limit - 1);
        if (to < from) throw ValidationError("to", "must not be below 'from'");
        return json_response(200, registry_.frames(id, from, to));
      }
      if (parts.size() == 3 && parts[2] == "mesh") return json_response(200, registry_.mesh(id));
      if (parts.size() == 3 && parts[2] == "risks") {
        return json_response(200, registry_.risks(id));
      }
      if (parts.size() == 3 && parts[2] == "export") {
        return {200, "application/x-tar", registry_.export_archive(id)};
      }
    }
    return error_response(404, "not_found", "no route for " + method + " " + path);
  } catch (const MethodNotAllowed& e) {
    return error_response(405, "method_not_allowed", "use " + e.allowed);
  } catch (const ValidationError& e) {
    // Syntax errors carry a "line N column M" location instead of a pointer.
    const bool syntax = e.field().starts_with("line ");
    return error_response(syntax ? 400 : 422, syntax ? "malformed" : "validation", e.what(),
                          e.field());
  } catch (const NotFoundError& e) {
    return error_response(404, "not_found", e.what());
  } catch (const ConflictError& e) {
    return error_response(409, "not_ready", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

void Service::mount(httplib::Server& server) {
  // Method handlers rather than a pre-routing hook: httplib reads request
  // bodies only after routing.
  const auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    const HttpResponse r = handle(req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
    if (r.content_type == "application/x-tar") {
      res.set_header("Content-Disposition", "attachment; filename=\"aerosim-export.tar\"");
    }
    res.set_header("Access-Control-Allow-Origin", "*");
    if (req.method == "OPTIONS") {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    }
  };
  server.Get(".*", dispatch);
  server.Post(".*", dispatch);
  server.Put(".*", dispatch);
  server.Delete(".*", dispatch);
  server.Patch(".*", dispatch);
  server.Options(".*", dispatch);
}

void serve(const std::string& host, int port, ServiceOptions options) {
  Service service(std::move(options));
  httplib::Server server;
  service.mount(server);
  if (!server.listen(host, port)) {
    throw Error("cannot listen on " + host + ":" + std::to_string(port));
  }
}

}  // namespace aerosim
