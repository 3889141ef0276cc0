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

#ifndef AEROSIM_SERVICE_HPP_
#define AEROSIM_SERVICE_HPP_

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "aerosim/error.hpp"
#include "aerosim/scenario_io.hpp"
#include "aerosim/simulation.hpp"

namespace httplib {
class Server;
}

namespace aerosim {

enum class JobState { queued, running, done, failed };
std::string_view to_string(JobState state);

struct ServiceOptions {
  // Jobs running at once; surplus jobs wait in FIFO order.
  unsigned max_running = 1;
  // Artifacts of finished jobs go to <work_dir>/<id>/. Empty: a fresh
  // temporary directory, removed when the registry is destroyed.
  std::filesystem::path work_dir;
  // Upper bound on frames returned by one frames request.
  std::size_t frame_page_limit = 100;
};

class JobRegistry {
 public:
  explicit JobRegistry(ServiceOptions options = {});
  ~JobRegistry();
  JobRegistry(const JobRegistry&) = delete;
  JobRegistry& operator=(const JobRegistry&) = delete;

  // Queues a validated scenario; returns its id at once. Every call makes
  // a new job, identical documents included.
  std::string submit(Scenario scenario);

  // All queries throw NotFoundError for an unknown id.
  Json status(const std::string& id) const;
  // Frames [from, to] clipped to what has been produced so far and to the
  // page limit. Frames are appended only; a served frame never changes.
  Json frames(const std::string& id, std::size_t from, std::size_t to) const;
  // Mesh of the job, once prepared (ConflictError before).
  Json mesh(const std::string& id) const;
  // Per-susceptible risk series; ConflictError until the job is done.
  Json risks(const std::string& id) const;
  // ustar archive of the run artifacts; ConflictError until done.
  std::string export_archive(const std::string& id) const;
  Json list() const;

  // Blocks until the job is done or failed (tests and the CLI).
  JobState wait(const std::string& id) const;

  const ServiceOptions& options() const { return options_; }

 private:
  struct Job;
  std::shared_ptr<Job> find(const std::string& id) const;
  void worker();
  void run(Job& job);

  ServiceOptions options_;
  bool owns_work_dir_ = false;
  mutable std::mutex mutex_;
  std::condition_variable wake_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::vector<std::string> order_;
  std::deque<std::shared_ptr<Job>> queue_;
  std::uint64_t counter_ = 0;
  std::uint64_t salt_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

// Transport-independent request handling, so routes are testable without
// sockets. Bodies are JSON with a top-level "version" except the export.
struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

class Service {
 public:
  explicit Service(ServiceOptions options = {});

  HttpResponse handle(const std::string& method, const std::string& path,
                      const std::map<std::string, std::string>& query,
                      const std::string& body);

  JobRegistry& registry() { return registry_; }

  // Routes every request of `server` to handle().
  void mount(httplib::Server& server);

 private:
  JobRegistry registry_;
};

// Serves until the process is stopped.
void serve(const std::string& host, int port, ServiceOptions options);

}  // namespace aerosim

#endif  // AEROSIM_SERVICE_HPP_
