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

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <stdexcept>

#include "doctest.h"

#include "aerosim/artifacts.hpp"
#include "aerosim/error.hpp"

using namespace aerosim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("aerosim-artifacts-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

Scenario quick_courtroom() {
  Scenario s = build_courtroom();
  s.simulation.dt = 5.0;
  s.simulation.target_edge = 0.5;
  s.simulation.frame_every = 600.0;
  return s;
}

void run_into(const Scenario& s, const fs::path& out) {
  const auto prepared = prepare(s);
  const SimulationResult r = simulate(*prepared);
  write_run_artifacts(*prepared, r, out);
}

// name -> contents of a ustar archive; checks each header on the way.
std::map<std::string, std::string> untar(const std::string& tar) {
  std::map<std::string, std::string> files;
  REQUIRE(tar.size() % 512 == 0);
  std::size_t pos = 0;
  while (true) {
    REQUIRE(pos + 512 <= tar.size());
    const std::string_view h(tar.data() + pos, 512);
    if (h.find_first_not_of('\0') == std::string_view::npos) {
      // End of archive: two zero blocks.
      REQUIRE(pos + 1024 == tar.size());
      break;
    }
    CHECK(h.substr(257, 6) == std::string_view("ustar\0", 6));
    CHECK(h.substr(263, 2) == "00");
    unsigned sum = 0;
    for (std::size_t i = 0; i < 512; ++i) {
      sum += (i >= 148 && i < 156) ? ' ' : static_cast<unsigned char>(h[i]);
    }
    CHECK(std::strtoul(std::string(h.substr(148, 8)).c_str(), nullptr, 8) == sum);
    CHECK(std::strtoul(std::string(h.substr(136, 12)).c_str(), nullptr, 8) == 0);  // mtime
    const std::string name(h.substr(0, h.find('\0')));
    const std::string prefix(h.substr(345, std::min<std::size_t>(155, h.substr(345).find('\0'))));
    const std::size_t size = std::strtoul(std::string(h.substr(124, 12)).c_str(), nullptr, 8);
    const char type = h[156];
    const std::string full = prefix.empty() ? name : prefix + "/" + name;
    pos += 512;
    if (type == '0' || type == '\0') {
      files[full] = tar.substr(pos, size);
      pos += (size + 511) / 512 * 512;
    }
  }
  return files;
}

}  // namespace

TEST_CASE("run artifacts layout") {
  TempDir tmp;
  const fs::path out = tmp.path / "court";
  run_into(quick_courtroom(), out);
  for (const char* f : {"fields.csv", "agents.csv", "mesh.txt", "summary.json", "manifest.json"}) {
    CAPTURE(f);
    CHECK(fs::is_regular_file(out / f));
  }
  std::size_t risk_files = 0;
  for (const auto& e : fs::directory_iterator(out / "risks")) {
    ++risk_files;
    const std::string text = read_text_file(e.path());
    CHECK(text.rfind("time_s,dose,risk\n", 0) == 0);
  }
  CHECK(risk_files == 9);  // susceptible agents only
  CHECK_FALSE(fs::exists(out / "risks" / "P1.csv"));

  const Json summary = parse_json(read_text_file(out / "summary.json"));
  CHECK(summary["version"] == 1);
  CHECK(summary["final_risks"].size() == 9);
  CHECK(summary.contains("infected"));
  CHECK(summary.contains("runtime_seconds"));

  const Json manifest = parse_json(read_text_file(out / "manifest.json"));
  CHECK(manifest["dt"] == 5.0);
  CHECK(manifest["target_edge"] == 0.5);
  CHECK(manifest["seed"] == 1);
  for (const char* key : {"tool_version", "transport", "mesh", "navigation", "scenario", "threshold",
                          "frame_every", "sink_per_height", "steps"}) {
    CAPTURE(key);
    CHECK(manifest.contains(key));
  }
  CHECK(manifest["transport"].contains("kappa"));
  // The manifest's scenario reproduces the run.
  CHECK(scenario_from_json(manifest["scenario"]) == quick_courtroom());

  const std::string fields = read_text_file(out / "fields.csv");
  CHECK(fields.rfind("frame,time_s,mass,n0,", 0) == 0);
  const std::string agents = read_text_file(out / "agents.csv");
  CHECK(agents.rfind("frame,time_s,id,x,y,present,infectious,risk\n", 0) == 0);
}

TEST_CASE("equal runs give byte-identical files") {
  TempDir tmp;
  run_into(quick_courtroom(), tmp.path / "a");
  run_into(quick_courtroom(), tmp.path / "b");
  for (const auto& e : fs::recursive_directory_iterator(tmp.path / "a")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), tmp.path / "a");
    if (rel == "summary.json") continue;  // holds the wall-clock runtime
    CAPTURE(rel.string());
    CHECK(read_text_file(e.path()) == read_text_file(tmp.path / "b" / rel));
  }
}

TEST_CASE("atomic directory replacement") {
  TempDir tmp;
  const fs::path out = tmp.path / "out";
  write_directory_atomically(out, [](const fs::path& d) { write_text_file(d / "x.txt", "one"); });
  CHECK(read_text_file(out / "x.txt") == "one");
  // A failing fill keeps the previous output and leaves nothing behind.
  CHECK_THROWS_AS(write_directory_atomically(out,
                                             [](const fs::path& d) {
                                               write_text_file(d / "x.txt", "partial");
                                               throw std::runtime_error("boom");
                                             }),
                  std::runtime_error);
  CHECK(read_text_file(out / "x.txt") == "one");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(tmp.path)) ++entries;
  CHECK(entries == 1);
  // A successful fill replaces the directory wholesale.
  write_directory_atomically(out, [](const fs::path& d) { write_text_file(d / "y.txt", "two"); });
  CHECK_FALSE(fs::exists(out / "x.txt"));
  CHECK(read_text_file(out / "y.txt") == "two");
}

TEST_CASE("a malformed scenario leaves no output") {
  TempDir tmp;
  const fs::path out = tmp.path / "bad";
  Scenario s = quick_courtroom();
  s.agents[2].schedule[1].location = Point{50.0, 50.0};
  CHECK_THROWS_AS(run_into(s, out), ValidationError);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("ustar archives") {
  TempDir tmp;
  const fs::path dir = tmp.path / "tree";
  fs::create_directories(dir / "risks");
  write_text_file(dir / "b.txt", "bravo\n");
  write_text_file(dir / "a.txt", std::string(1000, 'a'));
  write_text_file(dir / "risks" / "P2.csv", "time_s,dose,risk\n");
  write_text_file(dir / "empty.txt", "");
  const std::string long_dir = std::string(80, 'd');
  fs::create_directories(dir / long_dir);
  write_text_file(dir / long_dir / (std::string(70, 'f') + ".csv"), "long");

  const std::string tar = tar_directory(dir, "job-1");
  const auto files = untar(tar);
  CHECK(files.size() == 5);
  CHECK(files.at("job-1/a.txt") == std::string(1000, 'a'));
  CHECK(files.at("job-1/b.txt") == "bravo\n");
  CHECK(files.at("job-1/risks/P2.csv") == "time_s,dose,risk\n");
  CHECK(files.at("job-1/empty.txt").empty());
  CHECK(files.at("job-1/" + long_dir + "/" + std::string(70, 'f') + ".csv") == "long");
  // Content-addressed: the same tree always gives the same bytes.
  CHECK(tar_directory(dir, "job-1") == tar);
  // Members are in sorted path order.
  CHECK(tar.find("job-1/a.txt") < tar.find("job-1/b.txt"));
  CHECK(tar.find("job-1/b.txt") < tar.find("job-1/risks/P2.csv"));
}

TEST_CASE("report CSVs") {
  SweepResult r;
  r.mu = {0.1, 0.2};
  r.d_m = {50.0};
  r.p = {{0.25}, {0.5}};
  const std::string sweep = sweep_csv(r);
  CHECK(sweep.rfind("mu,d_m,p\n", 0) == 0);
  CHECK(std::count(sweep.begin(), sweep.end(), '\n') == 3);

  ComparisonRow row;
  row.scenario = "care_home";
  row.intervention = "II";
  row.description = "everyone wears a surgical mask, indoors";
  const std::string cmp = compare_csv({row});
  CHECK(cmp.rfind("scenario,intervention,description,mean_final_risk,metric,delta\n", 0) == 0);
  // Fields with commas are quoted.
  CHECK(cmp.find("\"everyone wears a surgical mask, indoors\"") != std::string::npos);
}
