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

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "aerosim/artifacts.hpp"

using namespace aerosim;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status = -1;
  std::string out;
  std::string err;
};

const fs::path& scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("aerosim-cli-" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the CLI with `args` and captures exit status, stdout and stderr.
Result cli(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
  const std::string cmd = std::string("\"") + AEROSIM_CLI + "\" " + args + " >\"" + out.string() +
                          "\" 2>\"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  Result r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = read_text_file(out);
  r.err = read_text_file(err);
  return r;
}

std::size_t lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

const char* kCoarse = " --dt 5 --mesh-size 0.5";

}  // namespace

TEST_CASE("run the courtroom preset") {
  const fs::path out = scratch() / "court";
  const Result r = cli("run courtroom --out " + out.string());
  REQUIRE(r.status == 0);
  CHECK(r.out.find("infected (risk >= 0.5): P2 P4") != std::string::npos);
  const Json summary = parse_json(read_text_file(out / "summary.json"));
  CHECK(summary["infected"] == Json::array({"P2", "P4"}));
  CHECK(fs::exists(out / "risks" / "P3.csv"));
  CHECK(fs::exists(out / "fields.csv"));
}

TEST_CASE("overrides reach the manifest") {
  const fs::path out = scratch() / "half";
  const Result r = cli("run courtroom --dt 0.5 --mesh-size 0.5 --frames-every 300 --threshold 0.35 "
                       "--seed 4 --out " + out.string());
  REQUIRE(r.status == 0);
  const Json m = parse_json(read_text_file(out / "manifest.json"));
  CHECK(m["dt"] == 0.5);
  CHECK(m["target_edge"] == 0.5);
  CHECK(m["frame_every"] == 300.0);
  CHECK(m["threshold"] == 0.35);
  CHECK(m["seed"] == 4);
  CHECK(m["steps"] == 21600);
}

TEST_CASE("bad inputs fail without output") {
  const fs::path bad = scratch() / "bad.json";
  write_text_file(bad, "{\"version\": 1, \"name\": \n");
  const fs::path out = scratch() / "never";
  Result r = cli("run " + bad.string() + " --out " + out.string());
  CHECK(r.status == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
  CHECK_FALSE(fs::exists(out));

  r = cli("run " + (scratch() / "missing.json").string() + " --out " + out.string());
  CHECK(r.status == 3);
  r = cli("run office --out " + out.string());
  CHECK(r.status == 3);
  CHECK_FALSE(fs::exists(out));

  r = cli("validate " + bad.string());
  CHECK(r.status == 2);
  r = cli("validate care_home");
  CHECK(r.status == 0);
  CHECK(r.out.rfind("ok: care_home", 0) == 0);
}

TEST_CASE("compare the care-home interventions") {
  const fs::path out = scratch() / "cmp";
  const Result r = cli("compare care_home --npis I,II,III,IV,V,VI --threads 2 --out " +
                       out.string() + kCoarse);
  REQUIRE(r.status == 0);
  const std::string csv = read_text_file(out / "compare.csv");
  CHECK(lines(csv) == 1 + 7);
  CHECK(csv.find("care_home,baseline,") != std::string::npos);
  CHECK(csv.find("care_home,VI,") != std::string::npos);
}

TEST_CASE("unknown intervention lists the valid ones") {
  const Result r = cli("compare care_home --npis I,IX --out " + (scratch() / "x").string());
  CHECK(r.status == 2);
  CHECK(r.err.find("valid kinds: I, II, III, IV, V, VI") != std::string::npos);
}

TEST_CASE("sweep a 2 x 2 grid") {
  const fs::path out = scratch() / "sweep";
  const Result r = cli("sweep courtroom --mu-steps 2 --dm-steps 2 --out " + out.string() + kCoarse);
  REQUIRE(r.status == 0);
  const std::string csv = read_text_file(out / "sweep.csv");
  CHECK(csv.rfind("mu,d_m,p\n", 0) == 0);
  CHECK(lines(csv) == 1 + 4);
}

TEST_CASE("list and dump presets") {
  Result r = cli("list-presets");
  REQUIRE(r.status == 0);
  for (const char* name : {"courtroom", "care_home", "supermarket"}) {
    CHECK(r.out.find(name) != std::string::npos);
  }
  r = cli("dump courtroom");
  REQUIRE(r.status == 0);
  CHECK(r.out == read_text_file(fs::path(AEROSIM_SOURCE_DIR) / "presets" / "courtroom.json"));
  r = cli("dump care_home --params");
  REQUIRE(r.status == 0);
  CHECK(parse_json(r.out).contains("diffusion"));
}

TEST_CASE("identical runs give identical risk files") {
  const fs::path a = scratch() / "det-a", b = scratch() / "det-b";
  REQUIRE(cli("run care_home --out " + a.string() + kCoarse).status == 0);
  REQUIRE(cli("run care_home --out " + b.string() + kCoarse).status == 0);
  for (const auto& e : fs::directory_iterator(a / "risks")) {
    CHECK(read_text_file(e.path()) == read_text_file(b / "risks" / e.path().filename()));
  }
  fs::remove_all(scratch());
}
