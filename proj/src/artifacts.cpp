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

#include "aerosim/artifacts.hpp"

#include <unistd.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "aerosim/error.hpp"

namespace aerosim {
namespace fs = std::filesystem;
namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  out += buf;
}

void append_time(std::string& out, double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", t);
  out += buf;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Agent ids become file names; anything outside [A-Za-z0-9._-] is replaced.
std::string safe_file_name(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    if (!ok) c = '_';
  }
  if (out.empty() || out[0] == '.') out.insert(out.begin(), '_');
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// ustar header fields are NUL-terminated octal.
void put_octal(char* field, std::size_t width, std::uint64_t value) {
  std::snprintf(field, width, "%0*llo", static_cast<int>(width - 1),
                static_cast<unsigned long long>(value));
}

void tar_entry(std::string& out, const std::string& path, const std::string* contents) {
  std::array<char, 512> h{};
  std::string name = path, prefix;
  if (name.size() > 100) {
    const auto cut = name.rfind('/', 155);
    if (cut == std::string::npos || name.size() - cut - 1 > 100) {
      throw Error("tar: path too long: " + path);
    }
    prefix = name.substr(0, cut);
    name = name.substr(cut + 1);
  }
  std::memcpy(h.data(), name.data(), name.size());
  put_octal(h.data() + 100, 8, contents ? 0644 : 0755);
  put_octal(h.data() + 108, 8, 0);
  put_octal(h.data() + 116, 8, 0);
  put_octal(h.data() + 124, 12, contents ? contents->size() : 0);
  put_octal(h.data() + 136, 12, 0);
  std::memset(h.data() + 148, ' ', 8);
  h[156] = contents ? '0' : '5';
  std::memcpy(h.data() + 257, "ustar", 6);
  std::memcpy(h.data() + 263, "00", 2);
  std::memcpy(h.data() + 345, prefix.data(), prefix.size());
  unsigned sum = 0;
  for (char c : h) sum += static_cast<unsigned char>(c);
  std::snprintf(h.data() + 148, 8, "%06o", sum);
  h[155] = ' ';
  out.append(h.data(), h.size());
  if (contents) {
    out += *contents;
    out.append((512 - contents->size() % 512) % 512, '\0');
  }
}

}  // namespace

std::string risk_csv(const ExposureRecord& r) {
  std::string out = "time_s,dose,risk\n";
  out.reserve(out.size() + r.times.size() * 48);
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    append_time(out, r.times[i]);
    out += ',';
    append_number(out, r.dose[i]);
    out += ',';
    append_number(out, r.risk[i]);
    out += '\n';
  }
  return out;
}

std::string fields_csv(const std::vector<Frame>& frames) {
  std::string out = "frame,time_s,mass";
  const std::size_t nodes = frames.empty() ? 0 : frames.front().values.size();
  for (std::size_t k = 0; k < nodes; ++k) out += ",n" + std::to_string(k);
  out += '\n';
  out.reserve(out.size() + frames.size() * (nodes + 3) * 17);
  for (const Frame& f : frames) {
    out += std::to_string(f.index);
    out += ',';
    append_time(out, f.time);
    out += ',';
    append_number(out, f.mass);
    for (double v : f.values) {
      out += ',';
      append_number(out, v);
    }
    out += '\n';
  }
  return out;
}

std::string agents_csv(const std::vector<Frame>& frames) {
  std::string out = "frame,time_s,id,x,y,present,infectious,risk\n";
  for (const Frame& f : frames) {
    for (const AgentSample& a : f.agents) {
      out += std::to_string(f.index);
      out += ',';
      append_time(out, f.time);
      out += ',' + csv_field(a.id) + ',';
      append_number(out, a.position.x);
      out += ',';
      append_number(out, a.position.y);
      out += a.present ? ",1" : ",0";
      out += a.infectious ? ",1," : ",0,";
      append_number(out, a.risk);
      out += '\n';
    }
  }
  return out;
}

Json summary_json(const PreparedScenario& prepared, const SimulationResult& result) {
  const Scenario& s = prepared.scenario;
  Json j;
  j["version"] = kScenarioVersion;
  j["scenario"] = s.name;
  j["kind"] = to_string(s.kind);
  j["threshold"] = s.simulation.threshold;
  Json risks = Json::object(), doses = Json::object(), infected = Json::array(),
       infectious = Json::array();
  for (const ExposureRecord& r : result.records) {
    if (r.infectious) {
      infectious.push_back(r.agent);
      continue;
    }
    risks[r.agent] = r.final_risk;
    doses[r.agent] = r.final_dose;
    if (r.infected) infected.push_back(r.agent);
  }
  j["infectious"] = infectious;
  j["infected"] = infected;
  j["final_risks"] = risks;
  j["final_doses"] = doses;
  const auto mean = susceptible_final_risks(result);
  if (!mean.empty()) j["mean_final_risk"] = average_risk(mean);
  j["steps"] = result.steps;
  j["frames"] = result.frames.size();
  j["min_nodal_value"] = result.min_value;
  j["max_nodal_value"] = result.max_value;
  j["warnings"] = result.warnings;
  j["prepare_seconds"] = prepared.prepare_seconds;
  j["runtime_seconds"] = prepared.prepare_seconds + result.runtime_seconds;
  return j;
}

Json manifest_json(const PreparedScenario& prepared, const SimulationResult& result) {
  const Scenario& s = prepared.scenario;
  Json j;
  j["version"] = kScenarioVersion;
  j["tool_version"] = kToolVersion;
  j["seed"] = s.simulation.seed;
  j["dt"] = s.simulation.dt;
  j["target_edge"] = s.simulation.target_edge;
  j["frame_every"] = s.simulation.frame_every;
  j["threshold"] = s.simulation.threshold;
  j["sink_per_height"] = s.simulation.sink_per_height;
  j["steps"] = result.steps;
  j["transport"] = transport_params_to_json(prepared.params);
  j["mesh"] = {{"vertices", prepared.mesh.vertices.size()},
               {"triangles", prepared.mesh.triangles.size()},
               {"hash", hex64(prepared.mesh.content_hash())}};
  j["navigation"] = {{"nodes", prepared.graph.nodes().size()},
                     {"edges", prepared.graph.edges().size()},
                     {"spacing", s.simulation.nav_options().spacing},
                     {"clearance", s.simulation.nav_options().clearance}};
  j["agents"] = s.agents.size();
  j["scenario"] = scenario_to_json(s);
  return j;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw Error("failed writing " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_directory_atomically(const fs::path& out,
                                const std::function<void(const fs::path&)>& fill) {
  const fs::path target = fs::absolute(out);
  const fs::path parent = target.parent_path();
  fs::create_directories(parent);
  const std::string tag = std::to_string(::getpid());
  const fs::path tmp = parent / ("." + target.filename().string() + ".tmp-" + tag);
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  try {
    fill(tmp);
    if (fs::exists(target)) {
      const fs::path old = parent / ("." + target.filename().string() + ".old-" + tag);
      fs::remove_all(old);
      fs::rename(target, old);
      fs::rename(tmp, target);
      fs::remove_all(old);
    } else {
      fs::rename(tmp, target);
    }
  } catch (...) {
    std::error_code ignored;
    fs::remove_all(tmp, ignored);
    throw;
  }
}

void write_run_artifacts(const PreparedScenario& prepared, const SimulationResult& result,
                         const fs::path& out) {
  write_directory_atomically(out, [&](const fs::path& dir) {
    fs::create_directory(dir / "risks");
    std::set<std::string> names;
    for (const ExposureRecord& r : result.records) {
      if (r.infectious) continue;
      const std::string name = safe_file_name(r.agent);
      if (!names.insert(name).second) {
        throw ValidationError("/agents", "agent ids collide as file names: " + name);
      }
      write_text_file(dir / "risks" / (name + ".csv"), risk_csv(r));
    }
    write_text_file(dir / "fields.csv", fields_csv(result.frames));
    write_text_file(dir / "agents.csv", agents_csv(result.frames));
    write_text_file(dir / "mesh.txt", mesh_to_text(prepared.mesh));
    write_text_file(dir / "summary.json", summary_json(prepared, result).dump(2) + "\n");
    write_text_file(dir / "manifest.json", manifest_json(prepared, result).dump(2) + "\n");
  });
}

std::string tar_directory(const fs::path& dir, const std::string& root) {
  std::vector<std::string> files, dirs;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    const std::string rel = fs::relative(e.path(), dir).generic_string();
    if (e.is_directory()) {
      dirs.push_back(rel);
    } else if (e.is_regular_file()) {
      files.push_back(rel);
    }
  }
  std::vector<std::pair<std::string, bool>> entries;
  for (auto& d : dirs) entries.emplace_back(root + "/" + d + "/", false);
  for (auto& f : files) entries.emplace_back(root + "/" + f, true);
  std::sort(entries.begin(), entries.end());
  std::string out;
  tar_entry(out, root + "/", nullptr);
  for (const auto& [path, is_file] : entries) {
    if (!is_file) {
      tar_entry(out, path, nullptr);
      continue;
    }
    const std::string contents =
        read_text_file(dir / fs::path(path.substr(root.size() + 1)));
    tar_entry(out, path, &contents);
  }
  out.append(1024, '\0');
  return out;
}

std::string sweep_csv(const SweepResult& r) {
  std::string out = "mu,d_m,p\n";
  for (std::size_t i = 0; i < r.mu.size(); ++i) {
    for (std::size_t j = 0; j < r.d_m.size(); ++j) {
      append_number(out, r.mu[i]);
      out += ',';
      append_number(out, r.d_m[j]);
      out += ',';
      append_number(out, r.p[i][j]);
      out += '\n';
    }
  }
  return out;
}

std::string compare_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "scenario,intervention,description,mean_final_risk,metric,delta\n";
  for (const ComparisonRow& r : rows) {
    out += csv_field(r.scenario) + ',' + csv_field(r.intervention) + ',' +
           csv_field(r.description) + ',';
    append_number(out, r.mean_final_risk);
    out += ',';
    append_number(out, r.metric);
    out += ',';
    append_number(out, r.delta);
    out += '\n';
  }
  return out;
}

}  // namespace aerosim
