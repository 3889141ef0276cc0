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

#ifndef AEROSIM_ARTIFACTS_HPP_
#define AEROSIM_ARTIFACTS_HPP_

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "aerosim/analysis.hpp"
#include "aerosim/scenario_io.hpp"
#include "aerosim/simulation.hpp"

// Run output layout (all UTF-8, CSV with a header row):
//   risks/<agent>.csv   time_s,dose,risk       one file per susceptible agent
//   fields.csv          frame,time_s,mass,n0,n1,...   nodal values per frame
//   agents.csv          frame,time_s,id,x,y,present,infectious,risk
//   mesh.txt            mesh_to_text()
//   summary.json        final risks, infected list, runtime
//   manifest.json       resolved scenario, transport parameters, seed, mesh
// Numbers are printed with %.9e (times with %.6f), so equal inputs give
// byte-identical files.
namespace aerosim {

inline constexpr const char* kToolVersion = "1.0.0";

std::string risk_csv(const ExposureRecord& record);
std::string fields_csv(const std::vector<Frame>& frames);
std::string agents_csv(const std::vector<Frame>& frames);
Json summary_json(const PreparedScenario& prepared, const SimulationResult& result);
Json manifest_json(const PreparedScenario& prepared, const SimulationResult& result);

// Writes the layout above into `out`. Everything goes to a sibling
// temporary directory first and is renamed into place, so a failed run
// leaves no partial output; an existing `out` is replaced.
void write_run_artifacts(const PreparedScenario& prepared, const SimulationResult& result,
                         const std::filesystem::path& out);

// Replaces `out` with a directory filled by `fill`, atomically as above.
void write_directory_atomically(const std::filesystem::path& out,
                                const std::function<void(const std::filesystem::path&)>& fill);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

// POSIX ustar archive of every regular file under `dir`, in sorted path
// order with zero timestamps and ownership, so the bytes depend only on
// the contents. Paths are stored relative to `dir` under `root/`.
std::string tar_directory(const std::filesystem::path& dir, const std::string& root);

// sweep.csv: mu,d_m,p in grid order.
std::string sweep_csv(const SweepResult& result);
// compare.csv: scenario,intervention,description,mean_final_risk,metric,delta.
std::string compare_csv(const std::vector<ComparisonRow>& rows);

}  // namespace aerosim

#endif  // AEROSIM_ARTIFACTS_HPP_
