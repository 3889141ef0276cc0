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

#ifndef AEROSIM_SIMULATION_HPP_
#define AEROSIM_SIMULATION_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aerosim/error.hpp"
#include "aerosim/exposure.hpp"
#include "aerosim/mesh.hpp"
#include "aerosim/navigation.hpp"
#include "aerosim/params.hpp"
#include "aerosim/scenario.hpp"
#include "aerosim/transport.hpp"

namespace aerosim {

// Everything a run needs that does not depend on the viral load or the
// median dose. Immutable; shared by sweep points.
struct PreparedScenario {
  Scenario scenario;
  FloorPlan plan;
  Mesh mesh;
  NavGraph graph;
  std::vector<Trajectory> trajectories;  // parallel to scenario.agents
  TransportParams params;
  double prepare_seconds = 0.0;
};

// Validates, meshes, builds the navigation graph and all trajectories.
// Throws ValidationError, MeshingError, NoPathError or
// InfeasibleScheduleError.
std::shared_ptr<const PreparedScenario> prepare(const Scenario& scenario);

struct AgentSample {
  std::string id;
  Point position;
  bool present = false;
  bool infectious = false;
  double risk = 0.0;
};

struct Frame {
  std::size_t index = 0;
  double time = 0.0;  // s from the simulation start
  std::vector<double> values;
  double mass = 0.0;
  std::vector<AgentSample> agents;
};

// Raised through simulate() when the progress callback asks to stop.
class Cancelled : public Error {
 public:
  Cancelled() : Error("simulation cancelled") {}
};

struct RunOptions {
  bool keep_frames = true;
  // Called with the fraction done after every frame; return false to cancel.
  std::function<bool(double)> on_progress;
  // Called for every frame as soon as it exists.
  std::function<void(const Frame&)> on_frame;
};

struct SimulationResult {
  std::vector<ExposureRecord> records;  // parallel to scenario.agents
  std::vector<Frame> frames;
  std::vector<std::string> warnings;
  double min_value = 0.0;  // most negative nodal value seen
  double max_value = 0.0;
  std::size_t steps = 0;
  double runtime_seconds = 0.0;
};

// Runs the backward-Euler loop. At every step t_n the dose of each present
// susceptible grows by (1 - eta) rho C(x(t_n), t_n) dt, then the field is
// advanced with sources and lagged sinks of the agents present at t_n.
// `params` overrides the prepared parameter bundle (sweeps vary mu and d_m).
SimulationResult simulate(const PreparedScenario& prepared,
                          const RunOptions& options = {},
                          const std::optional<TransportParams>& params = {});

// prepare() then simulate().
SimulationResult run_scenario(const Scenario& scenario,
                              const RunOptions& options = {});

// Final risks of the susceptible agents.
std::vector<double> susceptible_final_risks(const SimulationResult& result);

}  // namespace aerosim

#endif  // AEROSIM_SIMULATION_HPP_
