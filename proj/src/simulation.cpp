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

#include "aerosim/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace aerosim {
namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Agent position cache: stationary agents keep their located triangle.
struct Located {
  bool valid = false;
  Point at;
  Location where;
};

}  // namespace

std::shared_ptr<const PreparedScenario> prepare(const Scenario& scenario) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_structure(scenario);
  auto out = std::make_shared<PreparedScenario>(PreparedScenario{
      scenario, FloorPlan::build(scenario.floorplan), {}, {}, {}, {}, 0.0});
  out->mesh = mesh_domain(out->plan, scenario.simulation.target_edge);

  std::vector<Waypoint> waypoints;
  for (const Agent& a : scenario.agents) {
    for (std::size_t k = 0; k < a.schedule.size(); ++k) {
      if (!a.schedule[k].location) continue;
      waypoints.push_back({"agent " + a.id + " event " + std::to_string(k),
                           *a.schedule[k].location});
    }
  }
  out->graph = NavGraph::build(out->plan, waypoints, scenario.simulation.nav_options());
  for (const Agent& a : scenario.agents) {
    out->trajectories.push_back(
        schedule_to_trajectory(a, out->graph, scenario.simulation.transit_activity));
  }
  ParameterSet set = scenario.params;
  set.height = out->plan.height();
  out->params = TransportParams::resolve(set, out->plan.largest_room_volume());
  out->prepare_seconds = seconds_since(t0);
  return out;
}

SimulationResult simulate(const PreparedScenario& prepared, const RunOptions& options,
                          const std::optional<TransportParams>& override_params) {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario& s = prepared.scenario;
  const TransportParams& p = override_params ? *override_params : prepared.params;
  const SimulationSettings& sim = s.simulation;

  SolverConfig config;
  config.dt = sim.dt;
  config.sink_per_height = sim.sink_per_height;
  TransportSolver solver(prepared.mesh, p.diffusion, p.kappa, p.height, config);

  const std::size_t steps =
      static_cast<std::size_t>(std::llround(sim.duration / sim.dt));
  if (std::abs(static_cast<double>(steps) * sim.dt - sim.duration) > 1e-9 * sim.duration) {
    throw ValidationError("/simulation/dt", "must divide the simulated duration");
  }
  const std::size_t stride = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(sim.frame_every / sim.dt)));

  SimulationResult result;
  result.warnings = p.warnings;
  result.steps = steps;
  const std::size_t n_agents = s.agents.size();
  result.records.resize(n_agents);
  for (std::size_t a = 0; a < n_agents; ++a) {
    result.records[a].agent = s.agents[a].id;
    result.records[a].infectious = s.agents[a].infectious;
    result.records[a].threshold = sim.threshold;
  }

  std::vector<Located> cache(n_agents);
  auto locate = [&](std::size_t a, Point at) -> const Location& {
    Located& c = cache[a];
    if (!c.valid || !(c.at == at)) {
      const auto loc = solver.locator().locate(at);
      if (!loc) {
        throw ContractViolation("agent " + s.agents[a].id +
                                " is present outside the mesh");
      }
      c = {true, at, *loc};
    }
    return c.where;
  };

  auto emit_frame = [&](std::size_t n) {
    const double t = static_cast<double>(n) * sim.dt;
    for (auto& r : result.records) r.sample(t, p.median_dose);
    const auto& values = solver.field().values;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    result.min_value = std::min(result.min_value, *lo);
    result.max_value = std::max(result.max_value, *hi);
    if (!options.keep_frames && !options.on_frame) return;
    Frame f;
    f.index = n / stride;
    f.time = t;
    f.values = values;
    f.mass = solver.total_mass();
    f.agents.reserve(n_agents);
    for (std::size_t a = 0; a < n_agents; ++a) {
      AgentSample sample;
      sample.id = s.agents[a].id;
      sample.infectious = s.agents[a].infectious;
      sample.risk = result.records[a].final_risk;
      if (const auto at = prepared.trajectories[a].state_at(t)) {
        sample.present = true;
        sample.position = at->position;
      } else if (const auto last = prepared.trajectories[a].position_at(t)) {
        sample.present = n == steps;
        sample.position = *last;
      }
      f.agents.push_back(std::move(sample));
    }
    if (options.on_frame) options.on_frame(f);
    if (options.keep_frames) result.frames.push_back(std::move(f));
  };

  std::vector<PointLoad> sources, sinks;
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * sim.dt;
    if (n % stride == 0) {
      emit_frame(n);
      if (options.on_progress &&
          !options.on_progress(static_cast<double>(n) / static_cast<double>(steps))) {
        throw Cancelled();
      }
    }
    sources.clear();
    sinks.clear();
    for (std::size_t a = 0; a < n_agents; ++a) {
      const auto state = prepared.trajectories[a].state_at(t);
      if (!state) continue;
      const Agent& agent = s.agents[a];
      const Location& where = locate(a, state->position);
      if (agent.infectious) {
        sources.push_back({where, effective_source_strength(agent, state->activity, p)});
      } else {
        ExposureRecord& r = result.records[a];
        r.final_dose = accumulate_dose(r.final_dose, agent.mask.pass_fraction(),
                                       activity_profile(state->activity).breathing_rate,
                                       interpolate(prepared.mesh, solver.field().values, where),
                                       sim.dt);
      }
      sinks.push_back({where, breathing_sink_strength(agent, state->activity)});
    }
    solver.step(sources, sinks);
  }
  emit_frame(steps);
  for (auto& r : result.records) r.infected = classify(r, sim.threshold);
  if (options.on_progress) options.on_progress(1.0);
  if (result.min_value < -1e-6 * result.max_value) {
    result.warnings.push_back("field undershoot: min nodal value " +
                              std::to_string(result.min_value));
  }
  result.runtime_seconds = seconds_since(t0);
  return result;
}

SimulationResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  const auto prepared = prepare(scenario);
  SimulationResult r = simulate(*prepared, options);
  r.runtime_seconds += prepared->prepare_seconds;
  return r;
}

std::vector<double> susceptible_final_risks(const SimulationResult& result) {
  std::vector<double> out;
  for (const auto& r : result.records) {
    if (!r.infectious) out.push_back(r.final_risk);
  }
  return out;
}

}  // namespace aerosim
