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

#ifndef AEROSIM_SCENARIO_HPP_
#define AEROSIM_SCENARIO_HPP_

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aerosim/agents.hpp"
#include "aerosim/exposure.hpp"
#include "aerosim/geometry.hpp"
#include "aerosim/mesh.hpp"
#include "aerosim/navigation.hpp"
#include "aerosim/params.hpp"

namespace aerosim {

inline constexpr int kScenarioVersion = 1;

enum class ScenarioKind { custom, courtroom, care_home, supermarket };
std::string_view to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(std::string_view name);

struct SimulationSettings {
  double clock_origin = 0.0;  // wall-clock seconds after midnight at t = 0
  double duration = 3600.0;   // s
  double dt = 1.0;
  std::uint64_t seed = 1;
  double target_edge = kDefaultTargetEdge;
  double frame_every = 60.0;
  double threshold = kDefaultThreshold;
  bool sink_per_height = true;
  Activity transit_activity = Activity::walking;
  // Navigation grid spacing; unset means twice the mesh target edge.
  std::optional<double> nav_spacing;
  double nav_clearance = 0.2;
  double nav_key_link_radius = std::numeric_limits<double>::infinity();

  NavOptions nav_options() const;

  friend bool operator==(const SimulationSettings&, const SimulationSettings&) = default;
};

struct SupermarketConfig {
  double arrival_rate = 1.0;     // customers per minute
  double arrivals_end = 14400.0;  // s after the start; last arrival before it
  bool poisson_arrivals = false;
  int items = 6;
  double dwell_min = 40.0;
  double dwell_max = 80.0;
  double checkout_min = 40.0;
  double checkout_max = 80.0;
  double infectious_fraction = 1.0 / 6.0;
  // Every round(1 / fraction)-th arrival is infectious unless randomised.
  bool random_infectious = false;
  Point entrance;
  double entry_duration = 1.0;
  std::vector<Point> checkouts;
  std::vector<int> open_checkouts;
  Point queue;
  std::vector<std::string> shelves;  // obstacle names items are placed around
  double shelf_standoff = 0.25;
  Activity browse_activity = Activity::talking;
  Activity checkout_activity = Activity::talking;
  Activity queue_activity = Activity::talking;
  MaskProfile mask;
  double speed = kDefaultWalkingSpeed;

  void validate() const;

  friend bool operator==(const SupermarketConfig&, const SupermarketConfig&) = default;
};

struct Scenario {
  std::string name;
  std::string description;
  ScenarioKind kind = ScenarioKind::custom;
  FloorPlanSpec floorplan;
  ParameterSet params;
  SimulationSettings simulation;
  // Named seat lists used by builders and regrouping.
  std::map<std::string, std::vector<Point>> places;
  std::vector<Agent> agents;
  // For supermarkets the agents are generated from this and the seed.
  std::optional<SupermarketConfig> supermarket;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Cheap structural checks: geometry, agent attributes, events inside the
// simulated span and on walkable ground. Feasibility of walking between
// events is checked when trajectories are built.
void validate_structure(const Scenario& scenario);

Scenario build_courtroom();
Scenario build_care_home();
// Base supermarket (floor plan and configuration) with generated agents.
Scenario build_supermarket();

// Replaces the agents of `base` by a schedule drawn from its supermarket
// configuration and `seed`. The span is extended to cover the last exit.
Scenario generate_supermarket(const Scenario& base, std::uint64_t seed);

std::vector<std::string> preset_names();
Scenario build_preset(std::string_view name);  // throws NotFoundError

struct EventSelector {
  std::vector<std::string> places;  // empty: any place
  std::vector<std::string> agents;  // empty: any agent
  std::optional<double> start_from;  // event start >= start_from
  std::optional<double> start_to;    // event start <= start_to

  bool matches(const Agent& agent, const Event& event) const;
};

enum class InterventionKind {
  set_ventilation,
  set_masks,
  remove_events,
  scale_event_durations,
  shift_events,
  regroup_agents,
  set_arrival_rate,
  set_open_checkouts,
};
std::string_view to_string(InterventionKind kind);
InterventionKind parse_intervention_kind(std::string_view name);
const std::vector<InterventionKind>& all_intervention_kinds();

struct Intervention {
  InterventionKind kind = InterventionKind::set_ventilation;
  std::string label;
  double ach = 0.0;
  MaskProfile mask;
  EventSelector select;
  double factor = 1.0;  // duration scale, start kept
  double shift = 0.0;   // s
  std::vector<std::vector<std::string>> groups;
  std::vector<std::string> group_places;  // one per group
  double arrival_rate = 1.0;
  std::vector<int> open_checkouts;

  static Intervention ventilation(double ach);
  static Intervention masks(MaskProfile mask);
  static Intervention remove(EventSelector select);
  static Intervention scale_durations(EventSelector select, double factor);
  static Intervention shift_events(EventSelector select, double seconds);
  static Intervention regroup(std::vector<std::vector<std::string>> groups,
                              std::vector<std::string> places);
  static Intervention arrivals(double per_minute);
  static Intervention checkouts(std::vector<int> open);
};

// Returns an edited copy; throws ValidationError if the intervention does not
// apply to the scenario kind or leaves it invalid.
Scenario apply_intervention(const Scenario& scenario, const Intervention& i);

struct NamedIntervention {
  std::string name;  // "I", "II", ...
  std::string description;
  Intervention intervention;
};

// The numbered interventions compared for each built-in scenario kind.
std::vector<NamedIntervention> npi_catalog(const Scenario& scenario);
// Throws ValidationError listing valid names if `name` is unknown.
NamedIntervention find_npi(const Scenario& scenario, std::string_view name);

// Wall-clock helpers: "14:05" <-> seconds after midnight.
double parse_clock(std::string_view text);
std::string format_clock(double seconds_after_midnight);

}  // namespace aerosim

#endif  // AEROSIM_SCENARIO_HPP_
