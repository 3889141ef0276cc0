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

#ifndef AEROSIM_AGENTS_HPP_
#define AEROSIM_AGENTS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "aerosim/geometry.hpp"
#include "aerosim/params.hpp"

namespace aerosim {

// Times are seconds from the simulation start. An event without a location
// means the agent is off-site: no source, no sink, no dose.
struct Event {
  std::optional<Point> location;
  double start = 0.0;
  double end = 0.0;
  Activity activity = Activity::resting;
  // Free-form tag ("CR1", "bedroom", "checkout"); interventions select on it.
  std::string place;
  std::string label;

  bool present() const { return location.has_value(); }
  double duration() const { return end - start; }

  friend bool operator==(const Event&, const Event&) = default;
};

// Where an agent spends time not covered by other events. Interventions that
// remove or move events refill the gaps from here.
struct Home {
  Point location;
  Activity activity = Activity::resting;
  std::string place;

  friend bool operator==(const Home&, const Home&) = default;
};

struct Agent {
  std::string id;
  bool infectious = false;
  bool superspreader = false;
  MaskProfile mask;
  double speed = kDefaultWalkingSpeed;
  std::vector<Event> schedule;
  std::optional<Home> home;

  // Throws ValidationError for superspreader without infectious, v <= 0,
  // empty or inverted events, or overlapping / unsorted schedules.
  void validate() const;

  friend bool operator==(const Agent&, const Agent&) = default;
};

// Viral copies per aerosol for this agent under `params`.
double viral_load_of(const Agent& agent, const TransportParams& params);

// R = mu * R_t (aerosols/s carrying virus), before the mask.
double emission_rate(const Agent& agent, Activity activity,
                     const TransportParams& params);

// (1 - eta) R / h: coefficient of the 2D point source.
double effective_source_strength(const Agent& agent, Activity activity,
                                 const TransportParams& params);

// (1 - eta) rho in m^3/s.
double breathing_sink_strength(const Agent& agent, Activity activity);

// `visits` plus home events filling every gap in [t0, t1]. Visits must be
// sorted and non-overlapping; visits tagged with the home place are treated
// as old filler and dropped.
std::vector<Event> fill_from_home(const Home& home,
                                  const std::vector<Event>& visits, double t0,
                                  double t1);

// Events of `agent` that are not home filler.
std::vector<Event> visits_of(const Agent& agent);

}  // namespace aerosim

#endif  // AEROSIM_AGENTS_HPP_
