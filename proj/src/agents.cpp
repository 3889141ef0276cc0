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

#include "aerosim/agents.hpp"

#include <cmath>

#include "aerosim/error.hpp"

namespace aerosim {

void Agent::validate() const {
  const std::string where = "agent " + id;
  if (id.empty()) throw ValidationError("id", "agent id must not be empty");
  if (superspreader && !infectious) {
    throw ValidationError(where, "a superspreader must be infectious");
  }
  if (!(speed > 0.0) || !std::isfinite(speed)) {
    throw ValidationError(where, "walking speed must be positive");
  }
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const Event& e = schedule[i];
    if (!std::isfinite(e.start) || !std::isfinite(e.end) || !(e.start < e.end)) {
      throw ValidationError(where + " event " + std::to_string(i),
                            "start must precede end");
    }
    if (i > 0 && e.start < schedule[i - 1].end) {
      throw ValidationError(where + " event " + std::to_string(i),
                            "events overlap or are out of order");
    }
  }
}

double viral_load_of(const Agent& agent, const TransportParams& params) {
  return agent.superspreader ? params.mu_superspreader : params.mu_normal;
}

double emission_rate(const Agent& agent, Activity activity,
                     const TransportParams& params) {
  if (!agent.infectious) {
    throw ContractViolation("emission_rate called on susceptible agent " +
                            agent.id);
  }
  return viral_load_of(agent, params) * activity_profile(activity).emission_rate;
}

double effective_source_strength(const Agent& agent, Activity activity,
                                 const TransportParams& params) {
  return agent.mask.pass_fraction() * emission_rate(agent, activity, params) /
         params.height;
}

double breathing_sink_strength(const Agent& agent, Activity activity) {
  return agent.mask.pass_fraction() * activity_profile(activity).breathing_rate;
}

std::vector<Event> fill_from_home(const Home& home,
                                  const std::vector<Event>& visits, double t0,
                                  double t1) {
  std::vector<Event> out;
  double cursor = t0;
  auto filler = [&](double a, double b) {
    if (b > a) {
      out.push_back({home.location, a, b, home.activity, home.place, "home"});
    }
  };
  for (const Event& v : visits) {
    if (v.place == home.place) continue;
    filler(cursor, v.start);
    out.push_back(v);
    cursor = std::max(cursor, v.end);
  }
  filler(cursor, t1);
  return out;
}

std::vector<Event> visits_of(const Agent& agent) {
  std::vector<Event> out;
  for (const Event& e : agent.schedule) {
    if (!agent.home || e.place != agent.home->place) out.push_back(e);
  }
  return out;
}

}  // namespace aerosim
