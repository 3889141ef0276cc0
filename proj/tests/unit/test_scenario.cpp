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

#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"

#include "aerosim/error.hpp"
#include "aerosim/scenario.hpp"
#include "aerosim/simulation.hpp"

using namespace aerosim;

namespace {

const Agent& agent(const Scenario& s, const std::string& id) {
  const auto it = std::find_if(s.agents.begin(), s.agents.end(),
                               [&](const Agent& a) { return a.id == id; });
  REQUIRE(it != s.agents.end());
  return *it;
}

// The event of `a` covering wall-clock time `clock`, if any.
const Event* event_at(const Scenario& s, const Agent& a, double clock) {
  const double t = clock - s.simulation.clock_origin;
  for (const Event& e : a.schedule) {
    if (e.start <= t && t < e.end) return &e;
  }
  return nullptr;
}

std::set<std::string> occupants(const Scenario& s, const std::string& place, double clock) {
  std::set<std::string> ids;
  for (const Agent& a : s.agents) {
    const Event* e = event_at(s, a, clock);
    if (e && e->present() && e->place == place) ids.insert(a.id);
  }
  return ids;
}

double present_time(const Agent& a) {
  double total = 0.0;
  for (const Event& e : a.schedule) total += e.present() ? e.duration() : 0.0;
  return total;
}

}  // namespace

TEST_CASE("clock helpers") {
  CHECK(parse_clock("14:05") == 14 * 3600.0 + 5 * 60.0);
  CHECK(parse_clock("08:00:30") == 8 * 3600.0 + 30.0);
  CHECK(format_clock(17 * 3600.0) == "17:00");
  CHECK_THROWS_AS(parse_clock("12:75"), ValidationError);
  CHECK_THROWS_AS(parse_clock("noon"), ValidationError);
}

TEST_CASE("courtroom preset") {
  const Scenario s = build_courtroom();
  CHECK(s.kind == ScenarioKind::courtroom);
  CHECK(s.agents.size() == 10);
  CHECK(s.simulation.clock_origin == parse_clock("14:00"));
  CHECK(s.simulation.duration == 3.0 * 3600.0);
  const Agent& p1 = agent(s, "P1");
  CHECK(p1.infectious);
  CHECK(p1.superspreader);
  for (const Agent& a : s.agents) {
    if (a.id != "P1") CHECK_FALSE(a.infectious);
  }
  CHECK(present_time(agent(s, "P10")) == 34.0 * 60.0);
  CHECK(event_at(s, agent(s, "P10"), parse_clock("15:20"))->present());
  CHECK(event_at(s, agent(s, "P2"), parse_clock("14:10"))->activity == Activity::talking_loudly);
  // During breaks only P1-P4 stay in the room.
  for (const char* clock : {"14:02", "14:25", "15:00", "15:47"}) {
    CAPTURE(clock);
    const std::set<std::string> expected{"P1", "P2", "P3", "P4"};
    std::set<std::string> present;
    for (const Agent& a : s.agents) {
      const Event* e = event_at(s, a, parse_clock(clock));
      if (e && e->present()) present.insert(a.id);
    }
    CHECK(present == expected);
  }
  // Interpersonal distances from the infectious judge.
  const Point j = *p1.schedule.front().location;
  CHECK(distance(j, *agent(s, "P2").schedule.front().location) == doctest::Approx(1.5));
  CHECK(distance(j, *agent(s, "P4").schedule.front().location) == doctest::Approx(1.5));
  const Scenario a = build_courtroom();
  CHECK(a == s);
  const auto prepared = prepare(s);
  CHECK(prepared->params.lambda == doctest::Approx(6.4e-5).epsilon(0.01));
  CHECK(prepared->params.diffusion == doctest::Approx(1.4e-3).epsilon(0.05));
  CHECK(prepared->params.mu_superspreader == doctest::Approx(0.325).epsilon(0.02));
}

TEST_CASE("care home preset") {
  const Scenario s = build_care_home();
  CHECK(s.kind == ScenarioKind::care_home);
  CHECK(s.agents.size() == 6);
  CHECK(s.simulation.clock_origin == parse_clock("08:00"));
  CHECK(s.simulation.duration == 15.0 * 3600.0);
  CHECK(agent(s, "P1").superspreader);
  CHECK(occupants(s, "CR1", parse_clock("10:00")) == std::set<std::string>{"P1", "P3", "P5"});
  CHECK(occupants(s, "CR2", parse_clock("10:00")) == std::set<std::string>{"P2", "P4", "P6"});
  CHECK(occupants(s, "CR2", parse_clock("18:00")) == std::set<std::string>{"P1", "P2", "P3"});
  CHECK(occupants(s, "CR1", parse_clock("15:00")) == std::set<std::string>{"P1", "P2", "P3"});
  for (const Agent& a : s.agents) {
    const Event* e = event_at(s, a, parse_clock("08:30"));
    REQUIRE(e != nullptr);
    CHECK(e->place.rfind("BR", 0) == 0);
    CHECK(e->activity == Activity::resting);
    const Event* g = event_at(s, a, parse_clock("10:00"));
    CHECK(g->activity == Activity::talking);
  }
  // P5 and P6 share the double bedroom.
  CHECK(event_at(s, agent(s, "P5"), parse_clock("08:30"))->place ==
        event_at(s, agent(s, "P6"), parse_clock("08:30"))->place);
  const auto prepared = prepare(s);
  CHECK(prepared->params.lambda == doctest::Approx(3.3e-5).epsilon(0.02));
  CHECK(prepared->params.diffusion == doctest::Approx(4.6e-4).epsilon(0.05));
}

TEST_CASE("supermarket generation") {
  const Scenario s = build_supermarket();
  const SupermarketConfig& cfg = *s.supermarket;
  CHECK(s.agents.size() == 240);
  std::size_t infectious = 0;
  for (const Agent& a : s.agents) {
    infectious += a.infectious;
    CHECK_FALSE(a.superspreader);
  }
  CHECK(infectious == 40);
  CHECK(generate_supermarket(s, 1) == s);
  CHECK(generate_supermarket(s, 2).agents != s.agents);

  const FloorPlan plan = FloorPlan::build(s.floorplan);
  double visit_sum = 0.0;
  std::size_t visits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scenario g = generate_supermarket(s, seed);
    CHECK(g.agents.size() == 240);
    // Each checkout serves one customer at a time.
    std::vector<std::vector<std::pair<double, double>>> busy(cfg.checkouts.size());
    for (const Agent& a : g.agents) {
      visit_sum += a.schedule.back().end - a.schedule.front().start;
      ++visits;
      std::size_t items = 0;
      for (const Event& e : a.schedule) {
        if (e.place == "shelf") {
          ++items;
          CHECK(e.duration() >= cfg.dwell_min);
          CHECK(e.duration() <= cfg.dwell_max);
          double to_shelf = 1e9;
          for (const auto& name : cfg.shelves) {
            for (const Obstacle& o : plan.obstacles()) {
              if (o.name == name) to_shelf = std::min(to_shelf, o.bounds.distance_to(*e.location));
            }
          }
          CHECK(to_shelf == doctest::Approx(cfg.shelf_standoff).epsilon(1e-9));
        }
        if (e.place == "checkout") {
          const auto it = std::find(cfg.checkouts.begin(), cfg.checkouts.end(), *e.location);
          REQUIRE(it != cfg.checkouts.end());
          const auto c = static_cast<std::size_t>(it - cfg.checkouts.begin());
          CHECK(std::find(cfg.open_checkouts.begin(), cfg.open_checkouts.end(),
                          static_cast<int>(c)) != cfg.open_checkouts.end());
          busy[c].push_back({e.start, e.end});
        }
      }
      CHECK(items == static_cast<std::size_t>(cfg.items));
    }
    for (auto& spans : busy) {
      std::sort(spans.begin(), spans.end());
      for (std::size_t k = 1; k < spans.size(); ++k) CHECK(spans[k].first >= spans[k - 1].second - 1e-9);
    }
  }
  const double mean_minutes = visit_sum / static_cast<double>(visits) / 60.0;
  CHECK(mean_minutes == doctest::Approx(7.5).epsilon(1.0 / 7.5));

  SupermarketConfig bad = cfg;
  bad.open_checkouts.clear();
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = cfg;
  bad.dwell_min = 90.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = cfg;
  bad.infectious_fraction = 1.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("every preset passes full preparation") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const Scenario s = build_preset(name);
    CHECK_NOTHROW(validate_structure(s));
    std::shared_ptr<const PreparedScenario> p;
    CHECK_NOTHROW(p = prepare(s));
    REQUIRE(p);
    CHECK(p->trajectories.size() == s.agents.size());
  }
  CHECK_THROWS_AS(build_preset("office"), NotFoundError);
}

TEST_CASE("interventions") {
  const Scenario care = build_care_home();
  SUBCASE("ventilation recomputes the decay and diffusion") {
    const Scenario v = apply_intervention(care, Intervention::ventilation(3.0));
    const auto p = prepare(v);
    CHECK(p->params.lambda == doctest::Approx(8.3e-4).epsilon(0.01));
    const auto base = prepare(care);
    CHECK(p->params.diffusion / base->params.diffusion ==
          doctest::Approx(p->params.lambda / base->params.lambda).epsilon(1e-12));
    CHECK(care == build_care_home());  // original unchanged
  }
  SUBCASE("surgical masks for everyone") {
    const Scenario m = apply_intervention(care, Intervention::masks(MaskProfile::of(MaskKind::surgical)));
    for (const Agent& a : m.agents) CHECK(a.mask.efficiency == 0.6);
  }
  SUBCASE("edits on disjoint fields commute") {
    const auto v = Intervention::ventilation(3.0);
    const auto m = Intervention::masks(MaskProfile::of(MaskKind::n95));
    CHECK(apply_intervention(apply_intervention(care, v), m) ==
          apply_intervention(apply_intervention(care, m), v));
  }
  SUBCASE("catalogue edits") {
    const auto none = apply_intervention(care, find_npi(care, "III").intervention);
    CHECK(occupants(none, "CR1", parse_clock("10:00")).empty());
    CHECK(occupants(none, "CR2", parse_clock("18:00")).empty());
    const auto half = apply_intervention(care, find_npi(care, "IV").intervention);
    CHECK(occupants(half, "CR1", parse_clock("10:00")).size() == 3);
    CHECK(occupants(half, "CR1", parse_clock("11:00")).empty());
    const auto late = apply_intervention(care, find_npi(care, "V").intervention);
    CHECK(occupants(late, "CR2", parse_clock("18:00")).empty());
    CHECK(occupants(late, "CR2", parse_clock("20:30")) == std::set<std::string>{"P1", "P2", "P3"});
    const auto groups = apply_intervention(care, find_npi(care, "VI").intervention);
    for (const char* clock : {"10:00", "15:00", "18:00"}) {
      CHECK(occupants(groups, "CR1", parse_clock(clock)) == std::set<std::string>{"P1", "P2", "P3"});
      CHECK(occupants(groups, "CR2", parse_clock(clock)) == std::set<std::string>{"P4", "P5", "P6"});
    }
    CHECK_NOTHROW(prepare(groups));
    CHECK_NOTHROW(prepare(late));
  }
  SUBCASE("inapplicable interventions") {
    CHECK_THROWS_AS(apply_intervention(care, Intervention::checkouts({0, 1})), ValidationError);
    CHECK_THROWS_AS(apply_intervention(care, Intervention::arrivals(0.5)), ValidationError);
    CHECK_THROWS_AS(apply_intervention(build_courtroom(), Intervention::checkouts({0})), ValidationError);
    try {
      find_npi(care, "IX");
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("I, II, III, IV, V, VI") != std::string::npos);
    }
    CHECK(npi_catalog(build_courtroom()).size() == 2);
  }
  SUBCASE("supermarket edits regenerate the customers") {
    const Scenario s = build_supermarket();
    const auto fewer = apply_intervention(s, Intervention::arrivals(0.5));
    CHECK(fewer.agents.size() == 120);
    const auto open = apply_intervention(s, find_npi(s, "V").intervention);
    CHECK(open.supermarket->open_checkouts.size() == 4);
    CHECK(open.simulation.duration >= s.simulation.duration - 1e-9);
    const auto quick = apply_intervention(s, find_npi(s, "IV").intervention);
    CHECK(quick.supermarket->dwell_max == doctest::Approx(40.0));
  }
}

TEST_CASE("no common-room time means no risk") {
  const Scenario care = build_care_home();
  Scenario s = apply_intervention(care, find_npi(care, "III").intervention);
  s.simulation.dt = 5.0;
  s.simulation.target_edge = 0.4;
  const SimulationResult r = run_scenario(s, {.keep_frames = false});
  for (const auto& rec : r.records) {
    if (!rec.infectious) CHECK(rec.final_risk == 0.0);
  }
}

TEST_CASE("structural validation") {
  Scenario s = build_courtroom();
  s.agents[3].schedule[2].location = Point{-1.0, 2.0};
  CHECK_THROWS_AS(validate_structure(s), ValidationError);
  s = build_courtroom();
  s.agents[0].schedule.back().end += 600.0;  // past the end of the hearing
  CHECK_THROWS_AS(validate_structure(s), ValidationError);
  s = build_courtroom();
  s.agents[1].superspreader = true;  // requires infectious
  CHECK_THROWS_AS(validate_structure(s), ValidationError);
  s = build_courtroom();
  s.simulation.dt = 7.0;  // does not divide 3 h
  CHECK_THROWS_AS(validate_structure(s), ValidationError);
}
