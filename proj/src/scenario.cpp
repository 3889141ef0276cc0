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

#include "aerosim/scenario.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "aerosim/error.hpp"

namespace aerosim {
namespace {

constexpr double kHour = 3600.0;
constexpr double kMinute = 60.0;

constexpr std::array<std::string_view, 4> kKindNames = {"custom", "courtroom",
                                                        "care_home", "supermarket"};

constexpr std::array<std::string_view, 8> kInterventionNames = {
    "set_ventilation",       "set_masks",    "remove_events",
    "scale_event_durations", "shift_events", "regroup_agents",
    "set_arrival_rate",      "set_open_checkouts"};

bool contains(const std::vector<std::string>& list, const std::string& s) {
  return std::find(list.begin(), list.end(), s) != list.end();
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  return kKindNames.at(static_cast<std::size_t>(kind));
}

ScenarioKind parse_scenario_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<ScenarioKind>(i);
  }
  throw ValidationError("kind", "unknown scenario kind '" + std::string(name) + "'");
}

std::string_view to_string(InterventionKind kind) {
  return kInterventionNames.at(static_cast<std::size_t>(kind));
}

InterventionKind parse_intervention_kind(std::string_view name) {
  for (std::size_t i = 0; i < kInterventionNames.size(); ++i) {
    if (kInterventionNames[i] == name) return static_cast<InterventionKind>(i);
  }
  std::string valid;
  for (auto n : kInterventionNames) valid += (valid.empty() ? "" : ", ") + std::string(n);
  throw ValidationError("kind", "unknown intervention kind '" + std::string(name) +
                                    "'; valid kinds: " + valid);
}

const std::vector<InterventionKind>& all_intervention_kinds() {
  static const std::vector<InterventionKind> all = {
      InterventionKind::set_ventilation,       InterventionKind::set_masks,
      InterventionKind::remove_events,         InterventionKind::scale_event_durations,
      InterventionKind::shift_events,          InterventionKind::regroup_agents,
      InterventionKind::set_arrival_rate,      InterventionKind::set_open_checkouts};
  return all;
}

double parse_clock(std::string_view text) {
  int h = 0, m = 0;
  double s = 0.0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  auto number = [&](int& out) {
    auto r = std::from_chars(p, end, out);
    if (r.ec != std::errc() || r.ptr == p) return false;
    p = r.ptr;
    return true;
  };
  bool ok = number(h) && p < end && *p == ':' && (++p, number(m));
  if (ok && p < end) {
    ok = *p == ':';
    ++p;
    if (ok) {
      auto r = std::from_chars(p, end, s);
      ok = r.ec == std::errc() && r.ptr == end && r.ptr != p;
      p = end;
    }
  }
  if (!ok || p != end || h < 0 || m < 0 || m >= 60 || s < 0.0 || s >= 60.0) {
    throw ValidationError("time", "expected HH:MM or HH:MM:SS, got '" +
                                      std::string(text) + "'");
  }
  return h * kHour + m * kMinute + s;
}

std::string format_clock(double t) {
  const long long whole = static_cast<long long>(std::floor(t + 1e-9));
  const double frac = t - static_cast<double>(whole);
  const long long h = whole / 3600, m = (whole / 60) % 60, s = whole % 60;
  char buf[64];
  if (std::abs(frac) < 1e-9) {
    if (s == 0) {
      std::snprintf(buf, sizeof buf, "%02lld:%02lld", h, m);
    } else {
      std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", h, m, s);
    }
    return buf;
  }
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%09.6f", h, m, s + frac);
  std::string out = buf;
  while (out.back() == '0') out.pop_back();
  return out;
}

NavOptions SimulationSettings::nav_options() const {
  NavOptions o;
  o.spacing = nav_spacing.value_or(2.0 * target_edge);
  o.clearance = nav_clearance;
  o.link_radius = 2.5 * o.spacing;
  o.key_link_radius = nav_key_link_radius;
  return o;
}

void SupermarketConfig::validate() const {
  if (!(arrival_rate > 0.0)) {
    throw ValidationError("/supermarket/arrival_rate", "must be positive");
  }
  if (!(arrivals_end > 0.0)) {
    throw ValidationError("/supermarket/arrivals_end", "must be positive");
  }
  if (items < 0) throw ValidationError("/supermarket/items", "must be >= 0");
  if (!(dwell_min > 0.0 && dwell_min <= dwell_max)) {
    throw ValidationError("/supermarket/dwell", "need 0 < min <= max");
  }
  if (!(checkout_min > 0.0 && checkout_min <= checkout_max)) {
    throw ValidationError("/supermarket/checkout_time", "need 0 < min <= max");
  }
  if (!(infectious_fraction >= 0.0 && infectious_fraction <= 1.0)) {
    throw ValidationError("/supermarket/infectious_fraction", "must lie in [0, 1]");
  }
  if (open_checkouts.empty()) {
    throw ValidationError("/supermarket/open_checkouts",
                          "at least one checkout must be open");
  }
  std::set<int> seen;
  for (int c : open_checkouts) {
    if (c < 0 || c >= static_cast<int>(checkouts.size()) || !seen.insert(c).second) {
      throw ValidationError("/supermarket/open_checkouts",
                            "invalid or repeated checkout index " + std::to_string(c));
    }
  }
  if (items > 0 && shelves.empty()) {
    throw ValidationError("/supermarket/shelves", "items need at least one shelf");
  }
  if (!(speed > 0.0)) throw ValidationError("/supermarket/speed", "must be positive");
  if (!(entry_duration > 0.0)) {
    throw ValidationError("/supermarket/entry_duration", "must be positive");
  }
}

void validate_structure(const Scenario& s) {
  const FloorPlan plan = FloorPlan::build(s.floorplan);
  const auto& sim = s.simulation;
  if (!(sim.duration > 0.0)) {
    throw ValidationError("/simulation/end", "simulation must end after it starts");
  }
  if (!(sim.dt > 0.0)) throw ValidationError("/simulation/dt", "must be positive");
  const double steps = std::round(sim.duration / sim.dt);
  if (steps < 1.0 || std::abs(steps * sim.dt - sim.duration) > 1e-9 * sim.duration) {
    throw ValidationError("/simulation/dt", "must divide the simulated duration");
  }
  if (!(sim.target_edge > 0.0)) {
    throw ValidationError("/simulation/target_edge", "must be positive");
  }
  if (!(sim.frame_every > 0.0)) {
    throw ValidationError("/simulation/frame_every", "must be positive");
  }
  if (!(sim.threshold >= 0.0 && sim.threshold <= 1.0)) {
    throw ValidationError("/simulation/threshold", "must lie in [0, 1]");
  }
  if (!(s.params.median_dose > 0.0)) {
    throw ValidationError("/params/median_dose", "must be positive");
  }
  if (s.supermarket) s.supermarket->validate();
  std::set<std::string> ids;
  for (std::size_t a = 0; a < s.agents.size(); ++a) {
    const Agent& agent = s.agents[a];
    const std::string base = "/agents/" + std::to_string(a);
    try {
      agent.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(base, e.what());
    }
    if (!ids.insert(agent.id).second) {
      throw ValidationError(base + "/id", "duplicate agent id '" + agent.id + "'");
    }
    for (std::size_t k = 0; k < agent.schedule.size(); ++k) {
      const Event& e = agent.schedule[k];
      const std::string field = base + "/schedule/" + std::to_string(k);
      if (e.start < -1e-9 || e.end > sim.duration + 1e-9) {
        throw ValidationError(field, "event of agent " + agent.id +
                                         " lies outside the simulated span");
      }
      if (e.location && !plan.walkable(*e.location, sim.nav_clearance)) {
        throw ValidationError(field + "/location",
                              "event location of agent " + agent.id +
                                  " is not in walkable space");
      }
    }
  }
}

// ---------------------------------------------------------------- courtroom

Scenario build_courtroom() {
  Scenario s;
  s.name = "courtroom";
  s.description =
      "Three-hour hearing in a very poorly ventilated 8.9 x 5.6 x 3 m room; "
      "P1 is an infectious superspreader.";
  s.kind = ScenarioKind::courtroom;
  s.floorplan.height = 3.0;
  s.floorplan.rooms = {{"courtroom", {0.0, 0.0, 8.9, 5.6}}};
  s.params.ach = 0.23;
  s.simulation.clock_origin = 14 * kHour;
  s.simulation.duration = 3 * kHour;

  // Seats: the jury bench sits along the left wall with P2 and P4 1.5 m
  // either side of P1; P3 faces them across the room, P5 and P10 sit at a
  // similar, larger distance and the others along the far wall.
  const std::map<std::string, Point> seats = {
      {"P1", {1.2, 2.8}},  {"P2", {1.2, 4.3}},  {"P3", {5.85, 2.8}},
      {"P4", {1.2, 1.3}},  {"P5", {6.6, 4.9}},  {"P6", {8.3, 5.0}},
      {"P7", {8.3, 0.6}},  {"P8", {8.3, 2.1}},  {"P9", {8.3, 3.5}},
      {"P10", {6.6, 0.7}}};
  for (const auto& [id, p] : seats) s.places["seat_" + id] = {p};

  struct Block {
    double from, to;
    bool hearing;
  };
  const double h0 = 14 * kHour;
  auto at = [h0](int hh, int mm) { return hh * kHour + mm * kMinute - h0; };
  const std::vector<Block> blocks = {
      {at(14, 0), at(14, 5), false},  {at(14, 5), at(14, 23), true},
      {at(14, 23), at(14, 30), false}, {at(14, 30), at(14, 55), true},
      {at(14, 55), at(15, 10), false}, {at(15, 10), at(15, 44), true},
      {at(15, 44), at(15, 50), false}, {at(15, 50), at(17, 0), true}};

  const std::map<std::string, Activity> hearing = {
      {"P1", Activity::talking},        {"P2", Activity::talking_loudly},
      {"P3", Activity::resting},        {"P4", Activity::talking},
      {"P5", Activity::talking_loudly}, {"P6", Activity::resting},
      {"P7", Activity::resting},        {"P8", Activity::talking_loudly},
      {"P9", Activity::resting},        {"P10", Activity::resting}};

  for (int i = 1; i <= 10; ++i) {
    Agent a;
    a.id = "P" + std::to_string(i);
    a.infectious = a.superspreader = i == 1;
    const Point seat = seats.at(a.id);
    const std::string place = "seat_" + a.id;
    for (const Block& b : blocks) {
      Event e;
      e.start = b.from;
      e.end = b.to;
      e.place = place;
      const bool jury = i <= 4;
      const bool present =
          i == 10 ? (b.from >= at(15, 10) && b.to <= at(15, 44)) : (jury || b.hearing);
      if (present) {
        e.location = seat;
        e.activity = b.hearing ? hearing.at(a.id) : Activity::talking;
        e.label = b.hearing ? "hearing" : "break";
      } else {
        e.place = "away";
        e.label = "away";
      }
      // Merge with the previous event when nothing changes.
      if (!a.schedule.empty()) {
        Event& last = a.schedule.back();
        if (last.location == e.location && last.activity == e.activity &&
            last.place == e.place && last.label == e.label) {
          last.end = e.end;
          continue;
        }
      }
      a.schedule.push_back(e);
    }
    s.agents.push_back(std::move(a));
  }
  return s;
}

// ---------------------------------------------------------------- care home

Scenario build_care_home() {
  Scenario s;
  s.name = "care_home";
  s.description =
      "Section of a care home (14 x 13 x 3 m): five bedrooms, a corridor and "
      "two common rooms; six residents, P1 an infectious superspreader.";
  s.kind = ScenarioKind::care_home;
  s.floorplan.height = 3.0;
  // Bedrooms along the top, a corridor, common rooms at the bottom corners.
  // The strip between the common rooms is outside the modelled section.
  auto& rooms = s.floorplan.rooms;
  for (int b = 0; b < 5; ++b) {
    rooms.push_back({"BR" + std::to_string(b + 1), {2.8 * b, 8.0, 2.8, 5.0}});
  }
  rooms.push_back({"corridor", {0.0, 5.0, 14.0, 3.0}});
  rooms.push_back({"CR1", {0.0, 0.0, 4.8, 5.0}});
  rooms.push_back({"CR2", {9.2, 0.0, 4.8, 5.0}});
  for (int b = 0; b < 5; ++b) {
    // Bedroom doors are kept shut: walkable, closed to aerosol.
    s.floorplan.doors.push_back(
        {"door_BR" + std::to_string(b + 1), {2.8 * b + 1.4, 8.0}, 0.9, false});
  }
  s.floorplan.doors.push_back({"door_CR1", {3.8, 5.0}, 1.2, true});
  s.floorplan.doors.push_back({"door_CR2", {10.2, 5.0}, 1.2, true});

  s.params.ach = 0.12;
  s.params.diffusion_volume = 72.0;  // common-room volume
  s.simulation.clock_origin = 8 * kHour;
  s.simulation.duration = 15 * kHour;

  // Four armchairs per common room; CR2 mirrors CR1.
  const std::vector<Point> chairs = {{1.0, 1.0}, {3.8, 1.0}, {1.0, 4.0}, {3.8, 4.0}};
  for (const Point& c : chairs) {
    s.places["CR1"].push_back(c);
    s.places["CR2"].push_back({14.0 - c.x, c.y});
  }
  // Each resident keeps one armchair index in either room; the indices are
  // distinct within every gathering and nobody takes P1's chair.
  const std::map<std::string, std::size_t> chair_of = {
      {"P1", 0}, {"P2", 1}, {"P3", 2}, {"P4", 2}, {"P5", 1}, {"P6", 3}};
  const std::map<std::string, std::pair<std::string, Point>> beds = {
      {"P1", {"BR1", {1.4, 11.5}}}, {"P2", {"BR2", {4.2, 11.5}}},
      {"P3", {"BR3", {7.0, 11.5}}}, {"P4", {"BR4", {9.8, 11.5}}},
      {"P5", {"BR5", {11.9, 11.5}}}, {"P6", {"BR5", {13.3, 11.5}}}};
  for (const auto& [id, bed] : beds) {
    auto& seats = s.places[bed.first];
    seats.push_back(bed.second);
  }

  struct Session {
    double from, to;
    std::vector<std::string> cr1, cr2;
  };
  const double h0 = 8 * kHour;
  auto at = [h0](int hh) { return hh * kHour - h0; };
  const std::vector<Session> sessions = {
      {at(9), at(12), {"P1", "P3", "P5"}, {"P2", "P4", "P6"}},
      {at(14), at(17), {"P1", "P2", "P3"}, {"P4", "P5", "P6"}},
      {at(17), at(20), {"P4", "P5", "P6"}, {"P1", "P2", "P3"}}};

  for (int i = 1; i <= 6; ++i) {
    Agent a;
    a.id = "P" + std::to_string(i);
    a.infectious = a.superspreader = i == 1;
    const auto& bed = beds.at(a.id);
    a.home = Home{bed.second, Activity::resting, bed.first};
    std::vector<Event> visits;
    for (const Session& ss : sessions) {
      for (const auto& [room, members] :
           {std::pair{"CR1", &ss.cr1}, std::pair{"CR2", &ss.cr2}}) {
        if (std::find(members->begin(), members->end(), a.id) == members->end()) {
          continue;
        }
        visits.push_back({s.places.at(room)[chair_of.at(a.id)], ss.from, ss.to,
                          Activity::talking, room, "common room"});
      }
    }
    a.schedule = fill_from_home(*a.home, visits, 0.0, s.simulation.duration);
    s.agents.push_back(std::move(a));
  }
  return s;
}

// -------------------------------------------------------------- supermarket

Scenario build_supermarket() {
  Scenario s;
  s.name = "supermarket";
  s.description =
      "Small 14 x 14 x 3 m supermarket open 08:00-12:00 with one customer per "
      "minute; every sixth customer is infectious.";
  s.kind = ScenarioKind::supermarket;
  s.floorplan.height = 3.0;
  s.floorplan.rooms = {{"store", {0.0, 0.0, 14.0, 14.0}}};
  s.floorplan.doors = {{"entrance", {1.5, 0.0}, 1.6, true}};
  // Three double-sided shelving units form four aisles; shelves and
  // checkout counters are below head height and only block walking.
  const std::array<double, 3> shelf_x = {3.0, 6.5, 10.0};
  for (std::size_t k = 0; k < shelf_x.size(); ++k) {
    s.floorplan.obstacles.push_back(
        {"shelf_" + std::to_string(k + 1), {shelf_x[k], 5.0, 1.0, 7.0}, false});
  }
  const std::array<double, 4> counter_x = {4.0, 6.5, 9.0, 11.5};
  SupermarketConfig cfg;
  for (std::size_t k = 0; k < counter_x.size(); ++k) {
    s.floorplan.obstacles.push_back(
        {"checkout_" + std::to_string(k + 1), {counter_x[k], 1.0, 0.6, 1.8}, false});
    cfg.checkouts.push_back({counter_x[k] - 0.5, 1.9});
  }
  cfg.open_checkouts = {0, 3};  // the middle two are closed
  cfg.entrance = {1.5, 0.6};
  cfg.queue = {7.8, 3.6};
  cfg.shelves = {"shelf_1", "shelf_2", "shelf_3"};
  // Shoppers talk while browsing and raise their voice across the counter.
  cfg.browse_activity = Activity::talking;
  cfg.checkout_activity = Activity::talking_loudly;
  cfg.queue_activity = Activity::talking;

  s.params.ach = 0.12;
  s.simulation.clock_origin = 8 * kHour;
  s.simulation.duration = 4 * kHour;
  s.simulation.seed = 1;
  // Item locations are many; only nearby key nodes are linked directly.
  s.simulation.nav_key_link_radius = 1.5;
  s.supermarket = cfg;
  return generate_supermarket(s, s.simulation.seed);
}

namespace {

// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

Point shelf_point(std::mt19937_64& rng, const std::vector<Rect>& shelves,
                  double standoff, const FloorPlan& plan, double clearance) {
  double total = 0.0;
  for (const Rect& r : shelves) total += 2.0 * (r.width + r.length);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    double u = uniform01(rng) * total;
    for (const Rect& r : shelves) {
      const double perim = 2.0 * (r.width + r.length);
      if (u >= perim) {
        u -= perim;
        continue;
      }
      Point p;
      if (u < r.width) {
        p = {r.x + u, r.y - standoff};
      } else if (u < r.width + r.length) {
        p = {r.x_max() + standoff, r.y + (u - r.width)};
      } else if (u < 2.0 * r.width + r.length) {
        p = {r.x_max() - (u - r.width - r.length), r.y_max() + standoff};
      } else {
        p = {r.x - standoff, r.y_max() - (u - 2.0 * r.width - r.length)};
      }
      if (plan.walkable(p, clearance)) return p;
      break;
    }
  }
  throw ValidationError("/supermarket/shelves",
                        "no walkable item location next to the shelves");
}

}  // namespace

Scenario generate_supermarket(const Scenario& base, std::uint64_t seed) {
  if (!base.supermarket) {
    throw ValidationError("/supermarket", "scenario has no supermarket configuration");
  }
  const SupermarketConfig& cfg = *base.supermarket;
  cfg.validate();
  Scenario s = base;
  s.simulation.seed = seed;
  s.agents.clear();
  const FloorPlan plan = FloorPlan::build(s.floorplan);
  const NavOptions nav = s.simulation.nav_options();

  std::vector<Waypoint> keys = {{"entrance", cfg.entrance}, {"queue", cfg.queue}};
  for (std::size_t c = 0; c < cfg.checkouts.size(); ++c) {
    keys.push_back({"checkout " + std::to_string(c + 1), cfg.checkouts[c]});
  }
  const NavGraph graph = NavGraph::build(plan, keys, nav);
  auto travel = [&](Point a, Point b) { return graph.route(a, b).length / cfg.speed; };

  std::vector<Rect> shelves;
  for (const auto& name : cfg.shelves) {
    const auto it = std::find_if(plan.obstacles().begin(), plan.obstacles().end(),
                                 [&](const Obstacle& o) { return o.name == name; });
    if (it == plan.obstacles().end()) {
      throw ValidationError("/supermarket/shelves", "unknown shelf '" + name + "'");
    }
    shelves.push_back(it->bounds);
  }

  std::mt19937_64 rng(seed);
  std::vector<double> arrivals;
  const double gap = kMinute / cfg.arrival_rate;
  if (cfg.poisson_arrivals) {
    for (double t = -gap * std::log1p(-uniform01(rng)); t < cfg.arrivals_end;
         t += -gap * std::log1p(-uniform01(rng))) {
      arrivals.push_back(t);
    }
  } else {
    const auto n = static_cast<std::size_t>(std::floor(cfg.arrivals_end / gap + 1e-9));
    for (std::size_t k = 0; k < n; ++k) arrivals.push_back(static_cast<double>(k) * gap);
  }

  const std::size_t n = arrivals.size();
  std::vector<bool> infectious(n, false);
  if (cfg.random_infectious) {
    const auto count = static_cast<std::size_t>(
        std::llround(cfg.infectious_fraction * static_cast<double>(n)));
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const auto j = k + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n - k));
      std::swap(order[k], order[j]);
    }
    for (std::size_t k = 0; k < count; ++k) infectious[order[k]] = true;
  } else if (cfg.infectious_fraction > 0.0) {
    const auto every = static_cast<std::size_t>(std::llround(1.0 / cfg.infectious_fraction));
    for (std::size_t k = 0; k < n; ++k) infectious[k] = every > 0 && (k + 1) % every == 0;
  }

  struct Shopper {
    Agent agent;
    double ready = 0.0;
    Point at;
  };
  std::vector<Shopper> shoppers(n);
  const int width = n >= 1000 ? 4 : 3;
  for (std::size_t k = 0; k < n; ++k) {
    Shopper& sh = shoppers[k];
    char id[32];
    std::snprintf(id, sizeof id, "C%0*zu", width, k + 1);
    sh.agent.id = id;
    sh.agent.infectious = infectious[k];
    sh.agent.mask = cfg.mask;
    sh.agent.speed = cfg.speed;
    const double t0 = arrivals[k];
    sh.agent.schedule.push_back({cfg.entrance, t0, t0 + cfg.entry_duration,
                                 cfg.browse_activity, "entrance", "enter"});
    double t = t0 + cfg.entry_duration;
    Point at = cfg.entrance;
    for (int item = 0; item < cfg.items; ++item) {
      const Point p = shelf_point(rng, shelves, cfg.shelf_standoff, plan, nav.clearance);
      const double start = t + travel(at, p);
      const double dwell = uniform(rng, cfg.dwell_min, cfg.dwell_max);
      sh.agent.schedule.push_back({p, start, start + dwell, cfg.browse_activity,
                                   "shelf", "item " + std::to_string(item + 1)});
      t = start + dwell;
      at = p;
    }
    sh.ready = t;
    sh.at = at;
  }

  // Checkouts are served in the order customers finish shopping.
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return shoppers[a].ready < shoppers[b].ready;
  });
  std::vector<double> free_at(cfg.checkouts.size(), 0.0);
  double last_exit = 0.0;
  for (std::size_t k : order) {
    Shopper& sh = shoppers[k];
    auto& ev = sh.agent.schedule;
    std::vector<int> idle;
    for (int c : cfg.open_checkouts) {
      if (free_at[c] <= sh.ready) idle.push_back(c);
    }
    double t = sh.ready;
    Point at = sh.at;
    if (idle.empty()) {
      double soonest = std::numeric_limits<double>::infinity();
      for (int c : cfg.open_checkouts) soonest = std::min(soonest, free_at[c]);
      const double queued = t + travel(at, cfg.queue);
      const double leave = std::max(soonest, queued);
      if (leave > queued) {
        ev.push_back({cfg.queue, queued, leave, cfg.queue_activity, "queue", "queue"});
        at = cfg.queue;
      }
      t = leave;
      // Among the checkouts free when the queue moves, pick uniformly.
      for (int c : cfg.open_checkouts) {
        if (free_at[c] <= t) idle.push_back(c);
      }
    }
    const int c = idle[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(idle.size()))];
    const double start = t + travel(at, cfg.checkouts[c]);
    const double pay = uniform(rng, cfg.checkout_min, cfg.checkout_max);
    ev.push_back({cfg.checkouts[c], start, start + pay, cfg.checkout_activity,
                  "checkout", "checkout " + std::to_string(c + 1)});
    free_at[c] = start + pay;
    const double out = start + pay + travel(cfg.checkouts[c], cfg.entrance);
    ev.push_back({cfg.entrance, out, out + cfg.entry_duration, cfg.browse_activity,
                  "entrance", "exit"});
    last_exit = std::max(last_exit, out + cfg.entry_duration);
  }
  for (auto& sh : shoppers) s.agents.push_back(std::move(sh.agent));
  // The span never shrinks, so regenerated variants share the base clock.
  s.simulation.duration = std::max({base.simulation.duration, cfg.arrivals_end,
                                    std::ceil(last_exit / kMinute) * kMinute});
  return s;
}

// ------------------------------------------------------------------ presets

std::vector<std::string> preset_names() {
  return {"courtroom", "care_home", "supermarket"};
}

Scenario build_preset(std::string_view name) {
  if (name == "courtroom") return build_courtroom();
  if (name == "care_home") return build_care_home();
  if (name == "supermarket") return build_supermarket();
  throw NotFoundError("unknown preset '" + std::string(name) + "'");
}

// ------------------------------------------------------------ interventions

bool EventSelector::matches(const Agent& agent, const Event& event) const {
  if (!places.empty() && !contains(places, event.place)) return false;
  if (!agents.empty() && !contains(agents, agent.id)) return false;
  if (start_from && event.start < *start_from - 1e-9) return false;
  if (start_to && event.start > *start_to + 1e-9) return false;
  return true;
}

Intervention Intervention::ventilation(double ach) {
  Intervention i;
  i.kind = InterventionKind::set_ventilation;
  i.ach = ach;
  return i;
}

Intervention Intervention::masks(MaskProfile mask) {
  Intervention i;
  i.kind = InterventionKind::set_masks;
  i.mask = mask;
  return i;
}

Intervention Intervention::remove(EventSelector select) {
  Intervention i;
  i.kind = InterventionKind::remove_events;
  i.select = std::move(select);
  return i;
}

Intervention Intervention::scale_durations(EventSelector select, double factor) {
  Intervention i;
  i.kind = InterventionKind::scale_event_durations;
  i.select = std::move(select);
  i.factor = factor;
  return i;
}

Intervention Intervention::shift_events(EventSelector select, double seconds) {
  Intervention i;
  i.kind = InterventionKind::shift_events;
  i.select = std::move(select);
  i.shift = seconds;
  return i;
}

Intervention Intervention::regroup(std::vector<std::vector<std::string>> groups,
                                   std::vector<std::string> places) {
  Intervention i;
  i.kind = InterventionKind::regroup_agents;
  i.groups = std::move(groups);
  i.group_places = std::move(places);
  return i;
}

Intervention Intervention::arrivals(double per_minute) {
  Intervention i;
  i.kind = InterventionKind::set_arrival_rate;
  i.arrival_rate = per_minute;
  return i;
}

Intervention Intervention::checkouts(std::vector<int> open) {
  Intervention i;
  i.kind = InterventionKind::set_open_checkouts;
  i.open_checkouts = std::move(open);
  return i;
}

namespace {

// Rewrites every agent's visits with `edit` and refills home time.
template <typename Edit>
void edit_visits(Scenario& s, Edit edit) {
  for (Agent& a : s.agents) {
    std::vector<Event> visits = visits_of(a);
    edit(a, visits);
    std::stable_sort(visits.begin(), visits.end(),
                     [](const Event& x, const Event& y) { return x.start < y.start; });
    a.schedule = a.home ? fill_from_home(*a.home, visits, 0.0, s.simulation.duration)
                        : visits;
  }
}

void require_supermarket(const Scenario& s, InterventionKind kind) {
  if (!s.supermarket) {
    throw ValidationError("/intervention/kind",
                          std::string(to_string(kind)) +
                              " applies only to supermarket scenarios");
  }
}

}  // namespace

Scenario apply_intervention(const Scenario& scenario, const Intervention& in) {
  Scenario s = scenario;
  switch (in.kind) {
    case InterventionKind::set_ventilation:
      if (!(in.ach >= 0.0)) throw ValidationError("/intervention/ach", "must be >= 0");
      s.params.ach = in.ach;
      break;
    case InterventionKind::set_masks:
      for (Agent& a : s.agents) a.mask = in.mask;
      if (s.supermarket) s.supermarket->mask = in.mask;
      break;
    case InterventionKind::remove_events:
      edit_visits(s, [&](const Agent& a, std::vector<Event>& v) {
        std::erase_if(v, [&](const Event& e) { return in.select.matches(a, e); });
      });
      break;
    case InterventionKind::scale_event_durations:
      if (!(in.factor > 0.0)) {
        throw ValidationError("/intervention/factor", "must be positive");
      }
      if (s.supermarket) {
        auto& cfg = *s.supermarket;
        cfg.dwell_min *= in.factor;
        cfg.dwell_max *= in.factor;
        cfg.checkout_min *= in.factor;
        cfg.checkout_max *= in.factor;
        s = generate_supermarket(s, s.simulation.seed);
        break;
      }
      edit_visits(s, [&](const Agent& a, std::vector<Event>& v) {
        for (Event& e : v) {
          if (in.select.matches(a, e)) e.end = e.start + in.factor * e.duration();
        }
      });
      break;
    case InterventionKind::shift_events:
      edit_visits(s, [&](const Agent& a, std::vector<Event>& v) {
        for (Event& e : v) {
          if (!in.select.matches(a, e)) continue;
          e.start += in.shift;
          e.end += in.shift;
        }
      });
      break;
    case InterventionKind::regroup_agents: {
      if (in.groups.size() != in.group_places.size()) {
        throw ValidationError("/intervention/places", "need one place per group");
      }
      std::map<std::string, std::pair<std::string, std::size_t>> seat_of;
      for (std::size_t g = 0; g < in.groups.size(); ++g) {
        const auto it = s.places.find(in.group_places[g]);
        if (it == s.places.end()) {
          throw ValidationError("/intervention/places",
                                "unknown place '" + in.group_places[g] + "'");
        }
        if (it->second.size() < in.groups[g].size()) {
          throw ValidationError("/intervention/groups",
                                "place '" + in.group_places[g] + "' has too few seats");
        }
        for (std::size_t j = 0; j < in.groups[g].size(); ++j) {
          seat_of[in.groups[g][j]] = {in.group_places[g], j};
        }
      }
      edit_visits(s, [&](const Agent& a, std::vector<Event>& v) {
        const auto it = seat_of.find(a.id);
        if (it == seat_of.end()) return;
        for (Event& e : v) {
          if (!contains(in.group_places, e.place)) continue;
          // Keep the seat index the agent had in its original place.
          const auto& from = s.places.at(e.place);
          const auto& to = s.places.at(it->second.first);
          const auto seat = std::find(from.begin(), from.end(), e.location.value_or(Point{}));
          auto index = static_cast<std::size_t>(seat - from.begin());
          if (seat == from.end() || index >= to.size()) index = it->second.second;
          e.place = it->second.first;
          e.location = to[index];
        }
      });
      break;
    }
    case InterventionKind::set_arrival_rate:
      require_supermarket(s, in.kind);
      s.supermarket->arrival_rate = in.arrival_rate;
      s = generate_supermarket(s, s.simulation.seed);
      break;
    case InterventionKind::set_open_checkouts:
      require_supermarket(s, in.kind);
      s.supermarket->open_checkouts = in.open_checkouts;
      s = generate_supermarket(s, s.simulation.seed);
      break;
  }
  validate_structure(s);
  return s;
}

std::vector<NamedIntervention> npi_catalog(const Scenario& s) {
  const auto ventilation = NamedIntervention{
      "I", "improve ventilation from 0.12 to 3 ACH", Intervention::ventilation(3.0)};
  const auto masks = NamedIntervention{
      "II", "everyone wears a surgical mask",
      Intervention::masks(MaskProfile::of(MaskKind::surgical))};
  switch (s.kind) {
    case ScenarioKind::care_home: {
      EventSelector common;
      common.places = {"CR1", "CR2"};
      EventSelector evening = common;
      evening.start_from = evening.start_to = 17 * kHour - s.simulation.clock_origin;
      return {ventilation,
              masks,
              {"III", "no common room time", Intervention::remove(common)},
              {"IV", "common room time halved", Intervention::scale_durations(common, 0.5)},
              {"V", "no common room 17:00-19:00, last gathering moved to 19:00-22:00",
               Intervention::shift_events(evening, 2 * kHour)},
              {"VI", "two fixed social groups of three",
               Intervention::regroup({{"P1", "P2", "P3"}, {"P4", "P5", "P6"}},
                                     {"CR1", "CR2"})}};
    }
    case ScenarioKind::supermarket:
      return {ventilation,
              masks,
              {"III", "half as many customers", Intervention::arrivals(0.5)},
              {"IV", "shopping and checkout times halved",
               Intervention::scale_durations({}, 0.5)},
              {"V", "all four checkouts open", Intervention::checkouts({0, 1, 2, 3})}};
    case ScenarioKind::courtroom:
    case ScenarioKind::custom:
      return {ventilation, masks};
  }
  return {};
}

NamedIntervention find_npi(const Scenario& s, std::string_view name) {
  const auto catalog = npi_catalog(s);
  std::string valid;
  for (const auto& n : catalog) {
    if (n.name == name) return n;
    valid += (valid.empty() ? "" : ", ") + n.name;
  }
  throw ValidationError("npi", "unknown intervention '" + std::string(name) +
                                   "' for " + std::string(to_string(s.kind)) +
                                   "; valid kinds: " + valid);
}

}  // namespace aerosim
