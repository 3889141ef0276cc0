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

#include "aerosim/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "aerosim/error.hpp"

namespace aerosim {
namespace {

// Object view that remembers which keys were read, so leftovers can be
// reported as unknown.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ValidationError(where(), "expected an object");
  }

  std::string child(std::string_view key) const {
    return path_ + "/" + std::string(key);
  }
  std::string where() const { return path_.empty() ? "/" : path_; }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const Json& at(const std::string& key) {
    if (!has(key)) throw ValidationError(child(key), "required key is missing");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_number()) throw ValidationError(child(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(child(key), "must be finite");
    return d;
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }
  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_number_unsigned()) {
      throw ValidationError(child(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_number_integer()) throw ValidationError(child(key), "expected an integer");
    return v.get<int>();
  }

  std::string string(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_string()) throw ValidationError(child(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    return has(key) ? string(key) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) throw ValidationError(child(key), "expected true or false");
    return v.get<bool>();
  }

  const Json& array(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_array()) throw ValidationError(child(key), "expected an array");
    return v;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ValidationError(child(it.key()), "unknown key");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Point read_point(const Json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ValidationError(path, "expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

Json point_json(Point p) { return Json::array({p.x, p.y}); }

Activity read_activity(Reader& r, const std::string& key, Activity fallback) {
  if (!r.has(key)) return fallback;
  try {
    return parse_activity(r.string(key));
  } catch (const ValidationError& e) {
    throw ValidationError(r.child(key), e.what());
  }
}

MaskProfile read_mask(const Json& v, const std::string& path) {
  try {
    if (v.is_string()) return MaskProfile::of(parse_mask(v.get<std::string>()));
    Reader r(v, path);
    const MaskKind kind = parse_mask(r.string("kind"));
    const MaskProfile m = r.has("efficiency")
                              ? MaskProfile::custom(kind, r.number("efficiency"))
                              : MaskProfile::of(kind);
    r.finish();
    return m;
  } catch (const ValidationError& e) {
    if (e.field().starts_with(path)) throw;
    throw ValidationError(path, e.what());
  }
}

Json mask_json(const MaskProfile& m) {
  if (m == MaskProfile::of(m.kind)) return std::string(to_string(m.kind));
  return Json{{"kind", to_string(m.kind)}, {"efficiency", m.efficiency}};
}

// Seconds after the simulation start from "HH:MM[:SS]" or a number.
double read_time(Reader& r, const std::string& key, double origin) {
  const Json& v = r.at(key);
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) throw ValidationError(r.child(key), "expected \"HH:MM\" or seconds");
  try {
    return parse_clock(v.get<std::string>()) - origin;
  } catch (const ValidationError& e) {
    throw ValidationError(r.child(key), e.what());
  }
}

Json time_json(double t, double origin) {
  const std::string text = format_clock(origin + t);
  if (parse_clock(text) - origin == t) return text;
  return t;
}

Rect read_rect(Reader& r) {
  return {r.number("x"), r.number("y"), r.number("width"), r.number("length")};
}

FloorPlanSpec read_floorplan(const Json& j, const std::string& path) {
  Reader r(j, path);
  FloorPlanSpec spec;
  spec.height = r.number("height", 3.0);
  const Json& rooms = r.array("rooms");
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    Reader o(rooms[i], r.child("rooms") + "/" + std::to_string(i));
    spec.rooms.push_back({o.string("name"), read_rect(o)});
    o.finish();
  }
  if (r.has("doors")) {
    const Json& doors = r.array("doors");
    for (std::size_t i = 0; i < doors.size(); ++i) {
      Reader o(doors[i], r.child("doors") + "/" + std::to_string(i));
      Door d;
      d.name = o.string("name");
      d.centre = {o.number("x"), o.number("y")};
      d.width = o.number("width");
      d.aerosol_open = o.boolean("aerosol_open", true);
      spec.doors.push_back(d);
      o.finish();
    }
  }
  if (r.has("obstacles")) {
    const Json& obstacles = r.array("obstacles");
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      Reader o(obstacles[i], r.child("obstacles") + "/" + std::to_string(i));
      Obstacle ob;
      ob.name = o.string("name");
      ob.bounds = read_rect(o);
      ob.blocks_aerosol = o.boolean("blocks_aerosol", false);
      spec.obstacles.push_back(ob);
      o.finish();
    }
  }
  r.finish();
  return spec;
}

Json floorplan_json(const FloorPlanSpec& spec) {
  Json j;
  j["height"] = spec.height;
  auto rect = [](Json& o, const Rect& b) {
    o["x"] = b.x;
    o["y"] = b.y;
    o["width"] = b.width;
    o["length"] = b.length;
  };
  j["rooms"] = Json::array();
  for (const Room& room : spec.rooms) {
    Json o{{"name", room.name}};
    rect(o, room.bounds);
    j["rooms"].push_back(o);
  }
  j["doors"] = Json::array();
  for (const Door& d : spec.doors) {
    j["doors"].push_back({{"name", d.name},
                          {"x", d.centre.x},
                          {"y", d.centre.y},
                          {"width", d.width},
                          {"aerosol_open", d.aerosol_open}});
  }
  j["obstacles"] = Json::array();
  for (const Obstacle& ob : spec.obstacles) {
    Json o{{"name", ob.name}};
    rect(o, ob.bounds);
    o["blocks_aerosol"] = ob.blocks_aerosol;
    j["obstacles"].push_back(o);
  }
  return j;
}

ParameterSet read_params(const Json& j, const std::string& path) {
  Reader r(j, path);
  ParameterSet p;
  p.beta = r.number("beta", p.beta);
  p.gamma = r.number("gamma", p.gamma);
  p.ach = r.number("ach", p.ach);
  p.diffusion_volume = r.optional_number("diffusion_volume");
  p.diffusion = r.optional_number("diffusion");
  p.particle_diameter = r.number("particle_diameter", p.particle_diameter);
  p.cv_normal = r.number("cv_normal", p.cv_normal);
  p.cv_superspreader = r.number("cv_superspreader", p.cv_superspreader);
  p.mu_normal = r.optional_number("mu_normal");
  p.mu_superspreader = r.optional_number("mu_superspreader");
  p.median_dose = r.number("median_dose", p.median_dose);
  r.finish();
  return p;
}

Json params_json(const ParameterSet& p) {
  Json j;
  j["beta"] = p.beta;
  j["gamma"] = p.gamma;
  j["ach"] = p.ach;
  if (p.diffusion_volume) j["diffusion_volume"] = *p.diffusion_volume;
  if (p.diffusion) j["diffusion"] = *p.diffusion;
  j["particle_diameter"] = p.particle_diameter;
  j["cv_normal"] = p.cv_normal;
  j["cv_superspreader"] = p.cv_superspreader;
  if (p.mu_normal) j["mu_normal"] = *p.mu_normal;
  if (p.mu_superspreader) j["mu_superspreader"] = *p.mu_superspreader;
  j["median_dose"] = p.median_dose;
  return j;
}

SupermarketConfig read_supermarket(const Json& j, const std::string& path, double origin) {
  Reader r(j, path);
  SupermarketConfig c;
  c.arrival_rate = r.number("arrival_rate", c.arrival_rate);
  if (r.has("arrivals_end")) c.arrivals_end = read_time(r, "arrivals_end", origin);
  c.poisson_arrivals = r.boolean("poisson_arrivals", false);
  c.items = r.integer("items", c.items);
  auto range = [&](const std::string& key, double& lo, double& hi) {
    if (!r.has(key)) return;
    const Point p = read_point(r.at(key), r.child(key));
    lo = p.x;
    hi = p.y;
  };
  range("dwell", c.dwell_min, c.dwell_max);
  range("checkout_time", c.checkout_min, c.checkout_max);
  c.infectious_fraction = r.number("infectious_fraction", c.infectious_fraction);
  c.random_infectious = r.boolean("random_infectious", false);
  c.entrance = read_point(r.at("entrance"), r.child("entrance"));
  c.entry_duration = r.number("entry_duration", c.entry_duration);
  const Json& checkouts = r.array("checkouts");
  for (std::size_t i = 0; i < checkouts.size(); ++i) {
    c.checkouts.push_back(read_point(checkouts[i], r.child("checkouts") + "/" + std::to_string(i)));
  }
  const Json& open = r.array("open_checkouts");
  for (std::size_t i = 0; i < open.size(); ++i) {
    if (!open[i].is_number_integer()) {
      throw ValidationError(r.child("open_checkouts") + "/" + std::to_string(i),
                            "expected a checkout index");
    }
    c.open_checkouts.push_back(open[i].get<int>());
  }
  c.queue = read_point(r.at("queue"), r.child("queue"));
  if (r.has("shelves")) {
    const Json& shelves = r.array("shelves");
    for (std::size_t i = 0; i < shelves.size(); ++i) {
      if (!shelves[i].is_string()) {
        throw ValidationError(r.child("shelves") + "/" + std::to_string(i),
                              "expected an obstacle name");
      }
      c.shelves.push_back(shelves[i].get<std::string>());
    }
  }
  c.shelf_standoff = r.number("shelf_standoff", c.shelf_standoff);
  c.browse_activity = read_activity(r, "browse_activity", c.browse_activity);
  c.checkout_activity = read_activity(r, "checkout_activity", c.checkout_activity);
  c.queue_activity = read_activity(r, "queue_activity", c.queue_activity);
  if (r.has("mask")) c.mask = read_mask(r.at("mask"), r.child("mask"));
  c.speed = r.number("speed", c.speed);
  r.finish();
  return c;
}

Json supermarket_json(const SupermarketConfig& c, double origin) {
  Json j;
  j["arrival_rate"] = c.arrival_rate;
  j["arrivals_end"] = time_json(c.arrivals_end, origin);
  j["poisson_arrivals"] = c.poisson_arrivals;
  j["items"] = c.items;
  j["dwell"] = Json::array({c.dwell_min, c.dwell_max});
  j["checkout_time"] = Json::array({c.checkout_min, c.checkout_max});
  j["infectious_fraction"] = c.infectious_fraction;
  j["random_infectious"] = c.random_infectious;
  j["entrance"] = point_json(c.entrance);
  j["entry_duration"] = c.entry_duration;
  j["checkouts"] = Json::array();
  for (Point p : c.checkouts) j["checkouts"].push_back(point_json(p));
  j["open_checkouts"] = c.open_checkouts;
  j["queue"] = point_json(c.queue);
  j["shelves"] = c.shelves;
  j["shelf_standoff"] = c.shelf_standoff;
  j["browse_activity"] = to_string(c.browse_activity);
  j["checkout_activity"] = to_string(c.checkout_activity);
  j["queue_activity"] = to_string(c.queue_activity);
  j["mask"] = mask_json(c.mask);
  j["speed"] = c.speed;
  return j;
}

Agent read_agent(const Json& j, const std::string& path, double origin) {
  Reader r(j, path);
  Agent a;
  a.id = r.string("id");
  a.infectious = r.boolean("infectious", false);
  a.superspreader = r.boolean("superspreader", false);
  if (r.has("mask")) a.mask = read_mask(r.at("mask"), r.child("mask"));
  a.speed = r.number("speed", a.speed);
  if (r.has("home")) {
    Reader h(r.at("home"), r.child("home"));
    Home home;
    home.location = {h.number("x"), h.number("y")};
    home.activity = read_activity(h, "activity", Activity::resting);
    home.place = h.string("place", "home");
    h.finish();
    a.home = home;
  }
  const Json& schedule = r.array("schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    Reader e(schedule[i], r.child("schedule") + "/" + std::to_string(i));
    Event ev;
    const bool absent = e.boolean("absent", false);
    const bool located = e.has("x") || e.has("y");
    if (absent == located) {
      throw ValidationError(e.where(), "give either x and y or \"absent\": true");
    }
    if (located) ev.location = Point{e.number("x"), e.number("y")};
    ev.start = read_time(e, "start", origin);
    ev.end = read_time(e, "end", origin);
    ev.activity = read_activity(e, "activity", Activity::resting);
    ev.place = e.string("place", "");
    ev.label = e.string("label", "");
    e.finish();
    a.schedule.push_back(ev);
  }
  r.finish();
  return a;
}

Json agent_json(const Agent& a, double origin) {
  Json j;
  j["id"] = a.id;
  j["infectious"] = a.infectious;
  j["superspreader"] = a.superspreader;
  j["mask"] = mask_json(a.mask);
  j["speed"] = a.speed;
  if (a.home) {
    j["home"] = {{"x", a.home->location.x},
                 {"y", a.home->location.y},
                 {"activity", to_string(a.home->activity)},
                 {"place", a.home->place}};
  }
  j["schedule"] = Json::array();
  for (const Event& e : a.schedule) {
    Json o;
    if (e.location) {
      o["x"] = e.location->x;
      o["y"] = e.location->y;
    } else {
      o["absent"] = true;
    }
    o["start"] = time_json(e.start, origin);
    o["end"] = time_json(e.end, origin);
    o["activity"] = to_string(e.activity);
    if (!e.place.empty()) o["place"] = e.place;
    if (!e.label.empty()) o["label"] = e.label;
    j["schedule"].push_back(o);
  }
  return j;
}

void check_version(Reader& r) {
  const Json& v = r.at("version");
  if (!v.is_number_integer() || v.get<int>() != kScenarioVersion) {
    throw ValidationError(r.child("version"),
                          "unsupported version; expected " + std::to_string(kScenarioVersion));
  }
}

}  // namespace

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ValidationError("line " + std::to_string(line) + " column " +
                              std::to_string(column),
                          "malformed JSON");
  }
}

Json scenario_to_json(const Scenario& s) {
  const double origin = s.simulation.clock_origin;
  Json j;
  j["version"] = kScenarioVersion;
  j["name"] = s.name;
  j["description"] = s.description;
  j["kind"] = to_string(s.kind);
  j["floorplan"] = floorplan_json(s.floorplan);
  j["params"] = params_json(s.params);
  const SimulationSettings& sim = s.simulation;
  Json o;
  o["start"] = format_clock(origin);
  o["end"] = time_json(sim.duration, origin);
  o["dt"] = sim.dt;
  o["seed"] = sim.seed;
  o["target_edge"] = sim.target_edge;
  o["frame_every"] = sim.frame_every;
  o["threshold"] = sim.threshold;
  o["sink_per_height"] = sim.sink_per_height;
  o["transit_activity"] = to_string(sim.transit_activity);
  if (sim.nav_spacing) o["nav_spacing"] = *sim.nav_spacing;
  o["nav_clearance"] = sim.nav_clearance;
  if (std::isfinite(sim.nav_key_link_radius)) o["nav_key_link_radius"] = sim.nav_key_link_radius;
  j["simulation"] = o;
  Json places = Json::object();
  for (const auto& [name, seats] : s.places) {
    Json list = Json::array();
    for (Point p : seats) list.push_back(point_json(p));
    places[name] = list;
  }
  j["places"] = places;
  if (s.supermarket) {
    // Agents are regenerated from the configuration and the seed.
    j["supermarket"] = supermarket_json(*s.supermarket, origin);
  } else {
    j["agents"] = Json::array();
    for (const Agent& a : s.agents) j["agents"].push_back(agent_json(a, origin));
  }
  return j;
}

Scenario scenario_from_json(const Json& document) {
  Reader r(document, "");
  check_version(r);
  Scenario s;
  s.name = r.string("name", "scenario");
  s.description = r.string("description", "");
  if (r.has("kind")) {
    try {
      s.kind = parse_scenario_kind(r.string("kind"));
    } catch (const ValidationError& e) {
      throw ValidationError("/kind", e.what());
    }
  }
  s.floorplan = read_floorplan(r.at("floorplan"), "/floorplan");
  if (r.has("params")) s.params = read_params(r.at("params"), "/params");
  s.params.height = s.floorplan.height;

  Reader sim(r.at("simulation"), "/simulation");
  SimulationSettings& o = s.simulation;
  const Json& start = sim.at("start");
  if (!start.is_string()) throw ValidationError("/simulation/start", "expected \"HH:MM\"");
  try {
    o.clock_origin = parse_clock(start.get<std::string>());
  } catch (const ValidationError& e) {
    throw ValidationError("/simulation/start", e.what());
  }
  o.duration = read_time(sim, "end", o.clock_origin);
  o.dt = sim.number("dt", o.dt);
  o.seed = sim.unsigned_integer("seed", o.seed);
  o.target_edge = sim.number("target_edge", o.target_edge);
  o.frame_every = sim.number("frame_every", o.frame_every);
  o.threshold = sim.number("threshold", o.threshold);
  o.sink_per_height = sim.boolean("sink_per_height", o.sink_per_height);
  o.transit_activity = read_activity(sim, "transit_activity", o.transit_activity);
  o.nav_spacing = sim.optional_number("nav_spacing");
  o.nav_clearance = sim.number("nav_clearance", o.nav_clearance);
  o.nav_key_link_radius = sim.number("nav_key_link_radius", o.nav_key_link_radius);
  sim.finish();

  if (r.has("places")) {
    const Json& places = r.at("places");
    if (!places.is_object()) throw ValidationError("/places", "expected an object");
    for (auto it = places.begin(); it != places.end(); ++it) {
      const std::string path = "/places/" + it.key();
      if (!it.value().is_array()) throw ValidationError(path, "expected a list of [x, y]");
      auto& seats = s.places[it.key()];
      for (std::size_t i = 0; i < it.value().size(); ++i) {
        seats.push_back(read_point(it.value()[i], path + "/" + std::to_string(i)));
      }
    }
  }
  if (r.has("supermarket")) {
    s.supermarket = read_supermarket(r.at("supermarket"), "/supermarket", o.clock_origin);
  }
  if (r.has("agents")) {
    const Json& agents = r.array("agents");
    for (std::size_t i = 0; i < agents.size(); ++i) {
      s.agents.push_back(read_agent(agents[i], "/agents/" + std::to_string(i), o.clock_origin));
    }
  } else if (s.supermarket) {
    s = generate_supermarket(s, o.seed);
  }
  r.finish();
  validate_structure(s);
  return s;
}

Scenario parse_scenario(std::string_view text) {
  return scenario_from_json(parse_json(text));
}

std::string dump_scenario(const Scenario& s) {
  return scenario_to_json(s).dump(2) + "\n";
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open scenario file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

void save_scenario_file(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << dump_scenario(s);
  if (!out) throw Error("failed writing " + path.string());
}

Scenario apply_overrides(const Scenario& scenario, const RunOverrides& o) {
  Scenario s = scenario;
  if (o.dt) s.simulation.dt = *o.dt;
  if (o.target_edge) s.simulation.target_edge = *o.target_edge;
  if (o.threshold) s.simulation.threshold = *o.threshold;
  if (o.frame_every) s.simulation.frame_every = *o.frame_every;
  if (o.seed) {
    s.simulation.seed = *o.seed;
    if (s.supermarket) s = generate_supermarket(s, *o.seed);
  }
  validate_structure(s);
  return s;
}

Scenario resolve_document(const Json& document) {
  if (!document.is_object()) throw ValidationError("/", "expected an object");
  if (!document.contains("preset")) return scenario_from_json(document);
  Reader r(document, "");
  check_version(r);
  Scenario s;
  try {
    s = build_preset(r.string("preset"));
  } catch (const NotFoundError& e) {
    throw ValidationError("/preset", e.what());
  }
  if (r.has("npi")) {
    const std::string npi = r.string("npi");
    try {
      s = apply_intervention(s, find_npi(s, npi).intervention);
    } catch (const ValidationError& e) {
      throw ValidationError("/npi", e.what());
    }
  }
  if (r.has("overrides")) {
    Reader o(r.at("overrides"), "/overrides");
    RunOverrides ov;
    ov.dt = o.optional_number("dt");
    ov.target_edge = o.optional_number("target_edge");
    if (o.has("seed")) ov.seed = o.unsigned_integer("seed", 0);
    ov.threshold = o.optional_number("threshold");
    ov.frame_every = o.optional_number("frame_every");
    o.finish();
    s = apply_overrides(s, ov);
  }
  r.finish();
  return s;
}

Scenario resolve_document(std::string_view text) {
  return resolve_document(parse_json(text));
}

Json transport_params_to_json(const TransportParams& p) {
  Json j;
  j["beta"] = p.beta;
  j["gamma"] = p.gamma;
  j["ach"] = p.ach;
  j["lambda"] = p.lambda;
  j["kappa"] = p.kappa;
  j["diffusion"] = p.diffusion;
  j["diffusion_volume"] = p.diffusion_volume;
  j["height"] = p.height;
  j["particle_diameter"] = p.particle_diameter;
  j["cv_normal"] = p.cv_normal;
  j["cv_superspreader"] = p.cv_superspreader;
  j["mu_normal"] = p.mu_normal;
  j["mu_superspreader"] = p.mu_superspreader;
  j["median_dose"] = p.median_dose;
  j["infectibility"] = p.infectibility;
  j["warnings"] = p.warnings;
  return j;
}

}  // namespace aerosim
