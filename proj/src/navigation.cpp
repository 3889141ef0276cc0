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

#include "aerosim/navigation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <unordered_map>

#include "aerosim/error.hpp"

namespace aerosim {
namespace {

constexpr double kSameNode = 1e-9;
constexpr double kGeomTol = 1e-9;

bool approx_equal(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

// (length, hops) compared with a relative tolerance on length.
bool better(double d1, int h1, double d2, int h2) {
  if (!approx_equal(d1, d2)) return d1 < d2;
  return h1 < h2;
}

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

NavGraph NavGraph::from_edges(std::vector<Point> nodes,
                              const std::vector<std::pair<int, int>>& edges) {
  NavGraph g;
  g.nodes_ = std::move(nodes);
  g.adj_.assign(g.nodes_.size(), {});
  const int n = static_cast<int>(g.nodes_.size());
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) {
      throw ValidationError("edges", "edge endpoint out of range");
    }
    const double len = distance(g.nodes_[a], g.nodes_[b]);
    g.edges_.push_back({a, b, len});
    g.adj_[a].emplace_back(b, len);
    g.adj_[b].emplace_back(a, len);
  }
  return g;
}

NavGraph NavGraph::build(const FloorPlan& plan,
                         const std::vector<Waypoint>& event_locations,
                         const NavOptions& options) {
  if (!(options.spacing > 0.0) || !(options.clearance >= 0.0) ||
      !(options.link_radius > 0.0)) {
    throw ValidationError("navigation", "spacing and link radius must be positive");
  }
  NavGraph g;
  g.plan_ = plan;
  g.options_ = options;

  const Rect box = plan.bounding_box();
  const int nx = static_cast<int>(std::floor(box.width / options.spacing));
  const int ny = static_cast<int>(std::floor(box.length / options.spacing));
  std::vector<int> grid_id(static_cast<std::size_t>(std::max(nx, 0)) *
                               std::max(ny, 0),
                           -1);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Point p{box.x + (i + 0.5) * options.spacing,
                    box.y + (j + 0.5) * options.spacing};
      if (!plan.walkable(p, options.clearance)) continue;
      grid_id[static_cast<std::size_t>(j) * nx + i] =
          static_cast<int>(g.nodes_.size());
      g.nodes_.push_back(p);
    }
  }
  g.grid_nodes_ = g.nodes_.size();

  const int first_key = static_cast<int>(g.nodes_.size());
  for (const auto& [a, b] : plan.door_gaps()) {
    const Point mid = 0.5 * (a + b);
    g.door_mids_.push_back(mid);
    g.door_nodes_.push_back(static_cast<int>(g.nodes_.size()));
    g.nodes_.push_back(mid);
  }
  std::vector<int> event_node;
  for (const auto& w : event_locations) {
    if (!plan.walkable(w.position, options.clearance)) {
      throw ValidationError(w.name, "event location is not in walkable space");
    }
    int id = -1;
    for (int k = first_key; k < static_cast<int>(g.nodes_.size()); ++k) {
      if (distance(g.nodes_[k], w.position) < kSameNode) {
        id = k;
        break;
      }
    }
    if (id < 0) {
      id = static_cast<int>(g.nodes_.size());
      g.nodes_.push_back(w.position);
    }
    event_node.push_back(id);
  }
  g.adj_.assign(g.nodes_.size(), {});

  auto link = [&g](int a, int b) {
    const double len = distance(g.nodes_[a], g.nodes_[b]);
    g.edges_.push_back({a, b, len});
    g.adj_[a].emplace_back(b, len);
    g.adj_[b].emplace_back(a, len);
  };

  const int reach = static_cast<int>(std::floor(options.link_radius / options.spacing));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = grid_id[static_cast<std::size_t>(j) * nx + i];
      if (a < 0) continue;
      for (int dj = 0; dj <= reach; ++dj) {
        for (int di = -reach; di <= reach; ++di) {
          if (dj == 0 && di <= 0) continue;
          const int ii = i + di, jj = j + dj;
          if (ii < 0 || ii >= nx || jj >= ny) continue;
          const int b = grid_id[static_cast<std::size_t>(jj) * nx + ii];
          if (b < 0) continue;
          if (distance(g.nodes_[a], g.nodes_[b]) > options.link_radius) continue;
          if (g.clear_segment(g.nodes_[a], g.nodes_[b])) link(a, b);
        }
      }
    }
  }

  const int n = static_cast<int>(g.nodes_.size());
  for (int k = first_key; k < n; ++k) {
    // Grid links, widening the search if nothing within the radius is seen.
    bool linked = false;
    for (double r = options.link_radius; !linked; r *= 2.0) {
      for (int a = 0; a < first_key; ++a) {
        const double d = distance(g.nodes_[a], g.nodes_[k]);
        if (d > r || (r > options.link_radius && d <= 0.5 * r)) continue;
        if (g.clear_segment(g.nodes_[a], g.nodes_[k])) {
          link(a, k);
          linked = true;
        }
      }
      if (r > box.width + box.length + options.link_radius) break;
    }
    for (int m = k + 1; m < n; ++m) {
      const double d = distance(g.nodes_[k], g.nodes_[m]);
      if (d > options.key_link_radius) continue;
      if (g.clear_segment(g.nodes_[k], g.nodes_[m])) link(k, m);
    }
  }

  std::vector<int> parent(g.nodes_.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (const Edge& e : g.edges_) {
    parent[find_root(parent, e.a)] = find_root(parent, e.b);
  }
  for (std::size_t i = 1; i < event_node.size(); ++i) {
    if (find_root(parent, event_node[i]) != find_root(parent, event_node[0])) {
      throw NoPathError("no walkable path between '" + event_locations[0].name +
                        "' and '" + event_locations[i].name + "'");
    }
  }
  return g;
}

std::optional<int> NavGraph::find_node(Point p) const {
  for (std::size_t k = grid_nodes_; k < nodes_.size(); ++k) {
    if (distance(nodes_[k], p) < kSameNode) return static_cast<int>(k);
  }
  for (std::size_t k = 0; k < grid_nodes_; ++k) {
    if (distance(nodes_[k], p) < kSameNode) return static_cast<int>(k);
  }
  return std::nullopt;
}

bool NavGraph::clear_segment(Point a, Point b) const {
  if (!plan_) return false;
  if (plan_->room_at(a) < 0 || plan_->room_at(b) < 0) return false;
  const double need = options_.clearance - kGeomTol;
  for (const auto& w : plan_->walls()) {
    if (segment_segment_distance(a, b, w.a, w.b) < need) return false;
  }
  for (const auto& o : plan_->obstacles()) {
    if (o.bounds.distance_to_segment(a, b) < need) return false;
  }
  const auto& gaps = plan_->door_gaps();
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (!segments_intersect(a, b, gaps[i].first, gaps[i].second)) continue;
    if (distance(a, door_mids_[i]) < kSameNode ||
        distance(b, door_mids_[i]) < kSameNode) {
      continue;
    }
    return false;
  }
  return true;
}

NavPath NavGraph::shortest_path(int from, int to) const {
  const int n = static_cast<int>(nodes_.size());
  if (from < 0 || to < 0 || from >= n || to >= n) {
    throw ValidationError("node", "node index out of range");
  }
  return search(from, to, {}, {});
}

std::vector<std::pair<int, double>> NavGraph::attach(Point p) const {
  std::vector<std::pair<int, double>> links;
  if (!plan_) return links;
  const Rect box = plan_->bounding_box();
  const double limit = box.width + box.length + options_.link_radius;
  double inner = -1.0;
  for (double r = options_.link_radius; links.empty() && inner < limit; r *= 2.0) {
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      const double d = distance(nodes_[k], p);
      if (d > r || d <= inner) continue;
      if (clear_segment(p, nodes_[k])) links.emplace_back(static_cast<int>(k), d);
    }
    inner = r;
  }
  return links;
}

NavPath NavGraph::route(Point from, Point to) const {
  NavPath path;
  if (distance(from, to) < kSameNode) {
    path.points = {from};
    path.nodes = {find_node(from).value_or(-1)};
    return path;
  }
  if (clear_segment(from, to)) {
    path.points = {from, to};
    path.nodes = {find_node(from).value_or(-1), find_node(to).value_or(-1)};
    path.length = distance(from, to);
    return path;
  }
  const auto a = find_node(from);
  const auto b = find_node(to);
  const int n = static_cast<int>(nodes_.size());
  std::vector<std::pair<int, double>> from_links, to_links;
  if (!a) {
    from_links = attach(from);
    if (from_links.empty()) throw NoPathError("start point sees no graph node");
  }
  if (!b) {
    to_links = attach(to);
    if (to_links.empty()) throw NoPathError("end point sees no graph node");
  }
  NavPath p = search(a.value_or(n), b.value_or(n + 1), from_links, to_links);
  p.points.front() = from;
  p.points.back() = to;
  return p;
}

NavPath NavGraph::search(int from, int to,
                         const std::vector<std::pair<int, double>>& from_links,
                         const std::vector<std::pair<int, double>>& to_links) const {
  const int n = static_cast<int>(nodes_.size());
  const int vfrom = n, vto = n + 1;
  std::unordered_map<int, double> to_virtual_from, to_virtual_to;
  for (const auto& [k, d] : from_links) to_virtual_from[k] = d;
  for (const auto& [k, d] : to_links) to_virtual_to[k] = d;

  auto for_neighbours = [&](int u, auto&& fn) {
    if (u == vfrom) {
      for (const auto& [k, d] : from_links) fn(k, d);
      return;
    }
    if (u == vto) {
      for (const auto& [k, d] : to_links) fn(k, d);
      return;
    }
    for (const auto& [k, d] : adj_[u]) fn(k, d);
    if (auto it = to_virtual_from.find(u); it != to_virtual_from.end()) {
      fn(vfrom, it->second);
    }
    if (auto it = to_virtual_to.find(u); it != to_virtual_to.end()) {
      fn(vto, it->second);
    }
  };

  NavPath path;
  auto position = [&](int u) {
    return u < n ? nodes_[u] : Point{};
  };
  if (from == to) {
    path.nodes = {from < n ? from : -1};
    path.points = {position(from)};
    return path;
  }

  // Distances to `to`; the forward walk from `from` then picks, among
  // optimal continuations, the lowest node index.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n + 2, inf);
  std::vector<int> hops(n + 2, std::numeric_limits<int>::max());
  std::vector<char> done(n + 2, 0);
  using Item = std::tuple<double, int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[to] = 0.0;
  hops[to] = 0;
  heap.emplace(0.0, 0, to);
  while (!heap.empty()) {
    const auto [d, h, u] = heap.top();
    heap.pop();
    if (done[u] || d != dist[u] || h != hops[u]) continue;
    done[u] = 1;
    if (u == from) break;
    for_neighbours(u, [&](int v, double w) {
      if (done[v]) return;
      const double nd = d + w;
      if (better(nd, h + 1, dist[v], hops[v])) {
        dist[v] = nd;
        hops[v] = h + 1;
        heap.emplace(nd, h + 1, v);
      }
    });
  }
  if (!done[from]) throw NoPathError("target unreachable from source");

  int u = from;
  path.nodes.push_back(u < n ? u : -1);
  path.points.push_back(position(u));
  while (u != to) {
    int next = -1;
    double step = 0.0;
    for_neighbours(u, [&](int v, double w) {
      if (!done[v] || hops[v] + 1 != hops[u]) return;
      if (!approx_equal(dist[v] + w, dist[u])) return;
      if (next < 0 || v < next) {
        next = v;
        step = w;
      }
    });
    if (next < 0) throw NoPathError("path reconstruction failed");
    path.length += step;
    u = next;
    path.nodes.push_back(u < n ? u : -1);
    path.points.push_back(position(u));
  }
  return path;
}

std::optional<Trajectory::State> Trajectory::state_at(double t) const {
  auto it = std::upper_bound(
      segments.begin(), segments.end(), t,
      [](double value, const TrajectorySegment& s) { return value < s.t0; });
  if (it == segments.begin()) return std::nullopt;
  const TrajectorySegment& s = *std::prev(it);
  if (!(t < s.t1)) return std::nullopt;
  const double span = s.t1 - s.t0;
  const double f = span > 0.0 ? (t - s.t0) / span : 0.0;
  return State{s.p0 + f * (s.p1 - s.p0), s.activity, s.moving};
}

std::optional<Point> Trajectory::position_at(double t) const {
  if (auto s = state_at(t)) return s->position;
  for (const auto& s : segments) {
    if (s.t1 == t) return s.p1;
  }
  return std::nullopt;
}

std::vector<std::pair<double, Point>> Trajectory::breakpoints() const {
  std::vector<std::pair<double, Point>> out;
  for (const auto& s : segments) {
    if (out.empty() || out.back().first != s.t0) out.emplace_back(s.t0, s.p0);
    out.emplace_back(s.t1, s.p1);
  }
  return out;
}

double Trajectory::start() const {
  return segments.empty() ? 0.0 : segments.front().t0;
}

double Trajectory::end() const {
  return segments.empty() ? 0.0 : segments.back().t1;
}

Trajectory schedule_to_trajectory(const Agent& agent, const NavGraph& graph,
                                  Activity transit) {
  agent.validate();
  Trajectory traj;
  auto stay = [&traj](double t0, double t1, Point p, Activity a) {
    if (t1 > t0) traj.segments.push_back({t0, t1, p, p, a, false});
  };
  const auto& ev = agent.schedule;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (!ev[i].present()) continue;
    const Point here = *ev[i].location;
    const bool next_present = i + 1 < ev.size() && ev[i + 1].present();
    if (!next_present) {
      stay(ev[i].start, ev[i].end, here, ev[i].activity);
      continue;
    }
    const Point there = *ev[i + 1].location;
    const double arrive = ev[i + 1].start;
    NavPath path;
    try {
      path = graph.route(here, there);
    } catch (const NoPathError& e) {
      throw InfeasibleScheduleError(agent.id, i, i + 1,
                                    "agent " + agent.id + ": no path from event " +
                                        std::to_string(i) + " to event " +
                                        std::to_string(i + 1) + ": " + e.what());
    }
    const double travel = path.length / agent.speed;
    const double depart = arrive - travel;
    if (depart < ev[i].start - 1e-9) {
      throw InfeasibleScheduleError(
          agent.id, i, i + 1,
          "agent " + agent.id + ": walking from event " + std::to_string(i) +
              " to event " + std::to_string(i + 1) + " takes " +
              std::to_string(travel) + " s, more than the time available");
    }
    stay(ev[i].start, depart, here, ev[i].activity);
    if (path.length <= 0.0) continue;
    double t = depart;
    double walked = 0.0;
    for (std::size_t k = 1; k < path.points.size(); ++k) {
      const double leg = distance(path.points[k - 1], path.points[k]);
      if (leg <= 0.0) continue;
      walked += leg;
      const double t_next =
          k + 1 == path.points.size() ? arrive : depart + walked / agent.speed;
      traj.segments.push_back(
          {t, t_next, path.points[k - 1], path.points[k], transit, true});
      t = t_next;
    }
  }
  return traj;
}

}  // namespace aerosim
