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

#ifndef AEROSIM_NAVIGATION_HPP_
#define AEROSIM_NAVIGATION_HPP_

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aerosim/agents.hpp"
#include "aerosim/geometry.hpp"

namespace aerosim {

struct NavOptions {
  // Auxiliary grid spacing; the scenario sets it to twice the mesh target.
  double spacing = 0.5;
  // Body-radius allowance kept from walls and obstacles.
  double clearance = 0.2;
  // Grid nodes link to grid or key nodes closer than this.
  double link_radius = 1.25;
  // Key nodes (events, doors) link to each other up to this distance.
  double key_link_radius = std::numeric_limits<double>::infinity();

  friend bool operator==(const NavOptions&, const NavOptions&) = default;
};

struct Waypoint {
  std::string name;
  Point position;
};

struct NavPath {
  std::vector<int> nodes;  // -1 for route endpoints that are not graph nodes
  std::vector<Point> points;
  double length = 0.0;
};

class NavGraph {
 public:
  struct Edge {
    int a;
    int b;
    double length;
  };

  // Nodes are the distinct event locations, interior door midpoints and the
  // walkable auxiliary grid. Throws ValidationError naming the waypoint if an
  // event location is not walkable, NoPathError if two event locations are
  // not connected.
  static NavGraph build(const FloorPlan& plan,
                        const std::vector<Waypoint>& event_locations,
                        const NavOptions& options = {});

  // Abstract graph with Euclidean edge lengths and no floor plan; route()
  // then only uses existing nodes.
  static NavGraph from_edges(std::vector<Point> nodes,
                             const std::vector<std::pair<int, int>>& edges);

  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::vector<std::pair<int, double>>>& adjacency() const {
    return adj_;
  }
  std::size_t num_grid_nodes() const { return grid_nodes_; }
  const std::vector<int>& door_nodes() const { return door_nodes_; }

  std::optional<int> find_node(Point p) const;

  // The straight segment keeps the clearance from every wall and obstacle and
  // crosses a door gap only if one endpoint is that door's node.
  bool clear_segment(Point a, Point b) const;

  // Minimum length; ties go to fewer nodes, then to the lexicographically
  // smallest node sequence. Throws NoPathError if unreachable.
  NavPath shortest_path(int from, int to) const;

  // Shortest walk between two walkable points: the straight segment when it
  // is clear, otherwise through the graph with both ends attached to the
  // nodes they can see.
  NavPath route(Point from, Point to) const;

 private:
  NavPath search(int from, int to,
                 const std::vector<std::pair<int, double>>& from_links,
                 const std::vector<std::pair<int, double>>& to_links) const;
  std::vector<std::pair<int, double>> attach(Point p) const;

  std::optional<FloorPlan> plan_;
  NavOptions options_;
  std::vector<Point> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
  std::size_t grid_nodes_ = 0;
  std::vector<int> door_nodes_;
  std::vector<Point> door_mids_;  // parallel to plan_->door_gaps()
};

struct TrajectorySegment {
  double t0 = 0.0;
  double t1 = 0.0;
  Point p0;
  Point p1;
  Activity activity = Activity::resting;
  bool moving = false;
};

// Piecewise-linear motion. Times not covered by any segment are absences.
class Trajectory {
 public:
  struct State {
    Point position;
    Activity activity;
    bool moving;
  };

  std::vector<TrajectorySegment> segments;  // sorted, non-overlapping

  // Present on [t0, t1) of each segment.
  std::optional<State> state_at(double t) const;
  // As state_at, but also defined at the closing instant of a present span.
  std::optional<Point> position_at(double t) const;
  // (time, position) at every segment boundary; strictly increasing times.
  std::vector<std::pair<double, Point>> breakpoints() const;
  double start() const;
  double end() const;
};

// The agent stays at each event location and leaves exactly path_length / v
// before the next event starts, arriving as it begins. Leaving may cut into
// the current event; leaving before the current event starts is infeasible.
// Absent events break the trajectory (no travel to or from them).
Trajectory schedule_to_trajectory(const Agent& agent, const NavGraph& graph,
                                  Activity transit = Activity::walking);

}  // namespace aerosim

#endif  // AEROSIM_NAVIGATION_HPP_
